#include "voxkit/geometry.hpp"

#include <cmath>

namespace voxkit {

std::string CameraView::check() const {
  if (!(fx > 0.0) || !(fy > 0.0)) return "focal length must be positive";
  if (width <= 0 || height <= 0) return "image dimensions must be positive";
  if (!(z_min > 0.0) || !(z_max > z_min)) return "need 0 < z_min < z_max";
  if (!pose.allFinite()) return "pose contains non-finite values";
  const Mat3 r = pose.topLeftCorner<3, 3>();
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
    return "rotation block is not orthonormal";
  if (r.determinant() < 0.0) return "rotation block is a reflection";
  if ((pose.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() >
      1e-12)
    return "bottom row must be (0, 0, 0, 1)";
  return {};
}

Mat4 CameraView::world_to_camera() const {
  // Rigid inverse: [R t]^-1 = [R^T  -R^T t].
  const Mat3 r = pose.topLeftCorner<3, 3>();
  const Vec3 t = pose.topRightCorner<3, 1>();
  Mat4 inv = Mat4::Identity();
  inv.topLeftCorner<3, 3>() = r.transpose();
  inv.topRightCorner<3, 1>() = -r.transpose() * t;
  return inv;
}

PixelProjection CameraView::project(const Vec3& world_point) const {
  const Mat4 w2c = world_to_camera();
  const Vec3 p = w2c.topLeftCorner<3, 3>() * world_point + w2c.topRightCorner<3, 1>();
  PixelProjection out;
  out.z = p.z();
  out.in_front = p.z() > 0.0;
  if (out.in_front) {
    out.u = fx * p.x() / p.z() + cx;
    out.v = fy * p.y() / p.z() + cy;
  }
  return out;
}

Vec3 CameraView::unproject(double u, double v, double z) const {
  const Vec3 cam((u - cx) / fx * z, (v - cy) / fy * z, z);
  return pose.topLeftCorner<3, 3>() * cam + pose.topRightCorner<3, 1>();
}

Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint) {
  Vec3 forward = target - eye;
  const double len = forward.norm();
  if (len < 1e-12) throw std::invalid_argument("look_at: eye equals target");
  forward /= len;
  Vec3 up = up_hint.normalized();
  if (std::abs(forward.dot(up)) > 1.0 - 1e-9) {
    up = std::abs(forward.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
  }
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);  // unit, completes the frame
  Mat4 pose = Mat4::Identity();
  pose.block<3, 1>(0, 0) = right;
  pose.block<3, 1>(0, 1) = down;
  pose.block<3, 1>(0, 2) = forward;
  pose.block<3, 1>(0, 3) = eye;
  return pose;
}

}  // namespace voxkit
