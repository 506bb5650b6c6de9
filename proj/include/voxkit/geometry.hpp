#pragma once

#include <Eigen/Dense>
#include <string>

namespace voxkit {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct PixelProjection {
  double u = 0.0;   // pixel column, principal ray lands on (cx, cy)
  double v = 0.0;   // pixel row
  double z = 0.0;   // camera-space depth
  bool in_front = false;  // z > 0
};

/// Pinhole camera: +z forward, +x right, +y down in camera space. `pose` maps
/// camera coordinates to world coordinates and must be a rigid transform.
struct CameraView {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  Mat4 pose = Mat4::Identity();  // camera-to-world
  double z_min = 0.1, z_max = 10.0;

  // Empty string when all invariants hold, otherwise a description of the
  // first violated one (orthonormal rotation, unit bottom row, fx/fy > 0,
  // 0 < z_min < z_max, positive image size).
  std::string check() const;
  bool valid() const { return check().empty(); }

  Mat4 world_to_camera() const;

  PixelProjection project(const Vec3& world_point) const;
  Vec3 unproject(double u, double v, double z) const;

  // Direction through pixel (u, v) in camera space, unnormalized (z = 1).
  Vec3 pixel_ray(double u, double v) const {
    return Vec3((u - cx) / fx, (v - cy) / fy, 1.0);
  }
};

// Camera-to-world pose looking from `eye` toward `target`; image "down"
// follows -up_hint. eye and target must not coincide.
Mat4 look_at(const Vec3& eye, const Vec3& target,
             const Vec3& up_hint = Vec3(0, 0, 1));

}  // namespace voxkit
