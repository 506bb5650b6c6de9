#include "voxkit/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "voxkit/parallel.hpp"

namespace voxkit {

void fuse_frame(TsdfVolume& vol, const RgbdFrame& frame, int threads) {
  const std::string why = frame.view.check();
  if (!why.empty()) throw std::invalid_argument("fuse_frame: " + why);
  if (frame.depth.width() != frame.view.width ||
      frame.depth.height() != frame.view.height)
    throw std::invalid_argument("fuse_frame: depth size != camera size");

  const Mat4 w2c = frame.view.world_to_camera();
  const Mat3 rot = w2c.topLeftCorner<3, 3>();
  const Vec3 trans = w2c.topRightCorner<3, 1>();
  const CameraView& cam = frame.view;
  const double trunc = vol.truncation();
  const Vec3i dims = vol.dims();
  const bool has_color = !frame.color.empty();

  // One voxel per unit of work; slabs of z keep writes disjoint.
  parallel_for(0, dims.z(), threads, [&](std::int64_t z0, std::int64_t z1) {
    for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
      for (int y = 0; y < dims.y(); ++y) {
        for (int x = 0; x < dims.x(); ++x) {
          const Vec3 world = vol.voxel_to_world(Vec3(x, y, z));
          const Vec3 pc = rot * world + trans;
          if (pc.z() <= 0.0) continue;
          const int u = static_cast<int>(
              std::lround(cam.fx * pc.x() / pc.z() + cam.cx));
          const int v = static_cast<int>(
              std::lround(cam.fy * pc.y() / pc.z() + cam.cy));
          if (!frame.depth.contains(u, v)) continue;
          const double d = frame.depth(u, v);
          if (d <= 0.0) continue;
          const double sdf = d - pc.z();
          if (sdf < -trunc) continue;
          const size_t i = vol.index(x, y, z);
          const double w = vol.weight()[i];
          vol.tsdf()[i] =
              (w * vol.tsdf()[i] + std::clamp(sdf, -trunc, trunc)) / (w + 1.0);
          if (has_color && std::abs(sdf) <= trunc) {
            for (int c = 0; c < 3; ++c) {
              vol.color()[3 * i + c] =
                  (w * vol.color()[3 * i + c] + frame.color(u, v, c)) /
                  (w + 1.0);
            }
          }
          vol.weight()[i] = w + 1.0;
        }
      }
    }
  });
}

TsdfVolume fuse_scan(std::span<const RgbdFrame> frames, const GridSpec& spec,
                     int threads) {
  if (frames.empty())
    throw std::invalid_argument("fuse_scan: empty frame list");
  TsdfVolume vol(spec);
  for (const RgbdFrame& f : frames) fuse_frame(vol, f, threads);
  return vol;
}

GridSpec fit_grid(std::span<const RgbdFrame> frames, double voxel_size,
                  double truncation) {
  if (frames.empty()) throw std::invalid_argument("fit_grid: empty frame list");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  bool any = false;
  for (const RgbdFrame& f : frames) {
    for (int y = 0; y < f.depth.height(); ++y) {
      for (int x = 0; x < f.depth.width(); ++x) {
        const double d = f.depth(x, y);
        if (d <= 0.0) continue;
        const Vec3 p = f.view.unproject(x, y, d);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
        any = true;
      }
    }
  }
  if (!any)
    throw std::runtime_error("fit_grid: no valid depth pixels in scan");
  const double pad = truncation + voxel_size;
  GridSpec spec;
  spec.voxel_size = voxel_size;
  spec.truncation = truncation;
  spec.origin = lo - Vec3::Constant(pad);
  const Vec3 extent = hi + Vec3::Constant(pad) - spec.origin;
  for (int i = 0; i < 3; ++i)
    spec.dims[i] = static_cast<int>(std::ceil(extent[i] / voxel_size)) + 1;
  return spec;
}

}  // namespace voxkit
