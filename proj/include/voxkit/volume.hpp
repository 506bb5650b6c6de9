#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxkit/geometry.hpp"

namespace voxkit {

enum class VolumeChannel { kTsdf, kColorR, kColorG, kColorB, kWeight };

struct GridSpec {
  Vec3i dims = Vec3i(0, 0, 0);
  double voxel_size = 0.02;
  Vec3 origin = Vec3::Zero();  // world position of voxel (0,0,0) center
  double truncation = 0.06;    // 3 voxels at the default resolution
};

struct Sample {
  double value = 0.0;
  bool valid = false;
};

// The 8-corner interpolation stencil around a world point. `in_grid` means
// every corner lies inside the grid; `observed` additionally requires every
// corner to carry nonzero integration weight. Weights always sum to 1 and are
// never renormalized over a subset of corners.
struct TrilinearStencil {
  bool in_grid = false;
  bool observed = false;
  Vec3i base = Vec3i(0, 0, 0);
  Vec3 frac = Vec3::Zero();
  std::array<size_t, 8> index{};
  std::array<double, 8> weight{};

  // d(weight[i]) / d(position), in units of 1 / voxel (multiply by
  // 1 / voxel_size for world-space derivatives).
  std::array<Vec3, 8> weight_gradient() const;
};

/// Dense truncated signed distance volume with per-voxel color and
/// integration weight. Values live at voxel centers; voxel (i,j,k) sits at
/// origin + voxel_size * (i,j,k). Storage is x-fastest.
class TsdfVolume {
 public:
  TsdfVolume() = default;
  explicit TsdfVolume(const GridSpec& spec);

  const Vec3i& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  const Vec3& origin() const { return origin_; }
  double truncation() const { return truncation_; }
  size_t num_voxels() const { return tsdf_.size(); }
  GridSpec grid() const { return {dims_, voxel_size_, origin_, truncation_}; }
  bool same_grid(const TsdfVolume& other, double tol = 1e-9) const;

  size_t index(int x, int y, int z) const {
    return static_cast<size_t>(x) +
           static_cast<size_t>(dims_.x()) *
               (static_cast<size_t>(y) + static_cast<size_t>(dims_.y()) * z);
  }
  bool in_grid(int x, int y, int z) const {
    return x >= 0 && x < dims_.x() && y >= 0 && y < dims_.y() && z >= 0 &&
           z < dims_.z();
  }

  std::vector<double>& tsdf() { return tsdf_; }
  const std::vector<double>& tsdf() const { return tsdf_; }
  std::vector<double>& weight() { return weight_; }
  const std::vector<double>& weight() const { return weight_; }
  std::vector<double>& color() { return color_; }  // 3 * num_voxels, rgb
  const std::vector<double>& color() const { return color_; }

  Vec3 voxel_to_world(const Vec3& voxel_coord) const {
    return origin_ + voxel_size_ * voxel_coord;
  }
  Vec3 world_to_voxel(const Vec3& p) const {
    return (p - origin_) / voxel_size_;
  }

  TrilinearStencil stencil_at(const Vec3& p) const;

  /// Trilinear blend of the 8 voxels around `p`. Invalid when a corner falls
  /// outside the grid, or (for tsdf/color) when a corner is unobserved.
  Sample sample_trilinear(const Vec3& p, VolumeChannel channel) const;

  double channel_value(VolumeChannel channel, size_t voxel) const;

  // Axis-aligned hull of the voxel-center lattice; sampling is only valid
  // strictly inside it.
  void lattice_bounds(Vec3& lo, Vec3& hi) const;

  // Clamp tsdf to [-truncation, truncation] and color to [0, 1] in place.
  void clamp_fields();

  void save(const std::string& path) const;
  static TsdfVolume load(const std::string& path);

 private:
  Vec3i dims_ = Vec3i(0, 0, 0);
  double voxel_size_ = 0.02;
  Vec3 origin_ = Vec3::Zero();
  double truncation_ = 0.06;
  std::vector<double> tsdf_;
  std::vector<double> weight_;
  std::vector<double> color_;
};

}  // namespace voxkit
