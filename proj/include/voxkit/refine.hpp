#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxkit/frame.hpp"
#include "voxkit/losses.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

struct RefineConfig {
  int iterations = 100;
  double lr_tsdf = -1.0;   // < 0 selects 0.1 * voxel_size
  double lr_color = 0.01;
  double w_g = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int views_per_step = 2;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  std::int64_t step = 0;

  explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. `state` must have the same length
/// as params/grads and carries the step count.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, double beta1, double beta2,
               double eps);

struct RefineResult {
  TsdfVolume volume;
  std::vector<LossReport> history;  // one entry per iteration
};

/// Gradient-descent refinement of a volume against target frames. The
/// distance and color fields are the optimization variables; integration
/// weights are not optimized. The returned volume treats every voxel as
/// observed: unobserved input voxels start at +truncation with mid-gray
/// color, so the optimizer may move geometry into them. Each step renders
/// `views_per_step` frames (seeded round-robin order), backpropagates the
/// reconstruction loss, applies Adam, and re-clamps the fields.
RefineResult refine_volume(const TsdfVolume& init,
                           std::span<const RgbdFrame> target_frames,
                           const TsdfVolume& target_vol,
                           const RefineConfig& cfg);

}  // namespace voxkit
