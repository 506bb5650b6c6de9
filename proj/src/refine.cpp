#include "voxkit/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "voxkit/render.hpp"
#include "voxkit/rng.hpp"

namespace voxkit {

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, double beta1, double beta2,
               double eps) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

RefineResult refine_volume(const TsdfVolume& init,
                           std::span<const RgbdFrame> target_frames,
                           const TsdfVolume& target_vol,
                           const RefineConfig& cfg) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("refine_volume: iterations must be >= 1");
  if (target_frames.empty())
    throw std::invalid_argument("refine_volume: no target frames");
  if (!init.same_grid(target_vol))
    throw std::invalid_argument("refine_volume: grid mismatch");
  if (!(cfg.lr_color > 0.0) || cfg.views_per_step < 1 ||
      cfg.adam_beta1 < 0.0 || cfg.adam_beta1 >= 1.0 || cfg.adam_beta2 < 0.0 ||
      cfg.adam_beta2 >= 1.0)
    throw std::invalid_argument("refine_volume: bad config");

  const double lr_tsdf =
      cfg.lr_tsdf > 0.0 ? cfg.lr_tsdf : 0.1 * init.voxel_size();

  RefineResult result;
  result.volume = init;
  TsdfVolume& vol = result.volume;
  // The prediction is a complete field: unobserved voxels become renderable
  // free space so the optimizer can pull surfaces into them.
  for (size_t i = 0; i < vol.num_voxels(); ++i) {
    if (vol.weight()[i] <= 0.0) {
      vol.tsdf()[i] = vol.truncation();
      vol.weight()[i] = 1.0;
      for (int c = 0; c < 3; ++c) vol.color()[3 * i + c] = 0.5;
    }
  }
  vol.clamp_fields();

  std::vector<size_t> order(target_frames.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(cfg.seed);
  rng.shuffle(order);

  AdamState tsdf_state(vol.num_voxels());
  AdamState color_state(3 * vol.num_voxels());
  size_t cursor = 0;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::vector<RgbdFrame> views;
    views.reserve(static_cast<size_t>(cfg.views_per_step));
    for (int j = 0; j < cfg.views_per_step; ++j) {
      views.push_back(target_frames[order[cursor]]);
      cursor = (cursor + 1) % order.size();
    }

    VolumeGradients grads(vol.dims());
    const LossReport report = reconstruction_loss(vol, target_vol, views,
                                                  cfg.w_g, &grads, cfg.threads);
    result.history.push_back(report);

    adam_step(vol.tsdf(), grads.d_tsdf, tsdf_state, lr_tsdf, cfg.adam_beta1,
              cfg.adam_beta2, cfg.adam_eps);
    adam_step(vol.color(), grads.d_color, color_state, cfg.lr_color,
              cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    vol.clamp_fields();
  }
  return result;
}

}  // namespace voxkit
