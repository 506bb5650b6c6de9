#pragma once

#include <span>

#include "voxkit/frame.hpp"
#include "voxkit/render.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

struct LossReport {
  double l_depth = 0.0;   // masked mean |depth - target depth|
  double l_color = 0.0;   // masked mean per-channel |Lab/100 difference|
  double l_geo3d = 0.0;   // masked mean |tsdf - target tsdf|
  double total = 0.0;     // w_g * l_geo3d + l_depth + l_color
  std::int64_t n_valid_pixels = 0;
  std::int64_t n_valid_voxels = 0;
};

struct MaskedLoss {
  double value = 0.0;
  std::int64_t count = 0;  // pixels (or voxels) that entered the mean
};

/// Mean absolute depth difference over pixels valid in both images; 0 when no
/// pixel qualifies.
MaskedLoss masked_l1_depth(const ImageF& depth, const ImageU8& valid,
                           const ImageF& target_depth,
                           const ImageU8& target_valid);

/// Mean absolute CIELAB difference (channels scaled by 1/100) over jointly
/// valid pixels, normalized by 3N.
MaskedLoss masked_l1_color(const ImageF& color, const ImageU8& valid,
                           const ImageF& target_color,
                           const ImageU8& target_valid);

/// Mean absolute distance-field difference over voxels observed in the
/// target; unobserved target voxels are masked out.
MaskedLoss tsdf_l1(const TsdfVolume& pred, const TsdfVolume& target);

/// Renders `pred` from every view, averages the per-view depth and color
/// losses, and adds w_g times the 3D term against `target_vol`. Target pixel
/// validity is depth > 0; target color shares the depth mask. When `grads`
/// is non-null, the full adjoint (including the Lab chain rule and the
/// masked 3D subgradient) is accumulated into it.
LossReport reconstruction_loss(const TsdfVolume& pred,
                               const TsdfVolume& target_vol,
                               std::span<const RgbdFrame> views, double w_g,
                               VolumeGradients* grads = nullptr,
                               int threads = 1);

}  // namespace voxkit
