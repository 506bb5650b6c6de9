#pragma once

#include <span>

#include "voxkit/frame.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

/// Integrates one frame into the volume by weighted averaging. Each voxel
/// center is projected into the frame; with valid depth d at its pixel and
/// camera depth z, the signed distance d - z is folded in wherever it is not
/// deeper than -truncation behind the surface. Color joins only inside the
/// +-truncation band. Per-observation weight is 1.
void fuse_frame(TsdfVolume& vol, const RgbdFrame& frame, int threads = 1);

/// Sequential fuse_frame over all frames into a fresh volume on `spec`.
TsdfVolume fuse_scan(std::span<const RgbdFrame> frames, const GridSpec& spec,
                     int threads = 1);

/// Grid that covers the back-projection of every valid depth pixel, padded by
/// one truncation band plus one voxel on all sides.
GridSpec fit_grid(std::span<const RgbdFrame> frames, double voxel_size,
                  double truncation);

}  // namespace voxkit
