#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxkit/frame.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

inline const Vec3i kChunkDims(64, 64, 128);
constexpr double kChunkMinOccupancy = 0.005;
constexpr int kChunkMaxFrames = 5;

/// Input/target scan pair for self-supervised training: the input volume is
/// fused from a seeded subset of the frames, the target from all of them, on
/// the identical grid.
struct ScanPair {
  std::vector<int> input_frame_ids;  // subset, sorted
  TsdfVolume input_vol;
  TsdfVolume target_vol;
  std::uint64_t seed = 0;
};

struct ChunkSample {
  Vec3i origin_voxel = Vec3i(0, 0, 0);
  TsdfVolume input_chunk;
  TsdfVolume target_chunk;
  std::vector<int> frame_ids;  // up to kChunkMaxFrames, best overlap first
  double occupancy = 0.0;
};

/// Keeps ceil(keep_fraction * K) frames, chosen without replacement by the
/// seed, and fuses both volumes.
ScanPair make_pair(std::span<const RgbdFrame> frames, double keep_fraction,
                   std::uint64_t seed, const GridSpec& spec, int threads = 1);

/// Near-surface fraction of the input chunk: voxels with weight > 0 and
/// |tsdf| < truncation.
double chunk_occupancy(const TsdfVolume& input_chunk);

TsdfVolume crop_volume(const TsdfVolume& parent, const Vec3i& origin_voxel,
                       const Vec3i& dims);

/// Slides a 64x64x128 window over the pair at the given stride, keeping
/// windows with input occupancy >= 0.5% and attaching the best-overlapping
/// frames to each.
std::vector<ChunkSample> sample_chunks(const ScanPair& pair,
                                       const Vec3i& stride,
                                       std::span<const RgbdFrame> frames,
                                       int k = kChunkMaxFrames);

/// Ranks frames by IoU between the frame's back-projected depth (voxelized
/// into the chunk grid) and the chunk's near-surface voxels of the target
/// chunk; returns up to k frame ids with IoU > 0, ties broken by lower id.
std::vector<int> associate_frames(const ChunkSample& chunk,
                                  std::span<const RgbdFrame> frames,
                                  int k = kChunkMaxFrames);

}  // namespace voxkit
