#include "voxkit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "voxkit/fusion.hpp"
#include "voxkit/rng.hpp"

namespace voxkit {

namespace {

bool near_surface(const TsdfVolume& vol, size_t i) {
  return vol.weight()[i] > 0.0 &&
         std::abs(vol.tsdf()[i]) < vol.truncation();
}

}  // namespace

ScanPair make_pair(std::span<const RgbdFrame> frames, double keep_fraction,
                   std::uint64_t seed, const GridSpec& spec, int threads) {
  if (frames.empty()) throw std::invalid_argument("make_pair: no frames");
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
    throw std::invalid_argument("make_pair: keep_fraction must be in (0, 1]");

  const size_t keep = static_cast<size_t>(
      std::ceil(keep_fraction * static_cast<double>(frames.size())));
  Rng rng(seed);
  const std::vector<size_t> chosen = rng.sample_indices(keep, frames.size());

  ScanPair pair;
  pair.seed = seed;
  std::vector<RgbdFrame> subset;
  subset.reserve(chosen.size());
  for (size_t i : chosen) {
    subset.push_back(frames[i]);
    pair.input_frame_ids.push_back(frames[i].frame_id);
  }
  pair.input_vol = fuse_scan(subset, spec, threads);
  pair.target_vol = fuse_scan(frames, spec, threads);
  return pair;
}

double chunk_occupancy(const TsdfVolume& input_chunk) {
  size_t near = 0;
  for (size_t i = 0; i < input_chunk.num_voxels(); ++i)
    if (near_surface(input_chunk, i)) ++near;
  return static_cast<double>(near) /
         static_cast<double>(input_chunk.num_voxels());
}

TsdfVolume crop_volume(const TsdfVolume& parent, const Vec3i& origin_voxel,
                       const Vec3i& dims) {
  if ((origin_voxel.array() < 0).any() ||
      ((origin_voxel + dims).array() > parent.dims().array()).any())
    throw std::invalid_argument("crop_volume: window outside parent grid");
  GridSpec spec;
  spec.dims = dims;
  spec.voxel_size = parent.voxel_size();
  spec.truncation = parent.truncation();
  spec.origin = parent.voxel_to_world(origin_voxel.cast<double>());
  TsdfVolume out(spec);
  for (int z = 0; z < dims.z(); ++z) {
    for (int y = 0; y < dims.y(); ++y) {
      for (int x = 0; x < dims.x(); ++x) {
        const size_t src = parent.index(origin_voxel.x() + x,
                                        origin_voxel.y() + y,
                                        origin_voxel.z() + z);
        const size_t dst = out.index(x, y, z);
        out.tsdf()[dst] = parent.tsdf()[src];
        out.weight()[dst] = parent.weight()[src];
        for (int c = 0; c < 3; ++c)
          out.color()[3 * dst + c] = parent.color()[3 * src + c];
      }
    }
  }
  return out;
}

std::vector<ChunkSample> sample_chunks(const ScanPair& pair,
                                       const Vec3i& stride,
                                       std::span<const RgbdFrame> frames,
                                       int k) {
  const Vec3i parent_dims = pair.input_vol.dims();
  if ((parent_dims.array() < kChunkDims.array()).any())
    throw std::invalid_argument("sample_chunks: grid smaller than chunk");
  if ((stride.array() <= 0).any())
    throw std::invalid_argument("sample_chunks: stride must be positive");

  std::vector<ChunkSample> chunks;
  for (int z = 0; z + kChunkDims.z() <= parent_dims.z(); z += stride.z()) {
    for (int y = 0; y + kChunkDims.y() <= parent_dims.y(); y += stride.y()) {
      for (int x = 0; x + kChunkDims.x() <= parent_dims.x(); x += stride.x()) {
        const Vec3i origin(x, y, z);
        TsdfVolume input = crop_volume(pair.input_vol, origin, kChunkDims);
        const double occ = chunk_occupancy(input);
        if (occ < kChunkMinOccupancy) continue;
        ChunkSample chunk;
        chunk.origin_voxel = origin;
        chunk.input_chunk = std::move(input);
        chunk.target_chunk = crop_volume(pair.target_vol, origin, kChunkDims);
        chunk.occupancy = occ;
        if (!frames.empty())
          chunk.frame_ids = associate_frames(chunk, frames, k);
        chunks.push_back(std::move(chunk));
      }
    }
  }
  return chunks;
}

std::vector<int> associate_frames(const ChunkSample& chunk,
                                  std::span<const RgbdFrame> frames, int k) {
  const TsdfVolume& vol = chunk.target_chunk;
  const size_t n = vol.num_voxels();
  std::vector<std::uint8_t> chunk_occ(n, 0);
  size_t chunk_count = 0;
  for (size_t i = 0; i < n; ++i) {
    if (near_surface(vol, i)) {
      chunk_occ[i] = 1;
      ++chunk_count;
    }
  }

  struct Scored {
    double iou;
    int frame_id;
  };
  std::vector<Scored> scored;
  std::vector<std::uint8_t> frame_occ(n);
  for (const RgbdFrame& f : frames) {
    std::fill(frame_occ.begin(), frame_occ.end(), 0);
    size_t frame_count = 0;
    for (int y = 0; y < f.depth.height(); ++y) {
      for (int x = 0; x < f.depth.width(); ++x) {
        const double d = f.depth(x, y);
        if (d <= 0.0) continue;
        const Vec3 g = vol.world_to_voxel(f.view.unproject(x, y, d));
        const int gx = static_cast<int>(std::lround(g.x()));
        const int gy = static_cast<int>(std::lround(g.y()));
        const int gz = static_cast<int>(std::lround(g.z()));
        if (!vol.in_grid(gx, gy, gz)) continue;
        std::uint8_t& cell = frame_occ[vol.index(gx, gy, gz)];
        if (!cell) {
          cell = 1;
          ++frame_count;
        }
      }
    }
    size_t inter = 0;
    for (size_t i = 0; i < n; ++i)
      if (frame_occ[i] && chunk_occ[i]) ++inter;
    const size_t uni = frame_count + chunk_count - inter;
    if (inter == 0 || uni == 0) continue;
    scored.push_back(
        {static_cast<double>(inter) / static_cast<double>(uni), f.frame_id});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return a.frame_id < b.frame_id;
  });
  std::vector<int> ids;
  for (const Scored& s : scored) {
    if (static_cast<int>(ids.size()) >= k) break;
    ids.push_back(s.frame_id);
  }
  return ids;
}

}  // namespace voxkit
