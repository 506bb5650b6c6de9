#pragma once

#include <cstdint>
#include <span>

#include "voxkit/image.hpp"
#include "voxkit/mesh.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

/// Windowed SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1. The mean runs over positions where the full
/// window fits; multi-channel images average the per-channel scores. Images
/// must be at least 11x11.
double ssim(const ImageF& a, const ImageF& b);

struct IouRecall {
  double iou = 0.0;
  double recall = 0.0;
};

/// Voxelizes both meshes on a shared grid (a voxel is occupied when any
/// triangle overlaps its cube, by separating-axis tests) and compares the
/// occupied sets. Voxels whose center falls in unobserved space of `ignore`
/// (weight 0 or outside the mask volume) are excluded from all counts.
IouRecall voxel_iou_recall(const ColoredMesh& pred, const ColoredMesh& target,
                           double voxel_size,
                           const TsdfVolume* ignore = nullptr);

/// Area-weighted uniform surface samples, deterministic in the seed.
std::vector<Vec3> sample_mesh_points(const ColoredMesh& mesh, int n_samples,
                                     std::uint64_t seed);

/// Symmetric point-set Chamfer distance: the two directed mean
/// nearest-neighbor distances averaged with factor 1/2. Nearest neighbors
/// are exact (k-d tree).
double chamfer_points(std::span<const Vec3> a, std::span<const Vec3> b);

/// chamfer_points over fresh surface samples of both meshes.
double chamfer(const ColoredMesh& pred, const ColoredMesh& target,
               int n_samples = 30000, std::uint64_t seed = 0);

}  // namespace voxkit
