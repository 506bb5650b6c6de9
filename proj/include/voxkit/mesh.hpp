#pragma once

#include <string>
#include <vector>

#include "voxkit/volume.hpp"

namespace voxkit {

struct ColoredMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> vertex_colors;  // rgb in [0, 1]
  std::vector<Vec3i> triangles;

  bool empty() const { return triangles.empty(); }
};

/// Classic 256-case Marching Cubes over cells of 8 neighboring voxel centers.
/// Cells with any unobserved corner (weight 0) emit no geometry, which leaves
/// open boundaries at observation frontiers. Vertices are placed by linear
/// interpolation of the distance values along cell edges and deduplicated per
/// grid edge; colors are sampled trilinearly at the vertex position.
ColoredMesh marching_cubes(const TsdfVolume& vol, double iso = 0.0);

/// Binary little-endian PLY with float positions and uchar rgb.
void save_ply(const ColoredMesh& mesh, const std::string& path);
ColoredMesh load_ply(const std::string& path);

}  // namespace voxkit
