#include "voxkit/mesh.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "mc_tables.hpp"

namespace voxkit {

namespace {

// Cell corner offsets in the standard table order.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Each entry: corner index the edge starts at (lower grid coordinate), corner
// it ends at, and the axis it runs along.
constexpr int kEdge[12][3] = {{0, 1, 0}, {1, 2, 1}, {3, 2, 0}, {0, 3, 1},
                              {4, 5, 0}, {5, 6, 1}, {7, 6, 0}, {4, 7, 1},
                              {0, 4, 2}, {1, 5, 2}, {2, 6, 2}, {3, 7, 2}};

struct EdgeKey {
  int x, y, z, axis;
  bool operator==(const EdgeKey& o) const {
    return x == o.x && y == o.y && z == o.z && axis == o.axis;
  }
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& k) const {
    size_t h = static_cast<size_t>(k.x) * 73856093u ^
               static_cast<size_t>(k.y) * 19349663u ^
               static_cast<size_t>(k.z) * 83492791u ^
               static_cast<size_t>(k.axis) * 2654435761u;
    return h;
  }
};

}  // namespace

ColoredMesh marching_cubes(const TsdfVolume& vol, double iso) {
  ColoredMesh mesh;
  const Vec3i dims = vol.dims();
  std::unordered_map<EdgeKey, int, EdgeKeyHash> edge_vertex;

  for (int z = 0; z + 1 < dims.z(); ++z) {
    for (int y = 0; y + 1 < dims.y(); ++y) {
      for (int x = 0; x + 1 < dims.x(); ++x) {
        double f[8];
        bool observed = true;
        int cube = 0;
        for (int c = 0; c < 8 && observed; ++c) {
          const size_t idx = vol.index(x + kCorner[c][0], y + kCorner[c][1],
                                       z + kCorner[c][2]);
          if (vol.weight()[idx] <= 0.0) {
            observed = false;
            break;
          }
          f[c] = vol.tsdf()[idx];
          if (f[c] < iso) cube |= 1 << c;
        }
        if (!observed || kMcEdgeTable[cube] == 0) continue;

        int cell_vertex[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kMcEdgeTable[cube] & (1 << e))) continue;
          const int a = kEdge[e][0], b = kEdge[e][1], axis = kEdge[e][2];
          const EdgeKey key{x + kCorner[a][0], y + kCorner[a][1],
                            z + kCorner[a][2], axis};
          auto it = edge_vertex.find(key);
          if (it != edge_vertex.end()) {
            cell_vertex[e] = it->second;
            continue;
          }
          const double fa = f[a], fb = f[b];
          const double t = (iso - fa) / (fb - fa);
          Vec3 voxel_coord(key.x, key.y, key.z);
          voxel_coord[axis] += t;
          const Vec3 pos = vol.voxel_to_world(voxel_coord);
          Vec3 color = Vec3::Zero();
          for (int c = 0; c < 3; ++c) {
            const Sample s = vol.sample_trilinear(
                pos, static_cast<VolumeChannel>(
                         static_cast<int>(VolumeChannel::kColorR) + c));
            if (s.valid) color[c] = s.value;
          }
          cell_vertex[e] = static_cast<int>(mesh.vertices.size());
          edge_vertex.emplace(key, cell_vertex[e]);
          mesh.vertices.push_back(pos);
          mesh.vertex_colors.push_back(color);
        }

        for (int i = 0; kMcTriTable[cube][i] != -1; i += 3) {
          const int v0 = cell_vertex[kMcTriTable[cube][i]];
          const int v1 = cell_vertex[kMcTriTable[cube][i + 2]];
          const int v2 = cell_vertex[kMcTriTable[cube][i + 1]];
          if (v0 == v1 || v1 == v2 || v0 == v2) continue;
          mesh.triangles.emplace_back(v0, v1, v2);
        }
      }
    }
  }
  return mesh;
}

void save_ply(const ColoredMesh& mesh, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "ply\nformat binary_little_endian 1.0\n";
  os << "element vertex " << mesh.vertices.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  os << "element face " << mesh.triangles.size() << "\n";
  os << "property list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    float p[3] = {static_cast<float>(mesh.vertices[i].x()),
                  static_cast<float>(mesh.vertices[i].y()),
                  static_cast<float>(mesh.vertices[i].z())};
    os.write(reinterpret_cast<const char*>(p), sizeof(p));
    const Vec3& c = mesh.vertex_colors.empty() ? Vec3(0.5, 0.5, 0.5)
                                               : mesh.vertex_colors[i];
    std::uint8_t rgb[3];
    for (int k = 0; k < 3; ++k)
      rgb[k] = static_cast<std::uint8_t>(
          std::lround(std::clamp(c[k], 0.0, 1.0) * 255.0));
    os.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
  }
  for (const Vec3i& t : mesh.triangles) {
    const std::uint8_t n = 3;
    os.write(reinterpret_cast<const char*>(&n), 1);
    std::int32_t idx[3] = {t.x(), t.y(), t.z()};
    os.write(reinterpret_cast<const char*>(idx), sizeof(idx));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

ColoredMesh load_ply(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open PLY file: " + path);
  std::string line;
  std::getline(is, line);
  if (line != "ply") throw std::runtime_error("not a PLY file: " + path);

  size_t n_vertices = 0, n_faces = 0;
  bool has_color = false;
  bool binary_le = false;
  std::string element;
  std::vector<std::string> vertex_props;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (tok == "element") {
      ss >> element;
      if (element == "vertex") ss >> n_vertices;
      if (element == "face") ss >> n_faces;
    } else if (tok == "property" && element == "vertex") {
      std::string type, name;
      ss >> type >> name;
      vertex_props.push_back(type + ":" + name);
      if (name == "red") has_color = true;
    } else if (tok == "end_header") {
      break;
    }
  }
  if (!binary_le)
    throw std::runtime_error("unsupported PLY format (need binary LE): " +
                             path);
  // Only the layout written by save_ply is understood.
  const std::vector<std::string> expected =
      has_color ? std::vector<std::string>{"float:x", "float:y", "float:z",
                                           "uchar:red", "uchar:green",
                                           "uchar:blue"}
                : std::vector<std::string>{"float:x", "float:y", "float:z"};
  if (vertex_props != expected)
    throw std::runtime_error("unsupported PLY vertex layout: " + path);

  ColoredMesh mesh;
  mesh.vertices.resize(n_vertices);
  mesh.vertex_colors.resize(n_vertices, Vec3(0.5, 0.5, 0.5));
  for (size_t i = 0; i < n_vertices; ++i) {
    float p[3];
    is.read(reinterpret_cast<char*>(p), sizeof(p));
    mesh.vertices[i] = Vec3(p[0], p[1], p[2]);
    if (has_color) {
      std::uint8_t rgb[3];
      is.read(reinterpret_cast<char*>(rgb), 3);
      mesh.vertex_colors[i] = Vec3(rgb[0], rgb[1], rgb[2]) / 255.0;
    }
  }
  mesh.triangles.resize(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    std::uint8_t n;
    is.read(reinterpret_cast<char*>(&n), 1);
    if (n != 3) throw std::runtime_error("PLY face is not a triangle: " + path);
    std::int32_t idx[3];
    is.read(reinterpret_cast<char*>(idx), sizeof(idx));
    mesh.triangles[i] = Vec3i(idx[0], idx[1], idx[2]);
  }
  if (!is) throw std::runtime_error("truncated PLY file: " + path);
  return mesh;
}

}  // namespace voxkit
