#include "voxkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "voxkit/rng.hpp"

namespace voxkit {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w;
  const int r = kWindow / 2;
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      w[(dy + r) * kWindow + dx + r] = g;
      sum += g;
    }
  }
  for (double& v : w) v /= sum;
  return w;
}

double ssim_channel(const ImageF& a, const ImageF& b, int channel,
                    const std::array<double, kWindow * kWindow>& win) {
  const int r = kWindow / 2;
  double acc = 0.0;
  std::int64_t count = 0;
  for (int y = r; y < a.height() - r; ++y) {
    for (int x = r; x < a.width() - r; ++x) {
      double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const double w = win[(dy + r) * kWindow + dx + r];
          const double va = a(x + dx, y + dy, channel);
          const double vb = b(x + dx, y + dy, channel);
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double s = ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
                       ((mu_a * mu_a + mu_b * mu_b + kC1) *
                        (var_a + var_b + kC2));
      acc += s;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

// Separating-axis triangle / axis-aligned-box overlap (Akenine-Moller).
// Box is centered at `c` with half extents `h`.
bool tri_box_overlap(const Vec3& c, const Vec3& h, const Vec3& a,
                     const Vec3& b, const Vec3& d) {
  const Vec3 v0 = a - c, v1 = b - c, v2 = d - c;
  const Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

  auto axis_test = [&](const Vec3& axis) {
    const double p0 = v0.dot(axis);
    const double p1 = v1.dot(axis);
    const double p2 = v2.dot(axis);
    const double lo = std::min({p0, p1, p2});
    const double hi = std::max({p0, p1, p2});
    const double rad = h.x() * std::abs(axis.x()) +
                       h.y() * std::abs(axis.y()) +
                       h.z() * std::abs(axis.z());
    return lo <= rad && hi >= -rad;
  };

  // Box faces.
  for (int i = 0; i < 3; ++i) {
    const double lo = std::min({v0[i], v1[i], v2[i]});
    const double hi = std::max({v0[i], v1[i], v2[i]});
    if (lo > h[i] || hi < -h[i]) return false;
  }
  // Nine edge cross products.
  const Vec3 edges[3] = {e0, e1, e2};
  for (int i = 0; i < 3; ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 unit = Vec3::Zero();
      unit[axis] = 1.0;
      const Vec3 cross = unit.cross(edges[i]);
      if (cross.squaredNorm() < 1e-24) continue;
      if (!axis_test(cross)) return false;
    }
  }
  // Triangle plane.
  const Vec3 n = e0.cross(e1);
  if (n.squaredNorm() >= 1e-24 && !axis_test(n)) {
    return false;
  }
  if (n.squaredNorm() >= 1e-24) {
    const double dist = n.dot(v0);
    const double rad = h.x() * std::abs(n.x()) + h.y() * std::abs(n.y()) +
                       h.z() * std::abs(n.z());
    if (std::abs(dist) > rad) return false;
  }
  return true;
}

struct VoxelGridIndex {
  Vec3 origin;
  Vec3i dims;
  double voxel;
};

void voxelize_mesh(const ColoredMesh& mesh, const VoxelGridIndex& grid,
                   std::vector<std::uint8_t>& occupied) {
  const Vec3 half = Vec3::Constant(grid.voxel * 0.5);
  for (const Vec3i& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri.x()];
    const Vec3& b = mesh.vertices[tri.y()];
    const Vec3& c = mesh.vertices[tri.z()];
    Vec3 lo = a.cwiseMin(b).cwiseMin(c);
    Vec3 hi = a.cwiseMax(b).cwiseMax(c);
    Vec3i ilo, ihi;
    for (int i = 0; i < 3; ++i) {
      ilo[i] = std::max(
          0, static_cast<int>(std::floor((lo[i] - grid.origin[i]) / grid.voxel)));
      ihi[i] = std::min(
          grid.dims[i] - 1,
          static_cast<int>(std::floor((hi[i] - grid.origin[i]) / grid.voxel)));
    }
    for (int z = ilo.z(); z <= ihi.z(); ++z) {
      for (int y = ilo.y(); y <= ihi.y(); ++y) {
        for (int x = ilo.x(); x <= ihi.x(); ++x) {
          const size_t idx =
              static_cast<size_t>(x) +
              static_cast<size_t>(grid.dims.x()) *
                  (static_cast<size_t>(y) +
                   static_cast<size_t>(grid.dims.y()) * z);
          if (occupied[idx]) continue;
          const Vec3 center =
              grid.origin + grid.voxel * (Vec3(x, y, z) + Vec3::Constant(0.5));
          if (tri_box_overlap(center, half, a, b, c)) occupied[idx] = 1;
        }
      }
    }
  }
}

// Median-split k-d tree over an index permutation; exact nearest neighbor.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points)
      : points_(points), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), size_t{0});
    if (!order_.empty()) build(0, order_.size(), 0);
  }

  double nearest_distance(const Vec3& q) const {
    double best = std::numeric_limits<double>::max();
    search(q, 0, order_.size(), 0, best);
    return std::sqrt(best);
  }

 private:
  void build(size_t lo, size_t hi, int axis) {
    if (hi - lo <= 1) return;
    const size_t mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi, [&](size_t a, size_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }

  void search(const Vec3& q, size_t lo, size_t hi, int axis,
              double& best) const {
    if (lo >= hi) return;
    const size_t mid = (lo + hi) / 2;
    const Vec3& p = points_[order_[mid]];
    best = std::min(best, (p - q).squaredNorm());
    const double delta = q[axis] - p[axis];
    const int next = (axis + 1) % 3;
    if (delta < 0.0) {
      search(q, lo, mid, next, best);
      if (delta * delta < best) search(q, mid + 1, hi, next, best);
    } else {
      search(q, mid + 1, hi, next, best);
      if (delta * delta < best) search(q, lo, mid, next, best);
    }
  }

  std::span<const Vec3> points_;
  std::vector<size_t> order_;
};

}  // namespace

double ssim(const ImageF& a, const ImageF& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("ssim: dimension mismatch");
  if (a.width() < kWindow || a.height() < kWindow)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  static const auto win = gaussian_window();
  double acc = 0.0;
  for (int c = 0; c < a.channels(); ++c) acc += ssim_channel(a, b, c, win);
  return acc / a.channels();
}

IouRecall voxel_iou_recall(const ColoredMesh& pred, const ColoredMesh& target,
                           double voxel_size, const TsdfVolume* ignore) {
  if (pred.empty() || target.empty())
    throw std::invalid_argument("voxel_iou_recall: empty mesh");
  if (!(voxel_size > 0.0))
    throw std::invalid_argument("voxel_iou_recall: voxel_size must be > 0");

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto* mesh : {&pred, &target}) {
    for (const Vec3& v : mesh->vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  VoxelGridIndex grid;
  grid.voxel = voxel_size;
  // Snap the origin so the grid does not depend on which mesh is "pred".
  for (int i = 0; i < 3; ++i)
    grid.origin[i] = std::floor(lo[i] / voxel_size - 1.0) * voxel_size;
  for (int i = 0; i < 3; ++i)
    grid.dims[i] =
        static_cast<int>(std::ceil((hi[i] - grid.origin[i]) / voxel_size)) + 2;

  const size_t n =
      static_cast<size_t>(grid.dims.x()) * grid.dims.y() * grid.dims.z();
  std::vector<std::uint8_t> occ_pred(n, 0), occ_target(n, 0);
  voxelize_mesh(pred, grid, occ_pred);
  voxelize_mesh(target, grid, occ_target);

  std::int64_t inter = 0, uni = 0, tgt = 0;
  size_t idx = 0;
  for (int z = 0; z < grid.dims.z(); ++z) {
    for (int y = 0; y < grid.dims.y(); ++y) {
      for (int x = 0; x < grid.dims.x(); ++x, ++idx) {
        if (!occ_pred[idx] && !occ_target[idx]) continue;
        if (ignore) {
          const Vec3 center = grid.origin + grid.voxel * (Vec3(x, y, z) +
                                                          Vec3::Constant(0.5));
          const Vec3 g = ignore->world_to_voxel(center);
          const int gx = static_cast<int>(std::lround(g.x()));
          const int gy = static_cast<int>(std::lround(g.y()));
          const int gz = static_cast<int>(std::lround(g.z()));
          if (!ignore->in_grid(gx, gy, gz) ||
              ignore->weight()[ignore->index(gx, gy, gz)] <= 0.0) {
            continue;  // unobserved space: excluded from all counts
          }
        }
        const bool p = occ_pred[idx], t = occ_target[idx];
        if (p && t) ++inter;
        if (p || t) ++uni;
        if (t) ++tgt;
      }
    }
  }
  IouRecall out;
  out.iou = uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni)
                    : 0.0;
  out.recall = tgt > 0 ? static_cast<double>(inter) / static_cast<double>(tgt)
                       : 0.0;
  return out;
}

std::vector<Vec3> sample_mesh_points(const ColoredMesh& mesh, int n_samples,
                                     std::uint64_t seed) {
  if (mesh.empty())
    throw std::invalid_argument("sample_mesh_points: empty mesh");
  std::vector<double> cum(mesh.triangles.size());
  double total = 0.0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Vec3i& t = mesh.triangles[i];
    const Vec3 e0 = mesh.vertices[t.y()] - mesh.vertices[t.x()];
    const Vec3 e1 = mesh.vertices[t.z()] - mesh.vertices[t.x()];
    total += 0.5 * e0.cross(e1).norm();
    cum[i] = total;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("sample_mesh_points: zero surface area");

  Rng rng(seed);
  std::vector<Vec3> points;
  points.reserve(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double u = rng.uniform() * total;
    const size_t k = static_cast<size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const Vec3i& t = mesh.triangles[std::min(k, cum.size() - 1)];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3& a = mesh.vertices[t.x()];
    const Vec3& b = mesh.vertices[t.y()];
    const Vec3& c = mesh.vertices[t.z()];
    points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
  }
  return points;
}

double chamfer_points(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("chamfer_points: empty point set");
  const KdTree tree_a(a);
  const KdTree tree_b(b);
  double d_ab = 0.0, d_ba = 0.0;
  for (const Vec3& p : a) d_ab += tree_b.nearest_distance(p);
  for (const Vec3& p : b) d_ba += tree_a.nearest_distance(p);
  return 0.5 * (d_ab / static_cast<double>(a.size()) +
                d_ba / static_cast<double>(b.size()));
}

double chamfer(const ColoredMesh& pred, const ColoredMesh& target,
               int n_samples, std::uint64_t seed) {
  if (pred.empty() || target.empty())
    throw std::invalid_argument("chamfer: empty mesh");
  // Both meshes share the seed: identical meshes yield identical samples and
  // therefore a distance of exactly zero.
  const auto pa = sample_mesh_points(pred, n_samples, seed);
  const auto pb = sample_mesh_points(target, n_samples, seed);
  return chamfer_points(pa, pb);
}

}  // namespace voxkit
