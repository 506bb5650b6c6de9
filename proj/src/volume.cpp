#include "voxkit/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace voxkit {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

TsdfVolume::TsdfVolume(const GridSpec& spec)
    : dims_(spec.dims),
      voxel_size_(spec.voxel_size),
      origin_(spec.origin),
      truncation_(spec.truncation) {
  if (dims_.minCoeff() <= 0)
    throw std::invalid_argument("TsdfVolume: dims must be positive");
  if (!(voxel_size_ > 0.0))
    throw std::invalid_argument("TsdfVolume: voxel_size must be positive");
  if (!(truncation_ > 0.0))
    throw std::invalid_argument("TsdfVolume: truncation must be positive");
  const size_t n = static_cast<size_t>(dims_.x()) * dims_.y() * dims_.z();
  tsdf_.assign(n, truncation_);
  weight_.assign(n, 0.0);
  color_.assign(3 * n, 0.0);
}

bool TsdfVolume::same_grid(const TsdfVolume& other, double tol) const {
  return dims_ == other.dims_ &&
         std::abs(voxel_size_ - other.voxel_size_) <= tol &&
         (origin_ - other.origin_).cwiseAbs().maxCoeff() <= tol &&
         std::abs(truncation_ - other.truncation_) <= tol;
}

std::array<Vec3, 8> TrilinearStencil::weight_gradient() const {
  std::array<Vec3, 8> g;
  const double fx = frac.x(), fy = frac.y(), fz = frac.z();
  for (int c = 0; c < 8; ++c) {
    const int ix = c & 1, iy = (c >> 1) & 1, iz = (c >> 2) & 1;
    const double sx = ix ? 1.0 : -1.0;
    const double sy = iy ? 1.0 : -1.0;
    const double sz = iz ? 1.0 : -1.0;
    const double wx = ix ? fx : 1.0 - fx;
    const double wy = iy ? fy : 1.0 - fy;
    const double wz = iz ? fz : 1.0 - fz;
    g[c] = Vec3(sx * wy * wz, wx * sy * wz, wx * wy * sz);
  }
  return g;
}

TrilinearStencil TsdfVolume::stencil_at(const Vec3& p) const {
  TrilinearStencil s;
  const Vec3 g = world_to_voxel(p);
  if (!g.allFinite()) return s;
  const Vec3 base_f(std::floor(g.x()), std::floor(g.y()), std::floor(g.z()));
  // floor() can exceed INT_MAX for far-away points; reject before casting.
  if (base_f.cwiseAbs().maxCoeff() > 1e9) return s;
  s.base = Vec3i(static_cast<int>(base_f.x()), static_cast<int>(base_f.y()),
                 static_cast<int>(base_f.z()));
  s.frac = g - base_f;
  if (!in_grid(s.base.x(), s.base.y(), s.base.z()) ||
      !in_grid(s.base.x() + 1, s.base.y() + 1, s.base.z() + 1)) {
    return s;
  }
  s.in_grid = true;
  s.observed = true;
  const double fx = s.frac.x(), fy = s.frac.y(), fz = s.frac.z();
  for (int c = 0; c < 8; ++c) {
    const int ix = c & 1, iy = (c >> 1) & 1, iz = (c >> 2) & 1;
    s.index[c] = index(s.base.x() + ix, s.base.y() + iy, s.base.z() + iz);
    s.weight[c] = (ix ? fx : 1.0 - fx) * (iy ? fy : 1.0 - fy) *
                  (iz ? fz : 1.0 - fz);
    if (weight_[s.index[c]] <= 0.0) s.observed = false;
  }
  return s;
}

double TsdfVolume::channel_value(VolumeChannel channel, size_t voxel) const {
  switch (channel) {
    case VolumeChannel::kTsdf:
      return tsdf_[voxel];
    case VolumeChannel::kColorR:
      return color_[3 * voxel];
    case VolumeChannel::kColorG:
      return color_[3 * voxel + 1];
    case VolumeChannel::kColorB:
      return color_[3 * voxel + 2];
    case VolumeChannel::kWeight:
      return weight_[voxel];
  }
  return 0.0;
}

Sample TsdfVolume::sample_trilinear(const Vec3& p,
                                    VolumeChannel channel) const {
  const TrilinearStencil s = stencil_at(p);
  const bool ok =
      channel == VolumeChannel::kWeight ? s.in_grid : s.observed;
  if (!ok) return {};
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) acc += s.weight[c] * channel_value(channel, s.index[c]);
  return {acc, true};
}

void TsdfVolume::lattice_bounds(Vec3& lo, Vec3& hi) const {
  lo = origin_;
  hi = origin_ + voxel_size_ * (dims_.cast<double>() - Vec3::Ones());
}

void TsdfVolume::clamp_fields() {
  for (double& v : tsdf_) v = std::clamp(v, -truncation_, truncation_);
  for (double& c : color_) c = std::clamp(c, 0.0, 1.0);
}

void TsdfVolume::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, 4);
  write_raw(os, kVersion);
  for (int i = 0; i < 3; ++i)
    write_raw(os, static_cast<std::uint32_t>(dims_[i]));
  write_raw(os, static_cast<float>(voxel_size_));
  for (int i = 0; i < 3; ++i) write_raw(os, static_cast<float>(origin_[i]));
  write_raw(os, static_cast<float>(truncation_));
  std::vector<float> buf(tsdf_.size());
  for (size_t i = 0; i < tsdf_.size(); ++i)
    buf[i] = static_cast<float>(tsdf_[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  for (size_t i = 0; i < weight_.size(); ++i)
    buf[i] = static_cast<float>(weight_[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  std::vector<std::uint8_t> cbuf(color_.size());
  for (size_t i = 0; i < color_.size(); ++i) {
    cbuf[i] = static_cast<std::uint8_t>(
        std::lround(std::clamp(color_[i], 0.0, 1.0) * 255.0));
  }
  os.write(reinterpret_cast<const char*>(cbuf.data()),
           static_cast<std::streamsize>(cbuf.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

TsdfVolume TsdfVolume::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open volume file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a TSDF volume file: " + path);
  const auto version = read_raw<std::uint32_t>(is);
  if (version != kVersion)
    throw std::runtime_error("unsupported TSDF file version in " + path);
  GridSpec spec;
  for (int i = 0; i < 3; ++i)
    spec.dims[i] = static_cast<int>(read_raw<std::uint32_t>(is));
  spec.voxel_size = read_raw<float>(is);
  for (int i = 0; i < 3; ++i) spec.origin[i] = read_raw<float>(is);
  spec.truncation = read_raw<float>(is);
  TsdfVolume vol(spec);
  const size_t n = vol.num_voxels();
  std::vector<float> buf(n);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  for (size_t i = 0; i < n; ++i) vol.tsdf_[i] = buf[i];
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  for (size_t i = 0; i < n; ++i) vol.weight_[i] = buf[i];
  std::vector<std::uint8_t> cbuf(3 * n);
  is.read(reinterpret_cast<char*>(cbuf.data()),
          static_cast<std::streamsize>(cbuf.size()));
  if (!is) throw std::runtime_error("truncated TSDF volume file: " + path);
  for (size_t i = 0; i < cbuf.size(); ++i) vol.color_[i] = cbuf[i] / 255.0;
  return vol;
}

}  // namespace voxkit
