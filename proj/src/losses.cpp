#include "voxkit/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "voxkit/colorspace.hpp"

namespace voxkit {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_size(const ImageF& a, const ImageU8& av, const ImageF& b,
                       const ImageU8& bv, const char* who) {
  if (a.width() != b.width() || a.height() != b.height() ||
      av.width() != a.width() || av.height() != a.height() ||
      bv.width() != b.width() || bv.height() != b.height()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

// Joint validity mask for one target frame: depth > 0.
ImageU8 target_valid_mask(const RgbdFrame& frame) {
  ImageU8 mask(frame.depth.width(), frame.depth.height(), 1, 0);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (frame.depth(x, y) > 0.0) mask(x, y) = 1;
  return mask;
}

}  // namespace

MaskedLoss masked_l1_depth(const ImageF& depth, const ImageU8& valid,
                           const ImageF& target_depth,
                           const ImageU8& target_valid) {
  require_same_size(depth, valid, target_depth, target_valid,
                    "masked_l1_depth");
  double acc = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!valid(x, y) || !target_valid(x, y)) continue;
      acc += std::abs(depth(x, y) - target_depth(x, y));
      ++n;
    }
  }
  return {n > 0 ? acc / static_cast<double>(n) : 0.0, n};
}

MaskedLoss masked_l1_color(const ImageF& color, const ImageU8& valid,
                           const ImageF& target_color,
                           const ImageU8& target_valid) {
  require_same_size(color, valid, target_color, target_valid,
                    "masked_l1_color");
  if (color.channels() != 3 || target_color.channels() != 3)
    throw std::invalid_argument("masked_l1_color: need 3-channel images");
  double acc = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < color.height(); ++y) {
    for (int x = 0; x < color.width(); ++x) {
      if (!valid(x, y) || !target_valid(x, y)) continue;
      const Vec3 a = rgb_to_lab(Vec3(color(x, y, 0), color(x, y, 1),
                                     color(x, y, 2))) /
                     100.0;
      const Vec3 b = rgb_to_lab(Vec3(target_color(x, y, 0),
                                     target_color(x, y, 1),
                                     target_color(x, y, 2))) /
                     100.0;
      acc += (a - b).cwiseAbs().sum();
      ++n;
    }
  }
  return {n > 0 ? acc / (3.0 * static_cast<double>(n)) : 0.0, n};
}

MaskedLoss tsdf_l1(const TsdfVolume& pred, const TsdfVolume& target) {
  if (!pred.same_grid(target))
    throw std::invalid_argument("tsdf_l1: grid mismatch");
  double acc = 0.0;
  std::int64_t n = 0;
  for (size_t i = 0; i < pred.num_voxels(); ++i) {
    if (target.weight()[i] <= 0.0) continue;
    acc += std::abs(pred.tsdf()[i] - target.tsdf()[i]);
    ++n;
  }
  return {n > 0 ? acc / static_cast<double>(n) : 0.0, n};
}

LossReport reconstruction_loss(const TsdfVolume& pred,
                               const TsdfVolume& target_vol,
                               std::span<const RgbdFrame> views, double w_g,
                               VolumeGradients* grads, int threads) {
  if (views.empty())
    throw std::invalid_argument("reconstruction_loss: no views");

  LossReport report;
  const double inv_views = 1.0 / static_cast<double>(views.size());

  for (const RgbdFrame& frame : views) {
    const RenderedViews rv = render(pred, frame.view, threads);
    const ImageU8 tmask = target_valid_mask(frame);

    const MaskedLoss ld =
        masked_l1_depth(rv.depth, rv.valid, frame.depth, tmask);
    const MaskedLoss lc =
        masked_l1_color(rv.color, rv.valid, frame.color, tmask);
    report.l_depth += ld.value * inv_views;
    report.l_color += lc.value * inv_views;
    report.n_valid_pixels += ld.count;

    if (grads && (ld.count > 0 || lc.count > 0)) {
      const int w = frame.view.width, h = frame.view.height;
      ImageF dl_ddepth(w, h, 1, 0.0);
      ImageF dl_dcolor(w, h, 3, 0.0);
      const double depth_scale =
          ld.count > 0 ? inv_views / static_cast<double>(ld.count) : 0.0;
      const double color_scale =
          lc.count > 0 ? inv_views / (3.0 * static_cast<double>(lc.count) *
                                      100.0)
                       : 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!rv.valid(x, y) || !tmask(x, y)) continue;
          dl_ddepth(x, y) =
              depth_scale * sgn(rv.depth(x, y) - frame.depth(x, y));
          const Vec3 rgb(rv.color(x, y, 0), rv.color(x, y, 1),
                         rv.color(x, y, 2));
          const Vec3 target_rgb(frame.color(x, y, 0), frame.color(x, y, 1),
                                frame.color(x, y, 2));
          const Vec3 lab_diff = rgb_to_lab(rgb) - rgb_to_lab(target_rgb);
          const Vec3 lab_sign(sgn(lab_diff.x()), sgn(lab_diff.y()),
                              sgn(lab_diff.z()));
          const Vec3 dl_drgb =
              rgb_to_lab_jacobian(rgb).transpose() * lab_sign * color_scale;
          for (int c = 0; c < 3; ++c) dl_dcolor(x, y, c) = dl_drgb[c];
        }
      }
      grads->add(
          render_backward(pred, frame.view, rv, dl_ddepth, dl_dcolor, threads));
    }
  }

  const MaskedLoss lg = tsdf_l1(pred, target_vol);
  report.l_geo3d = lg.value;
  report.n_valid_voxels = lg.count;
  report.total = w_g * report.l_geo3d + report.l_depth + report.l_color;

  if (grads && lg.count > 0) {
    const double scale = w_g / static_cast<double>(lg.count);
    for (size_t i = 0; i < pred.num_voxels(); ++i) {
      if (target_vol.weight()[i] <= 0.0) continue;
      grads->d_tsdf[i] += scale * sgn(pred.tsdf()[i] - target_vol.tsdf()[i]);
    }
  }
  return report;
}

}  // namespace voxkit
