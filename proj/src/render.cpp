#include "voxkit/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "voxkit/parallel.hpp"

namespace voxkit {

namespace {

constexpr int kBisectIters = 8;
constexpr double kGradEps = 1e-8;

struct RayCrossing {
  bool found = false;
  double t_lo = 0.0, t_hi = 0.0;  // final bracket, tsdf(t_lo) > 0 >= tsdf(t_hi)
  double s_lo = 0.0, s_hi = 0.0;
  double t_star = 0.0;            // secant crossing inside [t_lo, t_hi]
};

// Clips the ray o + t*d against an axis-aligned box. Returns false when the
// intersection with [t0, t1] is empty; otherwise tightens [t0, t1].
bool clip_ray_box(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi,
                  double& t0, double& t1) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < lo[i] || o[i] > hi[i]) return false;
      continue;
    }
    double ta = (lo[i] - o[i]) / d[i];
    double tb = (hi[i] - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 < t1;
}

// Marches [t_start, t_end] at the fixed step, looking for the first
// positive-to-nonpositive transition between consecutive valid samples.
// Samples with a broken stencil reset the bracket. Once a coarse bracket is
// found, bisection narrows it; a bisection sample with a broken stencil
// poisons the crossing (found = false). Both the forward and the backward
// pass run this exact routine, so they always agree on the bracket.
RayCrossing trace_ray(const TsdfVolume& vol, const Vec3& origin,
                      const Vec3& dir, double t_start, double t_end,
                      double step) {
  RayCrossing rc;
  double prev_t = 0.0, prev_v = 0.0;
  bool prev_ok = false;
  double t = t_start;
  bool last = false;
  while (true) {
    const Sample s =
        vol.sample_trilinear(origin + t * dir, VolumeChannel::kTsdf);
    if (prev_ok && s.valid && prev_v > 0.0 && s.value <= 0.0) {
      double lo = prev_t, hi = t, slo = prev_v, shi = s.value;
      const double tol = 1e-5 * vol.truncation();
      for (int it = 0; it < kBisectIters; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Sample sm =
            vol.sample_trilinear(origin + mid * dir, VolumeChannel::kTsdf);
        if (!sm.valid) return rc;  // crossing touches unobserved space
        if (sm.value <= 0.0) {
          hi = mid;
          shi = sm.value;
        } else {
          lo = mid;
          slo = sm.value;
        }
        if (std::abs(sm.value) < tol) break;
      }
      rc.found = true;
      rc.t_lo = lo;
      rc.t_hi = hi;
      rc.s_lo = slo;
      rc.s_hi = shi;
      rc.t_star = lo + (hi - lo) * slo / (slo - shi);
      return rc;
    }
    prev_t = t;
    prev_v = s.value;
    prev_ok = s.valid;
    if (last) break;
    t += step;
    if (t >= t_end) {
      t = t_end;
      last = true;
    }
  }
  return rc;
}

struct PixelRay {
  Vec3 origin;
  Vec3 dir;        // unit, world space
  double cos_z;    // camera-forward component; depth = t * cos_z
  double t_start;
  double t_end;
  bool usable;
};

PixelRay make_ray(const TsdfVolume& vol, const CameraView& view, int px,
                  int py) {
  PixelRay r;
  const Vec3 dir_cam = view.pixel_ray(px, py).normalized();
  r.cos_z = dir_cam.z();
  r.origin = view.pose.topRightCorner<3, 1>();
  r.dir = view.pose.topLeftCorner<3, 3>() * dir_cam;
  r.t_start = view.z_min / r.cos_z;
  r.t_end = view.z_max / r.cos_z;
  Vec3 lo, hi;
  vol.lattice_bounds(lo, hi);
  r.usable = clip_ray_box(r.origin, r.dir, lo, hi, r.t_start, r.t_end);
  return r;
}

}  // namespace

void VolumeGradients::add(const VolumeGradients& other) {
  if (dims != other.dims)
    throw std::invalid_argument("VolumeGradients::add: dims mismatch");
  for (size_t i = 0; i < d_tsdf.size(); ++i) d_tsdf[i] += other.d_tsdf[i];
  for (size_t i = 0; i < d_color.size(); ++i) d_color[i] += other.d_color[i];
}

void VolumeGradients::scale(double s) {
  for (double& v : d_tsdf) v *= s;
  for (double& v : d_color) v *= s;
}

RenderedViews render(const TsdfVolume& vol, const CameraView& view,
                     int threads) {
  const std::string why = view.check();
  if (!why.empty()) throw std::invalid_argument("render: " + why);
  const int w = view.width, h = view.height;
  RenderedViews out;
  out.depth = ImageF(w, h, 1);
  out.normal = ImageF(w, h, 3);
  out.color = ImageF(w, h, 3);
  out.hit_t = ImageF(w, h, 1);
  out.valid = ImageU8(w, h, 1, 0);

  const double step = 0.5 * vol.truncation();
  const double offset = 0.5 * vol.voxel_size();

  parallel_for(0, h, threads, [&](std::int64_t y0, std::int64_t y1) {
    for (int py = static_cast<int>(y0); py < static_cast<int>(y1); ++py) {
      for (int px = 0; px < w; ++px) {
        const PixelRay ray = make_ray(vol, view, px, py);
        if (!ray.usable) continue;
        const RayCrossing rc =
            trace_ray(vol, ray.origin, ray.dir, ray.t_start, ray.t_end, step);
        if (!rc.found) continue;
        const Vec3 p = ray.origin + rc.t_star * ray.dir;

        Vec3 grad;
        bool grad_ok = true;
        for (int axis = 0; axis < 3 && grad_ok; ++axis) {
          Vec3 d = Vec3::Zero();
          d[axis] = offset;
          const Sample sp = vol.sample_trilinear(p + d, VolumeChannel::kTsdf);
          const Sample sn = vol.sample_trilinear(p - d, VolumeChannel::kTsdf);
          grad_ok = sp.valid && sn.valid;
          grad[axis] = (sp.value - sn.value) / (2.0 * offset);
        }
        if (!grad_ok) continue;
        const double gnorm = grad.norm();
        if (gnorm < kGradEps) continue;

        const TrilinearStencil cs = vol.stencil_at(p);
        if (!cs.observed) continue;

        out.valid(px, py) = 1;
        out.depth(px, py) = rc.t_star * ray.cos_z;
        out.hit_t(px, py) = rc.t_star;
        for (int i = 0; i < 3; ++i) out.normal(px, py, i) = grad[i] / gnorm;
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int k = 0; k < 8; ++k)
            acc += cs.weight[k] * vol.color()[3 * cs.index[k] + c];
          out.color(px, py, c) = acc;
        }
      }
    }
  });
  return out;
}

VolumeGradients render_backward(const TsdfVolume& vol, const CameraView& view,
                                const RenderedViews& rendered,
                                const ImageF& dl_ddepth,
                                const ImageF& dl_dcolor, int threads) {
  const int w = view.width, h = view.height;
  if (rendered.depth.width() != w || rendered.depth.height() != h ||
      dl_ddepth.width() != w || dl_ddepth.height() != h ||
      dl_dcolor.width() != w || dl_dcolor.height() != h ||
      dl_dcolor.channels() != 3) {
    throw std::invalid_argument("render_backward: image dimension mismatch");
  }

  const double step = 0.5 * vol.truncation();
  const double inv_voxel = 1.0 / vol.voxel_size();
  if (threads <= 0) threads = default_thread_count();
  const int workers = std::clamp<int>(threads, 1, std::max(1, h));

  std::vector<VolumeGradients> partial(static_cast<size_t>(workers),
                                       VolumeGradients(vol.dims()));
  const int chunk = (h + workers - 1) / workers;

  parallel_for(0, workers, workers, [&](std::int64_t w0, std::int64_t w1) {
    for (int wk = static_cast<int>(w0); wk < static_cast<int>(w1); ++wk) {
      VolumeGradients& g = partial[static_cast<size_t>(wk)];
      const int y_begin = wk * chunk;
      const int y_end = std::min(h, y_begin + chunk);
      for (int py = y_begin; py < y_end; ++py) {
        for (int px = 0; px < w; ++px) {
          if (!rendered.valid(px, py)) continue;
          const double dl_d = dl_ddepth(px, py);
          const Vec3 dl_c(dl_dcolor(px, py, 0), dl_dcolor(px, py, 1),
                          dl_dcolor(px, py, 2));
          if (dl_d == 0.0 && dl_c.isZero()) continue;

          const PixelRay ray = make_ray(vol, view, px, py);
          if (!ray.usable) continue;
          const RayCrossing rc = trace_ray(vol, ray.origin, ray.dir,
                                           ray.t_start, ray.t_end, step);
          if (!rc.found) continue;
          const Vec3 p = ray.origin + rc.t_star * ray.dir;
          const TrilinearStencil cs = vol.stencil_at(p);
          if (!cs.observed) continue;

          // Direct color adjoint into the color stencil.
          for (int k = 0; k < 8; ++k) {
            for (int c = 0; c < 3; ++c)
              g.d_color[3 * cs.index[k] + c] += dl_c[c] * cs.weight[k];
          }

          // Adjoint of the crossing position: depth scales by cos_z, and the
          // color sample moves along the ray as the crossing shifts.
          double dl_dt = dl_d * ray.cos_z;
          if (!dl_c.isZero()) {
            const auto wg = cs.weight_gradient();
            Vec3 color_dir_deriv = Vec3::Zero();
            for (int k = 0; k < 8; ++k) {
              const double wdot = (wg[k] * inv_voxel).dot(ray.dir);
              for (int c = 0; c < 3; ++c)
                color_dir_deriv[c] += wdot * vol.color()[3 * cs.index[k] + c];
            }
            dl_dt += dl_c.dot(color_dir_deriv);
          }

          // Secant linearization between the final bracketing samples.
          const double dt = rc.t_hi - rc.t_lo;
          const double denom = rc.s_lo - rc.s_hi;
          const double dts_lo = dt * (-rc.s_hi) / (denom * denom);
          const double dts_hi = dt * rc.s_lo / (denom * denom);
          const TrilinearStencil st_lo =
              vol.stencil_at(ray.origin + rc.t_lo * ray.dir);
          const TrilinearStencil st_hi =
              vol.stencil_at(ray.origin + rc.t_hi * ray.dir);
          for (int k = 0; k < 8; ++k) {
            g.d_tsdf[st_lo.index[k]] += dl_dt * dts_lo * st_lo.weight[k];
            g.d_tsdf[st_hi.index[k]] += dl_dt * dts_hi * st_hi.weight[k];
          }
        }
      }
    }
  });

  VolumeGradients total = std::move(partial.front());
  for (size_t i = 1; i < partial.size(); ++i) total.add(partial[i]);
  return total;
}

}  // namespace voxkit
