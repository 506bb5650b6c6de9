#pragma once

#include "voxkit/image.hpp"
#include "voxkit/volume.hpp"

namespace voxkit {

/// Per-pixel raycast outputs for one camera view. Invalid pixels hold 0 in
/// every image; valid pixels carry camera-space depth (meters), a unit
/// world-space normal, rgb color in [0, 1], and the metric ray parameter of
/// the surface hit.
struct RenderedViews {
  ImageF depth;    // 1 channel
  ImageF normal;   // 3 channels
  ImageF color;    // 3 channels
  ImageF hit_t;    // 1 channel
  ImageU8 valid;   // 1 channel, 0/1
};

/// Gradient accumulators matching a volume's grid: scalar per voxel for the
/// distance field, rgb per voxel for color.
struct VolumeGradients {
  Vec3i dims = Vec3i(0, 0, 0);
  std::vector<double> d_tsdf;
  std::vector<double> d_color;  // 3 per voxel

  VolumeGradients() = default;
  explicit VolumeGradients(const Vec3i& d)
      : dims(d),
        d_tsdf(static_cast<size_t>(d.x()) * d.y() * d.z(), 0.0),
        d_color(3 * static_cast<size_t>(d.x()) * d.y() * d.z(), 0.0) {}

  void add(const VolumeGradients& other);
  void scale(double s);
};

/// Raycasts the volume: marches each pixel ray from z_min to z_max in steps
/// of truncation / 2, detects the first positive-to-nonpositive sign change
/// of the interpolated distance field, and refines the crossing by bisection
/// followed by one secant step. Depth is the camera-space z of the refined
/// crossing, the normal is the normalized central-difference gradient of the
/// distance field (outward, facing the observed side), and color is sampled
/// trilinearly at the crossing. Pixels whose rays see no crossing, touch an
/// unobserved or out-of-grid stencil during refinement, or yield a
/// degenerate gradient are invalid.
RenderedViews render(const TsdfVolume& vol, const CameraView& view,
                     int threads = 1);

/// Backpropagates per-pixel depth and color adjoints to the voxel fields.
/// The crossing is differentiated through its secant linearization between
/// the final bracketing samples; bracket endpoints are treated as constant.
/// Depth adjoints scale by d(depth)/d(t); color adjoints flow both directly
/// into the color stencil and, via the ray-directional color derivative,
/// into the crossing position. `rendered` must come from render() on the
/// same volume and view. Accumulation uses one buffer per worker thread,
/// reduced in thread order, so a fixed thread count is reproducible.
VolumeGradients render_backward(const TsdfVolume& vol, const CameraView& view,
                                const RenderedViews& rendered,
                                const ImageF& dl_ddepth,
                                const ImageF& dl_dcolor, int threads = 1);

}  // namespace voxkit
