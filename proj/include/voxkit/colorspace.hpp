#pragma once

#include "voxkit/geometry.hpp"

namespace voxkit {

// sRGB (IEC 61966-2-1, D65, 2 degree observer) <-> CIELAB. Inputs to
// rgb_to_lab are clamped to [0, 1]; lab_to_rgb clamps its result to [0, 1].
Vec3 rgb_to_lab(const Vec3& rgb);
Vec3 lab_to_rgb(const Vec3& lab);

// Jacobian d(lab) / d(rgb) at `rgb` (clamped into [0, 1] first). The sRGB
// transfer and LAB cube-root seams use their upper-branch derivative.
Mat3 rgb_to_lab_jacobian(const Vec3& rgb);

}  // namespace voxkit
