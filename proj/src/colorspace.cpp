#include "voxkit/colorspace.hpp"

#include <algorithm>
#include <cmath>

namespace voxkit {

namespace {

// sRGB -> XYZ (linear light), D65 white.
const Mat3 kRgbToXyz = (Mat3() << 0.4124564, 0.3575761, 0.1804375,
                        0.2126729, 0.7151522, 0.0721750,
                        0.0193339, 0.1191920, 0.9503041)
                           .finished();
const Mat3 kXyzToRgb = kRgbToXyz.inverse();
// Using the row sums as the white point makes (1,1,1) map to exactly
// L = 100, a = b = 0.
const Vec3 kWhite = kRgbToXyz * Vec3::Ones();

constexpr double kDelta = 6.0 / 29.0;
constexpr double kDelta3 = kDelta * kDelta * kDelta;

double srgb_to_linear(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_to_linear_deriv(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.04045 ? 1.0 / 12.92
                      : 2.4 / 1.055 * std::pow((c + 0.055) / 1.055, 1.4);
}

double linear_to_srgb(double c) {
  if (c <= 0.0031308) return 12.92 * c;
  return 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
  return t > kDelta3 ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_deriv(double t) {
  return t > kDelta3 ? 1.0 / (3.0 * std::cbrt(t * t))
                     : 1.0 / (3.0 * kDelta * kDelta);
}

double lab_f_inv(double u) {
  return u > kDelta ? u * u * u : 3.0 * kDelta * kDelta * (u - 4.0 / 29.0);
}

}  // namespace

Vec3 rgb_to_lab(const Vec3& rgb) {
  const Vec3 lin(srgb_to_linear(rgb.x()), srgb_to_linear(rgb.y()),
                 srgb_to_linear(rgb.z()));
  const Vec3 xyz = kRgbToXyz * lin;
  const double fx = lab_f(xyz.x() / kWhite.x());
  const double fy = lab_f(xyz.y() / kWhite.y());
  const double fz = lab_f(xyz.z() / kWhite.z());
  return Vec3(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz));
}

Vec3 lab_to_rgb(const Vec3& lab) {
  const double fy = (lab.x() + 16.0) / 116.0;
  const double fx = fy + lab.y() / 500.0;
  const double fz = fy - lab.z() / 200.0;
  const Vec3 xyz(lab_f_inv(fx) * kWhite.x(), lab_f_inv(fy) * kWhite.y(),
                 lab_f_inv(fz) * kWhite.z());
  const Vec3 lin = kXyzToRgb * xyz;
  return Vec3(std::clamp(linear_to_srgb(lin.x()), 0.0, 1.0),
              std::clamp(linear_to_srgb(lin.y()), 0.0, 1.0),
              std::clamp(linear_to_srgb(lin.z()), 0.0, 1.0));
}

Mat3 rgb_to_lab_jacobian(const Vec3& rgb) {
  const Vec3 clamped(std::clamp(rgb.x(), 0.0, 1.0),
                     std::clamp(rgb.y(), 0.0, 1.0),
                     std::clamp(rgb.z(), 0.0, 1.0));
  const Vec3 lin(srgb_to_linear(clamped.x()), srgb_to_linear(clamped.y()),
                 srgb_to_linear(clamped.z()));
  const Vec3 xyz = kRgbToXyz * lin;

  Mat3 lab_from_f;
  lab_from_f << 0.0, 116.0, 0.0, 500.0, -500.0, 0.0, 0.0, 200.0, -200.0;
  Mat3 f_from_xyz = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    f_from_xyz(i, i) = lab_f_deriv(xyz[i] / kWhite[i]) / kWhite[i];
  Mat3 lin_from_rgb = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    lin_from_rgb(i, i) = srgb_to_linear_deriv(clamped[i]);

  return lab_from_f * f_from_xyz * kRgbToXyz * lin_from_rgb;
}

}  // namespace voxkit
