#include "voxkit/synth.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "voxkit/rng.hpp"
#include "voxkit/scan_io.hpp"

namespace voxkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 rgb256(int r, int g, int b) { return Vec3(r, g, b) / 255.0; }

struct SceneHit {
  double s = kInf;  // ray parameter == camera depth (direction has z_cam = 1)
  Vec3 color = Vec3::Zero();
};

void consider(SceneHit& best, double s, const Vec3& color) {
  if (s > 1e-9 && s < best.s) {
    best.s = s;
    best.color = color;
  }
}

// Smallest positive intersection with a sphere, or +inf.
double ray_sphere(const Vec3& o, const Vec3& d, const Vec3& center,
                  double radius) {
  const Vec3 oc = o - center;
  const double a = d.squaredNorm();
  const double b = 2.0 * d.dot(oc);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double s0 = (-b - sq) / (2.0 * a);
  const double s1 = (-b + sq) / (2.0 * a);
  if (s0 > 1e-9) return s0;
  if (s1 > 1e-9) return s1;
  return kInf;
}

// Entry into an axis-aligned box from outside, or +inf.
double ray_box(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double t0 = -kInf, t1 = kInf;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < lo[i] || o[i] > hi[i]) return kInf;
      continue;
    }
    double ta = (lo[i] - o[i]) / d[i];
    double tb = (hi[i] - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1 || t0 <= 1e-9) return kInf;
  return t0;
}

// Exit of an axis-aligned box seen from inside; face index 0..5 is
// (-x, +x, -y, +y, -z, +z).
double ray_box_inside(const Vec3& o, const Vec3& d, const Vec3& lo,
                      const Vec3& hi, int& face) {
  double best = kInf;
  face = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) continue;
    for (int side = 0; side < 2; ++side) {
      const double plane = side ? hi[i] : lo[i];
      const double s = (plane - o[i]) / d[i];
      if (s <= 1e-9 || s >= best) continue;
      const Vec3 p = o + s * d;
      bool inside = true;
      for (int j = 0; j < 3 && inside; ++j) {
        if (j == i) continue;
        inside = p[j] >= lo[j] - 1e-9 && p[j] <= hi[j] + 1e-9;
      }
      if (inside) {
        best = s;
        face = 2 * i + side;
      }
    }
  }
  return best;
}

struct SceneGeometry {
  // Room shell; used only when has_room is true.
  bool has_room = false;
  Vec3 room_lo, room_hi;
  Vec3 wall_colors[6];
  // Solid contents.
  struct Ball {
    Vec3 center;
    double radius;
    Vec3 color;
  };
  struct Box {
    Vec3 lo, hi;
    Vec3 color;
  };
  std::vector<Ball> balls;
  std::vector<Box> boxes;

  SceneHit trace(const Vec3& o, const Vec3& d) const {
    SceneHit best;
    for (const Ball& b : balls)
      consider(best, ray_sphere(o, d, b.center, b.radius), b.color);
    for (const Box& b : boxes) consider(best, ray_box(o, d, b.lo, b.hi), b.color);
    if (has_room) {
      int face;
      const double s = ray_box_inside(o, d, room_lo, room_hi, face);
      if (face >= 0) consider(best, s, wall_colors[face]);
    }
    return best;
  }
};

struct SceneSetup {
  SceneGeometry geometry;
  Vec3 ring_center;
  double ring_radius;
  double camera_height;
  Vec3 look_target;
};

SceneSetup build_scene(const SynthSceneSpec& spec) {
  SceneSetup s;
  switch (spec.shape) {
    case SynthShape::kSphere: {
      const double r = spec.size > 0.0 ? spec.size : 0.5;
      s.geometry.balls.push_back({Vec3::Zero(), r, rgb256(204, 64, 51)});
      s.ring_center = Vec3::Zero();
      s.ring_radius = 4.0 * r;
      s.camera_height = 0.0;
      s.look_target = Vec3::Zero();
      break;
    }
    case SynthShape::kBox: {
      const double h = spec.size > 0.0 ? spec.size : 0.4;
      s.geometry.boxes.push_back(
          {Vec3::Constant(-h), Vec3::Constant(h), rgb256(77, 128, 230)});
      s.ring_center = Vec3::Zero();
      s.ring_radius = 5.0 * h;
      s.camera_height = 1.5 * h;
      s.look_target = Vec3::Zero();
      break;
    }
    case SynthShape::kRoom: {
      const double w = spec.size > 0.0 ? spec.size : 3.2;
      const double depth = w * 0.8125;  // 2.6 at the default width
      const double height = 2.2;
      SceneGeometry& g = s.geometry;
      g.has_room = true;
      g.room_lo = Vec3(-w / 2, -depth / 2, 0.0);
      g.room_hi = Vec3(w / 2, depth / 2, height);
      g.wall_colors[0] = rgb256(170, 90, 60);    // -x wall
      g.wall_colors[1] = rgb256(80, 150, 90);    // +x wall
      g.wall_colors[2] = rgb256(90, 110, 190);   // -y wall
      g.wall_colors[3] = rgb256(190, 170, 80);   // +y wall
      g.wall_colors[4] = rgb256(120, 110, 100);  // floor
      g.wall_colors[5] = rgb256(235, 235, 225);  // ceiling
      g.boxes.push_back({Vec3(0.12 * w, -0.25 * depth, 0.0),
                         Vec3(0.36 * w, -0.02 * depth, 0.62),
                         rgb256(60, 60, 160)});
      g.balls.push_back(
          {Vec3(-0.20 * w, 0.18 * depth, 0.35), 0.35, rgb256(220, 180, 40)});
      s.ring_center = Vec3(0.0, 0.0, 0.0);
      s.ring_radius = 0.30 * std::min(w, depth);
      s.camera_height = 1.25;
      s.look_target = Vec3(0.0, 0.0, 0.75);
      break;
    }
  }
  return s;
}

}  // namespace

SynthShape synth_shape_from_name(const std::string& name) {
  if (name == "sphere") return SynthShape::kSphere;
  if (name == "box") return SynthShape::kBox;
  if (name == "room") return SynthShape::kRoom;
  throw std::invalid_argument("unknown synthetic shape: " + name);
}

std::vector<RgbdFrame> synth_frames(const SynthSceneSpec& spec) {
  if (spec.n_views < 1)
    throw std::invalid_argument("synth_frames: n_views must be >= 1");
  if (spec.width < 8 || spec.height < 8)
    throw std::invalid_argument("synth_frames: image too small");

  const SceneSetup scene = build_scene(spec);
  Rng rng(spec.seed);
  const double start_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);

  CameraView base;
  base.width = spec.width;
  base.height = spec.height;
  base.fx = base.fy = 0.8 * spec.width;
  base.cx = (spec.width - 1) / 2.0;
  base.cy = (spec.height - 1) / 2.0;
  base.z_min = 0.1;
  base.z_max = 10.0;

  std::vector<RgbdFrame> frames;
  frames.reserve(static_cast<size_t>(spec.n_views));
  for (int i = 0; i < spec.n_views; ++i) {
    const double angle =
        start_angle + 2.0 * std::numbers::pi * i / spec.n_views;
    const Vec3 eye = scene.ring_center +
                     Vec3(scene.ring_radius * std::cos(angle),
                          scene.ring_radius * std::sin(angle),
                          scene.camera_height);
    // Look across the ring: the target sits opposite the camera so each view
    // covers the scene center and the far side.
    Vec3 target = scene.look_target;
    if (spec.shape == SynthShape::kRoom) {
      target = scene.look_target - Vec3(std::cos(angle), std::sin(angle), 0.0);
    }

    RgbdFrame frame;
    frame.frame_id = i;
    frame.view = base;
    frame.view.pose = look_at(eye, target);
    frame.depth = ImageF(spec.width, spec.height, 1, 0.0);
    frame.color = ImageF(spec.width, spec.height, 3, 0.0);

    const Mat3 rot = frame.view.pose.topLeftCorner<3, 3>();
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        // Unnormalized direction with unit camera-z: the ray parameter of a
        // hit is directly the camera-space depth.
        const Vec3 dir = rot * base.pixel_ray(x, y);
        const SceneHit hit = scene.geometry.trace(eye, dir);
        if (hit.s >= base.z_min && hit.s <= base.z_max) {
          frame.depth(x, y) = hit.s;
          for (int c = 0; c < 3; ++c) frame.color(x, y, c) = hit.color[c];
        }
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void synth_scene(const SynthSceneSpec& spec, const std::string& out_dir) {
  const std::vector<RgbdFrame> frames = synth_frames(spec);
  std::filesystem::create_directories(out_dir);
  save_intrinsics(out_dir, frames.front().view);
  for (const RgbdFrame& f : frames) save_frame(out_dir, f);
}

}  // namespace voxkit
