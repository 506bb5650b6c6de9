#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxkit/frame.hpp"

namespace voxkit {

enum class SynthShape { kSphere, kBox, kRoom };

SynthShape synth_shape_from_name(const std::string& name);

/// Analytic test scenes rendered by exact ray intersection with flat
/// per-object colors. `size` scales the main dimension (sphere radius, box
/// half-extent, room width); <= 0 picks the shape default. Cameras sit on a
/// ring around (sphere/box) or inside (room) the scene, looking at its
/// center; the seed rotates the ring start so different seeds give different
/// viewpoints.
struct SynthSceneSpec {
  SynthShape shape = SynthShape::kRoom;
  double size = 0.0;
  int n_views = 12;
  std::uint64_t seed = 0;
  int width = 160;
  int height = 120;
};

std::vector<RgbdFrame> synth_frames(const SynthSceneSpec& spec);

/// synth_frames written out as a scan directory.
void synth_scene(const SynthSceneSpec& spec, const std::string& out_dir);

}  // namespace voxkit
