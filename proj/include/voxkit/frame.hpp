#pragma once

#include "voxkit/geometry.hpp"
#include "voxkit/image.hpp"

namespace voxkit {

/// Registered RGB-D frame. Depth is metric (meters) with 0 marking invalid
/// pixels; color channels are in [0, 1].
struct RgbdFrame {
  CameraView view;
  ImageF depth;   // 1 channel
  ImageF color;   // 3 channels
  int frame_id = 0;

  bool depth_valid_at(int x, int y) const {
    return depth.contains(x, y) && depth(x, y) > 0.0;
  }
};

}  // namespace voxkit
