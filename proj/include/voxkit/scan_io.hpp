#pragma once

#include <string>
#include <vector>

#include "voxkit/frame.hpp"

namespace voxkit {

// Scan directory layout:
//   intrinsics.txt                "fx fy cx cy width height"
//   frame-NNNNNN.depth.png        16-bit grayscale, millimeters, 0 = invalid
//   frame-NNNNNN.color.png        8-bit RGB
//   frame-NNNNNN.pose.txt         4x4 row-major camera-to-world
std::string frame_basename(int frame_id);

/// Loads every complete frame triplet, sorted by id. A frame id with a
/// missing or malformed file fails with the offending path in the message.
std::vector<RgbdFrame> load_scan(const std::string& dir);

/// Writes one frame triplet (and intrinsics on first use) into `dir`.
void save_frame(const std::string& dir, const RgbdFrame& frame);

void save_intrinsics(const std::string& dir, const CameraView& view);

}  // namespace voxkit
