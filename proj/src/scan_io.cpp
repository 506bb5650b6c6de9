#include "voxkit/scan_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "voxkit/png_io.hpp"

namespace fs = std::filesystem;

namespace voxkit {

namespace {

constexpr double kDepthScale = 1000.0;  // file stores millimeters

CameraView load_intrinsics(const std::string& dir) {
  const std::string path = dir + "/intrinsics.txt";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing intrinsics file: " + path);
  CameraView view;
  if (!(is >> view.fx >> view.fy >> view.cx >> view.cy >> view.width >>
        view.height))
    throw std::runtime_error("malformed intrinsics file: " + path);
  return view;
}

Mat4 load_pose(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing pose file: " + path);
  Mat4 pose;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (!(is >> pose(r, c)))
        throw std::runtime_error("malformed pose file: " + path);
  return pose;
}

}  // namespace

std::string frame_basename(int frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame-%06d", frame_id);
  return buf;
}

std::vector<RgbdFrame> load_scan(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a scan directory: " + dir);
  const CameraView base = load_intrinsics(dir);

  std::set<int> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    int id;
    if (std::sscanf(name.c_str(), "frame-%06d.", &id) == 1) ids.insert(id);
  }

  std::vector<RgbdFrame> frames;
  for (int id : ids) {
    const std::string stem = dir + "/" + frame_basename(id);
    RgbdFrame frame;
    frame.frame_id = id;
    frame.view = base;
    frame.view.pose = load_pose(stem + ".pose.txt");
    const std::string why = frame.view.check();
    if (!why.empty())
      throw std::runtime_error("invalid pose (" + why + "): " + stem +
                               ".pose.txt");

    const ImageU16 depth_raw = read_png_gray16(stem + ".depth.png");
    const ImageU8 color_raw = read_png_rgb8(stem + ".color.png");
    if (depth_raw.width() != base.width || depth_raw.height() != base.height)
      throw std::runtime_error("depth size does not match intrinsics: " + stem +
                               ".depth.png");
    if (color_raw.width() != base.width || color_raw.height() != base.height)
      throw std::runtime_error("color size does not match intrinsics: " + stem +
                               ".color.png");

    frame.depth = ImageF(base.width, base.height, 1);
    frame.color = ImageF(base.width, base.height, 3);
    for (int y = 0; y < base.height; ++y) {
      for (int x = 0; x < base.width; ++x) {
        frame.depth(x, y) = depth_raw(x, y) / kDepthScale;
        for (int c = 0; c < 3; ++c)
          frame.color(x, y, c) = color_raw(x, y, c) / 255.0;
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void save_intrinsics(const std::string& dir, const CameraView& view) {
  std::ofstream os(dir + "/intrinsics.txt");
  if (!os)
    throw std::runtime_error("cannot write intrinsics in: " + dir);
  os.precision(17);
  os << view.fx << " " << view.fy << " " << view.cx << " " << view.cy << " "
     << view.width << " " << view.height << "\n";
}

void save_frame(const std::string& dir, const RgbdFrame& frame) {
  fs::create_directories(dir);
  const std::string stem = dir + "/" + frame_basename(frame.frame_id);

  ImageU16 depth_raw(frame.depth.width(), frame.depth.height(), 1);
  for (int y = 0; y < frame.depth.height(); ++y) {
    for (int x = 0; x < frame.depth.width(); ++x) {
      const double mm = frame.depth(x, y) * kDepthScale;
      depth_raw(x, y) = static_cast<std::uint16_t>(
          std::clamp(std::lround(mm), 0l, 65535l));
    }
  }
  write_png_gray16(depth_raw, stem + ".depth.png");

  ImageU8 color_raw(frame.color.width(), frame.color.height(), 3);
  for (int y = 0; y < frame.color.height(); ++y)
    for (int x = 0; x < frame.color.width(); ++x)
      for (int c = 0; c < 3; ++c)
        color_raw(x, y, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(frame.color(x, y, c), 0.0, 1.0) * 255.0));
  write_png_rgb8(color_raw, stem + ".color.png");

  std::ofstream os(stem + ".pose.txt");
  if (!os) throw std::runtime_error("cannot write pose file: " + stem);
  os.precision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) os << frame.view.pose(r, c) << (c == 3 ? "" : " ");
    os << "\n";
  }
}

}  // namespace voxkit
