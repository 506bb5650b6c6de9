#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace voxkit {

// Row-major, channel-interleaved raster. (x, y) indexes column x of row y.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width),
        height_(height),
        channels_(channels),
        data_(static_cast<size_t>(width) * height * channels, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  bool contains(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  T& operator()(int x, int y, int c = 0) {
    assert(contains(x, y) && c >= 0 && c < channels_);
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  const T& operator()(int x, int y, int c = 0) const {
    assert(contains(x, y) && c >= 0 && c < channels_);
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using ImageF = Image<double>;
using ImageU8 = Image<std::uint8_t>;
using ImageU16 = Image<std::uint16_t>;

}  // namespace voxkit
