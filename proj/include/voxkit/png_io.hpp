#pragma once

#include <string>

#include "voxkit/image.hpp"

namespace voxkit {

void write_png_gray16(const ImageU16& img, const std::string& path);
void write_png_gray8(const ImageU8& img, const std::string& path);
void write_png_rgb8(const ImageU8& img, const std::string& path);  // 3 channels

ImageU16 read_png_gray16(const std::string& path);
ImageU8 read_png_rgb8(const std::string& path);

}  // namespace voxkit
