#include "voxkit/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace voxkit {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

void write_png(const std::string& path, int width, int height, int color_type,
               int bit_depth, const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("cannot open for writing", path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail("libpng initialization failed", path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("libpng write error", path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // buffers are host little-endian
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FilePtr fp;

  explicit PngReader(const std::string& path) : fp(std::fopen(path.c_str(), "rb")) {
    if (!fp) fail("cannot open PNG file", path);
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
    info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
      png_destroy_read_struct(&png, &info, nullptr);
      fail("libpng initialization failed", path);
    }
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

}  // namespace

void write_png_gray16(const ImageU16& img, const std::string& path) {
  std::vector<png_bytep> rows(static_cast<size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(&img(0, y)));
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

void write_png_gray8(const ImageU8& img, const std::string& path) {
  std::vector<png_bytep> rows(static_cast<size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(&img(0, y));
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
}

void write_png_rgb8(const ImageU8& img, const std::string& path) {
  if (img.channels() != 3)
    throw std::invalid_argument("write_png_rgb8: need 3 channels");
  std::vector<png_bytep> rows(static_cast<size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(&img(0, y, 0));
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

ImageU16 read_png_gray16(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail("libpng read error", path);
  png_init_io(r.png, r.fp.get());
  png_read_info(r.png, r.info);
  if (png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(r.png, r.info) != 16)
    fail("expected 16-bit grayscale PNG", path);
  png_set_swap(r.png);
  const int w = static_cast<int>(png_get_image_width(r.png, r.info));
  const int h = static_cast<int>(png_get_image_height(r.png, r.info));
  ImageU16 img(w, h, 1);
  std::vector<png_bytep> rows(static_cast<size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(&img(0, y));
  png_read_image(r.png, rows.data());
  return img;
}

ImageU8 read_png_rgb8(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail("libpng read error", path);
  png_init_io(r.png, r.fp.get());
  png_read_info(r.png, r.info);
  if (png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_RGB ||
      png_get_bit_depth(r.png, r.info) != 8)
    fail("expected 8-bit RGB PNG", path);
  const int w = static_cast<int>(png_get_image_width(r.png, r.info));
  const int h = static_cast<int>(png_get_image_height(r.png, r.info));
  ImageU8 img(w, h, 3);
  std::vector<png_bytep> rows(static_cast<size_t>(h));
  for (int y = 0; y < h; ++y) rows[y] = &img(0, y, 0);
  png_read_image(r.png, rows.data());
  return img;
}

}  // namespace voxkit
