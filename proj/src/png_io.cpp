#include "depthduet/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "depthduet/errors.hpp"

namespace depthduet {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

FilePtr open_or_throw(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError(std::string(mode[0] == 'r' ? "cannot open file for reading: "
                                             : "cannot open file for writing: ") +
                  path);
  }
  return f;
}

}  // namespace

DepthImage load_depth_png(const std::string& path) {
  FilePtr f = open_or_throw(path, "rb");
  PngReader r;
  if (!r.png || !r.info) throw IoError("libpng allocation failed");
  if (setjmp(png_jmpbuf(r.png))) throw FormatError("corrupt PNG file: " + path);

  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int channels = png_get_channels(r.png, r.info);
  const int color_type = png_get_color_type(r.png, r.info);
  if (bit_depth != 16)
    throw FormatError("depth PNG '" + path + "' has bit depth " + std::to_string(bit_depth) +
                      ", expected 16");
  if (channels != 1 || color_type != PNG_COLOR_TYPE_GRAY)
    throw FormatError("depth PNG '" + path + "' has " + std::to_string(channels) +
                      " channels, expected 1 (grayscale)");

  const int width = static_cast<int>(png_get_image_width(r.png, r.info));
  const int height = static_cast<int>(png_get_image_height(r.png, r.info));

  std::vector<std::uint8_t> row(static_cast<size_t>(width) * 2);
  DepthImage depth(height, width);
  for (int y = 0; y < height; ++y) {
    png_read_row(r.png, row.data(), nullptr);
    for (int x = 0; x < width; ++x) {
      // PNG stores 16-bit samples big-endian.
      const std::uint16_t raw =
          static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      depth.at(y, x) = static_cast<float>(raw) / 256.0f;
    }
  }
  png_read_end(r.png, nullptr);
  return depth;
}

void save_depth_png(const DepthImage& depth, const std::string& path) {
  constexpr double kMaxMeters = 65535.0 / 256.0;
  std::vector<std::uint16_t> raw(depth.values.size());
  for (size_t i = 0; i < depth.values.size(); ++i) {
    const float v = depth.values[i];
    if (!std::isfinite(v) || v < 0.0f || v > kMaxMeters)
      throw RangeError("depth value " + std::to_string(v) + " m outside encodable range [0, " +
                       std::to_string(kMaxMeters) + "] m");
    long q = std::lround(double(v) * 256.0);
    if (q < 0) q = 0;
    if (q > 65535) q = 65535;
    raw[i] = static_cast<std::uint16_t>(q);
  }

  FilePtr f = open_or_throw(path, "wb");
  PngWriter w;
  if (!w.png || !w.info) throw IoError("libpng allocation failed");
  if (setjmp(png_jmpbuf(w.png))) throw IoError("failed writing PNG: " + path);

  png_init_io(w.png, f.get());
  png_set_IHDR(w.png, w.info, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);

  std::vector<std::uint8_t> row(static_cast<size_t>(depth.width) * 2);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      const std::uint16_t v = raw[static_cast<size_t>(y) * depth.width + x];
      row[2 * x] = static_cast<std::uint8_t>(v >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    png_write_row(w.png, row.data());
  }
  png_write_end(w.png, nullptr);
}

RgbImage load_rgb_png(const std::string& path) {
  FilePtr f = open_or_throw(path, "rb");
  PngReader r;
  if (!r.png || !r.info) throw IoError("libpng allocation failed");
  if (setjmp(png_jmpbuf(r.png))) throw FormatError("corrupt PNG file: " + path);

  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int channels = png_get_channels(r.png, r.info);
  if (bit_depth != 8)
    throw FormatError("rgb PNG '" + path + "' has bit depth " + std::to_string(bit_depth) +
                      ", expected 8");
  if (channels != 3)
    throw FormatError("rgb PNG '" + path + "' has " + std::to_string(channels) +
                      " channels, expected 3");

  const int width = static_cast<int>(png_get_image_width(r.png, r.info));
  const int height = static_cast<int>(png_get_image_height(r.png, r.info));

  std::vector<std::uint8_t> row(static_cast<size_t>(width) * 3);
  RgbImage img(height, width);
  for (int y = 0; y < height; ++y) {
    png_read_row(r.png, row.data(), nullptr);
    for (int x = 0; x < width; ++x)
      for (int ch = 0; ch < 3; ++ch)
        img.at(y, x, ch) = static_cast<float>(row[3 * x + ch]) / 255.0f;
  }
  png_read_end(r.png, nullptr);
  return img;
}

void save_rgb_png(const RgbImage& img, const std::string& path) {
  FilePtr f = open_or_throw(path, "wb");
  PngWriter w;
  if (!w.png || !w.info) throw IoError("libpng allocation failed");
  if (setjmp(png_jmpbuf(w.png))) throw IoError("failed writing PNG: " + path);

  png_init_io(w.png, f.get());
  png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);

  std::vector<std::uint8_t> row(static_cast<size_t>(img.width) * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        float v = img.at(y, x, ch);
        v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        row[3 * x + ch] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
    png_write_row(w.png, row.data());
  }
  png_write_end(w.png, nullptr);
}

}  // namespace depthduet
