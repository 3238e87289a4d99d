#ifndef DEPTHDUET_IMAGE_HPP
#define DEPTHDUET_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace depthduet {

enum class Domain { kSynthetic, kReal };

std::string domain_name(Domain d);
Domain parse_domain(const std::string& name);

// H x W x 3 colour image, interleaved, values in [0,1].
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // size height*width*3

  RgbImage() = default;
  RgbImage(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w * 3, 0.0f) {}

  float& at(int r, int c, int ch) { return values[(static_cast<size_t>(r) * width + c) * 3 + ch]; }
  float at(int r, int c, int ch) const {
    return values[(static_cast<size_t>(r) * width + c) * 3 + ch];
  }
};

// H x W metric depth in meters. 0.0 exclusively means "no measurement".
struct DepthImage {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // row-major, size height*width

  DepthImage() = default;
  DepthImage(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0.0f) {}

  float& at(int r, int c) { return values[static_cast<size_t>(r) * width + c]; }
  float at(int r, int c) const { return values[static_cast<size_t>(r) * width + c]; }
};

// H x W binary mask of measured pixels.
struct ValidityMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;  // {0,1}

  ValidityMask() = default;
  ValidityMask(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0) {}

  std::uint8_t& at(int r, int c) { return values[static_cast<size_t>(r) * width + c]; }
  std::uint8_t at(int r, int c) const { return values[static_cast<size_t>(r) * width + c]; }

  std::size_t count() const;
};

// One training example: RGB + sparse target + dense target + mask + domain tag.
struct Sample {
  std::string id;
  RgbImage rgb;
  DepthImage sparse_gt;
  DepthImage dense_gt;
  ValidityMask dense_mask;
  Domain domain = Domain::kSynthetic;
};

// Shape checks. Throw ShapeError with the offending dimensions.
void require_same_shape(const DepthImage& a, const DepthImage& b, const char* what);
void require_same_shape(const DepthImage& a, const ValidityMask& m, const char* what);
void require_same_shape(const RgbImage& a, const DepthImage& b, const char* what);

// Invariant checks; throw RangeError/ShapeError on violation.
void validate(const RgbImage& img);
void validate(const DepthImage& depth, double d_min, double d_max);
void validate(const ValidityMask& mask);
void validate(const Sample& sample);

}  // namespace depthduet

#endif  // DEPTHDUET_IMAGE_HPP
