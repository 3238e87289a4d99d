#include "depthduet/image.hpp"

#include <cmath>
#include <numeric>

#include "depthduet/errors.hpp"

namespace depthduet {

std::string domain_name(Domain d) { return d == Domain::kSynthetic ? "synthetic" : "real"; }

Domain parse_domain(const std::string& name) {
  if (name == "synthetic") return Domain::kSynthetic;
  if (name == "real") return Domain::kReal;
  throw FormatError("unknown domain tag '" + name + "' (expected 'synthetic' or 'real')");
}

std::size_t ValidityMask::count() const {
  return std::accumulate(values.begin(), values.end(), std::size_t{0});
}

namespace {
std::string shape_str(int h, int w) { return std::to_string(h) + "x" + std::to_string(w); }
}  // namespace

void require_same_shape(const DepthImage& a, const DepthImage& b, const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw ShapeError(std::string(what) + ": depth shapes differ, " +
                     shape_str(a.height, a.width) + " vs " + shape_str(b.height, b.width));
}

void require_same_shape(const DepthImage& a, const ValidityMask& m, const char* what) {
  if (a.height != m.height || a.width != m.width)
    throw ShapeError(std::string(what) + ": depth/mask shapes differ, " +
                     shape_str(a.height, a.width) + " vs " + shape_str(m.height, m.width));
}

void require_same_shape(const RgbImage& a, const DepthImage& b, const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw ShapeError(std::string(what) + ": rgb/depth shapes differ, " +
                     shape_str(a.height, a.width) + " vs " + shape_str(b.height, b.width));
}

void validate(const RgbImage& img) {
  if (img.height < 16 || img.width < 16)
    throw ShapeError("rgb image must be at least 16x16, got " +
                     shape_str(img.height, img.width));
  if (img.values.size() != static_cast<size_t>(img.height) * img.width * 3)
    throw ShapeError("rgb buffer size does not match dimensions");
  for (float v : img.values) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw RangeError("rgb value outside [0,1]: " + std::to_string(v));
  }
}

void validate(const DepthImage& depth, double d_min, double d_max) {
  if (depth.values.size() != static_cast<size_t>(depth.height) * depth.width)
    throw ShapeError("depth buffer size does not match dimensions");
  for (float v : depth.values) {
    if (!std::isfinite(v) || v < 0.0f)
      throw RangeError("depth value must be finite and non-negative, got " + std::to_string(v));
    if (v != 0.0f && (v < d_min || v > d_max))
      throw RangeError("nonzero depth " + std::to_string(v) + " outside [" +
                       std::to_string(d_min) + ", " + std::to_string(d_max) + "]");
  }
}

void validate(const ValidityMask& mask) {
  if (mask.values.size() != static_cast<size_t>(mask.height) * mask.width)
    throw ShapeError("mask buffer size does not match dimensions");
  for (std::uint8_t v : mask.values) {
    if (v > 1) throw RangeError("mask value must be binary, got " + std::to_string(int(v)));
  }
}

void validate(const Sample& sample) {
  require_same_shape(sample.rgb, sample.sparse_gt, "sample");
  require_same_shape(sample.sparse_gt, sample.dense_gt, "sample");
  require_same_shape(sample.dense_gt, sample.dense_mask, "sample");
  std::size_t nonzero = 0;
  for (float v : sample.sparse_gt.values)
    if (v != 0.0f) ++nonzero;
  const double frac = double(nonzero) / double(sample.sparse_gt.values.size());
  if (frac < 0.005 || frac > 0.30)
    throw RangeError("sparse_gt nonzero fraction " + std::to_string(frac) +
                     " outside [0.005, 0.30]");
}

}  // namespace depthduet
