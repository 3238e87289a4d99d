#include "depthduet/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "depthduet/errors.hpp"
#include "depthduet/rng.hpp"

namespace depthduet {

SparsityStyle parse_sparsity_style(const std::string& name) {
  if (name == "scanline") return SparsityStyle::kScanline;
  if (name == "uniform") return SparsityStyle::kUniform;
  throw ConfigError("unknown sparsity style '" + name + "' (expected scanline|uniform)");
}

std::string sparsity_style_name(SparsityStyle s) {
  return s == SparsityStyle::kScanline ? "scanline" : "uniform";
}

ValidityMask validity_mask(const DepthImage& depth) {
  ValidityMask mask(depth.height, depth.width);
  for (size_t i = 0; i < depth.values.size(); ++i)
    mask.values[i] = depth.values[i] != 0.0f ? 1 : 0;
  return mask;
}

DepthImage sparsify(const DepthImage& dense, const ValidityMask& mask) {
  require_same_shape(dense, mask, "sparsify");
  DepthImage out(dense.height, dense.width);
  for (size_t i = 0; i < dense.values.size(); ++i)
    out.values[i] = mask.values[i] ? dense.values[i] : 0.0f;
  return out;
}

namespace {

double clamp_density(double density) {
  if (density <= 0.0) throw ConfigError("density must be positive, got " + std::to_string(density));
  return std::min(density, 0.999);
}

// Choose `take` entries of `candidates` at random, marking them in `mask`.
// Returns the number actually marked (skips already-set pixels).
std::size_t take_from(Rng& rng, std::vector<std::size_t>& candidates, std::size_t take,
                      ValidityMask& mask) {
  std::size_t marked = 0;
  std::size_t n = candidates.size();
  while (marked < take && n > 0) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(n) - 1));
    const std::size_t idx = candidates[j];
    candidates[j] = candidates[--n];
    if (!mask.values[idx]) {
      mask.values[idx] = 1;
      ++marked;
    }
  }
  candidates.resize(n);
  return marked;
}

ValidityMask pattern_impl(std::uint64_t seed, int height, int width, double density,
                          SparsityStyle style, const ValidityMask* support) {
  if (height <= 0 || width <= 0) throw ShapeError("pattern dimensions must be positive");
  density = clamp_density(density);
  Rng rng(seed);
  const std::size_t total = static_cast<std::size_t>(height) * width;
  std::size_t target = static_cast<std::size_t>(std::llround(density * double(total)));
  if (target == 0) target = 1;

  auto in_support = [&](std::size_t idx) { return support == nullptr || support->values[idx]; };

  ValidityMask mask(height, width);

  if (style == SparsityStyle::kUniform) {
    std::vector<std::size_t> pool;
    pool.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
      if (in_support(i)) pool.push_back(i);
    if (pool.empty()) throw DatasetError("sparsity support mask is empty");
    take_from(rng, pool, std::min(target, pool.size()), mask);
    return mask;
  }

  // Scanline: jittered horizontal bands with dashed fill. Candidate pixels
  // trace sinusoidal scan rows; the exact target count is then drawn from
  // them, topping up uniformly if the bands cannot carry the density.
  const double row_fill = 0.55;
  int n_rows = std::max(1, static_cast<int>(std::llround(density * height / row_fill)));
  n_rows = std::min(n_rows, height);
  std::vector<std::size_t> candidates;
  candidates.reserve(static_cast<std::size_t>(n_rows) * width);
  for (int i = 0; i < n_rows; ++i) {
    const double base = (i + 0.5) * double(height) / n_rows;
    const double amp = rng.uniform(0.5, 1.8);
    const double freq = rng.uniform(1.0, 3.0);
    const double phase = rng.uniform(0.0, 6.283185307179586);
    for (int c = 0; c < width; ++c) {
      const double jitter = amp * std::sin(freq * 6.283185307179586 * c / width + phase);
      const int r = static_cast<int>(std::llround(base + jitter));
      if (r < 0 || r >= height) continue;
      const std::size_t idx = static_cast<std::size_t>(r) * width + c;
      if (in_support(idx)) candidates.push_back(idx);
    }
  }
  std::size_t marked = take_from(rng, candidates, std::min(target, candidates.size()), mask);
  if (marked < target) {
    std::vector<std::size_t> pool;
    pool.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
      if (!mask.values[i] && in_support(i)) pool.push_back(i);
    marked += take_from(rng, pool, std::min(target - marked, pool.size()), mask);
  }
  if (marked == 0) throw DatasetError("sparsity support mask is empty");
  return mask;
}

}  // namespace

ValidityMask sample_sparsity_pattern(std::uint64_t seed, int height, int width, double density,
                                     SparsityStyle style) {
  return pattern_impl(seed, height, width, density, style, nullptr);
}

ValidityMask sample_sparsity_pattern_in_support(std::uint64_t seed, const ValidityMask& support,
                                                double density, SparsityStyle style) {
  return pattern_impl(seed, support.height, support.width, density, style, &support);
}

ValidityMask sample_real_holes(std::uint64_t seed, int height, int width, double density) {
  if (density <= 0.0 || density >= 1.0)
    throw ConfigError("holes density must be in (0,1), got " + std::to_string(density));
  Rng rng(seed);
  ValidityMask mask(height, width);
  const int band = static_cast<int>(std::llround(0.34 * height));  // fully-invalid upper band
  const std::size_t total = static_cast<std::size_t>(height) * width;
  std::size_t target = static_cast<std::size_t>(std::llround(density * double(total)));
  std::vector<std::size_t> pool;
  pool.reserve(total);
  for (int r = band; r < height; ++r)
    for (int c = 0; c < width; ++c) pool.push_back(static_cast<std::size_t>(r) * width + c);
  target = std::min(target, pool.size());
  take_from(rng, pool, target, mask);
  return mask;
}

Sample make_sample(const RgbImage& rgb, const DepthImage& dense, Domain domain,
                   const ValidityMask& pattern, const std::optional<ValidityMask>& real_holes) {
  require_same_shape(rgb, dense, "make_sample");
  require_same_shape(dense, pattern, "make_sample");

  Sample s;
  s.rgb = rgb;
  s.domain = domain;
  if (domain == Domain::kSynthetic) {
    s.sparse_gt = sparsify(dense, pattern);
    s.dense_gt = dense;
    s.dense_mask = validity_mask(dense);
  } else {
    if (!real_holes) throw ConfigError("real-domain sample requires a real_holes mask");
    require_same_shape(dense, *real_holes, "make_sample");
    // pattern must be a subset of the semi-dense GT support
    ValidityMask effective(pattern.height, pattern.width);
    for (size_t i = 0; i < effective.values.size(); ++i)
      effective.values[i] = pattern.values[i] & real_holes->values[i];
    s.sparse_gt = sparsify(dense, effective);
    s.dense_gt = sparsify(dense, *real_holes);
    s.dense_mask = *real_holes;
  }
  return s;
}

}  // namespace depthduet
