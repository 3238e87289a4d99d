#ifndef DEPTHDUET_SPARSITY_HPP
#define DEPTHDUET_SPARSITY_HPP

#include <cstdint>
#include <optional>

#include "depthduet/image.hpp"

namespace depthduet {

enum class SparsityStyle { kScanline, kUniform };

SparsityStyle parse_sparsity_style(const std::string& name);
std::string sparsity_style_name(SparsityStyle s);

// mask(p) = 0 where depth(p) = 0, 1 otherwise.
ValidityMask validity_mask(const DepthImage& depth);

// out(p) = dense(p) where mask(p) = 1, else 0.
DepthImage sparsify(const DepthImage& dense, const ValidityMask& mask);

// Synthesized measurement pattern. Deterministic per seed; places exactly
// round(density * H * W) valid pixels (density clamped to at most 0.999).
// Scanline style follows jittered horizontal bands, LiDAR-like; uniform style
// picks pixels uniformly at random.
ValidityMask sample_sparsity_pattern(std::uint64_t seed, int height, int width, double density,
                                     SparsityStyle style);

// Same, but every valid pixel falls inside `support` (used for real-domain
// samples, where the pattern must be a subset of the semi-dense GT mask while
// still realizing the full requested density).
ValidityMask sample_sparsity_pattern_in_support(std::uint64_t seed, const ValidityMask& support,
                                                double density, SparsityStyle style);

// Semi-dense ground-truth hole mask for the real domain: upper image band
// fully invalid, `density` of the whole image measured below it.
ValidityMask sample_real_holes(std::uint64_t seed, int height, int width, double density);

// Assemble one training example. For the synthetic domain dense_gt is the full
// scene (dense_mask from Eq. 4); for the real domain dense_gt keeps only the
// real_holes pixels and the sparse pattern is intersected with them.
Sample make_sample(const RgbImage& rgb, const DepthImage& dense, Domain domain,
                   const ValidityMask& pattern,
                   const std::optional<ValidityMask>& real_holes = std::nullopt);

}  // namespace depthduet

#endif  // DEPTHDUET_SPARSITY_HPP
