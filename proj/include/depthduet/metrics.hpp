#ifndef DEPTHDUET_METRICS_HPP
#define DEPTHDUET_METRICS_HPP

#include <string>
#include <vector>

#include "depthduet/image.hpp"

namespace depthduet {

// Monocular-estimation metric suite. Errors in meters over valid (gt > 0)
// pixels; predictions are clamped to [d_min, d_max] first.
struct EstimationMetrics {
  double abs_rel = 0.0;   // mean |p-g| / g
  double sq_rel = 0.0;    // mean (p-g)^2 / g
  double rmse_m = 0.0;    // sqrt(mean (p-g)^2)
  double rmse_log = 0.0;  // sqrt(mean (ln p - ln g)^2)
  double delta1 = 0.0;    // fraction with max(p/g, g/p) < 1.25
  double delta2 = 0.0;    // ... < 1.25^2
  double delta3 = 0.0;    // ... < 1.25^3
};

// Depth-completion metric suite, in millimeters over valid pixels.
struct CompletionMetrics {
  double rmse_mm = 0.0;
  double mae_mm = 0.0;
};

EstimationMetrics estimation_metrics(const DepthImage& pred, const DepthImage& gt,
                                     double d_min = 1.0, double d_max = 80.0);
CompletionMetrics completion_metrics(const DepthImage& pred, const DepthImage& gt);

// Classical completion baseline: every pixel takes the depth of its nearest
// valid pixel (Euclidean pixel distance, ties to smaller row then column).
DepthImage nearest_neighbor_complete(const DepthImage& sparse);

std::size_t valid_pixel_count(const DepthImage& gt);

}  // namespace depthduet

#endif  // DEPTHDUET_METRICS_HPP
