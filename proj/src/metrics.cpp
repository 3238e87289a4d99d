#include "depthduet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "depthduet/errors.hpp"

namespace depthduet {

std::size_t valid_pixel_count(const DepthImage& gt) {
  std::size_t n = 0;
  for (float v : gt.values)
    if (v > 0.0f) ++n;
  return n;
}

EstimationMetrics estimation_metrics(const DepthImage& pred, const DepthImage& gt, double d_min,
                                     double d_max) {
  require_same_shape(pred, gt, "estimation_metrics");
  double sum_abs_rel = 0.0, sum_sq_rel = 0.0, sum_sq = 0.0, sum_sq_log = 0.0;
  std::size_t n = 0, n_d1 = 0, n_d2 = 0, n_d3 = 0;
  const double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;

  for (size_t i = 0; i < gt.values.size(); ++i) {
    const double g = gt.values[i];
    if (g <= 0.0) continue;
    const double p = std::clamp(static_cast<double>(pred.values[i]), d_min, d_max);
    const double diff = p - g;
    sum_abs_rel += std::abs(diff) / g;
    sum_sq_rel += diff * diff / g;
    sum_sq += diff * diff;
    const double dl = std::log(p) - std::log(g);
    sum_sq_log += dl * dl;
    const double ratio = std::max(p / g, g / p);
    if (ratio < t1) ++n_d1;
    if (ratio < t2) ++n_d2;
    if (ratio < t3) ++n_d3;
    ++n;
  }
  if (n == 0) throw NumericError("estimation_metrics: ground truth has no valid pixels");

  EstimationMetrics m;
  const double dn = static_cast<double>(n);
  m.abs_rel = sum_abs_rel / dn;
  m.sq_rel = sum_sq_rel / dn;
  m.rmse_m = std::sqrt(sum_sq / dn);
  m.rmse_log = std::sqrt(sum_sq_log / dn);
  m.delta1 = n_d1 / dn;
  m.delta2 = n_d2 / dn;
  m.delta3 = n_d3 / dn;
  return m;
}

CompletionMetrics completion_metrics(const DepthImage& pred, const DepthImage& gt) {
  require_same_shape(pred, gt, "completion_metrics");
  double sum_abs = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (size_t i = 0; i < gt.values.size(); ++i) {
    const double g = gt.values[i];
    if (g <= 0.0) continue;
    const double diff = static_cast<double>(pred.values[i]) - g;
    sum_abs += std::abs(diff);
    sum_sq += diff * diff;
    ++n;
  }
  if (n == 0) throw NumericError("completion_metrics: ground truth has no valid pixels");

  CompletionMetrics m;
  m.mae_mm = 1000.0 * sum_abs / static_cast<double>(n);
  m.rmse_mm = 1000.0 * std::sqrt(sum_sq / static_cast<double>(n));
  return m;
}

DepthImage nearest_neighbor_complete(const DepthImage& sparse) {
  struct Valid {
    int r, c;
    float d;
  };
  std::vector<Valid> valid;
  for (int r = 0; r < sparse.height; ++r)
    for (int c = 0; c < sparse.width; ++c)
      if (sparse.at(r, c) != 0.0f) valid.push_back({r, c, sparse.at(r, c)});
  if (valid.empty())
    throw NumericError("nearest_neighbor_complete: input has no valid pixels");

  // valid is in row-major order; keeping the first strictly-nearer hit
  // implements the smaller-row-then-column tie rule.
  DepthImage out(sparse.height, sparse.width);
  for (int r = 0; r < sparse.height; ++r) {
    for (int c = 0; c < sparse.width; ++c) {
      long best = -1;
      float best_d = 0.0f;
      for (const Valid& v : valid) {
        const long dr = v.r - r, dc = v.c - c;
        const long dist = dr * dr + dc * dc;
        if (best < 0 || dist < best) {
          best = dist;
          best_d = v.d;
          if (dist == 0) break;
        }
      }
      out.at(r, c) = best_d;
    }
  }
  return out;
}

}  // namespace depthduet
