#ifndef DEPTHDUET_EVALUATE_HPP
#define DEPTHDUET_EVALUATE_HPP

#include <string>
#include <vector>

#include "depthduet/image.hpp"
#include "depthduet/metrics.hpp"

namespace depthduet {

enum class EvalTask { kEstimation, kCompletion };

EvalTask parse_eval_task(const std::string& name);

// Anything that can serve predictions for evaluation. Implementations may
// support one task only and throw ConfigError for the other.
class DensePredictor {
 public:
  virtual ~DensePredictor() = default;
  virtual DepthImage estimate(const RgbImage& rgb) const = 0;
  virtual DepthImage complete(const DepthImage& sparse) const = 0;
};

// nearest_neighbor_complete as a comparison oracle; estimation unsupported.
class NearestNeighborBaseline : public DensePredictor {
 public:
  DepthImage estimate(const RgbImage&) const override;
  DepthImage complete(const DepthImage& sparse) const override;
};

template <typename M>
struct MetricsReport {
  std::vector<std::string> ids;   // per evaluated sample
  std::vector<M> per_sample;
  M aggregate{};                  // mean of per-sample values
  std::size_t sample_count = 0;   // samples with >= 1 valid pixel
  std::size_t valid_pixel_count = 0;
};

MetricsReport<EstimationMetrics> evaluate_estimation(const DensePredictor& model,
                                                     const std::vector<Sample>& dataset,
                                                     double d_min = 1.0, double d_max = 80.0);
MetricsReport<CompletionMetrics> evaluate_completion(const DensePredictor& model,
                                                     const std::vector<Sample>& dataset);

// Header row, one row per sample, final `aggregate` row.
std::string to_csv(const MetricsReport<EstimationMetrics>& report);
std::string to_csv(const MetricsReport<CompletionMetrics>& report);

// Run the task-appropriate evaluation and write its CSV to `csv_path`
// (empty path = don't write). Returns the CSV text.
std::string evaluate_to_csv(const DensePredictor& model, const std::vector<Sample>& dataset,
                            EvalTask task, const std::string& csv_path, double d_min = 1.0,
                            double d_max = 80.0);

}  // namespace depthduet

#endif  // DEPTHDUET_EVALUATE_HPP
