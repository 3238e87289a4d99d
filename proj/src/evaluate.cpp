#include "depthduet/evaluate.hpp"

#include <fstream>
#include <sstream>

#include "depthduet/errors.hpp"
#include "depthduet/sparsity.hpp"

namespace depthduet {

EvalTask parse_eval_task(const std::string& name) {
  if (name == "estimation") return EvalTask::kEstimation;
  if (name == "completion") return EvalTask::kCompletion;
  throw ConfigError("unknown task '" + name + "' (expected estimation|completion)");
}

DepthImage NearestNeighborBaseline::estimate(const RgbImage&) const {
  throw ConfigError("nearest-neighbor baseline supports the completion task only");
}

DepthImage NearestNeighborBaseline::complete(const DepthImage& sparse) const {
  return nearest_neighbor_complete(sparse);
}

namespace {

// GT restricted to the sample's validity mask; Eq. 4 semantics keep invalid
// pixels out of every metric.
DepthImage masked_gt(const Sample& s) { return sparsify(s.dense_gt, s.dense_mask); }

template <typename M, typename MetricFn, typename PredictFn>
MetricsReport<M> evaluate_impl(const std::vector<Sample>& dataset, PredictFn predict,
                               MetricFn metric) {
  if (dataset.empty()) throw DatasetError("evaluation dataset is empty");
  MetricsReport<M> report;
  for (const Sample& s : dataset) {
    const DepthImage gt = masked_gt(s);
    const std::size_t valid = valid_pixel_count(gt);
    if (valid == 0) continue;  // excluded from the aggregate
    const DepthImage pred = predict(s);
    report.ids.push_back(s.id);
    report.per_sample.push_back(metric(pred, gt));
    report.valid_pixel_count += valid;
  }
  report.sample_count = report.per_sample.size();
  if (report.sample_count == 0)
    throw NumericError("evaluation found no sample with valid ground-truth pixels");
  return report;
}

EstimationMetrics mean_of(const std::vector<EstimationMetrics>& v) {
  EstimationMetrics m;
  for (const auto& x : v) {
    m.abs_rel += x.abs_rel;
    m.sq_rel += x.sq_rel;
    m.rmse_m += x.rmse_m;
    m.rmse_log += x.rmse_log;
    m.delta1 += x.delta1;
    m.delta2 += x.delta2;
    m.delta3 += x.delta3;
  }
  const double n = static_cast<double>(v.size());
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.rmse_m /= n;
  m.rmse_log /= n;
  m.delta1 /= n;
  m.delta2 /= n;
  m.delta3 /= n;
  return m;
}

CompletionMetrics mean_of(const std::vector<CompletionMetrics>& v) {
  CompletionMetrics m;
  for (const auto& x : v) {
    m.rmse_mm += x.rmse_mm;
    m.mae_mm += x.mae_mm;
  }
  m.rmse_mm /= static_cast<double>(v.size());
  m.mae_mm /= static_cast<double>(v.size());
  return m;
}

void write_row(std::ostringstream& out, const std::string& id, const EstimationMetrics& m) {
  out << id << "," << m.abs_rel << "," << m.sq_rel << "," << m.rmse_m << "," << m.rmse_log << ","
      << m.delta1 << "," << m.delta2 << "," << m.delta3 << "\n";
}

void write_row(std::ostringstream& out, const std::string& id, const CompletionMetrics& m) {
  out << id << "," << m.rmse_mm << "," << m.mae_mm << "\n";
}

template <typename M>
std::string csv_impl(const MetricsReport<M>& report, const char* header) {
  std::ostringstream out;
  out.precision(12);
  out << header << "\n";
  for (std::size_t i = 0; i < report.per_sample.size(); ++i)
    write_row(out, report.ids[i], report.per_sample[i]);
  write_row(out, "aggregate", report.aggregate);
  return out.str();
}

}  // namespace

MetricsReport<EstimationMetrics> evaluate_estimation(const DensePredictor& model,
                                                     const std::vector<Sample>& dataset,
                                                     double d_min, double d_max) {
  auto report = evaluate_impl<EstimationMetrics>(
      dataset, [&](const Sample& s) { return model.estimate(s.rgb); },
      [&](const DepthImage& p, const DepthImage& g) {
        return estimation_metrics(p, g, d_min, d_max);
      });
  report.aggregate = mean_of(report.per_sample);
  return report;
}

MetricsReport<CompletionMetrics> evaluate_completion(const DensePredictor& model,
                                                     const std::vector<Sample>& dataset) {
  auto report = evaluate_impl<CompletionMetrics>(
      dataset, [&](const Sample& s) { return model.complete(s.sparse_gt); },
      [&](const DepthImage& p, const DepthImage& g) { return completion_metrics(p, g); });
  report.aggregate = mean_of(report.per_sample);
  return report;
}

std::string to_csv(const MetricsReport<EstimationMetrics>& report) {
  return csv_impl(report, "id,abs_rel,sq_rel,rmse_m,rmse_log,delta1,delta2,delta3");
}

std::string to_csv(const MetricsReport<CompletionMetrics>& report) {
  return csv_impl(report, "id,rmse_mm,mae_mm");
}

std::string evaluate_to_csv(const DensePredictor& model, const std::vector<Sample>& dataset,
                            EvalTask task, const std::string& csv_path, double d_min,
                            double d_max) {
  std::string csv;
  if (task == EvalTask::kEstimation)
    csv = to_csv(evaluate_estimation(model, dataset, d_min, d_max));
  else
    csv = to_csv(evaluate_completion(model, dataset));
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write metrics CSV: " + csv_path);
    out << csv;
  }
  return csv;
}

}  // namespace depthduet
