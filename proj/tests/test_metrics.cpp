#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "depthduet/errors.hpp"
#include "depthduet/evaluate.hpp"
#include "depthduet/metrics.hpp"
#include "depthduet/rng.hpp"
#include "depthduet/sparsity.hpp"

using namespace depthduet;

namespace {

// Scalar per-pixel reference implementation, intentionally naive: collects
// per-pixel terms into vectors and reduces them one by one.
EstimationMetrics reference_estimation(const DepthImage& pred, const DepthImage& gt, double d_min,
                                       double d_max) {
  std::vector<double> abs_rel, sq_rel, sq, sq_log, ratios;
  for (int r = 0; r < gt.height; ++r) {
    for (int c = 0; c < gt.width; ++c) {
      const double g = gt.at(r, c);
      if (!(g > 0.0)) continue;
      double p = pred.at(r, c);
      if (p < d_min) p = d_min;
      if (p > d_max) p = d_max;
      abs_rel.push_back(std::fabs(p - g) / g);
      sq_rel.push_back((p - g) * (p - g) / g);
      sq.push_back((p - g) * (p - g));
      sq_log.push_back(std::pow(std::log(p) - std::log(g), 2.0));
      ratios.push_back(std::max(p / g, g / p));
    }
  }
  REQUIRE(!abs_rel.empty());
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  auto frac_below = [&](double t) {
    std::size_t n = 0;
    for (double x : ratios)
      if (x < t) ++n;
    return double(n) / double(ratios.size());
  };
  EstimationMetrics m;
  m.abs_rel = mean(abs_rel);
  m.sq_rel = mean(sq_rel);
  m.rmse_m = std::sqrt(mean(sq));
  m.rmse_log = std::sqrt(mean(sq_log));
  m.delta1 = frac_below(1.25);
  m.delta2 = frac_below(1.25 * 1.25);
  m.delta3 = frac_below(1.25 * 1.25 * 1.25);
  return m;
}

CompletionMetrics reference_completion(const DepthImage& pred, const DepthImage& gt) {
  std::vector<double> abs, sq;
  for (int r = 0; r < gt.height; ++r) {
    for (int c = 0; c < gt.width; ++c) {
      const double g = gt.at(r, c);
      if (!(g > 0.0)) continue;
      abs.push_back(std::fabs(double(pred.at(r, c)) - g));
      sq.push_back(std::pow(double(pred.at(r, c)) - g, 2.0));
    }
  }
  REQUIRE(!abs.empty());
  CompletionMetrics m;
  double sa = 0.0, ss = 0.0;
  for (double x : abs) sa += x;
  for (double x : sq) ss += x;
  m.mae_mm = 1000.0 * sa / double(abs.size());
  m.rmse_mm = 1000.0 * std::sqrt(ss / double(sq.size()));
  return m;
}

DepthImage random_depth(Rng& rng, int h, int w, double lo, double hi, double hole_p = 0.0) {
  DepthImage d(h, w);
  for (float& v : d.values)
    v = rng.bernoulli(hole_p) ? 0.0f : static_cast<float>(rng.uniform(lo, hi));
  return d;
}

constexpr double kTol = 1e-9;

void check_close(const EstimationMetrics& a, const EstimationMetrics& b) {
  CHECK(a.abs_rel == doctest::Approx(b.abs_rel).epsilon(kTol));
  CHECK(a.sq_rel == doctest::Approx(b.sq_rel).epsilon(kTol));
  CHECK(a.rmse_m == doctest::Approx(b.rmse_m).epsilon(kTol));
  CHECK(a.rmse_log == doctest::Approx(b.rmse_log).epsilon(kTol));
  CHECK(a.delta1 == doctest::Approx(b.delta1).epsilon(kTol));
  CHECK(a.delta2 == doctest::Approx(b.delta2).epsilon(kTol));
  CHECK(a.delta3 == doctest::Approx(b.delta3).epsilon(kTol));
}

}  // namespace

TEST_CASE("estimation metrics: identity and constant-ratio fixtures") {
  Rng rng(2);
  DepthImage gt = random_depth(rng, 16, 16, 2.0, 30.0);

  const EstimationMetrics same = estimation_metrics(gt, gt);
  CHECK(same.abs_rel == 0.0);
  CHECK(same.sq_rel == 0.0);
  CHECK(same.rmse_m == 0.0);
  CHECK(same.rmse_log == 0.0);
  CHECK(same.delta1 == 1.0);
  CHECK(same.delta2 == 1.0);
  CHECK(same.delta3 == 1.0);

  // pred = 2*gt (values kept below d_max/2 so clamping stays inactive)
  DepthImage doubled(16, 16);
  for (size_t i = 0; i < gt.values.size(); ++i) doubled.values[i] = 2.0f * gt.values[i];
  const EstimationMetrics two = estimation_metrics(doubled, gt);
  CHECK(two.abs_rel == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(two.rmse_log == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(two.delta1 == 0.0);
  CHECK(two.delta2 == 0.0);
  CHECK(two.delta3 == 0.0);  // 2 > 1.25^3 = 1.953125
}

TEST_CASE("estimation metrics: dual-implementation oracle on 100 random instances") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const DepthImage gt = random_depth(rng, 16, 16, 1.0, 80.0, 0.2);
    DepthImage pred = random_depth(rng, 16, 16, 0.5, 100.0);  // exercises clamping
    if (valid_pixel_count(gt) == 0) continue;
    check_close(estimation_metrics(pred, gt), reference_estimation(pred, gt, 1.0, 80.0));
  }
}

TEST_CASE("estimation metrics: empty evaluation raises") {
  DepthImage gt(8, 8);
  DepthImage pred(8, 8);
  CHECK_THROWS_AS(estimation_metrics(pred, gt), NumericError);
}

TEST_CASE("estimation metrics: scale covariance properties") {
  Rng rng(8);
  const DepthImage gt = random_depth(rng, 16, 16, 2.0, 20.0);
  const DepthImage pred = random_depth(rng, 16, 16, 2.0, 20.0);
  // widen the clamp range so scaling stays inside it
  const EstimationMetrics base = estimation_metrics(pred, gt, 0.01, 1000.0);

  const double c = 3.0;
  DepthImage gt_c(16, 16), pred_c(16, 16);
  for (size_t i = 0; i < gt.values.size(); ++i) {
    gt_c.values[i] = static_cast<float>(c) * gt.values[i];
    pred_c.values[i] = static_cast<float>(c) * pred.values[i];
  }
  const EstimationMetrics scaled = estimation_metrics(pred_c, gt_c, 0.01, 1000.0);
  CHECK(scaled.abs_rel == doctest::Approx(base.abs_rel).epsilon(1e-5));
  CHECK(scaled.sq_rel == doctest::Approx(c * base.sq_rel).epsilon(1e-5));
  CHECK(scaled.rmse_m == doctest::Approx(c * base.rmse_m).epsilon(1e-5));
  CHECK(scaled.rmse_log == doctest::Approx(base.rmse_log).epsilon(1e-4));
  CHECK(scaled.delta1 == base.delta1);
  CHECK(scaled.delta2 == base.delta2);
  CHECK(scaled.delta3 == base.delta3);

  CHECK(base.delta1 <= base.delta2);
  CHECK(base.delta2 <= base.delta3);
}

TEST_CASE("completion metrics: fixtures and Jensen inequality") {
  DepthImage gt(4, 4), pred(4, 4);
  gt.at(1, 1) = 5.5f;
  pred.at(1, 1) = 5.0f;
  const CompletionMetrics single = completion_metrics(pred, gt);
  CHECK(single.mae_mm == doctest::Approx(500.0).epsilon(1e-4));
  CHECK(single.rmse_mm == doctest::Approx(500.0).epsilon(1e-4));

  const CompletionMetrics zero = completion_metrics(gt, gt);
  CHECK(zero.mae_mm == 0.0);
  CHECK(zero.rmse_mm == 0.0);

  // errors 0.1 m and 0.3 m -> MAE 200 mm, RMSE 1000*sqrt(0.05)
  DepthImage gt2(1, 2), pred2(1, 2);
  gt2.at(0, 0) = 2.0f;
  gt2.at(0, 1) = 3.0f;
  pred2.at(0, 0) = 2.1f;
  pred2.at(0, 1) = 3.3f;
  const CompletionMetrics two = completion_metrics(pred2, gt2);
  CHECK(two.mae_mm == doctest::Approx(200.0).epsilon(1e-4));
  CHECK(two.rmse_mm == doctest::Approx(1000.0 * std::sqrt(0.05)).epsilon(1e-4));
  CHECK(two.mae_mm <= two.rmse_mm);

  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const DepthImage g = random_depth(rng, 12, 12, 1.0, 60.0, 0.3);
    const DepthImage p = random_depth(rng, 12, 12, 1.0, 60.0);
    if (valid_pixel_count(g) == 0) continue;
    const CompletionMetrics m = completion_metrics(p, g);
    CHECK(m.mae_mm <= m.rmse_mm + 1e-12);
    const CompletionMetrics ref = reference_completion(p, g);
    CHECK(m.mae_mm == doctest::Approx(ref.mae_mm).epsilon(kTol));
    CHECK(m.rmse_mm == doctest::Approx(ref.rmse_mm).epsilon(kTol));
  }
}

TEST_CASE("nearest_neighbor_complete: fixtures and tie rule") {
  DepthImage one(5, 5);
  one.at(2, 3) = 7.0f;
  const DepthImage filled = nearest_neighbor_complete(one);
  for (float v : filled.values) CHECK(v == 7.0f);

  Rng rng(3);
  DepthImage dense(6, 6);
  for (float& v : dense.values) v = static_cast<float>(rng.uniform(1.0, 50.0));
  CHECK(nearest_neighbor_complete(dense).values == dense.values);

  // corners at (0,0)=2m and (2,2)=4m; center ties resolve to the smaller row
  DepthImage corners(3, 3);
  corners.at(0, 0) = 2.0f;
  corners.at(2, 2) = 4.0f;
  const DepthImage c = nearest_neighbor_complete(corners);
  CHECK(c.at(1, 1) == 2.0f);
  CHECK(c.at(0, 2) == 2.0f);  // equidistant (dist^2 = 4) -> row rule
  CHECK(c.at(2, 0) == 2.0f);
  CHECK(c.at(2, 1) == 4.0f);

  DepthImage empty(4, 4);
  CHECK_THROWS_AS(nearest_neighbor_complete(empty), NumericError);
}

TEST_CASE("nearest_neighbor_complete: exhaustive distance enumeration oracle") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    DepthImage sparse(9, 11);
    for (float& v : sparse.values)
      if (rng.bernoulli(0.15)) v = static_cast<float>(rng.uniform(1.0, 9.0));
    if (valid_pixel_count(sparse) == 0) sparse.at(4, 5) = 3.0f;
    const DepthImage out = nearest_neighbor_complete(sparse);
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 11; ++c) {
        long best = -1;
        float best_v = 0.0f;
        for (int rr = 0; rr < 9; ++rr) {
          for (int cc = 0; cc < 11; ++cc) {
            if (sparse.at(rr, cc) == 0.0f) continue;
            const long d2 = long(rr - r) * (rr - r) + long(cc - c) * (cc - c);
            if (best < 0 || d2 < best) {  // row-major scan implements the tie rule
              best = d2;
              best_v = sparse.at(rr, cc);
            }
          }
        }
        CHECK(out.at(r, c) == best_v);
      }
    }
  }
}

namespace {

// Ground truth echoed back; estimation returns a fixed copy of dense GT.
class EchoPredictor : public DensePredictor {
 public:
  explicit EchoPredictor(const std::vector<Sample>& data) : data_(data) {}
  DepthImage estimate(const RgbImage& rgb) const override {
    for (const Sample& s : data_)
      if (s.rgb.values == rgb.values) return s.dense_gt;
    throw ConfigError("unknown sample");
  }
  DepthImage complete(const DepthImage& sparse) const override {
    return nearest_neighbor_complete(sparse);
  }

 private:
  const std::vector<Sample>& data_;
};

std::vector<Sample> toy_dataset(int count, std::uint64_t seed) {
  std::vector<Sample> out;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.rgb = RgbImage(16, 16);
    for (float& v : s.rgb.values) v = static_cast<float>(rng.uniform());
    s.dense_gt = DepthImage(16, 16);
    for (float& v : s.dense_gt.values) v = static_cast<float>(rng.uniform(1.0, 40.0));
    s.dense_mask = validity_mask(s.dense_gt);
    ValidityMask pattern(16, 16);
    for (auto& v : pattern.values) v = rng.bernoulli(0.2) ? 1 : 0;
    pattern.at(8, 8) = 1;
    s.sparse_gt = sparsify(s.dense_gt, pattern);
    s.domain = Domain::kSynthetic;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate: single-sample aggregate, GT-vs-GT zeros, permutation invariance") {
  const std::vector<Sample> data = toy_dataset(6, 21);
  EchoPredictor echo(data);

  const std::vector<Sample> one(data.begin(), data.begin() + 1);
  const auto single = evaluate_estimation(echo, one);
  CHECK(single.sample_count == 1);
  CHECK(single.aggregate.rmse_m == single.per_sample[0].rmse_m);

  const auto gt_eval = evaluate_estimation(echo, data);
  CHECK(gt_eval.aggregate.abs_rel == 0.0);
  CHECK(gt_eval.aggregate.rmse_m == 0.0);
  CHECK(gt_eval.aggregate.delta1 == 1.0);

  const auto comp = evaluate_completion(echo, data);
  std::vector<Sample> shuffled(data.rbegin(), data.rend());
  const auto comp2 = evaluate_completion(echo, shuffled);
  CHECK(comp.aggregate.rmse_mm == doctest::Approx(comp2.aggregate.rmse_mm).epsilon(1e-12));
  CHECK(comp.aggregate.mae_mm == doctest::Approx(comp2.aggregate.mae_mm).epsilon(1e-12));
}

TEST_CASE("evaluate: csv format") {
  const std::vector<Sample> data = toy_dataset(3, 4);
  EchoPredictor echo(data);
  const std::string csv = to_csv(evaluate_completion(echo, data));
  CHECK(csv.rfind("id,rmse_mm,mae_mm\n", 0) == 0);
  CHECK(csv.find("\naggregate,") != std::string::npos);
  // header + 3 samples + aggregate = 5 lines
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const std::string est_csv = to_csv(evaluate_estimation(echo, data));
  CHECK(est_csv.rfind("id,abs_rel,sq_rel,rmse_m,rmse_log,delta1,delta2,delta3\n", 0) == 0);
}

TEST_CASE("evaluate: baseline rejects the estimation task") {
  const std::vector<Sample> data = toy_dataset(2, 5);
  NearestNeighborBaseline baseline;
  CHECK_THROWS_AS(evaluate_estimation(baseline, data), ConfigError);
  CHECK_NOTHROW(evaluate_completion(baseline, data));
}
