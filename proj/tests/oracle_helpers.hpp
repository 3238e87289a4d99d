#ifndef DEPTHDUET_TESTS_ORACLE_HELPERS_HPP
#define DEPTHDUET_TESTS_ORACLE_HELPERS_HPP

#include <torch/torch.h>

#include <cmath>
#include <functional>
#include <vector>

#include "depthduet/rng.hpp"

namespace depthduet::test {

// Central finite-difference gradient check against autograd.
//
// `loss_fn` must rebuild the loss from the current contents of `probe` on
// every call. `probe` must be a float64 leaf with requires_grad). Coordinates
// for which `skip` returns true are resampled (L1 kinks).
struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
};

inline GradCheckResult finite_difference_check(
    const std::function<torch::Tensor()>& loss_fn, torch::Tensor probe, int coords, Rng& rng,
    double h = 1e-4, const std::function<bool(std::int64_t)>& skip = nullptr) {
  TORCH_CHECK(probe.dtype() == torch::kFloat64, "probe must be float64");
  TORCH_CHECK(probe.requires_grad(), "probe must require grad");

  if (probe.grad().defined()) probe.mutable_grad().zero_();
  auto loss = loss_fn();
  loss.backward();
  auto analytic = probe.grad().detach().clone().flatten();

  auto flat = probe.detach().view(-1);
  double* data = flat.data_ptr<double>();
  const std::int64_t n = flat.numel();

  GradCheckResult result;
  int attempts = 0;
  while (result.checked < coords && attempts < coords * 50) {
    ++attempts;
    const std::int64_t idx = rng.uniform_int(0, n - 1);
    if (skip && skip(idx)) continue;
    const double original = data[idx];
    double f_plus, f_minus;
    {
      torch::NoGradGuard no_grad;
      data[idx] = original + h;
      f_plus = loss_fn().item<double>();
      data[idx] = original - h;
      f_minus = loss_fn().item<double>();
      data[idx] = original;
    }
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double a = analytic[idx].item<double>();
    const double rel =
        std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-3});
    result.max_rel_err = std::max(result.max_rel_err, rel);
    ++result.checked;
  }
  return result;
}

}  // namespace depthduet::test

#endif  // DEPTHDUET_TESTS_ORACLE_HELPERS_HPP
