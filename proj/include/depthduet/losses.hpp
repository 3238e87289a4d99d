#ifndef DEPTHDUET_LOSSES_HPP
#define DEPTHDUET_LOSSES_HPP

#include <torch/torch.h>

#include <string>

#include "depthduet/networks.hpp"

namespace depthduet {

// Weighted-objective coefficients; defaults from the grid search reported
// with the approach.
struct LossWeights {
  double lambda_rec_sg = 150.0;
  double lambda_rec_dg = 100.0;
  double lambda_adv = 10.0;
  double lambda_s = 1.0;

  void validate() const;
};

// Probability clamp applied before logs in the adversarial terms.
inline constexpr double kProbEps = 1e-7;

// All loss inputs are normalized depth ([0,1]) tensors shaped (N,1,H,W);
// single images may be passed as (1,H,W) or (H,W).

// Mean L1 between the sparse prediction and sparse target over all pixels
// (invalid pixels are zero-valued and included by design).
torch::Tensor rec_sg_loss(torch::Tensor pred, torch::Tensor target);

// Mean L1 against the fully dense target.
torch::Tensor rec_dg_loss_synthetic(torch::Tensor pred, torch::Tensor target);

// Masked L1 for semi-dense targets: sum |M*pred - target| / max(1, sum M),
// computed per sample then averaged over the batch.
torch::Tensor rec_dg_loss_real(torch::Tensor pred, torch::Tensor target, torch::Tensor mask);

// Discriminator side: -[log D(x,y_real) + log(1 - D(x,y_fake))], per-term
// batch mean; the fake branch is detached.
torch::Tensor adversarial_d_loss(Discriminator& d, torch::Tensor x, torch::Tensor y_real,
                                 torch::Tensor y_fake);

// Non-saturating generator side for one domain: mean -log D(x, y_fake).
torch::Tensor adversarial_g_term(Discriminator& d, torch::Tensor x, torch::Tensor y_fake);

enum class SmoothnessSign {
  kEdgeAware,     // exp(-|grad I|): relax smoothing across image edges (default)
  kPaperLiteral,  // exp(+|grad I|)
};

// Edge-weighted L1 on forward differences of the dense prediction, each axis
// averaged over its own difference count.
torch::Tensor smoothness_loss(torch::Tensor pred, torch::Tensor rgb,
                              SmoothnessSign sign = SmoothnessSign::kEdgeAware);

// Generator-side components entering the weighted total.
struct LossTerms {
  torch::Tensor rec_sg;
  torch::Tensor rec_dg;
  torch::Tensor adv_g;
  torch::Tensor smooth;
};

torch::Tensor total_loss(const LossTerms& terms, const LossWeights& w);

// Per-step breakdown, unweighted components plus the weighted total.
struct LossReport {
  std::int64_t step = 0;
  double rec_sg = 0.0;
  double rec_dg = 0.0;
  double adv_g = 0.0;
  double adv_d_s = 0.0;
  double adv_d_r = 0.0;
  double smooth = 0.0;
  double total = 0.0;
};

// Extracts scalars and verifies finiteness, naming the offending component.
LossReport make_loss_report(std::int64_t step, const LossTerms& terms, double adv_d_s,
                            double adv_d_r, const LossWeights& w);

std::string loss_trace_header();
std::string loss_trace_row(const LossReport& r);

}  // namespace depthduet

#endif  // DEPTHDUET_LOSSES_HPP
