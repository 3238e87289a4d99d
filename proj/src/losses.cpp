#include "depthduet/losses.hpp"

#include <cmath>
#include <sstream>

#include "depthduet/errors.hpp"

namespace depthduet {

void LossWeights::validate() const {
  if (lambda_rec_sg < 0 || lambda_rec_dg < 0 || lambda_adv < 0 || lambda_s < 0)
    throw ConfigError("loss weights must be non-negative");
}

namespace {

torch::Tensor as_batched(torch::Tensor t) {
  if (t.dim() == 2) t = t.unsqueeze(0);
  if (t.dim() == 3) t = t.unsqueeze(0);
  if (t.dim() != 4) throw ShapeError("loss input must be at most 4-D");
  return t;
}

void check_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes())
    throw ShapeError(std::string(what) + ": tensor shapes differ");
}

torch::Tensor check_finite_output(torch::Tensor d_out, const char* what) {
  if (!d_out.isfinite().all().item<bool>())
    throw NumericError(std::string(what) + ": discriminator output is non-finite");
  return d_out;
}

}  // namespace

torch::Tensor rec_sg_loss(torch::Tensor pred, torch::Tensor target) {
  pred = as_batched(pred);
  target = as_batched(target);
  check_same_shape(pred, target, "rec_sg_loss");
  return (pred - target).abs().mean();
}

// Eq. 3 and Eq. 5 share the same per-sample reduction structure so that
// Eq. 5 with an all-ones mask reproduces Eq. 3 bit-exactly.
torch::Tensor rec_dg_loss_synthetic(torch::Tensor pred, torch::Tensor target) {
  pred = as_batched(pred);
  target = as_batched(target);
  check_same_shape(pred, target, "rec_dg_loss_synthetic");
  auto per_sample_sum = (pred - target).abs().sum({1, 2, 3});
  auto pixels = torch::full_like(per_sample_sum,
                                 static_cast<double>(pred.size(1) * pred.size(2) * pred.size(3)));
  return (per_sample_sum / pixels).mean();
}

torch::Tensor rec_dg_loss_real(torch::Tensor pred, torch::Tensor target, torch::Tensor mask) {
  pred = as_batched(pred);
  target = as_batched(target);
  mask = as_batched(mask);
  check_same_shape(pred, target, "rec_dg_loss_real");
  check_same_shape(pred, mask, "rec_dg_loss_real");
  if (((target != 0) & (mask == 0)).any().item<bool>())
    throw RangeError("rec_dg_loss_real: target has nonzero depth outside the validity mask");
  auto per_sample_sum = (mask * pred - target).abs().sum({1, 2, 3});
  auto valid = mask.sum({1, 2, 3}).clamp_min(1.0);
  return (per_sample_sum / valid).mean();
}

torch::Tensor adversarial_d_loss(Discriminator& d, torch::Tensor x, torch::Tensor y_real,
                                 torch::Tensor y_fake) {
  auto p_real = check_finite_output(d->forward(x, y_real), "adversarial_d_loss")
                    .clamp(kProbEps, 1.0 - kProbEps);
  auto p_fake = check_finite_output(d->forward(x, y_fake.detach()), "adversarial_d_loss")
                    .clamp(kProbEps, 1.0 - kProbEps);
  return -(p_real.log().mean() + (1.0 - p_fake).log().mean());
}

torch::Tensor adversarial_g_term(Discriminator& d, torch::Tensor x, torch::Tensor y_fake) {
  auto p_fake = check_finite_output(d->forward(x, y_fake), "adversarial_g_term")
                    .clamp(kProbEps, 1.0 - kProbEps);
  return -p_fake.log().mean();
}

torch::Tensor smoothness_loss(torch::Tensor pred, torch::Tensor rgb, SmoothnessSign sign) {
  pred = as_batched(pred);
  rgb = as_batched(rgb);
  if (pred.size(-1) != rgb.size(-1) || pred.size(-2) != rgb.size(-2) ||
      pred.size(0) != rgb.size(0))
    throw ShapeError("smoothness_loss: prediction/image shapes differ");

  auto gray = rgb.mean(1, /*keepdim=*/true);
  using namespace torch::indexing;
  auto dh_p = (pred.index({Slice(), Slice(), Slice(), Slice(1, None)}) -
               pred.index({Slice(), Slice(), Slice(), Slice(None, -1)}))
                  .abs();
  auto dv_p = (pred.index({Slice(), Slice(), Slice(1, None), Slice()}) -
               pred.index({Slice(), Slice(), Slice(None, -1), Slice()}))
                  .abs();
  auto dh_i = (gray.index({Slice(), Slice(), Slice(), Slice(1, None)}) -
               gray.index({Slice(), Slice(), Slice(), Slice(None, -1)}))
                  .abs();
  auto dv_i = (gray.index({Slice(), Slice(), Slice(1, None), Slice()}) -
               gray.index({Slice(), Slice(), Slice(None, -1), Slice()}))
                  .abs();
  const double s = sign == SmoothnessSign::kEdgeAware ? -1.0 : 1.0;
  return (dh_p * (s * dh_i).exp()).mean() + (dv_p * (s * dv_i).exp()).mean();
}

torch::Tensor total_loss(const LossTerms& terms, const LossWeights& w) {
  return w.lambda_rec_sg * terms.rec_sg + w.lambda_rec_dg * terms.rec_dg +
         w.lambda_adv * terms.adv_g + w.lambda_s * terms.smooth;
}

LossReport make_loss_report(std::int64_t step, const LossTerms& terms, double adv_d_s,
                            double adv_d_r, const LossWeights& w) {
  LossReport r;
  r.step = step;
  r.rec_sg = terms.rec_sg.item<double>();
  r.rec_dg = terms.rec_dg.item<double>();
  r.adv_g = terms.adv_g.item<double>();
  r.smooth = terms.smooth.item<double>();
  r.adv_d_s = adv_d_s;
  r.adv_d_r = adv_d_r;
  r.total = w.lambda_rec_sg * r.rec_sg + w.lambda_rec_dg * r.rec_dg + w.lambda_adv * r.adv_g +
            w.lambda_s * r.smooth;

  const struct {
    const char* name;
    double value;
  } components[] = {{"rec_sg", r.rec_sg},   {"rec_dg", r.rec_dg}, {"adv_g", r.adv_g},
                    {"adv_d_s", r.adv_d_s}, {"adv_d_r", r.adv_d_r}, {"smooth", r.smooth},
                    {"total", r.total}};
  for (const auto& c : components) {
    if (!std::isfinite(c.value))
      throw NumericError("loss component '" + std::string(c.name) + "' is non-finite at step " +
                         std::to_string(step));
  }
  return r;
}

std::string loss_trace_header() {
  return "step,rec_sg,rec_dg,adv_g,adv_d_s,adv_d_r,smooth,total";
}

std::string loss_trace_row(const LossReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.step << "," << r.rec_sg << "," << r.rec_dg << "," << r.adv_g << "," << r.adv_d_s << ","
      << r.adv_d_r << "," << r.smooth << "," << r.total;
  return out.str();
}

}  // namespace depthduet
