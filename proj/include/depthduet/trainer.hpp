#ifndef DEPTHDUET_TRAINER_HPP
#define DEPTHDUET_TRAINER_HPP

#include <torch/torch.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "depthduet/config_file.hpp"
#include "depthduet/dataset.hpp"
#include "depthduet/evaluate.hpp"
#include "depthduet/losses.hpp"
#include "depthduet/networks.hpp"

namespace depthduet {

struct AblationFlags {
  bool single_network = false;  // SG architecture regressing dense depth directly
  bool disable_adv = false;
  bool disable_smooth = false;
  bool real_only = false;  // train on real-domain samples only
};

// Named ablation presets: sn, sn-adv, sn-ac, fn-r, full.
AblationFlags ablation_preset(const std::string& name);
std::vector<std::string> ablation_preset_names();

struct TrainConfig {
  std::int64_t steps = 2000;
  int batch_size = 4;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  LossWeights weights;
  double synthetic_ratio = 0.5;
  std::uint64_t seed = 0;
  AblationFlags ablation;

  int base_width = 16;
  int depth_levels = 4;
  double leaky_slope = 0.2;
  double d_min = 1.0;
  double d_max = 80.0;

  bool mask_fake_for_real_d = true;            // mask D_R's fake input by M
  bool paper_literal_smoothness_sign = false;  // exp(+|grad I|) instead of exp(-)
  std::int64_t checkpoint_every = 500;

  void validate() const;

  KvMap to_kv() const;
  static TrainConfig from_kv(const KvMap& kv);
};

// Batch staged as normalized tensors, synthetic samples first.
struct BatchTensors {
  torch::Tensor x;          // (N,3,H,W)
  torch::Tensor sparse_gt;  // (N,1,H,W) in [0,1]
  torch::Tensor dense_gt;   // (N,1,H,W) in [0,1]
  torch::Tensor mask;       // (N,1,H,W) {0,1}
  std::int64_t n_synthetic = 0;
  std::int64_t n_total = 0;
};

class Trainer {
 public:
  explicit Trainer(const TrainConfig& cfg);

  BatchTensors prepare_batch(const Batch& batch) const;

  // One discriminator update per domain present, then one generator update.
  LossReport train_step(const Batch& batch);

  // Runs config.steps steps of mixed_batch + train_step; when out_dir is
  // nonempty writes loss_trace.csv, periodic checkpoints and model.pt.
  std::vector<LossReport> train(const std::vector<Sample>& dataset,
                                const std::string& out_dir = "");

  DepthImage infer_estimate(const RgbImage& rgb);
  DepthImage infer_complete(const DepthImage& sparse);

  // Estimate plus the sparse intermediate actually consumed by the dense
  // stage (already on the 16-bit file grid, so saving it and re-completing
  // reproduces the dense output exactly).
  std::pair<DepthImage, DepthImage> infer_estimate_with_sparse(const RgbImage& rgb);

  void save_checkpoint(const std::string& path) const;
  static Trainer load_checkpoint(const std::string& path);

  const TrainConfig& config() const { return cfg_; }
  std::int64_t step() const { return step_; }

  SparseGenerator& sparse_generator() { return sg_; }
  DenseGenerator& dense_generator() { return dg_; }
  Discriminator& discriminator_synthetic() { return d_s_; }
  Discriminator& discriminator_real() { return d_r_; }
  bool has_dense_generator() const { return !cfg_.ablation.single_network; }
  bool has_discriminators() const { return !cfg_.ablation.disable_adv; }

  // Split-phase access for tests and probes. Neither advances the step count.
  struct DLosses {
    double adv_d_s = 0.0;
    double adv_d_r = 0.0;
  };
  DLosses discriminator_step(const BatchTensors& bt);
  LossReport generator_step(const BatchTensors& bt, const DLosses& d);

  // Loss assembly without any parameter update (for gradient probing).
  LossTerms generator_terms(const BatchTensors& bt);

  // Casts all networks to float64 (finite-difference probing).
  void to_double();

 private:
  struct GenOut {
    torch::Tensor sparse;  // undefined in single-network mode
    torch::Tensor dense;
  };
  GenOut generator_forward(const torch::Tensor& x);
  LossTerms assemble_generator_terms(const BatchTensors& bt, const GenOut& gen);
  torch::Tensor fake_for_real_d(const BatchTensors& bt, const torch::Tensor& dense,
                                std::int64_t begin, std::int64_t end) const;

  TrainConfig cfg_;
  SparseGenerator sg_{nullptr};  // also the single-network model
  DenseGenerator dg_{nullptr};
  Discriminator d_s_{nullptr};
  Discriminator d_r_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_sg_, opt_dg_, opt_ds_, opt_dr_;
  std::int64_t step_ = 0;
  Rng rng_;
};

// DensePredictor adapter over a trained (or loaded) model.
class ModelPredictor : public DensePredictor {
 public:
  explicit ModelPredictor(Trainer& trainer) : trainer_(trainer) {}
  DepthImage estimate(const RgbImage& rgb) const override;
  DepthImage complete(const DepthImage& sparse) const override;

 private:
  Trainer& trainer_;
};

}  // namespace depthduet

#endif  // DEPTHDUET_TRAINER_HPP
