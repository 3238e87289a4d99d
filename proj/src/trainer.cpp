#include "depthduet/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "depthduet/errors.hpp"
#include "depthduet/tensor_bridge.hpp"

namespace depthduet {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kCheckpointVersion = 1;

std::string normalize_preset(std::string name) {
  std::string out;
  for (char c : name) {
    if (c == '/' || c == '+' || c == '_') c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Restores train/eval mode on scope exit.
class EvalScope {
 public:
  void add(torch::nn::Module& m) {
    mods_.push_back(&m);
    was_training_.push_back(m.is_training());
    m.eval();
  }
  ~EvalScope() {
    for (size_t i = 0; i < mods_.size(); ++i) mods_[i]->train(was_training_[i]);
  }

 private:
  std::vector<torch::nn::Module*> mods_;
  std::vector<bool> was_training_;
};

torch::Tensor string_to_tensor(const std::string& text) {
  auto t = torch::empty({static_cast<std::int64_t>(text.size())}, torch::kUInt8);
  std::memcpy(t.data_ptr<std::uint8_t>(), text.data(), text.size());
  return t;
}

std::string tensor_to_string(const torch::Tensor& t) {
  auto c = t.to(torch::kUInt8).contiguous();
  return std::string(reinterpret_cast<const char*>(c.data_ptr<std::uint8_t>()),
                     static_cast<size_t>(c.numel()));
}

// Snap meters onto the 16-bit file grid (raw/256); exact in float.
torch::Tensor snap_to_depth_grid(const torch::Tensor& meters) {
  return (meters * 256.0).round().clamp(0.0, 65535.0) / 256.0;
}

}  // namespace

AblationFlags ablation_preset(const std::string& name) {
  const std::string key = normalize_preset(name);
  AblationFlags f;
  if (key == "sn" || key == "sn-l1") {
    f.single_network = true;
    f.disable_adv = true;
    f.disable_smooth = true;
  } else if (key == "sn-adv" || key == "sn-l1-adv") {
    f.single_network = true;
    f.disable_smooth = true;
  } else if (key == "sn-ac") {
    f.single_network = true;
  } else if (key == "fn-r" || key == "r") {
    f.real_only = true;
  } else if (key == "full" || key == "fn") {
    // defaults
  } else {
    throw ConfigError("unknown ablation preset '" + name +
                      "' (expected sn|sn-adv|sn-ac|fn-r|full)");
  }
  return f;
}

std::vector<std::string> ablation_preset_names() {
  return {"sn", "sn-adv", "sn-ac", "fn-r", "full"};
}

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("steps must be >= 1, got " + std::to_string(steps));
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw ConfigError("adam betas must lie in (0,1)");
  if (synthetic_ratio < 0.0 || synthetic_ratio > 1.0)
    throw ConfigError("synthetic_ratio must be in [0,1]");
  if (!(d_min > 0.0 && d_min < d_max)) throw ConfigError("require 0 < d_min < d_max");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  weights.validate();
  NetworkConfig nc;
  nc.base_width = base_width;
  nc.depth_levels = depth_levels;
  nc.leaky_slope = leaky_slope;
  nc.validate();
}

KvMap TrainConfig::to_kv() const {
  KvMap kv;
  kv["steps"] = std::to_string(steps);
  kv["batch_size"] = std::to_string(batch_size);
  kv["learning_rate"] = std::to_string(learning_rate);
  kv["adam_beta1"] = std::to_string(adam_beta1);
  kv["adam_beta2"] = std::to_string(adam_beta2);
  kv["lambda_rec_sg"] = std::to_string(weights.lambda_rec_sg);
  kv["lambda_rec_dg"] = std::to_string(weights.lambda_rec_dg);
  kv["lambda_adv"] = std::to_string(weights.lambda_adv);
  kv["lambda_s"] = std::to_string(weights.lambda_s);
  kv["synthetic_ratio"] = std::to_string(synthetic_ratio);
  kv["seed"] = std::to_string(seed);
  kv["single_network"] = ablation.single_network ? "true" : "false";
  kv["disable_adv"] = ablation.disable_adv ? "true" : "false";
  kv["disable_smooth"] = ablation.disable_smooth ? "true" : "false";
  kv["real_only"] = ablation.real_only ? "true" : "false";
  kv["base_width"] = std::to_string(base_width);
  kv["depth_levels"] = std::to_string(depth_levels);
  kv["leaky_slope"] = std::to_string(leaky_slope);
  kv["d_min"] = std::to_string(d_min);
  kv["d_max"] = std::to_string(d_max);
  kv["mask_fake_for_real_d"] = mask_fake_for_real_d ? "true" : "false";
  kv["paper_literal_smoothness_sign"] = paper_literal_smoothness_sign ? "true" : "false";
  kv["checkpoint_every"] = std::to_string(checkpoint_every);
  return kv;
}

TrainConfig TrainConfig::from_kv(const KvMap& kv) {
  TrainConfig c;
  KvReader r(kv);
  c.steps = r.get_int("steps", c.steps);
  c.batch_size = static_cast<int>(r.get_int("batch_size", c.batch_size));
  c.learning_rate = r.get_double("learning_rate", c.learning_rate);
  c.adam_beta1 = r.get_double("adam_beta1", c.adam_beta1);
  c.adam_beta2 = r.get_double("adam_beta2", c.adam_beta2);
  c.weights.lambda_rec_sg = r.get_double("lambda_rec_sg", c.weights.lambda_rec_sg);
  c.weights.lambda_rec_dg = r.get_double("lambda_rec_dg", c.weights.lambda_rec_dg);
  c.weights.lambda_adv = r.get_double("lambda_adv", c.weights.lambda_adv);
  c.weights.lambda_s = r.get_double("lambda_s", c.weights.lambda_s);
  c.synthetic_ratio = r.get_double("synthetic_ratio", c.synthetic_ratio);
  c.seed = static_cast<std::uint64_t>(r.get_int("seed", static_cast<std::int64_t>(c.seed)));
  if (r.has("ablation")) {
    c.ablation = ablation_preset(r.get_string("ablation", "full"));
  }
  c.ablation.single_network = r.get_bool("single_network", c.ablation.single_network);
  c.ablation.disable_adv = r.get_bool("disable_adv", c.ablation.disable_adv);
  c.ablation.disable_smooth = r.get_bool("disable_smooth", c.ablation.disable_smooth);
  c.ablation.real_only = r.get_bool("real_only", c.ablation.real_only);
  c.base_width = static_cast<int>(r.get_int("base_width", c.base_width));
  c.depth_levels = static_cast<int>(r.get_int("depth_levels", c.depth_levels));
  c.leaky_slope = r.get_double("leaky_slope", c.leaky_slope);
  c.d_min = r.get_double("d_min", c.d_min);
  c.d_max = r.get_double("d_max", c.d_max);
  c.mask_fake_for_real_d = r.get_bool("mask_fake_for_real_d", c.mask_fake_for_real_d);
  c.paper_literal_smoothness_sign =
      r.get_bool("paper_literal_smoothness_sign", c.paper_literal_smoothness_sign);
  c.checkpoint_every = r.get_int("checkpoint_every", c.checkpoint_every);
  r.reject_unknown();
  return c;
}

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

Trainer::Trainer(const TrainConfig& cfg) : cfg_(cfg), rng_(cfg.seed ^ 0xBA7C4ull) {
  cfg_.weights.validate();
  if (cfg_.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg_.learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");

  torch::manual_seed(static_cast<std::uint64_t>(cfg_.seed));

  NetworkConfig base;
  base.base_width = cfg_.base_width;
  base.depth_levels = cfg_.depth_levels;
  base.leaky_slope = cfg_.leaky_slope;

  NetworkConfig sg_cfg = base;
  sg_cfg.input_channels = 3;
  sg_cfg.output_channels = 1;
  sg_ = build_sparse_generator(sg_cfg);
  const auto opts = torch::optim::AdamOptions(cfg_.learning_rate)
                        .betas({cfg_.adam_beta1, cfg_.adam_beta2});
  opt_sg_ = std::make_unique<torch::optim::Adam>(sg_->parameters(), opts);

  if (!cfg_.ablation.single_network) {
    NetworkConfig dg_cfg = base;
    dg_cfg.input_channels = 1;
    dg_cfg.output_channels = 1;
    dg_ = build_dense_generator(dg_cfg);
    opt_dg_ = std::make_unique<torch::optim::Adam>(dg_->parameters(), opts);
  }
  if (!cfg_.ablation.disable_adv) {
    NetworkConfig d_cfg = base;
    d_cfg.input_channels = 4;  // conditional: RGB + depth
    d_cfg.output_channels = 1;
    d_s_ = build_discriminator(d_cfg);
    d_r_ = build_discriminator(d_cfg);
    opt_ds_ = std::make_unique<torch::optim::Adam>(d_s_->parameters(), opts);
    opt_dr_ = std::make_unique<torch::optim::Adam>(d_r_->parameters(), opts);
  }
}

BatchTensors Trainer::prepare_batch(const Batch& batch) const {
  if (batch.empty()) throw DatasetError("empty batch");
  const int h = batch.front()->rgb.height;
  const int w = batch.front()->rgb.width;

  std::vector<const Sample*> ordered;
  ordered.reserve(batch.size());
  for (const Sample* s : batch)
    if (s->domain == Domain::kSynthetic) ordered.push_back(s);
  const std::int64_t n_synthetic = static_cast<std::int64_t>(ordered.size());
  for (const Sample* s : batch)
    if (s->domain == Domain::kReal) ordered.push_back(s);

  std::vector<torch::Tensor> xs, sps, dns, ms;
  for (const Sample* s : ordered) {
    if (s->rgb.height != h || s->rgb.width != w)
      throw ShapeError("batch mixes image sizes");
    require_same_shape(s->rgb, s->dense_gt, "prepare_batch");
    xs.push_back(to_tensor(s->rgb));
    sps.push_back(to_tensor(s->sparse_gt, cfg_.d_max));
    dns.push_back(to_tensor(s->dense_gt, cfg_.d_max));
    ms.push_back(to_tensor(s->dense_mask));
  }
  BatchTensors bt;
  bt.x = torch::stack(xs);
  bt.sparse_gt = torch::stack(sps);
  bt.dense_gt = torch::stack(dns);
  bt.mask = torch::stack(ms);
  bt.n_synthetic = n_synthetic;
  bt.n_total = static_cast<std::int64_t>(ordered.size());
  return bt;
}

Trainer::GenOut Trainer::generator_forward(const torch::Tensor& x) {
  GenOut out;
  if (cfg_.ablation.single_network) {
    out.dense = sg_->forward(x);
  } else {
    out.sparse = sg_->forward(x);
    out.dense = dg_->forward(out.sparse);
  }
  return out;
}

torch::Tensor Trainer::fake_for_real_d(const BatchTensors& bt, const torch::Tensor& dense,
                                       std::int64_t begin, std::int64_t end) const {
  auto fake = dense.slice(0, begin, end);
  if (cfg_.mask_fake_for_real_d) fake = fake * bt.mask.slice(0, begin, end);
  return fake;
}

Trainer::DLosses Trainer::discriminator_step(const BatchTensors& bt) {
  DLosses out;
  if (cfg_.ablation.disable_adv) return out;

  torch::Tensor dense_fake;
  {
    torch::NoGradGuard no_grad;
    dense_fake = generator_forward(bt.x).dense;
  }

  if (bt.n_synthetic > 0) {
    auto x = bt.x.slice(0, 0, bt.n_synthetic);
    auto y_real = bt.dense_gt.slice(0, 0, bt.n_synthetic);
    auto y_fake = dense_fake.slice(0, 0, bt.n_synthetic);
    auto loss = adversarial_d_loss(d_s_, x, y_real, y_fake);
    opt_ds_->zero_grad();
    loss.backward();
    opt_ds_->step();
    out.adv_d_s = loss.item<double>();
  }
  if (bt.n_total > bt.n_synthetic) {
    auto x = bt.x.slice(0, bt.n_synthetic, bt.n_total);
    auto y_real = bt.dense_gt.slice(0, bt.n_synthetic, bt.n_total);
    auto y_fake = fake_for_real_d(bt, dense_fake, bt.n_synthetic, bt.n_total);
    auto loss = adversarial_d_loss(d_r_, x, y_real, y_fake);
    opt_dr_->zero_grad();
    loss.backward();
    opt_dr_->step();
    out.adv_d_r = loss.item<double>();
  }
  return out;
}

LossTerms Trainer::assemble_generator_terms(const BatchTensors& bt, const GenOut& gen) {
  const auto opts = torch::TensorOptions().dtype(bt.x.dtype());
  LossTerms terms{torch::zeros({}, opts), torch::zeros({}, opts), torch::zeros({}, opts),
                  torch::zeros({}, opts)};

  if (!cfg_.ablation.single_network) terms.rec_sg = rec_sg_loss(gen.sparse, bt.sparse_gt);

  const std::int64_t n_s = bt.n_synthetic;
  const std::int64_t n_r = bt.n_total - bt.n_synthetic;
  auto rec_dg = torch::zeros({}, opts);
  if (n_s > 0) {
    auto term = rec_dg_loss_synthetic(gen.dense.slice(0, 0, n_s), bt.dense_gt.slice(0, 0, n_s));
    rec_dg = rec_dg + term * (static_cast<double>(n_s) / bt.n_total);
  }
  if (n_r > 0) {
    auto term = rec_dg_loss_real(gen.dense.slice(0, n_s, bt.n_total),
                                 bt.dense_gt.slice(0, n_s, bt.n_total),
                                 bt.mask.slice(0, n_s, bt.n_total));
    rec_dg = rec_dg + term * (static_cast<double>(n_r) / bt.n_total);
  }
  terms.rec_dg = rec_dg;

  if (!cfg_.ablation.disable_adv) {
    auto adv = torch::zeros({}, opts);
    if (n_s > 0)
      adv = adv + adversarial_g_term(d_s_, bt.x.slice(0, 0, n_s), gen.dense.slice(0, 0, n_s));
    if (n_r > 0)
      adv = adv + adversarial_g_term(d_r_, bt.x.slice(0, n_s, bt.n_total),
                                     fake_for_real_d(bt, gen.dense, n_s, bt.n_total));
    terms.adv_g = adv;
  }
  if (!cfg_.ablation.disable_smooth) {
    terms.smooth = smoothness_loss(gen.dense, bt.x,
                                   cfg_.paper_literal_smoothness_sign
                                       ? SmoothnessSign::kPaperLiteral
                                       : SmoothnessSign::kEdgeAware);
  }
  return terms;
}

LossTerms Trainer::generator_terms(const BatchTensors& bt) {
  return assemble_generator_terms(bt, generator_forward(bt.x));
}

LossReport Trainer::generator_step(const BatchTensors& bt, const DLosses& d) {
  auto gen = generator_forward(bt.x);
  auto terms = assemble_generator_terms(bt, gen);
  auto total = total_loss(terms, cfg_.weights);

  opt_sg_->zero_grad();
  if (opt_dg_) opt_dg_->zero_grad();
  total.backward();
  opt_sg_->step();
  if (opt_dg_) opt_dg_->step();

  return make_loss_report(step_ + 1, terms, d.adv_d_s, d.adv_d_r, cfg_.weights);
}

LossReport Trainer::train_step(const Batch& batch) {
  BatchTensors bt = prepare_batch(batch);
  DLosses d = discriminator_step(bt);
  LossReport report = generator_step(bt, d);
  ++step_;
  return report;
}

std::vector<LossReport> Trainer::train(const std::vector<Sample>& dataset,
                                       const std::string& out_dir) {
  cfg_.validate();
  if (dataset.empty()) throw DatasetError("training dataset is empty");
  const double ratio = cfg_.ablation.real_only ? 0.0 : cfg_.synthetic_ratio;

  std::ofstream csv;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    csv.open(fs::path(out_dir) / "loss_trace.csv");
    if (!csv) throw IoError("cannot write loss trace under " + out_dir);
    csv << loss_trace_header() << "\n";
  }

  std::vector<LossReport> trace;
  trace.reserve(static_cast<size_t>(cfg_.steps));
  for (std::int64_t i = 0; i < cfg_.steps; ++i) {
    Batch batch = mixed_batch(dataset, cfg_.batch_size, ratio, rng_);
    LossReport rep = train_step(batch);
    if (csv.is_open()) csv << loss_trace_row(rep) << "\n";
    trace.push_back(rep);
    if (!out_dir.empty() && cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_%06lld.pt",
                    static_cast<long long>(step_));
      save_checkpoint((fs::path(out_dir) / name).string());
    }
  }
  if (!out_dir.empty()) save_checkpoint((fs::path(out_dir) / "model.pt").string());
  return trace;
}

std::pair<DepthImage, DepthImage> Trainer::infer_estimate_with_sparse(const RgbImage& rgb) {
  torch::NoGradGuard no_grad;
  EvalScope scope;
  scope.add(*sg_);
  if (dg_) scope.add(*dg_);

  auto x = to_tensor(rgb).unsqueeze(0);
  if (cfg_.ablation.single_network) {
    auto dense = sg_->forward(x);
    return {DepthImage(rgb.height, rgb.width), depth_from_tensor(dense, cfg_.d_max)};
  }
  auto sparse_m = sg_->forward(x) * cfg_.d_max;
  // deployment consumes sparse depth through the 16-bit file grid; snapping
  // here keeps estimate == complete(emitted sparse) bit-exact
  auto snapped = snap_to_depth_grid(sparse_m);
  auto dense = dg_->forward((snapped / cfg_.d_max).clamp(0.0, 1.0));
  return {depth_from_tensor(snapped), depth_from_tensor(dense, cfg_.d_max)};
}

DepthImage Trainer::infer_estimate(const RgbImage& rgb) {
  return infer_estimate_with_sparse(rgb).second;
}

DepthImage Trainer::infer_complete(const DepthImage& sparse) {
  if (cfg_.ablation.single_network)
    throw ConfigError("single-network model has no standalone completion stage");
  torch::NoGradGuard no_grad;
  EvalScope scope;
  scope.add(*dg_);

  auto meters = to_tensor(sparse, 1.0).unsqueeze(0);
  auto snapped = snap_to_depth_grid(meters);
  auto dense = dg_->forward((snapped / cfg_.d_max).clamp(0.0, 1.0));
  return depth_from_tensor(dense, cfg_.d_max);
}

void Trainer::to_double() {
  sg_->to(torch::kFloat64);
  if (dg_) dg_->to(torch::kFloat64);
  if (d_s_) d_s_->to(torch::kFloat64);
  if (d_r_) d_r_->to(torch::kFloat64);
}

// ---------------------------------------------------------------------------
// checkpointing
// ---------------------------------------------------------------------------

void Trainer::save_checkpoint(const std::string& path) const {
  torch::serialize::OutputArchive root;
  root.write("format_version", torch::tensor(kCheckpointVersion));
  root.write("step", torch::tensor(step_));
  root.write("config", string_to_tensor(to_kv_text(cfg_.to_kv())));
  root.write("rng", string_to_tensor(rng_.serialize()));

  auto write_module = [&root](const char* name, const torch::nn::Module& m) {
    torch::serialize::OutputArchive sub;
    m.save(sub);
    root.write(name, sub);
  };
  auto write_optim = [&root](const char* name, const torch::optim::Adam& o) {
    torch::serialize::OutputArchive sub;
    o.save(sub);
    root.write(name, sub);
  };
  write_module("sg", *sg_);
  write_optim("opt_sg", *opt_sg_);
  if (dg_) {
    write_module("dg", *dg_);
    write_optim("opt_dg", *opt_dg_);
  }
  if (d_s_) {
    write_module("d_s", *d_s_);
    write_optim("opt_ds", *opt_ds_);
    write_module("d_r", *d_r_);
    write_optim("opt_dr", *opt_dr_);
  }
  try {
    root.save_to(path);
  } catch (const c10::Error& e) {
    throw IoError("cannot write checkpoint " + path + ": " + e.what_without_backtrace());
  }
}

Trainer Trainer::load_checkpoint(const std::string& path) {
  torch::serialize::InputArchive root;
  try {
    root.load_from(path);
  } catch (const c10::Error& e) {
    throw FormatError("cannot read checkpoint " + path + ": " +
                      e.what_without_backtrace());
  }

  torch::Tensor version;
  if (!root.try_read("format_version", version))
    throw FormatError("checkpoint " + path + " has no format_version field");
  if (version.item<std::int64_t>() != kCheckpointVersion)
    throw VersionError("checkpoint format_version " +
                       std::to_string(version.item<std::int64_t>()) + ", expected " +
                       std::to_string(kCheckpointVersion));

  torch::Tensor cfg_bytes;
  if (!root.try_read("config", cfg_bytes))
    throw FormatError("checkpoint " + path + " has no config echo");
  TrainConfig cfg = TrainConfig::from_kv(parse_kv_text(tensor_to_string(cfg_bytes)));

  Trainer t(cfg);

  torch::Tensor step;
  if (root.try_read("step", step)) t.step_ = step.item<std::int64_t>();
  torch::Tensor rng_state;
  if (root.try_read("rng", rng_state)) t.rng_.restore(tensor_to_string(rng_state));

  auto read_module = [&root, &path](const char* name, torch::nn::Module& m) {
    torch::serialize::InputArchive sub;
    try {
      root.read(name, sub);
      m.load(sub);
    } catch (const c10::Error& e) {
      throw FormatError("checkpoint " + path + " is missing or corrupt in section '" +
                        std::string(name) + "': " + e.what_without_backtrace());
    }
  };
  auto read_optim = [&root, &path](const char* name, torch::optim::Adam& o) {
    torch::serialize::InputArchive sub;
    try {
      root.read(name, sub);
      o.load(sub);
    } catch (const c10::Error& e) {
      throw FormatError("checkpoint " + path + " is missing or corrupt in section '" +
                        std::string(name) + "': " + e.what_without_backtrace());
    }
  };
  read_module("sg", *t.sg_);
  read_optim("opt_sg", *t.opt_sg_);
  if (t.dg_) {
    read_module("dg", *t.dg_);
    read_optim("opt_dg", *t.opt_dg_);
  }
  if (t.d_s_) {
    read_module("d_s", *t.d_s_);
    read_optim("opt_ds", *t.opt_ds_);
    read_module("d_r", *t.d_r_);
    read_optim("opt_dr", *t.opt_dr_);
  }
  return t;
}

DepthImage ModelPredictor::estimate(const RgbImage& rgb) const {
  return trainer_.infer_estimate(rgb);
}

DepthImage ModelPredictor::complete(const DepthImage& sparse) const {
  return trainer_.infer_complete(sparse);
}

}  // namespace depthduet
