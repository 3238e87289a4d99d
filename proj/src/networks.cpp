#include "depthduet/networks.hpp"

#include <algorithm>
#include <cmath>

#include "depthduet/errors.hpp"
#include "depthduet/tensor_bridge.hpp"

namespace depthduet {

void NetworkConfig::validate() const {
  if (depth_levels < 1) throw ConfigError("depth_levels must be >= 1");
  if (base_width < 1) throw ConfigError("base_width must be >= 1");
  if (input_channels < 1 || output_channels < 1)
    throw ConfigError("channel counts must be >= 1");
  if (leaky_slope < 0.0 || leaky_slope >= 1.0)
    throw ConfigError("leaky_slope must be in [0,1)");
}

int level_width(const NetworkConfig& cfg, int level) {
  return cfg.base_width * std::min(1 << level, 8);
}

void require_divisible(const torch::Tensor& x, int depth_levels) {
  const auto h = x.size(-2), w = x.size(-1);
  const std::int64_t factor = std::int64_t(1) << depth_levels;
  if (h % factor != 0 || w % factor != 0)
    throw ShapeError("input " + std::to_string(h) + "x" + std::to_string(w) +
                     " not divisible by downsampling factor " + std::to_string(factor));
}

std::int64_t parameter_count(const torch::nn::Module& m) {
  std::int64_t n = 0;
  for (const auto& p : m.parameters()) n += p.numel();
  return n;
}

namespace {

// conv + BatchNorm + leaky ReLU, the per-layer module set used everywhere
torch::nn::Sequential down_stage(int in_ch, int out_ch, double slope) {
  return torch::nn::Sequential(
      torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, out_ch, 4).stride(2).padding(1).bias(
          false)),
      torch::nn::BatchNorm2d(out_ch),
      torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(slope)));
}

torch::nn::Sequential up_stage(int in_ch, int out_ch, double slope) {
  return torch::nn::Sequential(
      torch::nn::ConvTranspose2d(
          torch::nn::ConvTranspose2dOptions(in_ch, out_ch, 4).stride(2).padding(1).bias(false)),
      torch::nn::BatchNorm2d(out_ch),
      torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(slope)));
}

// DCGAN-style init keeps early adversarial outputs near 0.5.
void dcgan_init(torch::nn::Module& root) {
  torch::NoGradGuard guard;
  for (const auto& m : root.modules(/*include_self=*/false)) {
    if (auto* conv = m->as<torch::nn::Conv2d>()) {
      torch::nn::init::normal_(conv->weight, 0.0, 0.02);
      if (conv->bias.defined()) torch::nn::init::zeros_(conv->bias);
    } else if (auto* convt = m->as<torch::nn::ConvTranspose2d>()) {
      torch::nn::init::normal_(convt->weight, 0.0, 0.02);
      if (convt->bias.defined()) torch::nn::init::zeros_(convt->bias);
    } else if (auto* lin = m->as<torch::nn::Linear>()) {
      torch::nn::init::normal_(lin->weight, 0.0, 0.02);
      if (lin->bias.defined()) torch::nn::init::zeros_(lin->bias);
    } else if (auto* bn = m->as<torch::nn::BatchNorm2d>()) {
      torch::nn::init::normal_(bn->weight, 1.0, 0.02);
      torch::nn::init::zeros_(bn->bias);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ResidualBlock
// ---------------------------------------------------------------------------

ResidualBlockImpl::ResidualBlockImpl(int channels, double leaky_slope) : slope(leaky_slope) {
  norm1 = register_module("norm1", torch::nn::BatchNorm2d(channels));
  conv1 = register_module(
      "conv1", torch::nn::Conv2d(
                   torch::nn::Conv2dOptions(channels, channels, 3).padding(1).bias(false)));
  norm2 = register_module("norm2", torch::nn::BatchNorm2d(channels));
  conv2 = register_module(
      "conv2", torch::nn::Conv2d(
                   torch::nn::Conv2dOptions(channels, channels, 3).padding(1).bias(false)));
}

torch::Tensor ResidualBlockImpl::forward(torch::Tensor x) {
  auto h = torch::leaky_relu(norm1->forward(x), slope);
  h = conv1->forward(h);
  h = torch::leaky_relu(norm2->forward(h), slope);
  h = conv2->forward(h);
  return x + h;
}

// ---------------------------------------------------------------------------
// SparseGenerator
// ---------------------------------------------------------------------------

SparseGeneratorImpl::SparseGeneratorImpl(NetworkConfig cfg_) : cfg(cfg_) {
  cfg.validate();
  encoders = register_module("encoders", torch::nn::ModuleList());
  decoders = register_module("decoders", torch::nn::ModuleList());

  const int L = cfg.depth_levels;
  for (int l = 0; l < L; ++l) {
    const int in_ch = l == 0 ? cfg.input_channels : level_width(cfg, l - 1);
    encoders->push_back(down_stage(in_ch, level_width(cfg, l), cfg.leaky_slope));
  }
  const int cat = cfg.use_skip_connections ? 2 : 1;
  for (int l = L - 1; l >= 1; --l) {
    const int in_ch = l == L - 1 ? level_width(cfg, l) : cat * level_width(cfg, l);
    decoders->push_back(up_stage(in_ch, level_width(cfg, l - 1), cfg.leaky_slope));
  }
  const int final_in = L == 1 ? level_width(cfg, 0) : cat * level_width(cfg, 0);
  final_up = register_module("final_up", up_stage(final_in, cfg.base_width, cfg.leaky_slope));
  head = register_module(
      "head", torch::nn::Conv2d(torch::nn::Conv2dOptions(cfg.base_width, cfg.output_channels, 3)
                                    .padding(1)
                                    .bias(true)));
}

torch::Tensor SparseGeneratorImpl::forward(torch::Tensor x) {
  require_divisible(x, cfg.depth_levels);
  const int L = cfg.depth_levels;
  std::vector<torch::Tensor> skips;
  skips.reserve(L);
  auto h = x;
  for (int l = 0; l < L; ++l) {
    h = encoders[l]->as<torch::nn::Sequential>()->forward(h);
    skips.push_back(h);
  }
  for (int i = 0; i < static_cast<int>(decoders->size()); ++i) {
    h = decoders[i]->as<torch::nn::Sequential>()->forward(h);
    const int skip_level = L - 2 - i;
    if (cfg.use_skip_connections) h = torch::cat({h, skips[skip_level]}, 1);
  }
  h = final_up->forward(h);
  return torch::sigmoid(head->forward(h));
}

// ---------------------------------------------------------------------------
// DenseGenerator
// ---------------------------------------------------------------------------

DenseGeneratorImpl::DenseGeneratorImpl(NetworkConfig cfg_) : cfg(cfg_) {
  cfg.validate();
  const int L = cfg.depth_levels;
  stem = register_module(
      "stem",
      torch::nn::Sequential(
          torch::nn::Conv2d(torch::nn::Conv2dOptions(cfg.input_channels, level_width(cfg, 0), 3)
                                .padding(1)
                                .bias(false)),
          torch::nn::BatchNorm2d(level_width(cfg, 0)),
          torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(cfg.leaky_slope))));

  res_blocks = register_module("res_blocks", torch::nn::ModuleList());
  downs = register_module("downs", torch::nn::ModuleList());
  ups = register_module("ups", torch::nn::ModuleList());

  for (int l = 0; l < L; ++l) {
    res_blocks->push_back(ResidualBlock(level_width(cfg, l), cfg.leaky_slope));
    downs->push_back(down_stage(level_width(cfg, l), level_width(cfg, l + 1), cfg.leaky_slope));
  }
  bottleneck = register_module("bottleneck", ResidualBlock(level_width(cfg, L), cfg.leaky_slope));

  const int cat = cfg.use_skip_connections ? 2 : 1;
  for (int l = L - 1; l >= 0; --l) {
    const int in_ch = l == L - 1 ? level_width(cfg, L) : cat * level_width(cfg, l + 1);
    ups->push_back(up_stage(in_ch, level_width(cfg, l), cfg.leaky_slope));
  }
  head = register_module(
      "head", torch::nn::Conv2d(torch::nn::Conv2dOptions(cat * level_width(cfg, 0),
                                                         cfg.output_channels, 3)
                                    .padding(1)
                                    .bias(true)));
}

torch::Tensor DenseGeneratorImpl::forward(torch::Tensor x) {
  require_divisible(x, cfg.depth_levels);
  const int L = cfg.depth_levels;
  auto h = stem->forward(x);
  std::vector<torch::Tensor> skips;
  skips.reserve(L);
  for (int l = 0; l < L; ++l) {
    h = res_blocks[l]->as<ResidualBlockImpl>()->forward(h);
    skips.push_back(h);
    h = downs[l]->as<torch::nn::Sequential>()->forward(h);
  }
  h = bottleneck->forward(h);
  for (int i = 0; i < L; ++i) {
    h = ups[i]->as<torch::nn::Sequential>()->forward(h);
    const int skip_level = L - 1 - i;
    if (cfg.use_skip_connections) h = torch::cat({h, skips[skip_level]}, 1);
  }
  return torch::sigmoid(head->forward(h));
}

// ---------------------------------------------------------------------------
// Discriminator
// ---------------------------------------------------------------------------

DiscriminatorImpl::DiscriminatorImpl(NetworkConfig cfg_) : cfg(cfg_) {
  cfg.validate();
  stack = register_module("stack", torch::nn::Sequential());
  int in_ch = cfg.input_channels;
  for (int l = 0; l < cfg.depth_levels; ++l) {
    const int out_ch = level_width(cfg, l);
    stack->push_back(torch::nn::Conv2d(
        torch::nn::Conv2dOptions(in_ch, out_ch, 4).stride(2).padding(1).bias(false)));
    stack->push_back(torch::nn::BatchNorm2d(out_ch));
    stack->push_back(
        torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(cfg.leaky_slope)));
    in_ch = out_ch;
  }
  head = register_module("head", torch::nn::Linear(in_ch, 1));
}

torch::Tensor DiscriminatorImpl::forward(torch::Tensor rgb, torch::Tensor depth) {
  auto x = torch::cat({rgb, depth}, 1);
  if (x.size(1) != cfg.input_channels)
    throw ShapeError("discriminator expects " + std::to_string(cfg.input_channels) +
                     " input channels, got " + std::to_string(x.size(1)));
  require_divisible(x, cfg.depth_levels);
  auto h = stack->forward(x);
  h = torch::adaptive_avg_pool2d(h, {1, 1}).flatten(1);
  return torch::sigmoid(head->forward(h)).squeeze(1);
}

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

SparseGenerator build_sparse_generator(NetworkConfig cfg) {
  SparseGenerator net(cfg);
  dcgan_init(*net);
  return net;
}

DenseGenerator build_dense_generator(NetworkConfig cfg) {
  DenseGenerator net(cfg);
  dcgan_init(*net);
  return net;
}

Discriminator build_discriminator(NetworkConfig cfg) {
  Discriminator net(cfg);
  dcgan_init(*net);
  return net;
}

std::pair<DepthImage, DepthImage> forward_full(SparseGenerator& sg, DenseGenerator& dg,
                                               const RgbImage& x, double d_max) {
  auto input = to_tensor(x).unsqueeze(0);
  auto sparse = sg->forward(input);
  auto dense = dg->forward(sparse);
  return {depth_from_tensor(sparse, d_max), depth_from_tensor(dense, d_max)};
}

}  // namespace depthduet
