#ifndef DEPTHDUET_NETWORKS_HPP
#define DEPTHDUET_NETWORKS_HPP

#include <torch/torch.h>

#include <cstdint>
#include <utility>

#include "depthduet/image.hpp"

namespace depthduet {

struct NetworkConfig {
  int base_width = 16;     // desk-scale default; 64 at full scale
  int depth_levels = 4;    // encoder downsamplings
  double leaky_slope = 0.2;
  bool use_skip_connections = true;
  int input_channels = 3;
  int output_channels = 1;

  void validate() const;
};

// Channel width at encoder level l (capped at 8x base).
int level_width(const NetworkConfig& cfg, int level);

// Pre-activation residual block: x + conv(act(norm(conv(act(norm(x)))))).
// Zeroing the conv weights makes the block the exact identity.
struct ResidualBlockImpl : torch::nn::Module {
  ResidualBlockImpl(int channels, double leaky_slope);
  torch::Tensor forward(torch::Tensor x);

  torch::nn::BatchNorm2d norm1{nullptr}, norm2{nullptr};
  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  double slope;
};
TORCH_MODULE(ResidualBlock);

// RGB -> sparse depth. Encoder/decoder of stride-2 conv + BatchNorm + leaky
// ReLU stages with skip concatenation between corresponding levels; sigmoid
// head maps to [0,1] normalized depth.
struct SparseGeneratorImpl : torch::nn::Module {
  explicit SparseGeneratorImpl(NetworkConfig cfg);
  torch::Tensor forward(torch::Tensor x);

  NetworkConfig cfg;
  torch::nn::ModuleList encoders, decoders;
  torch::nn::Sequential final_up{nullptr};
  torch::nn::Conv2d head{nullptr};
};
TORCH_MODULE(SparseGenerator);

// Sparse depth -> dense depth. Same U shape, but each encoder level is a
// residual block followed by a strided downsampling stage.
struct DenseGeneratorImpl : torch::nn::Module {
  explicit DenseGeneratorImpl(NetworkConfig cfg);
  torch::Tensor forward(torch::Tensor x);

  NetworkConfig cfg;
  torch::nn::Sequential stem{nullptr};
  torch::nn::ModuleList res_blocks, downs, ups;
  ResidualBlock bottleneck{nullptr};
  torch::nn::Conv2d head{nullptr};
};
TORCH_MODULE(DenseGenerator);

// Conditional discriminator over (RGB, depth) pairs: strided conv stack,
// global average pool, linear, sigmoid scalar per sample.
struct DiscriminatorImpl : torch::nn::Module {
  explicit DiscriminatorImpl(NetworkConfig cfg);
  torch::Tensor forward(torch::Tensor rgb, torch::Tensor depth);

  NetworkConfig cfg;
  torch::nn::Sequential stack{nullptr};
  torch::nn::Linear head{nullptr};
};
TORCH_MODULE(Discriminator);

SparseGenerator build_sparse_generator(NetworkConfig cfg);
DenseGenerator build_dense_generator(NetworkConfig cfg);
Discriminator build_discriminator(NetworkConfig cfg);

std::int64_t parameter_count(const torch::nn::Module& m);

// Throws ShapeError unless H and W are divisible by 2^depth_levels.
void require_divisible(const torch::Tensor& x, int depth_levels);

// sparse_pred = SG(x), dense_pred = DG(sparse_pred), both in meters.
std::pair<DepthImage, DepthImage> forward_full(SparseGenerator& sg, DenseGenerator& dg,
                                               const RgbImage& x, double d_max);

}  // namespace depthduet

#endif  // DEPTHDUET_NETWORKS_HPP
