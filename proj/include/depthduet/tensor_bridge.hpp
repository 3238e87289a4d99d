#ifndef DEPTHDUET_TENSOR_BRIDGE_HPP
#define DEPTHDUET_TENSOR_BRIDGE_HPP

#include <torch/torch.h>

#include "depthduet/image.hpp"

namespace depthduet {

// (3,H,W) float32 in [0,1]
torch::Tensor to_tensor(const RgbImage& img);

// (1,H,W) float32, meters scaled by 1/scale (scale = d_max for normalized nets)
torch::Tensor to_tensor(const DepthImage& depth, double scale = 1.0);

// (1,H,W) float32 {0,1}
torch::Tensor to_tensor(const ValidityMask& mask);

// Accepts (H,W), (1,H,W) or (1,1,H,W); multiplies by scale back to meters.
DepthImage depth_from_tensor(const torch::Tensor& t, double scale = 1.0);

RgbImage rgb_from_tensor(const torch::Tensor& t);

}  // namespace depthduet

#endif  // DEPTHDUET_TENSOR_BRIDGE_HPP
