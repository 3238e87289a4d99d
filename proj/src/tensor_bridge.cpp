#include "depthduet/tensor_bridge.hpp"

#include "depthduet/errors.hpp"

namespace depthduet {

torch::Tensor to_tensor(const RgbImage& img) {
  auto t = torch::from_blob(const_cast<float*>(img.values.data()),
                            {img.height, img.width, 3}, torch::kFloat32);
  return t.permute({2, 0, 1}).contiguous();
}

torch::Tensor to_tensor(const DepthImage& depth, double scale) {
  auto t = torch::from_blob(const_cast<float*>(depth.values.data()),
                            {1, depth.height, depth.width}, torch::kFloat32)
               .clone();
  if (scale != 1.0) t = t / scale;
  return t;
}

torch::Tensor to_tensor(const ValidityMask& mask) {
  auto t = torch::empty({1, mask.height, mask.width}, torch::kFloat32);
  float* out = t.data_ptr<float>();
  for (size_t i = 0; i < mask.values.size(); ++i) out[i] = mask.values[i] ? 1.0f : 0.0f;
  return t;
}

DepthImage depth_from_tensor(const torch::Tensor& t, double scale) {
  torch::Tensor v = t;
  while (v.dim() > 2) {
    if (v.size(0) != 1) throw ShapeError("depth tensor has a non-singleton leading dimension");
    v = v.squeeze(0);
  }
  if (v.dim() != 2) throw ShapeError("depth tensor must be 2-D after squeezing");
  v = v.to(torch::kFloat32).contiguous();
  if (scale != 1.0) v = v * scale;
  DepthImage out(static_cast<int>(v.size(0)), static_cast<int>(v.size(1)));
  std::memcpy(out.values.data(), v.data_ptr<float>(), out.values.size() * sizeof(float));
  return out;
}

RgbImage rgb_from_tensor(const torch::Tensor& t) {
  torch::Tensor v = t;
  if (v.dim() == 4) {
    if (v.size(0) != 1) throw ShapeError("rgb tensor has batch dimension > 1");
    v = v.squeeze(0);
  }
  if (v.dim() != 3 || v.size(0) != 3) throw ShapeError("rgb tensor must be (3,H,W)");
  v = v.permute({1, 2, 0}).to(torch::kFloat32).contiguous();
  RgbImage out(static_cast<int>(v.size(0)), static_cast<int>(v.size(1)));
  std::memcpy(out.values.data(), v.data_ptr<float>(), out.values.size() * sizeof(float));
  return out;
}

}  // namespace depthduet
