#ifndef DEPTHDUET_SCENE_HPP
#define DEPTHDUET_SCENE_HPP

#include <cstdint>
#include <utility>

#include "depthduet/image.hpp"

namespace depthduet {

enum class DomainStyle { kSynthetic, kPseudoReal };

// Procedural stand-in for the synthetic/real training corpora: a ground plane
// under perspective projection plus axis-aligned box occluders, rendered as a
// shaded RGB image and a metric depth map. Pure function of the config.
struct SceneConfig {
  std::uint64_t seed = 0;
  int height = 64;
  int width = 64;
  double d_min = 1.0;
  double d_max = 80.0;
  int object_count_min = 2;
  int object_count_max = 6;
  double sparsity_density = 0.04;
  DomainStyle domain_style = DomainStyle::kSynthetic;

  void validate() const;
};

// Camera model shared with tests: focal length in pixels, horizon row and
// camera height determine ground depth as cam_height * focal / (row - horizon)
// for rows below the horizon. Depths beyond d_max become 0 (sky/far).
struct SceneCamera {
  double focal = 0.0;
  double horizon_row = 0.0;
  double cam_height = 1.5;
};
SceneCamera scene_camera(const SceneConfig& cfg);

std::pair<RgbImage, DepthImage> generate_scene(const SceneConfig& cfg);

}  // namespace depthduet

#endif  // DEPTHDUET_SCENE_HPP
