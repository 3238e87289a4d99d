#include "depthduet/scene.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "depthduet/errors.hpp"
#include "depthduet/rng.hpp"

namespace depthduet {

void SceneConfig::validate() const {
  if (height < 16 || width < 16)
    throw ConfigError("scene dimensions must be at least 16x16, got " + std::to_string(height) +
                      "x" + std::to_string(width));
  if (!(d_min < d_max) || d_min <= 0.0)
    throw ConfigError("require 0 < d_min < d_max, got d_min=" + std::to_string(d_min) +
                      " d_max=" + std::to_string(d_max));
  if (sparsity_density <= 0.0 || sparsity_density >= 1.0)
    throw ConfigError("sparsity_density must be in (0,1), got " +
                      std::to_string(sparsity_density));
  if (object_count_min < 0 || object_count_max < object_count_min)
    throw ConfigError("invalid object_count_range [" + std::to_string(object_count_min) + ", " +
                      std::to_string(object_count_max) + "]");
}

SceneCamera scene_camera(const SceneConfig& cfg) {
  SceneCamera cam;
  cam.focal = static_cast<double>(cfg.height);
  // Fractional offset keeps every pixel row strictly off the horizon.
  cam.horizon_row = 0.40 * cfg.height + 0.37;
  cam.cam_height = 1.5;
  return cam;
}

namespace {

struct Box {
  double z;        // front-face depth in meters
  int row0, row1;  // inclusive pixel extent
  int col0, col1;
  float albedo[3];
};

struct Shade {
  float r, g, b;
};

Shade ground_albedo(double world_x, double world_z) {
  const long cx = static_cast<long>(std::floor(world_x / 1.5));
  const long cz = static_cast<long>(std::floor(world_z / 1.5));
  const bool odd = ((cx + cz) & 1) != 0;
  return odd ? Shade{0.38f, 0.34f, 0.30f} : Shade{0.52f, 0.48f, 0.42f};
}

Shade sky_color(double t) {
  // t = 0 at top of image, 1 at horizon.
  return Shade{static_cast<float>(0.45 + 0.30 * t), static_cast<float>(0.60 + 0.25 * t),
               static_cast<float>(0.85 + 0.10 * t)};
}

}  // namespace

std::pair<RgbImage, DepthImage> generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const SceneCamera cam = scene_camera(cfg);
  const int h = cfg.height;
  const int w = cfg.width;

  DepthImage depth(h, w);
  // label: -1 sky/far, -2 ground, >=0 box index
  std::vector<int> label(static_cast<size_t>(h) * w, -1);

  for (int r = 0; r < h; ++r) {
    if (static_cast<double>(r) <= cam.horizon_row) continue;
    double d = cam.cam_height * cam.focal / (static_cast<double>(r) - cam.horizon_row);
    if (d > cfg.d_max) continue;  // far ground reads as "no measurement", like sky
    if (d < cfg.d_min) d = cfg.d_min;
    for (int c = 0; c < w; ++c) {
      depth.at(r, c) = static_cast<float>(d);
      label[static_cast<size_t>(r) * w + c] = -2;
    }
  }

  const int n_boxes =
      static_cast<int>(rng.uniform_int(cfg.object_count_min, cfg.object_count_max));
  std::vector<Box> boxes;
  boxes.reserve(n_boxes);
  for (int i = 0; i < n_boxes; ++i) {
    Box b;
    const double z_near = std::max(cfg.d_min, 0.05 * cfg.d_max);
    b.z = rng.uniform(z_near, 0.5 * cfg.d_max);
    const double metric_w = rng.uniform(0.8, 3.5);
    const double metric_h = rng.uniform(0.8, 3.0);
    const double uc = rng.uniform(0.08 * w, 0.92 * w);
    const double contact = cam.horizon_row + cam.cam_height * cam.focal / b.z;
    const double px_h = cam.focal * metric_h / b.z;
    const double px_w = cam.focal * metric_w / b.z;
    b.row1 = std::min(h - 1, static_cast<int>(std::floor(contact)));
    b.row0 = std::max(0, static_cast<int>(std::floor(contact - px_h)));
    b.col0 = std::max(0, static_cast<int>(std::floor(uc - 0.5 * px_w)));
    b.col1 = std::min(w - 1, static_cast<int>(std::floor(uc + 0.5 * px_w)));
    b.albedo[0] = static_cast<float>(rng.uniform(0.15, 0.9));
    b.albedo[1] = static_cast<float>(rng.uniform(0.15, 0.9));
    b.albedo[2] = static_cast<float>(rng.uniform(0.15, 0.9));
    boxes.push_back(b);
  }

  for (size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    if (b.row0 > b.row1 || b.col0 > b.col1) continue;
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        float& d = depth.at(r, c);
        if (d == 0.0f || b.z < d) {
          d = static_cast<float>(b.z);
          label[static_cast<size_t>(r) * w + c] = static_cast<int>(i);
        }
      }
    }
  }

  RgbImage rgb(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int lab = label[static_cast<size_t>(r) * w + c];
      Shade s;
      if (lab == -1) {
        const double t = std::min(1.0, static_cast<double>(r) / std::max(1.0, cam.horizon_row));
        s = sky_color(t);
      } else {
        const double z = depth.at(r, c);
        if (lab == -2) {
          const double world_x = (c + 0.5 - 0.5 * w) * z / cam.focal;
          s = ground_albedo(world_x, z);
        } else {
          const Box& b = boxes[lab];
          // mild vertical shading plus a darker rim so edges read as edges
          const double span = std::max(1, b.row1 - b.row0);
          const double vshade = 0.85 + 0.15 * (r - b.row0) / span;
          const bool rim = (r == b.row0 || r == b.row1 || c == b.col0 || c == b.col1);
          const double k = (rim ? 0.55 : 1.0) * vshade;
          s = Shade{static_cast<float>(b.albedo[0] * k), static_cast<float>(b.albedo[1] * k),
                    static_cast<float>(b.albedo[2] * k)};
        }
        const double fog = 0.55 * std::min(1.0, z / cfg.d_max);
        const Shade horizon = sky_color(1.0);
        s.r = static_cast<float>(s.r * (1.0 - fog) + horizon.r * fog);
        s.g = static_cast<float>(s.g * (1.0 - fog) + horizon.g * fog);
        s.b = static_cast<float>(s.b * (1.0 - fog) + horizon.b * fog);
      }
      rgb.at(r, c, 0) = s.r;
      rgb.at(r, c, 1) = s.g;
      rgb.at(r, c, 2) = s.b;
    }
  }

  if (cfg.domain_style == DomainStyle::kPseudoReal) {
    // Distinct sensor-flavoured look: desaturation, gamma lift, warm tint,
    // per-row gain jitter, vignette and additive noise.
    std::vector<double> row_gain(h);
    for (int r = 0; r < h; ++r) row_gain[r] = 1.0 + 0.02 * rng.normal();
    const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);
    const double max_r2 = cy * cy + cx * cx;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double v[3];
        for (int ch = 0; ch < 3; ++ch) v[ch] = rgb.at(r, c, ch);
        const double gray = (v[0] + v[1] + v[2]) / 3.0;
        for (int ch = 0; ch < 3; ++ch) v[ch] = 0.45 * v[ch] + 0.55 * gray;
        v[0] *= 1.06;
        v[1] *= 1.00;
        v[2] *= 0.90;
        const double r2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
        const double vignette = 1.0 - 0.18 * (r2 / max_r2);
        for (int ch = 0; ch < 3; ++ch) {
          double x = v[ch] * vignette * row_gain[r];
          x = std::pow(std::clamp(x, 0.0, 1.0), 1.0 / 1.25);
          x += 0.025 * rng.normal();
          rgb.at(r, c, ch) = static_cast<float>(std::clamp(x, 0.0, 1.0));
        }
      }
    }
  } else {
    for (float& v : rgb.values) v = std::clamp(v, 0.0f, 1.0f);
  }

  return {std::move(rgb), std::move(depth)};
}

}  // namespace depthduet
