#include "depthduet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "depthduet/config_file.hpp"
#include "depthduet/errors.hpp"
#include "depthduet/png_io.hpp"

namespace depthduet {

namespace fs = std::filesystem;

namespace {

std::string sample_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

}  // namespace

std::vector<Sample> generate_dataset(const DatasetGenConfig& cfg) {
  if (cfg.count <= 0) throw ConfigError("dataset count must be positive");
  if (cfg.synthetic_fraction < 0.0 || cfg.synthetic_fraction > 1.0)
    throw ConfigError("synthetic_fraction must be in [0,1]");
  cfg.scene.validate();

  const int n_synthetic = static_cast<int>(std::llround(cfg.synthetic_fraction * cfg.count));
  std::vector<Sample> samples;
  samples.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) {
    const bool synthetic = i < n_synthetic;
    SceneConfig scene_cfg = cfg.scene;
    scene_cfg.seed = cfg.scene.seed * 1000003ull + static_cast<std::uint64_t>(i);
    scene_cfg.domain_style = synthetic ? DomainStyle::kSynthetic : DomainStyle::kPseudoReal;
    auto [rgb, dense] = generate_scene(scene_cfg);

    const std::uint64_t pattern_seed = scene_cfg.seed ^ 0x9e3779b97f4a7c15ull;
    Sample s;
    if (synthetic) {
      // patterns live on measured pixels only (projected LiDAR never hits
      // sky), which keeps the emitted sparse files at the full density
      ValidityMask pattern = sample_sparsity_pattern_in_support(
          pattern_seed, validity_mask(dense), cfg.scene.sparsity_density, cfg.sparsity_style);
      s = make_sample(rgb, dense, Domain::kSynthetic, pattern);
    } else {
      ValidityMask holes = sample_real_holes(pattern_seed ^ 0x5bull, scene_cfg.height,
                                             scene_cfg.width, cfg.holes_density);
      // holes may only mark measured pixels; keeps dense_mask == Eq. 4 of dense_gt
      const ValidityMask dense_valid = validity_mask(dense);
      for (size_t k = 0; k < holes.values.size(); ++k) holes.values[k] &= dense_valid.values[k];
      ValidityMask pattern = sample_sparsity_pattern_in_support(
          pattern_seed, holes, cfg.scene.sparsity_density, cfg.sparsity_style);
      s = make_sample(rgb, dense, Domain::kReal, pattern, holes);
    }
    s.id = sample_id(i);
    validate(s);
    samples.push_back(std::move(s));
  }
  return samples;
}

int write_dataset(const DatasetGenConfig& cfg, const std::string& root) {
  std::vector<Sample> samples = generate_dataset(cfg);
  std::error_code ec;
  for (const char* sub : {"rgb", "sparse", "dense"}) {
    fs::create_directories(fs::path(root) / sub, ec);
    if (ec) throw IoError("cannot create dataset directory under " + root + ": " + ec.message());
  }
  std::ofstream manifest(fs::path(root) / "manifest.txt");
  if (!manifest) throw IoError("cannot write manifest under " + root);
  for (const Sample& s : samples) {
    save_rgb_png(s.rgb, (fs::path(root) / "rgb" / (s.id + ".png")).string());
    save_depth_png(s.sparse_gt, (fs::path(root) / "sparse" / (s.id + ".png")).string());
    save_depth_png(s.dense_gt, (fs::path(root) / "dense" / (s.id + ".png")).string());
    manifest << s.id << "," << domain_name(s.domain) << "\n";
  }
  return static_cast<int>(samples.size());
}

std::vector<Sample> load_dataset(const std::string& root) {
  const fs::path manifest_path = fs::path(root) / "manifest.txt";
  std::ifstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot open manifest: " + manifest_path.string());

  std::vector<Sample> samples;
  std::string line;
  int lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError("manifest line " + std::to_string(lineno) +
                        " is not 'id,domain': " + line);
    Sample s;
    s.id = line.substr(0, comma);
    s.domain = parse_domain(line.substr(comma + 1));
    s.rgb = load_rgb_png((fs::path(root) / "rgb" / (s.id + ".png")).string());
    s.sparse_gt = load_depth_png((fs::path(root) / "sparse" / (s.id + ".png")).string());
    s.dense_gt = load_depth_png((fs::path(root) / "dense" / (s.id + ".png")).string());
    require_same_shape(s.rgb, s.dense_gt, "load_dataset");
    require_same_shape(s.sparse_gt, s.dense_gt, "load_dataset");
    s.dense_mask = validity_mask(s.dense_gt);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw DatasetError("dataset at " + root + " is empty");
  return samples;
}

Batch mixed_batch(const std::vector<Sample>& dataset, int batch_size, double synthetic_ratio,
                  Rng& rng) {
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (synthetic_ratio < 0.0 || synthetic_ratio > 1.0)
    throw ConfigError("synthetic_ratio must be in [0,1]");

  std::vector<const Sample*> synthetic, real;
  for (const Sample& s : dataset)
    (s.domain == Domain::kSynthetic ? synthetic : real).push_back(&s);
  if (synthetic_ratio > 0.0 && synthetic.empty())
    throw DatasetError("synthetic_ratio > 0 but the dataset has no synthetic samples");
  if (synthetic_ratio < 1.0 && real.empty())
    throw DatasetError("synthetic_ratio < 1 but the dataset has no real samples");

  Batch batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const auto& pool = rng.bernoulli(synthetic_ratio) ? synthetic : real;
    batch.push_back(pool[static_cast<size_t>(rng.uniform_int(0, std::int64_t(pool.size()) - 1))]);
  }
  return batch;
}

Batch mixed_batch(const std::vector<Sample>& dataset, int batch_size, double synthetic_ratio,
                  std::uint64_t seed) {
  Rng rng(seed);
  return mixed_batch(dataset, batch_size, synthetic_ratio, rng);
}

DatasetGenConfig dataset_gen_config_from_kv(const std::map<std::string, std::string>& kv) {
  DatasetGenConfig c;
  KvReader r(kv);
  c.scene.seed = static_cast<std::uint64_t>(r.get_int("seed", 0));
  c.scene.height = static_cast<int>(r.get_int("height", c.scene.height));
  c.scene.width = static_cast<int>(r.get_int("width", c.scene.width));
  c.scene.d_min = r.get_double("d_min", c.scene.d_min);
  c.scene.d_max = r.get_double("d_max", c.scene.d_max);
  c.scene.object_count_min =
      static_cast<int>(r.get_int("object_count_min", c.scene.object_count_min));
  c.scene.object_count_max =
      static_cast<int>(r.get_int("object_count_max", c.scene.object_count_max));
  c.scene.sparsity_density = r.get_double("sparsity_density", c.scene.sparsity_density);
  c.count = static_cast<int>(r.get_int("count", c.count));
  c.synthetic_fraction = r.get_double("synthetic_fraction", c.synthetic_fraction);
  c.holes_density = r.get_double("holes_density", c.holes_density);
  c.sparsity_style =
      parse_sparsity_style(r.get_string("sparsity_style", sparsity_style_name(c.sparsity_style)));
  r.reject_unknown();
  return c;
}

}  // namespace depthduet
