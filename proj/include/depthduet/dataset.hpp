#ifndef DEPTHDUET_DATASET_HPP
#define DEPTHDUET_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depthduet/image.hpp"
#include "depthduet/rng.hpp"
#include "depthduet/scene.hpp"
#include "depthduet/sparsity.hpp"

namespace depthduet {

// On-disk layout: <root>/{rgb,sparse,dense}/<id>.png plus <root>/manifest.txt
// with one `id,domain` line per sample (UTF-8, no header).
struct DatasetGenConfig {
  SceneConfig scene;          // seed here seeds the whole dataset
  int count = 16;
  double synthetic_fraction = 0.5;  // first round(count*fraction) ids are synthetic
  double holes_density = 0.30;
  SparsityStyle sparsity_style = SparsityStyle::kScanline;
};

// Flat key=value binding used by the CLI; rejects unknown keys.
DatasetGenConfig dataset_gen_config_from_kv(const std::map<std::string, std::string>& kv);

// Generate `count` samples (deterministic per seed) without touching disk.
std::vector<Sample> generate_dataset(const DatasetGenConfig& cfg);

// Generate and write to <root>. Returns the number of samples written.
int write_dataset(const DatasetGenConfig& cfg, const std::string& root);

// Load a dataset directory; dense_mask is rebuilt from the dense file (Eq. 4).
std::vector<Sample> load_dataset(const std::string& root);

using Batch = std::vector<const Sample*>;

// Each slot drawn independently: synthetic with probability synthetic_ratio,
// otherwise real, then uniform within that domain pool.
Batch mixed_batch(const std::vector<Sample>& dataset, int batch_size, double synthetic_ratio,
                  Rng& rng);
Batch mixed_batch(const std::vector<Sample>& dataset, int batch_size, double synthetic_ratio,
                  std::uint64_t seed);

}  // namespace depthduet

#endif  // DEPTHDUET_DATASET_HPP
