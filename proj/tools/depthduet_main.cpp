#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "depthduet/config_file.hpp"
#include "depthduet/dataset.hpp"
#include "depthduet/errors.hpp"
#include "depthduet/evaluate.hpp"
#include "depthduet/plot.hpp"
#include "depthduet/png_io.hpp"
#include "depthduet/trainer.hpp"

namespace dd = depthduet;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::int64_t> seed;
};

// file config, then --set overrides, then --seed (strongest)
dd::KvMap resolve_kv(const CommonOpts& opts) {
  dd::KvMap kv;
  if (!opts.config_path.empty()) kv = dd::load_kv_file(opts.config_path);
  dd::apply_overrides(kv, opts.overrides);
  if (opts.seed) kv["seed"] = std::to_string(*opts.seed);
  if (!kv.count("seed")) kv["seed"] = "0";
  return kv;
}

std::string data_root_or_env(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DEPTHDUET_DATA_ROOT")) return env;
  throw dd::ConfigError("no dataset root: pass --data or set DEPTHDUET_DATA_ROOT");
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "flat key=value config file ('#' comments)");
  cmd->add_option("--set", opts.overrides, "config override key=value (repeatable, wins over file)");
  cmd->add_option("--seed", opts.seed, "seed for all randomness (default 0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "depthduet: two-stage depth estimation/completion - dataset generation, joint\n"
      "adversarial training, inference and evaluation.\n\n"
      "Exit codes: 0 ok, 1 internal, 2 config, 3 I/O, 4 file format, 5 shape,\n"
      "6 value range, 7 checkpoint version, 8 dataset/domain, 9 numeric failure."};
  app.require_subcommand(1);

  // --- gen-data ---------------------------------------------------------
  auto* gen = app.add_subcommand("gen-data", "generate an rgb/sparse/dense PNG dataset");
  CommonOpts gen_opts;
  std::string gen_out;
  add_common(gen, gen_opts);
  gen->add_option("--out", gen_out, "output dataset root")->required();

  // --- train ------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train the two-stage model");
  CommonOpts train_opts;
  std::string train_data, train_out, train_ablation;
  std::optional<std::int64_t> train_steps;
  add_common(train, train_opts);
  train->add_option("--data", train_data, "dataset root (default $DEPTHDUET_DATA_ROOT)");
  train->add_option("--out", train_out, "output directory (checkpoints + loss CSV)")->required();
  train->add_option("--steps", train_steps, "override step count");
  train->add_option("--ablation", train_ablation,
                    "preset: sn | sn-adv | sn-ac | fn-r | full");

  // --- estimate ---------------------------------------------------------
  auto* estimate = app.add_subcommand("estimate", "RGB PNG -> dense depth PNG");
  std::string est_ckpt, est_in, est_out, est_sparse_out;
  estimate->add_option("--checkpoint", est_ckpt, "trained checkpoint")->required();
  estimate->add_option("--input", est_in, "input RGB PNG")->required();
  estimate->add_option("--out", est_out, "output 16-bit depth PNG")->required();
  estimate->add_option("--sparse-out", est_sparse_out,
                       "also write the sparse intermediate depth PNG");

  // --- complete ---------------------------------------------------------
  auto* complete = app.add_subcommand("complete", "sparse depth PNG -> dense depth PNG");
  std::string cmp_ckpt, cmp_in, cmp_out;
  complete->add_option("--checkpoint", cmp_ckpt, "trained checkpoint")->required();
  complete->add_option("--input", cmp_in, "input 16-bit sparse depth PNG")->required();
  complete->add_option("--out", cmp_out, "output 16-bit depth PNG")->required();

  // --- eval -------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate a model or baseline on a dataset");
  std::string eval_ckpt, eval_data, eval_out, eval_task = "estimation", eval_baseline;
  eval->add_option("--checkpoint", eval_ckpt, "trained checkpoint");
  eval->add_option("--baseline", eval_baseline, "classical baseline: nn (nearest neighbor)");
  eval->add_option("--data", eval_data, "dataset root (default $DEPTHDUET_DATA_ROOT)");
  eval->add_option("--task", eval_task, "estimation | completion");
  eval->add_option("--out", eval_out, "metrics CSV path")->required();

  // --- plot -------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "render a loss-trace CSV to a PNG plot");
  std::string plot_in, plot_out;
  plot->add_option("--input", plot_in, "loss_trace.csv")->required();
  plot->add_option("--out", plot_out, "output PNG")->required();

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      dd::DatasetGenConfig cfg = dd::dataset_gen_config_from_kv(resolve_kv(gen_opts));
      const int n = dd::write_dataset(cfg, gen_out);
      std::cout << "wrote " << n << " samples to " << gen_out << "\n";
    } else if (train->parsed()) {
      dd::KvMap kv = resolve_kv(train_opts);
      if (!train_ablation.empty()) kv["ablation"] = train_ablation;
      if (train_steps) kv["steps"] = std::to_string(*train_steps);
      dd::TrainConfig cfg = dd::TrainConfig::from_kv(kv);
      cfg.validate();
      auto dataset = dd::load_dataset(data_root_or_env(train_data));
      dd::Trainer trainer(cfg);
      auto trace = trainer.train(dataset, train_out);
      std::cout << "trained " << trace.size() << " steps; final total loss "
                << trace.back().total << "; outputs in " << train_out << "\n";
    } else if (estimate->parsed()) {
      dd::Trainer trainer = dd::Trainer::load_checkpoint(est_ckpt);
      const dd::RgbImage rgb = dd::load_rgb_png(est_in);
      auto [sparse, dense] = trainer.infer_estimate_with_sparse(rgb);
      dd::save_depth_png(dense, est_out);
      if (!est_sparse_out.empty()) dd::save_depth_png(sparse, est_sparse_out);
      std::cout << "wrote " << est_out << "\n";
    } else if (complete->parsed()) {
      dd::Trainer trainer = dd::Trainer::load_checkpoint(cmp_ckpt);
      const dd::DepthImage sparse = dd::load_depth_png(cmp_in);
      dd::save_depth_png(trainer.infer_complete(sparse), cmp_out);
      std::cout << "wrote " << cmp_out << "\n";
    } else if (eval->parsed()) {
      auto dataset = dd::load_dataset(data_root_or_env(eval_data));
      const dd::EvalTask task = dd::parse_eval_task(eval_task);
      if (!eval_baseline.empty()) {
        if (eval_baseline != "nn")
          throw dd::ConfigError("unknown baseline '" + eval_baseline + "' (expected nn)");
        dd::NearestNeighborBaseline baseline;
        dd::evaluate_to_csv(baseline, dataset, task, eval_out);
      } else if (!eval_ckpt.empty()) {
        dd::Trainer trainer = dd::Trainer::load_checkpoint(eval_ckpt);
        dd::ModelPredictor model(trainer);
        dd::evaluate_to_csv(model, dataset, task, eval_out, trainer.config().d_min,
                            trainer.config().d_max);
      } else {
        throw dd::ConfigError("eval needs --checkpoint or --baseline");
      }
      std::cout << "wrote " << eval_out << "\n";
    } else if (plot->parsed()) {
      dd::render_loss_plot(plot_in, plot_out);
      std::cout << "wrote " << plot_out << "\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const dd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dd::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
