#include <torch/torch.h>

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "depthduet/config_file.hpp"
#include "depthduet/dataset.hpp"
#include "depthduet/errors.hpp"
#include "depthduet/plot.hpp"
#include "depthduet/png_io.hpp"
#include "depthduet/trainer.hpp"

using namespace depthduet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("depthduet_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "depthduet_cli_out.txt";
  const std::string cmd = std::string(DEPTHDUET_CLI_PATH) + " " + args + " > " + log.string() +
                          " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parser: syntax, comments, precedence") {
  const KvMap kv = parse_kv_text("# comment\n  steps = 12 \n\nseed=4 # trailing\nsteps=13\n");
  CHECK(kv.at("steps") == "13");  // later assignment wins
  CHECK(kv.at("seed") == "4");
  CHECK(kv.size() == 2);

  CHECK_THROWS_AS(parse_kv_text("not a pair\n"), ConfigError);
  CHECK_THROWS_AS(parse_kv_text("=value\n"), ConfigError);

  KvMap base{{"a", "1"}, {"b", "2"}};
  apply_overrides(base, {"b=3", "c=4"});
  CHECK(base.at("b") == "3");
  CHECK(base.at("c") == "4");
  CHECK_THROWS_AS(apply_overrides(base, {"oops"}), ConfigError);
}

TEST_CASE("kv reader: typed access and unknown-key rejection") {
  const KvMap kv{{"n", "5"}, {"x", "1.5"}, {"flag", "true"}, {"name", "abc"}, {"bad", "zz"}};
  KvReader r(kv);
  CHECK(r.get_int("n", 0) == 5);
  CHECK(r.get_double("x", 0.0) == doctest::Approx(1.5));
  CHECK(r.get_bool("flag", false));
  CHECK(r.get_string("name", "") == "abc");
  CHECK(r.get_int("missing", 9) == 9);
  CHECK_THROWS_WITH_AS(r.get_int("bad", 0), doctest::Contains("bad"), ConfigError);

  KvReader strict(kv);
  strict.get_int("n", 0);
  // first unconsumed key in map order is "bad"
  CHECK_THROWS_WITH_AS(strict.reject_unknown(), doctest::Contains("bad"), ConfigError);
}

TEST_CASE("train config defaults mirror the published hyperparameters") {
  const TrainConfig cfg = TrainConfig::from_kv({});
  CHECK(cfg.weights.lambda_rec_sg == 150.0);
  CHECK(cfg.weights.lambda_rec_dg == 100.0);
  CHECK(cfg.weights.lambda_adv == 10.0);
  CHECK(cfg.weights.lambda_s == 1.0);
  CHECK(cfg.learning_rate == 1e-4);
  CHECK(cfg.adam_beta1 == 0.5);
  CHECK(cfg.adam_beta2 == 0.999);
  CHECK(cfg.batch_size == 4);
  CHECK(cfg.synthetic_ratio == 0.5);
  CHECK(cfg.seed == 0);

  const TrainConfig ablated = TrainConfig::from_kv({{"ablation", "sn-ac"}});
  CHECK(ablated.ablation.single_network);
}

TEST_CASE("gen config binding rejects unknown keys") {
  CHECK_NOTHROW(dataset_gen_config_from_kv({{"count", "4"}, {"sparsity_style", "uniform"}}));
  CHECK_THROWS_WITH_AS(dataset_gen_config_from_kv({{"cnt", "4"}}), doctest::Contains("cnt"),
                       ConfigError);
  CHECK_THROWS_AS(dataset_gen_config_from_kv({{"sparsity_style", "diagonal"}}), ConfigError);
}

TEST_CASE("plot: csv parsing and render smoke") {
  const auto dir = temp_dir("plot");
  {
    std::ofstream csv(dir / "trace.csv");
    csv << loss_trace_header() << "\n";
    for (int i = 1; i <= 40; ++i) {
      LossReport r;
      r.step = i;
      r.rec_sg = 1.0 / i;
      r.rec_dg = 0.5 / i;
      r.adv_g = 0.7;
      r.adv_d_s = 1.4;
      r.adv_d_r = 1.3;
      r.smooth = 0.01;
      r.total = 150.0 / i + 50.0 / i + 7.0 + 0.01;
      csv << loss_trace_row(r) << "\n";
    }
  }
  const LossCsv parsed = parse_loss_csv((dir / "trace.csv").string());
  CHECK(parsed.columns.size() == 7);
  CHECK(parsed.steps.size() == 40);
  CHECK(parsed.series[0][0] == doctest::Approx(1.0));

  render_loss_plot((dir / "trace.csv").string(), (dir / "trace.png").string());
  const RgbImage img = load_rgb_png((dir / "trace.png").string());
  CHECK(img.width == 1000);
  CHECK(img.height == 640);

  std::ofstream(dir / "bad.csv") << "step,a\n1,notanumber\n";
  CHECK_THROWS_AS(parse_loss_csv((dir / "bad.csv").string()), FormatError);
  CHECK_THROWS_AS(parse_loss_csv((dir / "missing.csv").string()), IoError);
}

// --- subprocess-level CLI contract ----------------------------------------

TEST_CASE("cli: help and bad invocations") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("gen-data --help").exit_code == 0);
  CHECK(run_cli("frobnicate").exit_code != 0);
  CHECK(run_cli("").exit_code != 0);  // a subcommand is required
}

TEST_CASE("cli: full pipeline - gen-data, train, estimate/complete, eval, plot") {
  const auto dir = temp_dir("pipeline");
  const std::string data = (dir / "data").string();

  // gen-data: tiny 32x32 dataset
  auto gen = run_cli("gen-data --out " + data +
                     " --seed 5 --set count=8 --set height=32 --set width=32");
  CHECK(gen.exit_code == 0);
  CHECK(fs::exists(fs::path(data) / "manifest.txt"));
  CHECK(fs::exists(fs::path(data) / "rgb" / "000000.png"));

  // rerun into a second root: bit-identical files
  const std::string data2 = (dir / "data2").string();
  run_cli("gen-data --out " + data2 +
          " --seed 5 --set count=8 --set height=32 --set width=32");
  CHECK(read_file(fs::path(data) / "dense" / "000003.png") ==
        read_file(fs::path(data2) / "dense" / "000003.png"));

  // unknown config key is a config error (exit 2) naming the key
  auto bad = run_cli("gen-data --out " + (dir / "x").string() + " --set coutn=8");
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("coutn") != std::string::npos);

  // train: 3 steps at tiny width
  const std::string run = (dir / "run").string();
  auto train = run_cli("train --data " + data + " --out " + run +
                       " --steps 3 --seed 1 --set base_width=8 --set depth_levels=3 "
                       "--set checkpoint_every=0");
  CHECK(train.exit_code == 0);
  REQUIRE(fs::exists(fs::path(run) / "model.pt"));
  REQUIRE(fs::exists(fs::path(run) / "loss_trace.csv"));

  // estimate emits dense + sparse; complete on the sparse reproduces dense
  const std::string ckpt = (fs::path(run) / "model.pt").string();
  const std::string rgb = (fs::path(data) / "rgb" / "000000.png").string();
  auto est = run_cli("estimate --checkpoint " + ckpt + " --input " + rgb + " --out " +
                     (dir / "dense1.png").string() + " --sparse-out " +
                     (dir / "sp.png").string());
  CHECK(est.exit_code == 0);
  auto comp = run_cli("complete --checkpoint " + ckpt + " --input " +
                      (dir / "sp.png").string() + " --out " + (dir / "dense2.png").string());
  CHECK(comp.exit_code == 0);
  CHECK(read_file(dir / "dense1.png") == read_file(dir / "dense2.png"));  // bitwise

  // eval with the nearest-neighbor baseline; estimation with a baseline is a
  // task/model mismatch (config error)
  auto ev = run_cli("eval --baseline nn --task completion --data " + data + " --out " +
                    (dir / "metrics.csv").string());
  CHECK(ev.exit_code == 0);
  CHECK(read_file(dir / "metrics.csv").rfind("id,rmse_mm,mae_mm", 0) == 0);
  CHECK(run_cli("eval --baseline nn --task estimation --data " + data + " --out " +
                (dir / "m2.csv").string())
            .exit_code == 2);

  // model eval over both tasks
  auto ev_model = run_cli("eval --checkpoint " + ckpt + " --task estimation --data " + data +
                          " --out " + (dir / "m3.csv").string());
  CHECK(ev_model.exit_code == 0);

  // plot from the training trace
  auto plot = run_cli("plot --input " + (fs::path(run) / "loss_trace.csv").string() +
                      " --out " + (dir / "curve.png").string());
  CHECK(plot.exit_code == 0);
  CHECK_NOTHROW(load_rgb_png((dir / "curve.png").string()));

  // checkpoint version error surfaces as exit 7
  {
    torch::serialize::OutputArchive bad_ckpt;
    bad_ckpt.write("format_version", torch::tensor(std::int64_t(12)));
    bad_ckpt.save_to((dir / "bad.pt").string());
  }
  CHECK(run_cli("complete --checkpoint " + (dir / "bad.pt").string() + " --input " +
                (dir / "sp.png").string() + " --out " + (dir / "z.png").string())
            .exit_code == 7);

  // missing input file is an I/O error (exit 3)
  CHECK(run_cli("estimate --checkpoint " + ckpt + " --input " + (dir / "nope.png").string() +
                " --out " + (dir / "z2.png").string())
            .exit_code == 3);

  // inputs are never mutated: estimate ran twice gives identical outputs
  const std::string rgb_bytes = read_file(rgb);
  run_cli("estimate --checkpoint " + ckpt + " --input " + rgb + " --out " +
          (dir / "dense3.png").string());
  CHECK(read_file(rgb) == rgb_bytes);
  CHECK(read_file(dir / "dense3.png") == read_file(dir / "dense1.png"));
}

TEST_CASE("cli: DEPTHDUET_DATA_ROOT is the default dataset root") {
  const auto dir = temp_dir("envroot");
  const std::string data = (dir / "data").string();
  run_cli("gen-data --out " + data + " --set count=4 --set height=32 --set width=32");

  setenv("DEPTHDUET_DATA_ROOT", data.c_str(), 1);
  auto ev = run_cli("eval --baseline nn --task completion --out " +
                    (dir / "metrics.csv").string());
  unsetenv("DEPTHDUET_DATA_ROOT");
  CHECK(ev.exit_code == 0);

  auto no_root = run_cli("eval --baseline nn --task completion --out " +
                         (dir / "m.csv").string());
  CHECK(no_root.exit_code == 2);
}
