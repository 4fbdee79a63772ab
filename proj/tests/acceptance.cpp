// Acceptance gate: runs every criterion end to end and prints one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.
//
// usage: acceptance --cli <path-to-segrestore-binary> [--work <dir>]

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "segrestore/dataset.hpp"
#include "segrestore/eval.hpp"
#include "segrestore/model_io.hpp"
#include "segrestore/network.hpp"
#include "segrestore/track.hpp"
#include "segrestore/train.hpp"

namespace fs = std::filesystem;
using namespace segrestore;

namespace {

struct Gate {
  int failures = 0;

  void report(const std::string& label, bool pass, const std::string& detail) {
    std::printf("[%s] %s — %s\n", pass ? "PASS" : "FAIL", label.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Relative error with a unit floor: near-zero gradients compare absolutely.
double grad_rel_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1.0});
  return std::abs(analytic - numeric) / scale;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_gradients(Gate& gate) {
  rng::Engine eng(20260811);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = init_network(autoencoder_dims(), eng());
    VectorX<double> input(6), target(6);
    for (int k = 0; k < 6; ++k) {
      input[k] = rng::unit_uniform(eng);
      target[k] = rng::unit_uniform(eng);
    }
    const auto [loss, analytic] = backprop(net, input, target);
    const auto numeric = numerical_gradient(net, input, target, 1e-5);
    for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
      for (Eigen::Index r = 0; r < analytic.weights[l].rows(); ++r) {
        for (Eigen::Index c = 0; c < analytic.weights[l].cols(); ++c) {
          worst = std::max(worst, grad_rel_error(analytic.weights[l](r, c),
                                                 numeric.weights[l](r, c)));
        }
        worst = std::max(worst,
                         grad_rel_error(analytic.biases[l](r), numeric.biases[l](r)));
      }
    }
    (void)loss;
  }
  gate.report("criterion 1: gradient correctness", worst < 1e-6,
              "max relative error " + fmt(worst) + " over 10 random nets (< 1e-06)");
}

// --- criterion 2 -----------------------------------------------------------

void criterion_determinism(Gate& gate, const std::string& cli, const fs::path& work) {
  const auto pipeline = [&](const fs::path& dir) -> bool {
    fs::create_directories(dir);
    const std::string base = cli + " ";
    const std::string log = " >> " + (dir / "log.txt").string() + " 2>&1";
    if (run(base + "gen --n 8500 --seed 7 --out " + (dir / "tracks.csv").string() +
            log) != 0) {
      return false;
    }
    if (run(base + "train --data " + (dir / "tracks.csv").string() +
            " --scheme B --train-n 5000 --test-n 3500 --seed 7 --epochs 150 "
            "--out-model " +
            (dir / "b.model").string() + log) != 0) {
      return false;
    }
    return run(base + "eval --model " + (dir / "b.model").string() + " --test " +
               (dir / "b.model.test.csv").string() +
               " --mode random --seed 11 --threshold 5 --out " +
               (dir / "report").string() + log) == 0;
  };

  const fs::path r1 = work / "determinism_run1";
  const fs::path r2 = work / "determinism_run2";
  if (!pipeline(r1) || !pipeline(r2)) {
    gate.report("criterion 2: determinism", false, "pipeline command failed");
    return;
  }
  const std::array<std::string, 6> files = {
      "tracks.csv",           "b.model",
      "b.model.history.csv",  "b.model.test.csv",
      "report/report.txt",    "report/histogram.csv",
  };
  std::string mismatch;
  for (const auto& f : files) {
    const std::string a = slurp(r1 / f);
    if (a.empty() || a != slurp(r2 / f)) {
      mismatch = f;
      break;
    }
  }
  if (mismatch.empty() && slurp(r1 / "report/per_index.csv") !=
                              slurp(r2 / "report/per_index.csv")) {
    mismatch = "report/per_index.csv";
  }
  gate.report("criterion 2: determinism", mismatch.empty(),
              mismatch.empty()
                  ? "gen+train+eval run twice: model and report files byte-identical"
                  : "files differ or are empty: " + mismatch);
}

// --- criteria 3-6 and 9 share one paper-scale pipeline ---------------------

struct PipelineResult {
  EvalReport random_a;
  EvalReport random_b;
  EvalReport all_b;
  TrainReport train_b;
  DenseNetwork<double> net_b;
  std::vector<TrackSample> test_set;
};

PipelineResult run_pipeline() {
  GenConfig gen_cfg;
  gen_cfg.seed = 7;
  const auto samples = gen_dataset(8500, gen_cfg);
  auto [train_set, test_set] = split(samples, 5000, 3500, rng::derive_seed(7, 1));

  const NormSpec spec;
  const auto pairs_a =
      make_training_pairs(train_set, Scheme::RandomZero, rng::derive_seed(7, 2), spec);
  const auto pairs_b =
      make_training_pairs(train_set, Scheme::ExpandAll, rng::derive_seed(7, 2), spec);

  TrainConfig cfg;  // library defaults
  cfg.shuffle_seed = rng::derive_seed(7, 4);

  PipelineResult result;
  auto net_a = init_network(autoencoder_dims(), rng::derive_seed(7, 3));
  auto net_b = net_a;  // both schemes start from the identical network

  std::fprintf(stderr, "training scheme A (%zu pairs)...\n", pairs_a.size());
  train(pairs_a, cfg, net_a);
  std::fprintf(stderr, "training scheme B (%zu pairs)...\n", pairs_b.size());
  result.train_b = train(pairs_b, cfg, net_b);

  const double threshold = 5.0;
  result.random_a =
      evaluate(net_a, test_set, EvalMode::RandomIndex, 11, spec, threshold);
  result.random_b =
      evaluate(net_b, test_set, EvalMode::RandomIndex, 11, spec, threshold);
  result.all_b = evaluate(net_b, test_set, EvalMode::AllIndices, 0, spec, threshold);
  result.net_b = std::move(net_b);
  result.test_set = std::move(test_set);
  return result;
}

void criterion_scheme_ordering(Gate& gate, const PipelineResult& pipe) {
  const double a = pipe.random_a.stddev;
  const double b = pipe.random_b.stddev;
  const bool pass = b < a && b <= 0.75 * a;
  gate.report("criterion 3: scheme ordering", pass,
              "scheme-B std " + fmt(b) + " vs scheme-A std " + fmt(a) + " (ratio " +
                  fmt(b / a) + ", required < 1 and <= 0.75)");
}

void criterion_absolute_accuracy(Gate& gate, const PipelineResult& pipe) {
  const double b = pipe.random_b.stddev;
  gate.report("criterion 4: absolute accuracy bound", b <= 1.0,
              "scheme-B residual std " + fmt(b) + " wires (<= 1.0)");
}

void criterion_recovery(Gate& gate, const PipelineResult& pipe) {
  const double rate = pipe.random_b.recovery_rate;
  gate.report("criterion 5: recovery proxy", rate >= 0.99,
              "recovery rate " + fmt(rate) + " at T = 5 wires (>= 0.99)");
}

void criterion_per_index(Gate& gate, const PipelineResult& pipe) {
  double worst = 0.0;
  for (const auto& s : pipe.all_b.per_index) {
    worst = std::max(worst, std::abs(s.mean));
  }
  gate.report("criterion 6: per-index systematics", worst <= pipe.all_b.stddev,
              "max |per-index mean| " + fmt(worst) + " vs overall std " +
                  fmt(pipe.all_b.stddev));
}

void criterion_training_sanity(Gate& gate, const PipelineResult& pipe) {
  const double first = pipe.train_b.epoch_mse.front();
  const double last = pipe.train_b.final_mse;
  gate.report("criterion 9: training sanity", last <= 0.1 * first,
              "epoch-mean MSE " + fmt(first) + " -> " + fmt(last) + " over " +
                  std::to_string(pipe.train_b.epochs_run) + " epochs (<= 0.1x)");
}

// --- criterion 7 -----------------------------------------------------------

void criterion_data_construction(Gate& gate) {
  GenConfig cfg;
  cfg.seed = 99;
  const auto samples = gen_dataset(100, cfg);
  bool expand_ok = true;
  for (const auto& s : samples) {
    const auto pairs = corrupt_expand(s);
    for (int k = 0; k < kSuperlayers; ++k) {
      expand_ok = expand_ok && pairs[k].missing_index == k &&
                  pairs[k].input[k] == 0.0 && pairs[k].target == s;
      for (int j = 0; j < kSuperlayers; ++j) {
        if (j != k) expand_ok = expand_ok && pairs[k].input[j] == s[j];
      }
    }
  }

  rng::Engine eng(1234);
  std::array<long, kSuperlayers> counts{};
  for (int i = 0; i < 60000; ++i) {
    ++counts[corrupt_random(samples[0], eng).missing_index];
  }
  const double sigma = std::sqrt(60000.0 * (1.0 / 6.0) * (5.0 / 6.0));
  double worst_dev = 0.0;
  for (long c : counts) {
    worst_dev = std::max(worst_dev, std::abs(static_cast<double>(c) - 10000.0));
  }
  const bool uniform_ok = worst_dev <= 5.0 * sigma;
  gate.report("criterion 7: data-construction exactness", expand_ok && uniform_ok,
              std::string("expand pairs ") + (expand_ok ? "exact" : "WRONG") +
                  "; worst index-count deviation " + fmt(worst_dev) + " (5 sigma = " +
                  fmt(5.0 * sigma) + ")");
}

// --- criterion 8 -----------------------------------------------------------

void criterion_persistence(Gate& gate, const fs::path& work) {
  const auto net = init_network(autoencoder_dims(), 424242);
  const fs::path model_path = work / "roundtrip.model";
  save_model(net, model_path);
  const auto loaded = load_model(model_path);

  rng::Engine eng(5150);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    VectorX<double> input(6);
    for (int k = 0; k < 6; ++k) {
      input[k] = rng::unit_uniform(eng);
    }
    worst = std::max(worst,
                     (forward(net, input) - forward(loaded, input)).cwiseAbs().maxCoeff());
  }
  const bool model_ok = worst < 1e-15;

  GenConfig cfg;
  cfg.seed = 3;
  const auto samples = gen_dataset(500, cfg);
  const fs::path csv_path = work / "roundtrip.csv";
  save_csv(samples, csv_path);
  const auto reloaded = load_csv(csv_path);
  bool csv_ok = reloaded.size() == samples.size();
  for (std::size_t i = 0; csv_ok && i < samples.size(); ++i) {
    csv_ok = reloaded[i] == samples[i];
  }
  gate.report("criterion 8: persistence round trips", model_ok && csv_ok,
              "model forward max diff " + fmt(worst) + " (< 1e-15); dataset CSV " +
                  (csv_ok ? "bit-exact" : "NOT exact"));
}

// --- post-criteria example check -------------------------------------------

void example_constant_track_infer(Gate& gate, const PipelineResult& pipe,
                                  const std::string& cli, const fs::path& work) {
  const fs::path model_path = work / "scheme_b.model";
  save_model(pipe.net_b, model_path);
  const fs::path out = work / "infer_out.txt";
  const int rc = run(cli + " infer --model " + model_path.string() +
                     " --input 50,50,0,50,50,50 > " + out.string());
  double predicted = 0.0;
  bool ok = rc == 0;
  if (ok) {
    std::istringstream(slurp(out)) >> predicted;
    ok = std::abs(predicted - 50.0) <= 2.0;
  }
  gate.report("example: constant-track inference", ok,
              "predicted " + fmt(predicted) + " for 50,50,0,50,50,50 (within 2 wires)");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "segrestore_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--cli") cli = argv[i + 1];
    if (arg == "--work") work = argv[i + 1];
  }
  if (cli.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli <path-to-segrestore-binary>\n");
    return 2;
  }
  fs::remove_all(work);
  fs::create_directories(work);

  Gate gate;
  criterion_gradients(gate);
  criterion_determinism(gate, cli, work);

  std::fprintf(stderr, "running the paper-scale pipeline for criteria 3-6, 9...\n");
  const PipelineResult pipe = run_pipeline();
  criterion_scheme_ordering(gate, pipe);
  criterion_absolute_accuracy(gate, pipe);
  criterion_recovery(gate, pipe);
  criterion_per_index(gate, pipe);
  criterion_data_construction(gate);
  criterion_persistence(gate, work);
  criterion_training_sanity(gate, pipe);

  example_constant_track_infer(gate, pipe, cli, work);

  if (gate.failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) FAILED\n", gate.failures);
  }
  return gate.failures == 0 ? 0 : 1;
}
