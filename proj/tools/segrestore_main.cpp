#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "segrestore/dataset.hpp"
#include "segrestore/eval.hpp"
#include "segrestore/model_io.hpp"
#include "segrestore/network.hpp"
#include "segrestore/track.hpp"
#include "segrestore/train.hpp"
#include "text_util.hpp"

namespace sr = segrestore;

namespace {

// Salts for deriving independent random streams from one --seed flag.
enum : std::uint64_t {
  kSaltSplit = 1,
  kSaltCorrupt = 2,
  kSaltInit = 3,
  kSaltShuffle = 4,
};

struct GenArgs {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
  int wires = sr::kDefaultWires;
};

struct TrainArgs {
  std::string data;
  std::string scheme = "B";
  std::size_t train_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
  std::string out_model;
  double lr = sr::TrainConfig{}.learning_rate;
  double momentum = sr::TrainConfig{}.momentum;
  int epochs = sr::TrainConfig{}.max_epochs;
  int wires = sr::kDefaultWires;
};

struct EvalArgs {
  std::string model;
  std::string test;
  std::string mode = "random";
  std::uint64_t seed = 0;
  double threshold = 5.0;
  std::string out;
  int wires = sr::kDefaultWires;
};

struct InferArgs {
  std::string model;
  std::string input;
  int wires = sr::kDefaultWires;
};

void run_gen(const GenArgs& args) {
  sr::GenConfig cfg;
  cfg.wires = args.wires;
  cfg.seed = args.seed;
  const auto samples = sr::gen_dataset(args.n, cfg);
  sr::save_csv(samples, args.out);
  std::cout << "wrote " << samples.size() << " samples to " << args.out << '\n';
}

void run_train(const TrainArgs& args) {
  const sr::NormSpec spec{args.wires};
  const auto samples = sr::load_csv(args.data, args.wires);
  auto [train_set, test_set] =
      sr::split(samples, args.train_n, args.test_n,
                sr::rng::derive_seed(args.seed, kSaltSplit));

  const sr::Scheme scheme =
      args.scheme == "A" ? sr::Scheme::RandomZero : sr::Scheme::ExpandAll;
  const auto pairs = sr::make_training_pairs(
      train_set, scheme, sr::rng::derive_seed(args.seed, kSaltCorrupt), spec);

  auto net = sr::init_network(sr::autoencoder_dims(),
                              sr::rng::derive_seed(args.seed, kSaltInit));
  sr::TrainConfig cfg;
  cfg.learning_rate = args.lr;
  cfg.momentum = args.momentum;
  cfg.max_epochs = args.epochs;
  cfg.shuffle_seed = sr::rng::derive_seed(args.seed, kSaltShuffle);

  std::cerr << "training scheme " << args.scheme << " on " << pairs.size()
            << " pairs (" << train_set.size() << " clean samples)\n";
  const sr::TrainReport report = sr::train(pairs, cfg, net, &std::cerr);

  sr::save_model(net, args.out_model);
  sr::write_history_csv(report, args.out_model + ".history.csv");
  sr::save_csv(test_set, args.out_model + ".test.csv");

  std::cout << "model " << args.out_model << " (epochs " << report.epochs_run
            << ", final mean_mse " << sr::detail::format_g17(report.final_mse)
            << ", " << report.wall_seconds << " s)\n"
            << "history " << args.out_model << ".history.csv\n"
            << "test split " << args.out_model << ".test.csv (" << test_set.size()
            << " samples)\n";
}

void run_eval(const EvalArgs& args) {
  const auto net = sr::load_model(args.model);
  const auto test = sr::load_csv(args.test, args.wires);
  const sr::EvalMode mode =
      args.mode == "random" ? sr::EvalMode::RandomIndex : sr::EvalMode::AllIndices;
  const sr::EvalReport report = sr::evaluate(net, test, mode, args.seed,
                                             sr::NormSpec{args.wires}, args.threshold);
  sr::write_report(report, args.out);
  std::cout << "n " << report.n << '\n'
            << "mean_residual_wires " << sr::detail::format_g17(report.mean) << '\n'
            << "std_residual_wires " << sr::detail::format_g17(report.stddev) << '\n'
            << "recovery_rate " << sr::detail::format_g17(report.recovery_rate)
            << " (|residual| <= " << args.threshold << " wires)\n"
            << "report written to " << args.out << '\n';
}

void run_infer(const InferArgs& args) {
  const auto fields = sr::detail::split(args.input, ',');
  if (fields.size() != sr::kSuperlayers) {
    throw CLI::ValidationError("--input", "expected 6 comma-separated values");
  }
  sr::Vector6d v;
  for (int k = 0; k < sr::kSuperlayers; ++k) {
    if (!sr::detail::parse_double(fields[k], v[k])) {
      throw CLI::ValidationError("--input", "field " + std::to_string(k + 1) +
                                                " is not a number");
    }
  }
  int missing_index = -1;
  for (int k = 0; k < sr::kSuperlayers; ++k) {
    if (v[k] == 0.0) {
      if (missing_index >= 0) {
        throw CLI::ValidationError("--input", "exactly one field must be 0");
      }
      missing_index = k;
    } else if (!(v[k] >= 1.0 && v[k] <= args.wires)) {
      throw CLI::ValidationError("--input", "field " + std::to_string(k + 1) +
                                                " outside [1, " +
                                                std::to_string(args.wires) + "]");
    }
  }
  if (missing_index < 0) {
    throw CLI::ValidationError("--input", "exactly one field must be 0");
  }

  const auto net = sr::load_model(args.model);
  const double predicted =
      sr::infer_missing(net, v, missing_index, sr::NormSpec{args.wires});
  std::printf("%.4f\n", predicted);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift-chamber track tools: restore the missing super-layer "
               "segment of a 6-segment track candidate with a denoising "
               "autoencoder"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic track dataset CSV");
  gen->add_option("--n", gen_args.n, "number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_args.seed, "generator seed")->required();
  gen->add_option("--out", gen_args.out, "output CSV path")->required();
  gen->add_option("--wires", gen_args.wires, "wires per layer")
      ->default_val(sr::kDefaultWires)
      ->check(CLI::Range(2, 1 << 20));

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Split, corrupt, and train a model");
  train->add_option("--data", train_args.data, "clean dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--scheme", train_args.scheme,
                    "A = one random corruption per sample, B = all six per sample")
      ->required()
      ->check(CLI::IsMember({"A", "B"}));
  train->add_option("--train-n", train_args.train_n, "training split size")
      ->required()
      ->check(CLI::PositiveNumber);
  train->add_option("--test-n", train_args.test_n, "held-out test split size")
      ->required();
  train->add_option("--seed", train_args.seed, "seed for split/corruption/init/shuffle")
      ->required();
  train->add_option("--out-model", train_args.out_model, "model output path")
      ->required();
  train->add_option("--lr", train_args.lr, "learning rate")
      ->default_val(sr::TrainConfig{}.learning_rate);
  train->add_option("--momentum", train_args.momentum, "momentum in [0,1)")
      ->default_val(sr::TrainConfig{}.momentum);
  train->add_option("--epochs", train_args.epochs, "maximum epochs")
      ->default_val(sr::TrainConfig{}.max_epochs)
      ->check(CLI::PositiveNumber);
  train->add_option("--wires", train_args.wires, "wires per layer")
      ->default_val(sr::kDefaultWires);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a test CSV");
  eval->add_option("--model", eval_args.model, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--test", eval_args.test, "test dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--mode", eval_args.mode,
                   "random = one seeded corruption per sample, all = all six")
      ->required()
      ->check(CLI::IsMember({"random", "all"}));
  eval->add_option("--seed", eval_args.seed, "seed for random mode")->default_val(0);
  eval->add_option("--threshold", eval_args.threshold, "recovery window in wires")
      ->default_val(5.0)
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--out", eval_args.out, "report output directory")->required();
  eval->add_option("--wires", eval_args.wires, "wires per layer")
      ->default_val(sr::kDefaultWires);

  InferArgs infer_args;
  auto* infer =
      app.add_subcommand("infer", "Predict the missing segment of one track");
  infer->add_option("--model", infer_args.model, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  infer->add_option("--input", infer_args.input,
                    "x1,x2,x3,x4,x5,x6 with exactly one field set to 0")
      ->required();
  infer->add_option("--wires", infer_args.wires, "wires per layer")
      ->default_val(sr::kDefaultWires);

  gen->callback([&] { run_gen(gen_args); });
  train->callback([&] { run_train(train_args); });
  eval->callback([&] { run_eval(eval_args); });
  infer->callback([&] { run_infer(infer_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
