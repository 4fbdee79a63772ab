#include "segrestore/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace segrestore {

namespace {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
  }
  if (cfg.max_epochs < 1) {
    throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  }
  if (!(cfg.target_mse >= 0.0)) {
    throw std::invalid_argument("TrainConfig: target_mse must be >= 0");
  }
  if (cfg.log_every < 1) {
    throw std::invalid_argument("TrainConfig: log_every must be >= 1");
  }
}

}  // namespace

TrainReport train(const std::vector<CorruptedPair>& pairs, const TrainConfig& cfg,
                  DenseNetwork<double>& net, std::ostream* log) {
  validate(cfg);
  if (pairs.empty()) {
    throw std::invalid_argument("train: empty pair list");
  }
  validate_shapes(net);
  if (net.input_dim() != kSuperlayers || net.output_dim() != kSuperlayers) {
    throw std::invalid_argument("train: network must map 6 inputs to 6 outputs");
  }

  const auto start = std::chrono::steady_clock::now();

  GradientSet<double> grads = zeros_like(net);
  GradientSet<double> velocity = zeros_like(net);
  BackpropWorkspace<double> ws;

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Engine shuffle_eng(cfg.shuffle_seed);

  TrainReport report;
  report.epoch_mse.reserve(static_cast<std::size_t>(cfg.max_epochs));
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng::shuffle(order, shuffle_eng);
    double total_loss = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const CorruptedPair& pair = pairs[order[i]];
      double loss = 0.0;
      try {
        loss = backprop<double>(net, pair.input, pair.target, grads, ws);
      } catch (const NumericalError& e) {
        throw NumericalError("train: epoch " + std::to_string(epoch) + ", pair " +
                             std::to_string(order[i]) + ": " + e.what());
      }
      apply_update(net, grads, velocity, cfg.learning_rate, cfg.momentum);
      total_loss += loss;
    }
    const double mean_mse = total_loss / static_cast<double>(pairs.size());
    report.epoch_mse.push_back(mean_mse);
    if (log && (epoch % cfg.log_every == 0 || epoch == cfg.max_epochs)) {
      *log << "epoch " << epoch << "/" << cfg.max_epochs << " mean_mse " << mean_mse
           << '\n';
    }
    if (mean_mse <= cfg.target_mse) {
      break;
    }
  }

  report.epochs_run = static_cast<int>(report.epoch_mse.size());
  report.final_mse = report.epoch_mse.back();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_history_csv(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("write_history_csv: cannot open for writing: " +
                             path.string());
  }
  os << "epoch,mean_mse\n";
  for (std::size_t i = 0; i < report.epoch_mse.size(); ++i) {
    os << (i + 1) << ',' << detail::format_g17(report.epoch_mse[i]) << '\n';
  }
  os.flush();
  if (!os) {
    throw std::runtime_error("write_history_csv: write failed: " + path.string());
  }
}

}  // namespace segrestore
