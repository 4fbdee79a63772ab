#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "segrestore/dataset.hpp"
#include "segrestore/network.hpp"

namespace segrestore {

/// Node counts of the missing-segment autoencoder.
inline std::vector<int> autoencoder_dims() { return {6, 12, 6, 12, 6}; }

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.95;
  int max_epochs = 4000;
  double target_mse = 1e-5;
  std::uint64_t shuffle_seed = 0;
  int log_every = 100;  // epochs between log lines, when a log stream is given
};

struct TrainReport {
  int epochs_run = 0;
  std::vector<double> epoch_mse;  // one entry per epoch run
  double final_mse = 0.0;
  double wall_seconds = 0.0;
};

/// Online SGD with momentum: each epoch visits every pair once in a freshly
/// shuffled order, running backprop + update per pair. Stops at max_epochs or
/// when the epoch-mean MSE reaches cfg.target_mse. Pairs must already be in
/// network units; the pair list itself is never mutated. Deterministic given
/// identical pairs, config, and initial network.
TrainReport train(const std::vector<CorruptedPair>& pairs, const TrainConfig& cfg,
                  DenseNetwork<double>& net, std::ostream* log = nullptr);

/// Training-history CSV: `epoch,mean_mse`, one row per epoch.
void write_history_csv(const TrainReport& report, const std::filesystem::path& path);

}  // namespace segrestore
