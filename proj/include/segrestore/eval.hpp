#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "segrestore/dataset.hpp"
#include "segrestore/network.hpp"
#include "segrestore/track.hpp"

namespace segrestore {

/// One inference outcome; residual = true_wire - predicted_wire, wire units.
struct Residual {
  int missing_index = 0;
  double true_wire = 0.0;
  double predicted_wire = 0.0;
  double residual = 0.0;
};

/// Fixed-layout residual histogram: [-10, +10] wires in 0.25-wire bins, with
/// underflow/overflow counters. Bins are half-open [low, high).
struct ResidualHistogram {
  static constexpr double kLow = -10.0;
  static constexpr double kHigh = 10.0;
  static constexpr double kBinWidth = 0.25;
  static constexpr int kBins = 80;

  std::array<std::int64_t, kBins> counts{};
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;

  void add(double residual);
  std::int64_t total() const;
  static double bin_low(int i) { return kLow + i * kBinWidth; }
  static double bin_high(int i) { return kLow + (i + 1) * kBinWidth; }
};

struct IndexStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// RandomIndex corrupts each test sample once at a seeded-random index;
/// AllIndices evaluates all six corruptions per sample.
enum class EvalMode { RandomIndex, AllIndices };

struct EvalReport {
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, n-1 denominator
  std::array<IndexStats, kSuperlayers> per_index{};
  ResidualHistogram histogram;
  double threshold = 5.0;      // recovery window, wires
  double recovery_rate = 0.0;  // fraction with |residual| <= threshold (proxy)
  EvalMode mode = EvalMode::RandomIndex;
};

/// Normalizes the sample, zeroes the missing element, runs the network, and
/// returns the denormalized output at missing_index. The other outputs are
/// ignored.
double infer_missing(const DenseNetwork<double>& net, const TrackSample& sample,
                     int missing_index, NormSpec spec);

/// Residuals in wire units, accumulated in input order. seed drives the
/// index choice in RandomIndex mode and is ignored for AllIndices.
std::vector<Residual> collect_residuals(const DenseNetwork<double>& net,
                                        const std::vector<TrackSample>& test,
                                        EvalMode mode, std::uint64_t seed,
                                        NormSpec spec);

/// Assembles the report statistics. Sums run over value-sorted copies, so the
/// result is independent of the residuals' ordering.
EvalReport summarize(const std::vector<Residual>& residuals, double threshold);

EvalReport evaluate(const DenseNetwork<double>& net,
                    const std::vector<TrackSample>& test, EvalMode mode,
                    std::uint64_t seed, NormSpec spec, double threshold);

/// Writes report.txt (key/value block), histogram.csv (bin_low,bin_high,count)
/// and per_index.csv (index,n,mean,std) into dir, creating it if needed.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace segrestore
