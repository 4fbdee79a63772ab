#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "segrestore/rng.hpp"
#include "segrestore/track.hpp"

namespace segrestore {

inline constexpr double kMissingSentinel = 0.0;

/// Training pair: input has exactly one element replaced by the 0.0 sentinel,
/// target is the clean vector, missing_index records which element was zeroed.
struct CorruptedPair {
  Vector6d input;
  Vector6d target;
  int missing_index = 0;  // 0..5
};

/// Wire-count context for mapping between wire units and network units.
struct NormSpec {
  int wires = kDefaultWires;
};

/// Zeroes the element at missing_index; the clean sample becomes the target.
CorruptedPair corrupt_at(const TrackSample& sample, int missing_index);

/// One pair per sample, missing index drawn uniformly from {0..5}.
CorruptedPair corrupt_random(const TrackSample& sample, rng::Engine& eng);

/// Six pairs per sample, missing index 0..5 in order, all sharing the target.
std::array<CorruptedPair, kSuperlayers> corrupt_expand(const TrackSample& sample);

/// Wire units -> network units: element / W. The 0.0 sentinel maps to 0.0.
/// Elements outside [0, W] are rejected.
Vector6d normalize(const Vector6d& wire_units, NormSpec spec);

/// Network units -> wire units: element * W. Elements outside [0, 1] rejected.
Vector6d denormalize(const Vector6d& network_units, NormSpec spec);
double denormalize_value(double network_units, NormSpec spec);

/// The two training-set constructions. CLI tokens: A = RandomZero (one
/// randomly corrupted pair per sample), B = ExpandAll (all six corruptions
/// per sample).
enum class Scheme { RandomZero, ExpandAll };

/// Corrupts every clean sample per the scheme and normalizes both sides,
/// producing pairs ready for training. corrupt_seed only matters for
/// Scheme::RandomZero.
std::vector<CorruptedPair> make_training_pairs(const std::vector<TrackSample>& samples,
                                               Scheme scheme, std::uint64_t corrupt_seed,
                                               NormSpec spec);

/// Disjoint train/test subsets taken from a seeded Fisher-Yates shuffle.
/// Rejects train_n + test_n > samples.size().
std::pair<std::vector<TrackSample>, std::vector<TrackSample>> split(
    const std::vector<TrackSample>& samples, std::size_t train_n, std::size_t test_n,
    std::uint64_t seed);

/// Debug/inspection CSV of 13 fields per row: 6 input, 6 target, missing_index.
void save_pairs_csv(const std::vector<CorruptedPair>& pairs,
                    const std::filesystem::path& path);
std::vector<CorruptedPair> load_pairs_csv(const std::filesystem::path& path);

}  // namespace segrestore
