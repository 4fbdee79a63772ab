#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "segrestore/rng.hpp"

namespace segrestore {

inline constexpr int kSuperlayers = 6;
inline constexpr int kHitsPerSegment = 6;  // one hit per wire layer inside a super-layer
inline constexpr int kDefaultWires = 112;

using Vector6d = Eigen::Matrix<double, kSuperlayers, 1>;

/// Mean wire position of the track segment in each super-layer, in wire
/// units. Valid samples have every element in [1, W]; 0.0 is reserved as the
/// missing-segment sentinel.
using TrackSample = Vector6d;

/// Wire numbers of the hits forming one segment.
struct SegmentHits {
  std::vector<int> wires;
};

/// Arithmetic mean of the hit wire positions. Rejects an empty hit list.
double mean_wire(const SegmentHits& hits);

/// Closed interval of real values; a point interval [x, x] forces the value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parameters of the synthetic trajectory generator. Segment centers follow
/// a + b*k + c*k^2 over super-layer index k = 1..6.
struct GenConfig {
  int wires = kDefaultWires;  // W, wires per layer
  Range intercept{5.0, 100.0};
  Range slope{-4.0, 4.0};
  Range curvature{-0.4, 0.4};
  double hit_jitter_sigma = 0.5;  // wire units
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument if the configuration is unusable.
void validate(const GenConfig& cfg);

/// Draws one trajectory, synthesizes kHitsPerSegment jittered integer hits
/// per super-layer, and returns the per-super-layer mean wire positions.
/// Trajectories whose centers leave [1, W] are redrawn; fails after 1000
/// attempts.
TrackSample gen_track(const GenConfig& cfg, rng::Engine& eng);

/// n tracks from a generator seeded with cfg.seed; deterministic per seed.
std::vector<TrackSample> gen_dataset(std::size_t n, const GenConfig& cfg);

/// Dataset CSV: optional `x1,x2,x3,x4,x5,x6` header, then one sample per
/// line as 6 comma-separated decimal fields (17 significant digits), LF
/// line endings.
void save_csv(const std::vector<TrackSample>& samples, const std::filesystem::path& path);

/// Loads a dataset CSV, validating every element against [1, wires].
/// Malformed rows are reported with their line number.
std::vector<TrackSample> load_csv(const std::filesystem::path& path,
                                  int wires = kDefaultWires);

}  // namespace segrestore
