#include "segrestore/track.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace segrestore {

namespace {

constexpr std::string_view kCsvHeader = "x1,x2,x3,x4,x5,x6";
constexpr int kMaxTrajectoryAttempts = 1000;

std::string csv_error(const std::filesystem::path& path, std::size_t lineno,
                      const std::string& what) {
  return path.string() + " line " + std::to_string(lineno) + ": " + what;
}

}  // namespace

double mean_wire(const SegmentHits& hits) {
  if (hits.wires.empty()) {
    throw std::invalid_argument("mean_wire: empty hit list");
  }
  double sum = 0.0;
  for (int w : hits.wires) {
    sum += w;
  }
  return sum / static_cast<double>(hits.wires.size());
}

void validate(const GenConfig& cfg) {
  if (cfg.wires < 2) {
    throw std::invalid_argument("GenConfig: wires must be >= 2");
  }
  const auto check_range = [](const Range& r, const char* name) {
    if (!(r.lo <= r.hi)) {
      throw std::invalid_argument(std::string("GenConfig: ") + name +
                                  " range must satisfy lo <= hi");
    }
  };
  check_range(cfg.intercept, "intercept");
  check_range(cfg.slope, "slope");
  check_range(cfg.curvature, "curvature");
  if (!(cfg.hit_jitter_sigma >= 0.0)) {
    throw std::invalid_argument("GenConfig: hit_jitter_sigma must be >= 0");
  }
}

TrackSample gen_track(const GenConfig& cfg, rng::Engine& eng) {
  validate(cfg);
  const double wire_max = static_cast<double>(cfg.wires);

  std::array<double, kSuperlayers> centers{};
  bool in_range = false;
  for (int attempt = 0; attempt < kMaxTrajectoryAttempts && !in_range; ++attempt) {
    const double a = rng::uniform_in(eng, cfg.intercept.lo, cfg.intercept.hi);
    const double b = rng::uniform_in(eng, cfg.slope.lo, cfg.slope.hi);
    const double c = rng::uniform_in(eng, cfg.curvature.lo, cfg.curvature.hi);
    in_range = true;
    for (int k = 1; k <= kSuperlayers; ++k) {
      const double center = a + b * k + c * k * k;
      centers[k - 1] = center;
      in_range = in_range && center >= 1.0 && center <= wire_max;
    }
  }
  if (!in_range) {
    throw std::runtime_error(
        "gen_track: no trajectory stayed inside [1, wires] after " +
        std::to_string(kMaxTrajectoryAttempts) + " attempts; check GenConfig ranges");
  }

  TrackSample sample;
  for (int k = 0; k < kSuperlayers; ++k) {
    const long long base = std::llround(centers[k]);
    SegmentHits hits;
    hits.wires.reserve(kHitsPerSegment);
    for (int h = 0; h < kHitsPerSegment; ++h) {
      const long long jitter =
          std::llround(cfg.hit_jitter_sigma * rng::gaussian(eng));
      const long long wire = std::clamp<long long>(base + jitter, 1, cfg.wires);
      hits.wires.push_back(static_cast<int>(wire));
    }
    sample[k] = mean_wire(hits);
  }
  return sample;
}

std::vector<TrackSample> gen_dataset(std::size_t n, const GenConfig& cfg) {
  if (n < 1) {
    throw std::invalid_argument("gen_dataset: n must be >= 1");
  }
  validate(cfg);
  rng::Engine eng(cfg.seed);
  std::vector<TrackSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back(gen_track(cfg, eng));
  }
  return samples;
}

void save_csv(const std::vector<TrackSample>& samples,
              const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("save_csv: cannot open for writing: " + path.string());
  }
  os << kCsvHeader << '\n';
  for (const TrackSample& s : samples) {
    for (int k = 0; k < kSuperlayers; ++k) {
      if (k > 0) os << ',';
      os << detail::format_g17(s[k]);
    }
    os << '\n';
  }
  os.flush();
  if (!os) {
    throw std::runtime_error("save_csv: write failed: " + path.string());
  }
}

std::vector<TrackSample> load_csv(const std::filesystem::path& path, int wires) {
  if (wires < 2) {
    throw std::invalid_argument("load_csv: wires must be >= 2");
  }
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("load_csv: cannot open: " + path.string());
  }
  std::vector<TrackSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty()) continue;
    if (lineno == 1 && line == kCsvHeader) continue;

    const auto fields = detail::split(line, ',');
    if (fields.size() != kSuperlayers) {
      throw std::runtime_error(csv_error(path, lineno,
                                         "expected 6 fields, got " +
                                             std::to_string(fields.size())));
    }
    TrackSample s;
    for (int k = 0; k < kSuperlayers; ++k) {
      if (!detail::parse_double(fields[k], s[k])) {
        throw std::runtime_error(csv_error(
            path, lineno,
            "field " + std::to_string(k + 1) + " is not a number: '" +
                std::string(fields[k]) + "'"));
      }
    }
    for (int k = 0; k < kSuperlayers; ++k) {
      if (s[k] == 0.0) {
        throw std::runtime_error(csv_error(
            path, lineno,
            "element " + std::to_string(k + 1) +
                " is 0.0, which collides with the missing-segment sentinel"));
      }
      if (!(s[k] >= 1.0 && s[k] <= static_cast<double>(wires))) {
        throw std::runtime_error(csv_error(
            path, lineno,
            "element " + std::to_string(k + 1) + " out of range [1, " +
                std::to_string(wires) + "]: " + detail::format_g17(s[k])));
      }
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace segrestore
