#include "segrestore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace segrestore {

namespace {

struct BasicStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

// Sums run over a value-sorted copy so the result does not depend on the
// order residuals were accumulated in.
BasicStats stats_of(std::vector<double> values) {
  BasicStats s;
  s.n = static_cast<std::int64_t>(values.size());
  if (s.n == 0) {
    return s;
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) {
      const double d = v - s.mean;
      sq += d * d;
    }
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

}  // namespace

void ResidualHistogram::add(double residual) {
  if (residual < kLow) {
    ++underflow;
  } else if (residual >= kHigh) {
    ++overflow;
  } else {
    const int bin = static_cast<int>(std::floor((residual - kLow) / kBinWidth));
    ++counts[std::min(bin, kBins - 1)];
  }
}

std::int64_t ResidualHistogram::total() const {
  std::int64_t t = underflow + overflow;
  for (std::int64_t c : counts) {
    t += c;
  }
  return t;
}

double infer_missing(const DenseNetwork<double>& net, const TrackSample& sample,
                     int missing_index, NormSpec spec) {
  if (missing_index < 0 || missing_index >= kSuperlayers) {
    throw std::invalid_argument("infer_missing: missing_index must be in 0..5");
  }
  VectorX<double> input = normalize(sample, spec);
  input[missing_index] = kMissingSentinel;
  const VectorX<double> output = forward(net, input);
  // Sigmoid outputs sit in (0,1); identity layers may leave that range, and
  // the prediction maps to wire units either way.
  return output[missing_index] * static_cast<double>(spec.wires);
}

std::vector<Residual> collect_residuals(const DenseNetwork<double>& net,
                                        const std::vector<TrackSample>& test,
                                        EvalMode mode, std::uint64_t seed,
                                        NormSpec spec) {
  if (test.empty()) {
    throw std::invalid_argument("evaluate: empty test set");
  }
  std::vector<Residual> residuals;
  const auto add = [&](const TrackSample& sample, int index) {
    Residual r;
    r.missing_index = index;
    r.true_wire = sample[index];
    r.predicted_wire = infer_missing(net, sample, index, spec);
    r.residual = r.true_wire - r.predicted_wire;
    residuals.push_back(r);
  };
  if (mode == EvalMode::RandomIndex) {
    residuals.reserve(test.size());
    rng::Engine eng(seed);
    for (const TrackSample& sample : test) {
      add(sample, static_cast<int>(rng::uniform_index(eng, kSuperlayers)));
    }
  } else {
    residuals.reserve(test.size() * kSuperlayers);
    for (const TrackSample& sample : test) {
      for (int index = 0; index < kSuperlayers; ++index) {
        add(sample, index);
      }
    }
  }
  return residuals;
}

EvalReport summarize(const std::vector<Residual>& residuals, double threshold) {
  if (residuals.empty()) {
    throw std::invalid_argument("summarize: empty residual list");
  }
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("summarize: threshold must be >= 0");
  }

  EvalReport report;
  report.n = static_cast<std::int64_t>(residuals.size());
  report.threshold = threshold;

  std::vector<double> all;
  all.reserve(residuals.size());
  std::array<std::vector<double>, kSuperlayers> by_index;
  std::int64_t recovered = 0;
  for (const Residual& r : residuals) {
    if (r.missing_index < 0 || r.missing_index >= kSuperlayers) {
      throw std::invalid_argument("summarize: residual with missing_index out of 0..5");
    }
    if (!std::isfinite(r.residual)) {
      throw NumericalError("summarize: non-finite residual at index " +
                           std::to_string(all.size()));
    }
    all.push_back(r.residual);
    by_index[r.missing_index].push_back(r.residual);
    report.histogram.add(r.residual);
    if (std::abs(r.residual) <= threshold) {
      ++recovered;
    }
  }

  const BasicStats overall = stats_of(std::move(all));
  report.mean = overall.mean;
  report.stddev = overall.stddev;
  for (int k = 0; k < kSuperlayers; ++k) {
    const BasicStats s = stats_of(std::move(by_index[k]));
    report.per_index[k] = IndexStats{s.n, s.mean, s.stddev};
  }
  report.recovery_rate = static_cast<double>(recovered) / static_cast<double>(report.n);
  return report;
}

EvalReport evaluate(const DenseNetwork<double>& net,
                    const std::vector<TrackSample>& test, EvalMode mode,
                    std::uint64_t seed, NormSpec spec, double threshold) {
  EvalReport report =
      summarize(collect_residuals(net, test, mode, seed, spec), threshold);
  report.mode = mode;
  return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream os(dir / "report.txt", std::ios::binary);
    if (!os) {
      throw std::runtime_error("write_report: cannot open report.txt under " +
                               dir.string());
    }
    os << "n " << report.n << '\n';
    os << "mode " << (report.mode == EvalMode::RandomIndex ? "random" : "all") << '\n';
    os << "mean_residual_wires " << detail::format_g17(report.mean) << '\n';
    os << "std_residual_wires " << detail::format_g17(report.stddev) << '\n';
    os << "recovery_threshold_wires " << detail::format_g17(report.threshold) << '\n';
    os << "recovery_rate " << detail::format_g17(report.recovery_rate) << '\n';
    os << "recovery_note proxy: fraction of residuals with |true - predicted| <= "
          "threshold, not full-pipeline track recovery\n";
    os.flush();
    if (!os) {
      throw std::runtime_error("write_report: write failed for report.txt");
    }
  }

  {
    std::ofstream os(dir / "histogram.csv", std::ios::binary);
    if (!os) {
      throw std::runtime_error("write_report: cannot open histogram.csv under " +
                               dir.string());
    }
    os << "bin_low,bin_high,count\n";
    os << "-inf," << detail::format_g17(ResidualHistogram::kLow) << ','
       << report.histogram.underflow << '\n';
    for (int i = 0; i < ResidualHistogram::kBins; ++i) {
      os << detail::format_g17(ResidualHistogram::bin_low(i)) << ','
         << detail::format_g17(ResidualHistogram::bin_high(i)) << ','
         << report.histogram.counts[i] << '\n';
    }
    os << detail::format_g17(ResidualHistogram::kHigh) << ",inf,"
       << report.histogram.overflow << '\n';
    os.flush();
    if (!os) {
      throw std::runtime_error("write_report: write failed for histogram.csv");
    }
  }

  {
    std::ofstream os(dir / "per_index.csv", std::ios::binary);
    if (!os) {
      throw std::runtime_error("write_report: cannot open per_index.csv under " +
                               dir.string());
    }
    os << "index,n,mean,std\n";
    for (int k = 0; k < kSuperlayers; ++k) {
      const IndexStats& s = report.per_index[k];
      os << k << ',' << s.n << ',' << detail::format_g17(s.mean) << ','
         << detail::format_g17(s.stddev) << '\n';
    }
    os.flush();
    if (!os) {
      throw std::runtime_error("write_report: write failed for per_index.csv");
    }
  }
}

}  // namespace segrestore
