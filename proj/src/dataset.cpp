#include "segrestore/dataset.hpp"

#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace segrestore {

namespace {

constexpr std::string_view kPairsCsvHeader =
    "in1,in2,in3,in4,in5,in6,target1,target2,target3,target4,target5,target6,"
    "missing_index";

void check_sample(const TrackSample& sample) {
  for (int k = 0; k < kSuperlayers; ++k) {
    if (!(sample[k] >= 1.0)) {
      throw std::invalid_argument(
          "corrupt: sample element " + std::to_string(k + 1) +
          " is not a valid wire position: " + detail::format_g17(sample[k]));
    }
  }
}

}  // namespace

CorruptedPair corrupt_at(const TrackSample& sample, int missing_index) {
  if (missing_index < 0 || missing_index >= kSuperlayers) {
    throw std::invalid_argument("corrupt_at: missing_index must be in 0..5");
  }
  check_sample(sample);
  CorruptedPair pair;
  pair.target = sample;
  pair.input = sample;
  pair.input[missing_index] = kMissingSentinel;
  pair.missing_index = missing_index;
  return pair;
}

CorruptedPair corrupt_random(const TrackSample& sample, rng::Engine& eng) {
  const int index = static_cast<int>(rng::uniform_index(eng, kSuperlayers));
  return corrupt_at(sample, index);
}

std::array<CorruptedPair, kSuperlayers> corrupt_expand(const TrackSample& sample) {
  std::array<CorruptedPair, kSuperlayers> pairs;
  for (int k = 0; k < kSuperlayers; ++k) {
    pairs[k] = corrupt_at(sample, k);
  }
  return pairs;
}

Vector6d normalize(const Vector6d& wire_units, NormSpec spec) {
  const double wire_max = static_cast<double>(spec.wires);
  for (int k = 0; k < kSuperlayers; ++k) {
    if (!(wire_units[k] >= 0.0 && wire_units[k] <= wire_max)) {
      throw std::invalid_argument("normalize: element " + std::to_string(k + 1) +
                                  " outside [0, " + std::to_string(spec.wires) +
                                  "]: " + detail::format_g17(wire_units[k]));
    }
  }
  return wire_units / wire_max;
}

Vector6d denormalize(const Vector6d& network_units, NormSpec spec) {
  for (int k = 0; k < kSuperlayers; ++k) {
    if (!(network_units[k] >= 0.0 && network_units[k] <= 1.0)) {
      throw std::invalid_argument("denormalize: element " + std::to_string(k + 1) +
                                  " outside [0, 1]: " +
                                  detail::format_g17(network_units[k]));
    }
  }
  return network_units * static_cast<double>(spec.wires);
}

double denormalize_value(double network_units, NormSpec spec) {
  if (!(network_units >= 0.0 && network_units <= 1.0)) {
    throw std::invalid_argument("denormalize_value: outside [0, 1]: " +
                                detail::format_g17(network_units));
  }
  return network_units * static_cast<double>(spec.wires);
}

std::vector<CorruptedPair> make_training_pairs(const std::vector<TrackSample>& samples,
                                               Scheme scheme, std::uint64_t corrupt_seed,
                                               NormSpec spec) {
  std::vector<CorruptedPair> pairs;
  const auto push_normalized = [&](const CorruptedPair& p) {
    CorruptedPair q;
    q.input = normalize(p.input, spec);
    q.target = normalize(p.target, spec);
    q.missing_index = p.missing_index;
    pairs.push_back(q);
  };
  if (scheme == Scheme::RandomZero) {
    pairs.reserve(samples.size());
    rng::Engine eng(corrupt_seed);
    for (const TrackSample& s : samples) {
      push_normalized(corrupt_random(s, eng));
    }
  } else {
    pairs.reserve(samples.size() * kSuperlayers);
    for (const TrackSample& s : samples) {
      for (const CorruptedPair& p : corrupt_expand(s)) {
        push_normalized(p);
      }
    }
  }
  return pairs;
}

std::pair<std::vector<TrackSample>, std::vector<TrackSample>> split(
    const std::vector<TrackSample>& samples, std::size_t train_n, std::size_t test_n,
    std::uint64_t seed) {
  if (train_n + test_n > samples.size()) {
    throw std::invalid_argument(
        "split: train_n + test_n = " + std::to_string(train_n + test_n) +
        " exceeds sample count " + std::to_string(samples.size()));
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Engine eng(seed);
  rng::shuffle(order, eng);

  std::vector<TrackSample> train, test;
  train.reserve(train_n);
  test.reserve(test_n);
  for (std::size_t i = 0; i < train_n; ++i) {
    train.push_back(samples[order[i]]);
  }
  for (std::size_t i = 0; i < test_n; ++i) {
    test.push_back(samples[order[train_n + i]]);
  }
  return {std::move(train), std::move(test)};
}

void save_pairs_csv(const std::vector<CorruptedPair>& pairs,
                    const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("save_pairs_csv: cannot open for writing: " +
                             path.string());
  }
  os << kPairsCsvHeader << '\n';
  for (const CorruptedPair& p : pairs) {
    for (int k = 0; k < kSuperlayers; ++k) {
      if (k > 0) os << ',';
      os << detail::format_g17(p.input[k]);
    }
    for (int k = 0; k < kSuperlayers; ++k) {
      os << ',' << detail::format_g17(p.target[k]);
    }
    os << ',' << p.missing_index << '\n';
  }
  os.flush();
  if (!os) {
    throw std::runtime_error("save_pairs_csv: write failed: " + path.string());
  }
}

std::vector<CorruptedPair> load_pairs_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("load_pairs_csv: cannot open: " + path.string());
  }
  std::vector<CorruptedPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& what) {
    throw std::runtime_error(path.string() + " line " + std::to_string(lineno) +
                             ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty()) continue;
    if (lineno == 1 && line == kPairsCsvHeader) continue;

    const auto fields = detail::split(line, ',');
    if (fields.size() != 2 * kSuperlayers + 1) {
      fail("expected 13 fields, got " + std::to_string(fields.size()));
    }
    CorruptedPair p;
    for (int k = 0; k < kSuperlayers; ++k) {
      if (!detail::parse_double(fields[k], p.input[k])) {
        fail("field " + std::to_string(k + 1) + " is not a number");
      }
    }
    for (int k = 0; k < kSuperlayers; ++k) {
      if (!detail::parse_double(fields[kSuperlayers + k], p.target[k])) {
        fail("field " + std::to_string(kSuperlayers + k + 1) + " is not a number");
      }
    }
    if (!detail::parse_int(fields[2 * kSuperlayers], p.missing_index) ||
        p.missing_index < 0 || p.missing_index >= kSuperlayers) {
      fail("missing_index must be an integer in 0..5");
    }
    if (p.input[p.missing_index] != kMissingSentinel) {
      fail("input element at missing_index is not the 0.0 sentinel");
    }
    for (int k = 0; k < kSuperlayers; ++k) {
      if (k != p.missing_index && p.input[k] != p.target[k]) {
        fail("input and target differ at a non-missing position");
      }
    }
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace segrestore
