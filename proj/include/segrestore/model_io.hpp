#pragma once

#include <filesystem>
#include <string_view>

#include "segrestore/network.hpp"

namespace segrestore {

inline constexpr std::string_view kModelMagic = "segrestore-model v1";

/// Text model format:
///   line 1: `segrestore-model v1`
///   line 2: space-separated node counts, e.g. `6 12 6 12 6`
///   line 3: space-separated activation tags, one per layer
///   then per layer, one line per output node: in_dim weights then the bias,
///   decimal text with 17 significant digits.
/// The file is written to a temp path and renamed, so it appears atomically.
void save_model(const DenseNetwork<double>& net, const std::filesystem::path& path);

/// Parses and validates a model file; version mismatches, dimension
/// inconsistencies, and parse failures are reported with line numbers.
DenseNetwork<double> load_model(const std::filesystem::path& path);

}  // namespace segrestore
