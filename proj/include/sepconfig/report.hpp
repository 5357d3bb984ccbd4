#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepconfig/harness.hpp"

namespace sepconfig {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

struct Report {
  std::string text;  // aligned "median (IQR)" table
  std::string csv;
};

/// Side-by-side table over evaluation artifacts that share one instance set
/// (SchemaMismatch otherwise). Each column shows "median (IQR)" plus solved
/// counts; when `gap_reference` is given, a gap-difference column per method
/// is appended for instances unsolved under both runs.
Report build_report(const std::vector<nlohmann::json>& eval_artifacts,
                    const std::vector<std::string>& labels,
                    const nlohmann::json* gap_reference = nullptr);

}  // namespace sepconfig
