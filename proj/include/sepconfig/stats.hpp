#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "sepconfig/errors.hpp"

namespace sepconfig::stats {

/// Quantile with linear interpolation between order statistics (the common
/// "type 7" rule): h = (n-1)p, q = x[h] + frac(h) * (x[h+1] - x[h]).
inline double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyList("quantile of an empty list");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double median(std::vector<double> values) {
  return quantile_type7(std::move(values), 0.5);
}

inline double iqr(std::vector<double> values) {
  std::vector<double> copy = values;
  return quantile_type7(std::move(values), 0.75) - quantile_type7(std::move(copy), 0.25);
}

}  // namespace sepconfig::stats
