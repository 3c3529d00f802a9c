#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include "windsim/error.hpp"

namespace windsim {

inline double mean(std::span<const double> x) {
  if (x.empty())
    throw DegenerateInputError("mean of empty sample");
  double s = 0.0;
  for (double v : x)
    s += v;
  return s / double(x.size());
}

/// Sample Pearson correlation. Empty when fewer than two samples or either
/// side has zero variance; an undefined correlation is never reported as 0.
inline std::optional<double> pearson(std::span<const double> x,
                                     std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2)
    return std::nullopt;
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  // rounding can push |r| a hair past 1
  return std::fmax(-1.0, std::fmin(1.0, r));
}

} // namespace windsim
