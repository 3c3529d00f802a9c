#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "windsim/time.hpp"

namespace windsim {

/// Marker for an absent sample.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_present(double v) { return !std::isnan(v); }

/// Contiguous hourly samples starting at `start`. Absent samples are NaN.
struct HourlySeries {
  Hour start{};
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  Hour time(std::size_t i) const { return start + std::chrono::hours{i}; }
  /// One past the last hour.
  Hour end() const { return time(values.size()); }

  std::optional<std::size_t> index_of(Hour t) const {
    if (t < start || t >= end())
      return std::nullopt;
    return std::size_t((t - start).count());
  }
};

struct MegawattUnit {};
struct GigawattHourUnit {};

/// Daily values with strictly increasing dates. `Unit` only tags the meaning
/// of `values` so capacity and energy series cannot be swapped by accident.
template <class Unit> struct DailySeries {
  std::string label;
  std::vector<Day> dates;
  std::vector<double> values;

  std::size_t size() const { return dates.size(); }
  bool empty() const { return dates.empty(); }
};

/// Installed capacity in MW per day.
using CapacitySeries = DailySeries<MegawattUnit>;
/// Energy in GWh per day.
using GenerationSeries = DailySeries<GigawattHourUnit>;

/// Values of two daily series on the dates both carry.
struct PairedDays {
  std::vector<Day> dates;
  std::vector<double> a;
  std::vector<double> b;
};

template <class UA, class UB>
PairedDays pair_by_date(const DailySeries<UA> &a, const DailySeries<UB> &b) {
  PairedDays out;
  std::size_t i = 0, j = 0;
  while (i < a.dates.size() && j < b.dates.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++j;
    } else {
      out.dates.push_back(a.dates[i]);
      out.a.push_back(a.values[i]);
      out.b.push_back(b.values[j]);
      ++i;
      ++j;
    }
  }
  return out;
}

} // namespace windsim
