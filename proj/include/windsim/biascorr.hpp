#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windsim/error.hpp"
#include "windsim/grid.hpp"
#include "windsim/series.hpp"
#include "windsim/stats.hpp"

namespace windsim {

/// Hourly 10 m wind speed measurements at a station.
struct StationSeries {
  std::string station_id;
  GridPoint location;
  HourlySeries speed;
};

/// Marks every maximal run of identical consecutive present values of at
/// least `min_run_hours` samples as missing. Missing samples break runs.
inline StationSeries clean_constant_runs(StationSeries s,
                                         std::size_t min_run_hours = 120) {
  auto &v = s.speed.values;
  std::size_t i = 0;
  while (i < v.size()) {
    if (!is_present(v[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < v.size() && is_present(v[j]) && v[j] == v[i])
      ++j;
    if (j - i >= min_run_hours)
      std::fill(v.begin() + std::ptrdiff_t(i), v.begin() + std::ptrdiff_t(j),
                kMissing);
    i = j;
  }
  return s;
}

struct YearMonth {
  int year = 0;
  int month = 0; // 1..12
  friend auto operator<=>(const YearMonth &, const YearMonth &) = default;
};

inline YearMonth year_month(Hour t) {
  const Day d = day_of(t);
  return {year_of(d), month_of(d)};
}

struct QualificationRules {
  int epoch_start_year = 1999;
  std::size_t complete_month_hours = 720; // 30 days
  std::size_t usable_month_hours = 240;   // 10 days
  std::size_t min_complete_years = 4;
};

struct StationQualification {
  bool qualified = false;
  std::set<YearMonth> usable_months;
  std::map<YearMonth, std::size_t> present_hours;
};

/// A station qualifies when every month except February has at least
/// `min_complete_years` years (since the epoch) with a complete month of
/// data. Months with enough present hours are usable.
inline StationQualification qualify_station(const StationSeries &s,
                                            const QualificationRules &rules = {}) {
  StationQualification q;
  for (std::size_t i = 0; i < s.speed.size(); ++i)
    if (is_present(s.speed.values[i]))
      ++q.present_hours[year_month(s.speed.time(i))];

  std::array<std::size_t, 13> complete_years{};
  for (const auto &[ym, n] : q.present_hours) {
    if (n >= rules.usable_month_hours)
      q.usable_months.insert(ym);
    if (ym.year >= rules.epoch_start_year && n >= rules.complete_month_hours)
      ++complete_years[std::size_t(ym.month)];
  }
  q.qualified = true;
  for (int m = 1; m <= 12; ++m)
    if (m != 2 && complete_years[std::size_t(m)] < rules.min_complete_years)
      q.qualified = false;
  return q;
}

/// Copy of the series with every sample outside `usable` set missing.
inline StationSeries mask_unusable_months(StationSeries s,
                                          const std::set<YearMonth> &usable) {
  for (std::size_t i = 0; i < s.speed.size(); ++i)
    if (!usable.contains(year_month(s.speed.time(i))))
      s.speed.values[i] = kMissing;
  return s;
}

struct StationSite {
  std::string station_id;
  GridPoint location;
};

struct StationMatch {
  std::string station_id;
  double distance_km = 0.0;
};

/// Nearest station within `max_km` (inclusive); ties go to the smaller id.
inline std::optional<StationMatch>
match_station(const GridPoint &site, std::span<const StationSite> stations,
              double max_km = 40.0) {
  std::optional<StationMatch> best;
  for (const auto &s : stations) {
    const double d = haversine_km(site, s.location);
    if (d > max_km)
      continue;
    if (!best || d < best->distance_km ||
        (d == best->distance_km && s.station_id < best->station_id))
      best = StationMatch{s.station_id, d};
  }
  return best;
}

/// Visits (time, reference, model) for every hour both series have present.
template <class Fn>
void for_each_paired_hour(const HourlySeries &ref, const HourlySeries &model,
                          Fn &&fn) {
  const Hour lo = std::max(ref.start, model.start);
  const Hour hi = std::min(ref.end(), model.end());
  for (Hour t = lo; t < hi; t += std::chrono::hours{1}) {
    const double r = ref.values[std::size_t((t - ref.start).count())];
    const double m = model.values[std::size_t((t - model.start).count())];
    if (is_present(r) && is_present(m))
      fn(t, r, m);
  }
}

struct PairedMeans {
  double reference = 0.0;
  double model = 0.0;
  std::size_t n = 0;
};

/// Means over the hours both series have present.
inline PairedMeans paired_means(const HourlySeries &ref,
                                const HourlySeries &model) {
  PairedMeans p;
  for_each_paired_hour(ref, model, [&](Hour, double r, double m) {
    p.reference += r;
    p.model += m;
    ++p.n;
  });
  if (p.n == 0)
    throw DegenerateInputError("no paired hours between reference and model");
  p.reference /= double(p.n);
  p.model /= double(p.n);
  return p;
}

/// Ratio of reference to model mean wind speed.
inline double mean_factor(double ref_mean, double model_mean) {
  if (!(model_mean > 0.0))
    throw DegenerateInputError("model mean wind speed is zero");
  if (!(ref_mean >= 0.0))
    throw DegenerateInputError("reference mean wind speed is negative");
  return ref_mean / model_mean;
}

enum class CorrectionMethod { none, mean_gwa, mean_station, hm_station };

inline std::string_view to_string(CorrectionMethod m) {
  switch (m) {
  case CorrectionMethod::none:
    return "none";
  case CorrectionMethod::mean_gwa:
    return "mean_gwa";
  case CorrectionMethod::mean_station:
    return "mean_station";
  case CorrectionMethod::hm_station:
    return "hm_station";
  }
  return "?";
}

inline std::optional<CorrectionMethod> parse_correction_method(std::string_view s) {
  for (auto m : {CorrectionMethod::none, CorrectionMethod::mean_gwa,
                 CorrectionMethod::mean_station, CorrectionMethod::hm_station})
    if (to_string(m) == s)
      return m;
  return std::nullopt;
}

struct CorrectedSeries {
  HourlySeries speed;
  CorrectionMethod method = CorrectionMethod::none;
};

inline CorrectedSeries apply_mean_correction(HourlySeries hub, double factor,
                                             CorrectionMethod tag) {
  if (!(factor > 0.0))
    throw DegenerateInputError("mean correction factor must be positive");
  for (double &v : hub.values)
    v *= factor;
  return {std::move(hub), tag};
}

/// One multiplicative factor per (hour of day, month) bin.
struct HmFactors {
  std::array<std::array<double, 12>, 24> factor;
  std::array<std::array<bool, 12>, 24> covered{};
  int utc_offset_hours = 0;

  HmFactors() {
    for (auto &row : factor)
      row.fill(1.0);
  }

  struct Bin {
    int hour; // 0..23
    int month; // 1..12
  };

  Bin bin_of(Hour t) const {
    const Hour local = t + std::chrono::hours{utc_offset_hours};
    return {hour_of_day(local), month_of(day_of(local))};
  }

  double at(Hour t) const {
    const auto b = bin_of(t);
    return factor[std::size_t(b.hour)][std::size_t(b.month - 1)];
  }
};

/// factor(h, m) = sum of reference / sum of model over paired present hours of
/// the bin. Bins without data, or with a zero sum on either side, keep factor
/// 1 and are flagged uncovered.
inline HmFactors hm_factors(const HourlySeries &ref, const HourlySeries &model_10m,
                            int utc_offset_hours = 0) {
  HmFactors f;
  f.utc_offset_hours = utc_offset_hours;
  std::array<std::array<double, 12>, 24> sr{}, sm{};
  for_each_paired_hour(ref, model_10m, [&](Hour t, double r, double m) {
    const auto b = f.bin_of(t);
    sr[std::size_t(b.hour)][std::size_t(b.month - 1)] += r;
    sm[std::size_t(b.hour)][std::size_t(b.month - 1)] += m;
  });
  for (std::size_t h = 0; h < 24; ++h) {
    for (std::size_t m = 0; m < 12; ++m) {
      if (sm[h][m] > 0.0 && sr[h][m] > 0.0) {
        f.factor[h][m] = sr[h][m] / sm[h][m];
        f.covered[h][m] = true;
      }
    }
  }
  return f;
}

inline CorrectedSeries apply_hm_correction(HourlySeries hub, const HmFactors &f) {
  for (std::size_t i = 0; i < hub.size(); ++i)
    hub.values[i] *= f.at(hub.time(i));
  return {std::move(hub), CorrectionMethod::hm_station};
}

struct GateDecision {
  CorrectionMethod method = CorrectionMethod::mean_station;
  std::optional<double> correlation;
  std::size_t n_pairs = 0;
};

/// Keeps hourly-monthly correction when the corrected 10 m model series
/// correlates with the measurements at least `min_correlation`; otherwise
/// falls back to mean correction. Too few pairs or an undefined correlation
/// also fall back.
inline GateDecision correction_gate(const HourlySeries &ref,
                                    const HourlySeries &corrected_10m,
                                    double min_correlation = 0.5) {
  std::vector<double> r, m;
  for_each_paired_hour(ref, corrected_10m, [&](Hour, double a, double b) {
    r.push_back(a);
    m.push_back(b);
  });
  GateDecision g;
  g.n_pairs = r.size();
  g.correlation = pearson(r, m);
  if (g.correlation && *g.correlation >= min_correlation)
    g.method = CorrectionMethod::hm_station;
  return g;
}

} // namespace windsim
