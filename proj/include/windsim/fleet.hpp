#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "windsim/error.hpp"
#include "windsim/grid.hpp"
#include "windsim/series.hpp"
#include "windsim/turbine.hpp"

namespace windsim {

class EmptyRegionError : public Error {
public:
  using Error::Error;
};

enum class Subsystem { north_east, south, north };

inline std::string_view to_string(Subsystem s) {
  switch (s) {
  case Subsystem::north_east:
    return "NorthEast";
  case Subsystem::south:
    return "South";
  case Subsystem::north:
    return "North";
  }
  return "?";
}

inline std::optional<Subsystem> parse_subsystem(std::string_view s) {
  if (s == "NorthEast")
    return Subsystem::north_east;
  if (s == "South")
    return Subsystem::south;
  if (s == "North")
    return Subsystem::north;
  return std::nullopt;
}

struct WindPark {
  std::string park_id;
  std::string name;
  GridPoint location;
  std::string state;
  Subsystem subsystem = Subsystem::north_east;
  double installed_capacity_mw = 0.0;
  std::size_t n_turbines = 1;
  TurbineSpec turbine;
  Day commissioning_date{};
};

/// Throws on hard invariant violations. Returns a warning when the stated
/// capacity differs from n_turbines x turbine capacity by more than 20 %.
inline std::optional<std::string> check_park(const WindPark &p) {
  if (!(p.installed_capacity_mw > 0.0))
    throw Error("park " + p.park_id + ": installed capacity must be positive");
  if (p.n_turbines < 1)
    throw Error("park " + p.park_id + ": needs at least one turbine");
  if (p.turbine.capacity_kw > 0.0) {
    const double implied = double(p.n_turbines) * p.turbine.capacity_kw / 1000.0;
    if (std::abs(p.installed_capacity_mw - implied) > 0.2 * p.installed_capacity_mw)
      return "park " + p.park_id + ": installed capacity " +
             std::to_string(p.installed_capacity_mw) + " MW differs from " +
             std::to_string(implied) + " MW implied by its turbines";
  }
  return std::nullopt;
}

enum class Grouping { park, state, subsystem, country };

inline std::string_view to_string(Grouping g) {
  switch (g) {
  case Grouping::park:
    return "park";
  case Grouping::state:
    return "state";
  case Grouping::subsystem:
    return "subsystem";
  case Grouping::country:
    return "country";
  }
  return "?";
}

inline Grouping parse_grouping(std::string_view s) {
  for (auto g : {Grouping::park, Grouping::state, Grouping::subsystem,
                 Grouping::country})
    if (to_string(g) == s)
      return g;
  throw Error("unknown grouping: " + std::string(s));
}

inline constexpr std::string_view kDefaultCountryLabel = "Brazil";

/// Label a park reports under at a grouping level. The North subsystem is
/// only part of the country total, so it has no subsystem label.
inline std::optional<std::string>
region_label(const WindPark &p, Grouping g,
             std::string_view country = kDefaultCountryLabel) {
  switch (g) {
  case Grouping::park:
    return p.park_id;
  case Grouping::state:
    return p.state;
  case Grouping::subsystem:
    if (p.subsystem == Subsystem::north)
      return std::nullopt;
    return std::string(to_string(p.subsystem));
  case Grouping::country:
    return std::string(country);
  }
  return std::nullopt;
}

using ParkFilter = std::function<bool(const WindPark &)>;

inline ParkFilter region_filter(Grouping g, std::string label,
                                std::string country = std::string(kDefaultCountryLabel)) {
  return [g, label = std::move(label), country = std::move(country)](const WindPark &p) {
    if (g == Grouping::subsystem)
      return to_string(p.subsystem) == label;
    const auto l = region_label(p, g, country);
    return l && *l == label;
  };
}

/// Daily installed capacity of the parks passing `filter`, counting a park
/// from its commissioning day on.
inline CapacitySeries capacity_timeseries(std::span<const WindPark> parks,
                                          const ParkFilter &filter, Day first,
                                          Day last, std::string label = {}) {
  if (last < first)
    throw Error("capacity series: empty date range");
  std::vector<std::tuple<Day, std::string_view, double>> events;
  for (const auto &p : parks)
    if (!filter || filter(p))
      events.emplace_back(p.commissioning_date, p.park_id, p.installed_capacity_mw);
  if (events.empty())
    throw EmptyRegionError("no parks in region " + label);
  std::sort(events.begin(), events.end());

  CapacitySeries out;
  out.label = std::move(label);
  double running = 0.0;
  std::size_t k = 0;
  for (Day d = first; d <= last; d += std::chrono::days{1}) {
    while (k < events.size() && std::get<0>(events[k]) <= d)
      running += std::get<2>(events[k++]);
    out.dates.push_back(d);
    out.values.push_back(running);
  }
  return out;
}

/// mean(reference) / mean(model) over the days both series carry.
template <class U>
double capacity_correction_factor(const DailySeries<U> &reference,
                                  const DailySeries<U> &model) {
  const auto p = pair_by_date(reference, model);
  if (p.dates.empty())
    throw Error("capacity correction: series do not overlap");
  double sr = 0.0, sm = 0.0;
  for (std::size_t i = 0; i < p.dates.size(); ++i) {
    sr += p.a[i];
    sm += p.b[i];
  }
  if (!(sm > 0.0))
    throw DegenerateInputError("capacity correction: model mean is zero");
  return (sr / double(p.dates.size())) / (sm / double(p.dates.size()));
}

template <class U>
DailySeries<U> apply_capacity_correction(DailySeries<U> s, double cf) {
  if (!(cf > 0.0))
    throw DegenerateInputError("capacity correction factor must be positive");
  for (double &v : s.values)
    v *= cf;
  return s;
}

/// Per-day sums of park series by region. Parks are visited in park_id order
/// so the floating-point sums do not depend on input order. A park adds
/// nothing on days its own series does not cover.
inline std::map<std::string, GenerationSeries>
aggregate_generation(const std::map<std::string, GenerationSeries> &park_series,
                     std::span<const WindPark> parks, Grouping grouping,
                     std::string_view country = kDefaultCountryLabel) {
  std::map<std::string_view, const WindPark *> by_id;
  for (const auto &p : parks)
    by_id.emplace(p.park_id, &p);

  std::map<std::string, std::map<Day, double>> acc;
  for (const auto &[id, series] : park_series) {
    const auto it = by_id.find(id);
    if (it == by_id.end())
      throw Error("generation series for unknown park " + id);
    const auto label = region_label(*it->second, grouping, country);
    if (!label)
      continue;
    auto &days = acc[*label];
    for (std::size_t i = 0; i < series.dates.size(); ++i)
      days[series.dates[i]] += series.values[i];
  }

  std::map<std::string, GenerationSeries> out;
  for (auto &[label, days] : acc) {
    GenerationSeries s;
    s.label = label;
    s.dates.reserve(days.size());
    s.values.reserve(days.size());
    for (const auto &[d, v] : days) {
      s.dates.push_back(d);
      s.values.push_back(v);
    }
    out.emplace(label, std::move(s));
  }
  return out;
}

} // namespace windsim
