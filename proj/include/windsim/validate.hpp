#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windsim/error.hpp"
#include "windsim/series.hpp"
#include "windsim/stats.hpp"

namespace windsim {

/// Daily energy in GWh from hourly power in MW. Days not fully covered by 24
/// present samples are dropped.
inline GenerationSeries daily_energy(const HourlySeries &hourly_mw,
                                     std::string label = {}) {
  GenerationSeries out;
  out.label = std::move(label);
  if (hourly_mw.values.empty())
    return out;
  const Day first = day_of(hourly_mw.start);
  const Day last = day_of(hourly_mw.end() - std::chrono::hours{1});
  for (Day d = first; d <= last; d += std::chrono::days{1}) {
    const Hour h0{d};
    if (h0 < hourly_mw.start || h0 + std::chrono::hours{24} > hourly_mw.end())
      continue;
    const auto i0 = std::size_t((h0 - hourly_mw.start).count());
    double sum = 0.0;
    bool complete = true;
    for (std::size_t k = 0; k < 24; ++k) {
      const double v = hourly_mw.values[i0 + k];
      if (!is_present(v)) {
        complete = false;
        break;
      }
      sum += v;
    }
    if (!complete)
      continue;
    out.dates.push_back(d);
    out.values.push_back(sum / 1000.0);
  }
  return out;
}

inline double rmse(std::span<const double> sim, std::span<const double> obs) {
  if (sim.size() != obs.size())
    throw DegenerateInputError("rmse: length mismatch");
  if (sim.empty())
    throw DegenerateInputError("rmse: no paired samples");
  double s = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i)
    s += (sim[i] - obs[i]) * (sim[i] - obs[i]);
  return std::sqrt(s / double(sim.size()));
}

/// Mean of sim - obs; positive means overestimation.
inline double mbe(std::span<const double> sim, std::span<const double> obs) {
  if (sim.size() != obs.size())
    throw DegenerateInputError("mbe: length mismatch");
  if (sim.empty())
    throw DegenerateInputError("mbe: no paired samples");
  double s = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i)
    s += sim[i] - obs[i];
  return s / double(sim.size());
}

struct MetricReport {
  std::string region;
  std::string method;
  std::size_t n_days = 0;
  std::optional<double> correlation; // empty when undefined
  double rmse = 0.0;                 // GWh/day
  double mbe = 0.0;                  // GWh/day
  double mean_sim = 0.0;             // GWh/day
  double mean_obs = 0.0;             // GWh/day
  std::optional<double> mean_capacity; // MW
  std::optional<double> rel_rmse;
  std::optional<double> rel_mbe;
  Day first_day{};
  Day last_day{};
};

/// Absolute metrics over the days both series carry.
inline MetricReport compare_series(const GenerationSeries &sim,
                                   const GenerationSeries &obs,
                                   std::string region, std::string method) {
  const auto p = pair_by_date(sim, obs);
  if (p.dates.empty())
    throw DegenerateInputError("no common days for region " + region);
  MetricReport r;
  r.region = std::move(region);
  r.method = std::move(method);
  r.n_days = p.dates.size();
  r.correlation = pearson(p.a, p.b);
  r.rmse = rmse(p.a, p.b);
  r.mbe = mbe(p.a, p.b);
  r.mean_sim = mean(p.a);
  r.mean_obs = mean(p.b);
  r.first_day = p.dates.front();
  r.last_day = p.dates.back();
  return r;
}

/// Normalizes rmse and mbe by the mean installed capacity over the report
/// window, expressed as daily energy at full output (MW x 24 h).
inline MetricReport relative_metrics(MetricReport r, const CapacitySeries &cap) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < cap.dates.size(); ++i) {
    if (cap.dates[i] < r.first_day || cap.dates[i] > r.last_day)
      continue;
    sum += cap.values[i];
    ++n;
  }
  if (n == 0)
    throw DegenerateInputError("capacity series does not cover window of " +
                               r.region);
  const double mean_mw = sum / double(n);
  if (!(mean_mw > 0.0))
    throw DegenerateInputError("zero mean capacity for " + r.region);
  const double full_gwh = mean_mw * 24.0 / 1000.0;
  r.mean_capacity = mean_mw;
  r.rel_rmse = r.rmse / full_gwh;
  r.rel_mbe = r.mbe / full_gwh;
  return r;
}

/// One report per region present in both `sim` and `obs`. Regions on only one
/// side are reported to `warnings` and skipped; regions without capacity get
/// absolute metrics only.
inline std::vector<MetricReport>
evaluate(const std::map<std::string, GenerationSeries> &sim,
         const std::map<std::string, GenerationSeries> &obs,
         const std::map<std::string, CapacitySeries> &capacity,
         const std::string &method, Warnings *warnings = nullptr) {
  auto warn = [&](std::string m) {
    if (warnings)
      warnings->add(std::move(m));
  };
  std::vector<MetricReport> out;
  for (const auto &[region, s] : sim) {
    const auto o = obs.find(region);
    if (o == obs.end()) {
      warn("region " + region + " [" + method + "] has no observed series");
      continue;
    }
    if (pair_by_date(s, o->second).dates.empty()) {
      warn("region " + region + " [" + method + "] has no common days");
      continue;
    }
    auto r = compare_series(s, o->second, region, method);
    if (const auto c = capacity.find(region); c != capacity.end())
      r = relative_metrics(std::move(r), c->second);
    else
      warn("region " + region + " has no capacity series; relative metrics omitted");
    out.push_back(std::move(r));
  }
  for (const auto &[region, o] : obs)
    if (!sim.contains(region))
      warn("observed region " + region + " [" + method + "] was not simulated");
  if (out.empty())
    throw Error("no common regions between simulated and observed series");
  return out;
}

} // namespace windsim
