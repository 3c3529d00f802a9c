#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "windsim/error.hpp"

namespace windsim {

/// Per-turbine data of a park. Hub height and specific power may be unknown
/// until estimated.
struct TurbineSpec {
  double capacity_kw = 0.0;
  std::optional<double> rotor_diameter_m;
  std::optional<double> hub_height_m;
  std::optional<double> specific_power; // W/m^2
  int install_year = 0;
};

/// Rated capacity over swept rotor area, in W/m^2.
inline double specific_power(double capacity_kw, double rotor_diameter_m) {
  if (!(capacity_kw > 0.0) || !(rotor_diameter_m > 0.0))
    throw DegenerateInputError("specific power needs positive capacity and diameter");
  const double r = rotor_diameter_m / 2.0;
  return 1000.0 * capacity_kw / (std::numbers::pi * r * r);
}

struct PowerCurveParams {
  double cut_in = 3.0;        // m/s
  double cut_out = 25.0;      // m/s
  double cp = 0.45;           // power coefficient at rated speed
  double air_density = 1.225; // kg/m^3
};

/// Capacity factor as a function of hub-height wind speed: zero below cut-in,
/// a cubic ramp up to rated speed, one up to cut-out, zero above.
class PowerCurve {
public:
  PowerCurve(double cut_in, double rated_speed, double cut_out)
      : cut_in_(cut_in), rated_(rated_speed), cut_out_(cut_out) {
    if (!(cut_in > 0.0) || !(rated_speed > cut_in) || !(cut_out > rated_speed))
      throw DegenerateInputError("power curve needs 0 < cut_in < rated < cut_out");
    denom_ = rated_ * rated_ * rated_ - cut_in_ * cut_in_ * cut_in_;
  }

  double cut_in() const { return cut_in_; }
  double rated_speed() const { return rated_; }
  double cut_out() const { return cut_out_; }

  double capacity_factor(double v) const {
    if (v < cut_in_ || v > cut_out_)
      return 0.0;
    if (v >= rated_)
      return 1.0;
    const double cf = (v * v * v - cut_in_ * cut_in_ * cut_in_) / denom_;
    return std::clamp(cf, 0.0, 1.0);
  }

private:
  double cut_in_, rated_, cut_out_;
  double denom_;
};

/// Rated speed from specific power: v_r = (2 SP / (rho cp))^(1/3).
inline PowerCurve build_power_curve(double specific_power_wm2,
                                    const PowerCurveParams &p = {}) {
  if (!(specific_power_wm2 > 0.0))
    throw DegenerateInputError("specific power must be positive");
  const double rated =
      std::cbrt(2.0 * specific_power_wm2 / (p.air_density * p.cp));
  if (!(rated > p.cut_in) || !(rated < p.cut_out))
    throw DegenerateInputError("specific power " + std::to_string(specific_power_wm2) +
                               " gives a degenerate power curve");
  return PowerCurve(p.cut_in, rated, p.cut_out);
}

inline std::vector<double> simulate_turbine(const PowerCurve &curve,
                                            std::span<const double> hub_wind) {
  std::vector<double> cf;
  cf.reserve(hub_wind.size());
  for (double v : hub_wind)
    cf.push_back(curve.capacity_factor(v));
  return cf;
}

/// hub_height = intercept + slope * rotor diameter.
struct HubHeightModel {
  double intercept = 0.0;
  double slope = 0.0;
};

inline HubHeightModel
fit_hub_height_model(std::span<const std::pair<double, double>> diameter_hub) {
  const std::size_t n = diameter_hub.size();
  if (n < 2)
    throw RankDeficiencyError("hub height regression needs two distinct diameters");
  double mx = 0.0, my = 0.0;
  for (const auto &[d, h] : diameter_hub) {
    mx += d;
    my += h;
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto &[d, h] : diameter_hub) {
    sxx += (d - mx) * (d - mx);
    sxy += (d - mx) * (h - my);
  }
  if (!(sxx > 0.0))
    throw RankDeficiencyError("hub height regression needs two distinct diameters");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

inline double estimate_hub_height(const HubHeightModel &m, double diameter_m,
                                  double floor_m = 10.0) {
  return std::max(floor_m, m.intercept + m.slope * diameter_m);
}

enum class TurbineField { hub_height, specific_power };

namespace detail {

inline std::optional<double> &field_ref(TurbineSpec &t, TurbineField f) {
  return f == TurbineField::hub_height ? t.hub_height_m : t.specific_power;
}

} // namespace detail

/// Fills a missing field with the mean over specs sharing the install year,
/// or with the mean over all specs when that year carries none. Present
/// values are left untouched. `Item` exposes its TurbineSpec via `spec(item)`.
template <class Item, class SpecOf>
void fill_missing_from_cohort(std::span<Item> items, TurbineField field,
                              SpecOf spec) {
  std::map<int, std::pair<double, std::size_t>> by_year;
  double total = 0.0;
  std::size_t count = 0;
  for (auto &it : items) {
    TurbineSpec &t = spec(it);
    if (auto &v = detail::field_ref(t, field)) {
      auto &[s, c] = by_year[t.install_year];
      s += *v;
      ++c;
      total += *v;
      ++count;
    }
  }
  if (count == 0)
    throw Error("field is missing for every turbine; cannot fill");
  const double global = total / double(count);
  for (auto &it : items) {
    TurbineSpec &t = spec(it);
    auto &v = detail::field_ref(t, field);
    if (v)
      continue;
    const auto y = by_year.find(t.install_year);
    v = y != by_year.end() ? y->second.first / double(y->second.second) : global;
  }
}

inline void fill_missing_from_cohort(std::span<TurbineSpec> specs,
                                     TurbineField field) {
  fill_missing_from_cohort(specs, field, [](TurbineSpec &t) -> TurbineSpec & {
    return t;
  });
}

} // namespace windsim
