#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "windsim/biascorr.hpp"
#include "windsim/config.hpp"
#include "windsim/fleet.hpp"
#include "windsim/grid.hpp"
#include "windsim/io.hpp"
#include "windsim/turbine.hpp"
#include "windsim/validate.hpp"

namespace windsim {

/// Paths of a generated bundle.
struct SyntheticBundle {
  fs::path dir;
  fs::path config; // ready-to-run config referencing the files below
  std::map<std::string, GenerationSeries> truth; // every aggregation level
};

namespace synth {

inline constexpr double kLat0 = -6.0, kLon0 = -38.125;
inline constexpr double kDlat = 0.5, kDlon = 0.625;
inline constexpr std::size_t kN = 5;
inline constexpr double kRasterStep = 0.05;

/// Mean 10 m speed factor of the truth field.
inline double mean_speed(double lat, double lon) {
  constexpr double tau = 2 * std::numbers::pi;
  return 5.0 + 0.5 * std::sin(tau * (lat - kLat0) / 4.0) +
         0.4 * std::cos(tau * (lon - kLon0) / 5.0);
}

inline double shear(double lat, double lon) {
  constexpr double tau = 2 * std::numbers::pi;
  return 0.16 + 0.03 * std::sin(tau * (lat - kLat0 + lon - kLon0) / 6.0);
}

/// Truth speed: mean(p) * d * (h / 10)^alpha(p).
inline double truth_speed(const GridPoint &p, double h, double d) {
  return mean_speed(p.lat(), p.lon()) * d * std::pow(h / 10.0, shear(p.lat(), p.lon()));
}

/// Point `km` away from `p` on bearing `deg` (clockwise from north).
inline GridPoint offset_point(const GridPoint &p, double km, double deg) {
  const double b = deg * std::numbers::pi / 180.0;
  const double per_deg = kEarthRadiusKm * std::numbers::pi / 180.0;
  const double lat = p.lat() + km * std::cos(b) / per_deg;
  const double lon =
      p.lon() + km * std::sin(b) / (per_deg * std::cos(p.lat() * std::numbers::pi / 180.0));
  return GridPoint(std::round(lat * 1e4) / 1e4, std::round(lon * 1e4) / 1e4);
}

enum class StationKind { clean, noisy, short_record, zero_run };

struct StationPlan {
  const char *id;
  std::size_t park; // placed relative to this park
  double km;
  double bearing;
  StationKind kind;
};

// clang-format off
inline constexpr StationPlan kStations[] = {
    {"S01", 0, 8, 200, StationKind::clean},
    {"S02", 3, 22, 90, StationKind::clean},
    {"S03", 6, 15, 160, StationKind::noisy},
    {"S04", 9, 33, 30, StationKind::clean},
    {"S05", 1, 47, 315, StationKind::clean},
    {"S06", 4, 58, 250, StationKind::clean},
    {"S07", 7, 72, 10, StationKind::clean},
    {"S08", 10, 10, 45, StationKind::short_record},
    {"S09", 2, 28, 350, StationKind::zero_run},
    {"S10", 5, 88, 270, StationKind::clean},
};
// clang-format on

} // namespace synth

/// Writes a synthetic input bundle into `dir`: a biased coarse wind grid, a
/// fine mean-wind raster of the truth, stations sampling the truth with noise
/// and gaps, parks, hub-height training data, reference capacities, the truth
/// generation as observed series, and a config running every method.
inline SyntheticBundle run_synthetic(const RunConfig::Synthetic &s, const fs::path &dir) {
  using namespace synth;
  fs::create_directories(dir);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> z(0.0, 1.0);

  const Hour start{make_day(s.start_year, 1, 1)};
  const Hour end{make_day(s.start_year + s.years, 1, 1)};
  const std::size_t n_hours = std::size_t((end - start).count());

  // Common temporal driver: diurnal and seasonal cycles times AR(1) weather.
  std::vector<double> drive(n_hours), theta(n_hours);
  {
    constexpr double phi = 0.97, sigma = 0.08;
    const double var = sigma * sigma / (1 - phi * phi);
    double x = 0.0, dir_deg = 90.0;
    for (std::size_t k = 0; k < n_hours; ++k) {
      const Hour t = start + std::chrono::hours{k};
      const double hod = hour_of_day(t);
      const double doy = double((day_of(t) - Day{std::chrono::year_month_day{
                                                  std::chrono::year{year_of(day_of(t))},
                                                  std::chrono::January, std::chrono::day{1}}})
                                    .count());
      x = phi * x + sigma * z(rng);
      drive[k] = (1 + 0.25 * std::sin(2 * std::numbers::pi * (hod - 9) / 24)) *
                 (1 + 0.2 * std::cos(2 * std::numbers::pi * (doy - 240) / 365)) *
                 std::exp(x - var / 2);
      dir_deg += 5.0 * z(rng);
      theta[k] = dir_deg * std::numbers::pi / 180.0;
    }
  }

  // Coarse grid with multiplicative bias.
  GridGeometry g{kLat0, kLon0, kDlat, kDlon, kN, kN};
  {
    WindGrid::Components c;
    const std::size_t cells = g.size();
    for (auto *v : {&c.u10, &c.v10, &c.u50, &c.v50})
      v->resize(cells * n_hours);
    std::vector<double> m10(cells), m50(cells);
    for (std::size_t i = 0; i < kN; ++i)
      for (std::size_t j = 0; j < kN; ++j) {
        const GridPoint p = g.node(i, j);
        m10[g.flat(i, j)] = (1 + s.bias) * truth_speed(p, 10, 1.0);
        m50[g.flat(i, j)] = (1 + s.bias) * truth_speed(p, 50, 1.0);
      }
    for (std::size_t k = 0; k < n_hours; ++k) {
      const double cs = std::cos(theta[k]), sn = std::sin(theta[k]);
      for (std::size_t n = 0; n < cells; ++n) {
        const std::size_t idx = k * cells + n;
        c.u10[idx] = m10[n] * drive[k] * cs;
        c.v10[idx] = m10[n] * drive[k] * sn;
        c.u50[idx] = m50[n] * drive[k] * cs;
        c.v50[idx] = m50[n] * drive[k] * sn;
      }
    }
    io::write_wind_grid(dir / "grid.csv", WindGrid(g, start, n_hours, std::move(c),
                                                   std::vector<double>(cells, 0.0)));
  }

  double mean_drive = 0.0;
  for (double d : drive)
    mean_drive += d;
  mean_drive /= double(n_hours);

  // Raster of truth means at 50 m, cell centres on multiples of the step.
  {
    GridGeometry r{kLat0, kLon0, kRasterStep, kRasterStep, 41, 51};
    std::vector<double> m50(r.size());
    for (std::size_t i = 0; i < r.nlat; ++i)
      for (std::size_t j = 0; j < r.nlon; ++j)
        m50[r.flat(i, j)] = truth_speed(r.node(i, j), 50, mean_drive);
    io::write_raster(dir / "raster.csv", MeanWindRaster(r, std::move(m50)));
  }

  // Parks on a lattice inside the bicubic-safe interior, on raster centres.
  struct Site {
    const char *state;
    Subsystem sub;
  };
  const double lats[] = {-5.4, -5.0, -4.6};
  const double lons[] = {-37.375, -36.975, -36.575, -36.375};
  const Site sites[3][4] = {
      {{"CE", Subsystem::north_east}, {"RN", Subsystem::north_east},
       {"BA", Subsystem::north_east}, {"RS", Subsystem::south}},
      {{"CE", Subsystem::north_east}, {"RN", Subsystem::north_east},
       {"BA", Subsystem::north_east}, {"SC", Subsystem::south}},
      {{"CE", Subsystem::north_east}, {"PI", Subsystem::north_east},
       {"BA", Subsystem::north_east}, {"MA", Subsystem::north}}};
  std::uniform_real_distribution<double> cap(20, 150);
  std::uniform_int_distribution<int> dia(9, 13), hub(8, 12), year(2006, s.start_year - 1);
  std::vector<WindPark> parks;
  for (std::size_t k = 0; k < s.n_parks; ++k) {
    const std::size_t row = (k / 4) % 3, col = k % 4;
    WindPark p;
    char id[8];
    std::snprintf(id, sizeof id, "P%02zu", k + 1);
    p.park_id = id;
    p.name = std::string("Synthetic park ") + id;
    const double jitter = 0.05 * double(k / 12);
    p.location = GridPoint(lats[row] + jitter, lons[col]);
    p.state = sites[row][col].state;
    p.subsystem = sites[row][col].sub;
    p.installed_capacity_mw = std::round(cap(rng) * 10) / 10;
    p.turbine.capacity_kw = k % 3 == 0 ? 3000 : 2000;
    p.n_turbines = std::max<std::size_t>(
        1, std::size_t(std::lround(p.installed_capacity_mw * 1000 / p.turbine.capacity_kw)));
    p.turbine.rotor_diameter_m = 10.0 * dia(rng);
    p.turbine.hub_height_m = 10.0 * hub(rng);
    if (k % 12 == 4 || k % 12 == 8)
      p.turbine.rotor_diameter_m.reset(); // specific power from the cohort
    if (k % 12 == 1 || k % 12 == 5 || k % 12 == 10)
      p.turbine.hub_height_m.reset(); // hub height from the regression
    p.commissioning_date =
        k % 12 >= 9 ? make_day(s.start_year + 1, int(1 + 3 * (k % 12 - 9)), 15)
                    : make_day(year(rng), 1 + int(k % 12), 1);
    p.turbine.install_year = year_of(p.commissioning_date);
    if (p.turbine.rotor_diameter_m)
      p.turbine.specific_power =
          specific_power(p.turbine.capacity_kw, *p.turbine.rotor_diameter_m);
    parks.push_back(p);
  }
  io::write_parks(dir / "parks.csv", parks);

  const HubHeightModel hub_model{30.0, 0.7};
  {
    std::vector<std::pair<double, double>> rows;
    for (int d = 60; d <= 150; d += 3)
      rows.emplace_back(d, hub_model.intercept + hub_model.slope * d);
    io::write_hub_training(dir / "hub_training.csv", rows);
  }

  // Resolve turbines exactly as the pipeline will.
  for (auto &p : parks)
    if (!p.turbine.hub_height_m)
      p.turbine.hub_height_m = estimate_hub_height(hub_model, *p.turbine.rotor_diameter_m);
  fill_missing_from_cohort(std::span(parks), TurbineField::specific_power,
                           [](WindPark &p) -> TurbineSpec & { return p.turbine; });

  // Stations.
  {
    std::vector<StationSite> sites_out;
    std::map<std::string, StationSeries> series;
    std::uniform_int_distribution<int> gap_len(4, 20), gap_day(0, 28);
    for (const auto &plan : kStations) {
      if (plan.park >= parks.size())
        continue;
      const GridPoint loc = offset_point(parks[plan.park].location, plan.km, plan.bearing);
      sites_out.push_back({plan.id, loc});
      StationSeries st{plan.id, loc, HourlySeries{start, std::vector<double>(n_hours)}};
      auto &v = st.speed.values;
      for (std::size_t k = 0; k < n_hours; ++k) {
        const double truth = truth_speed(loc, 10, drive[k]);
        if (plan.kind == StationKind::noisy)
          v[k] = std::max(0.0, truth + 8.0 * z(rng));
        else
          v[k] = std::max(0.0, truth * (1 + s.noise * z(rng)));
        v[k] = std::round(v[k] * 100) / 100;
      }
      // short gaps, only in 31-day months so every month stays complete
      for (std::size_t k = 0; k + 1 < n_hours; k += 24 * 7) {
        const Day d = day_of(st.speed.time(k));
        const int m = month_of(d);
        if (m == 2 || m == 4 || m == 6 || m == 9 || m == 11 || gap_day(rng) > 3)
          continue;
        const Hour gap0 = Hour{make_day(year_of(d), m, 1 + gap_day(rng))};
        const int len = gap_len(rng);
        for (int h = 0; h < len; ++h)
          if (auto idx = st.speed.index_of(gap0 + std::chrono::hours{h}))
            v[*idx] = kMissing;
        k += 24 * 31; // at most one gap per month
      }
      if (plan.kind == StationKind::short_record)
        v.resize(std::min(v.size(), std::size_t(24 * 365 * 2)));
      if (plan.kind == StationKind::zero_run) {
        if (const auto i0 = st.speed.index_of(Hour{make_day(s.start_year + 1, 7, 3)}))
          for (std::size_t k = *i0; k < *i0 + 130 && k < v.size(); ++k)
            v[k] = 0.0;
      }
      series.emplace(plan.id, std::move(st));
    }
    io::write_stations(dir / "stations.csv", sites_out);
    io::write_measurements(dir / "measurements.csv", series);
  }

  // Truth generation through the same power chain, from the exact field.
  SyntheticBundle b;
  b.dir = dir;
  std::map<std::string, GenerationSeries> truth_parks;
  for (const auto &p : parks) {
    const auto curve = build_power_curve(*p.turbine.specific_power);
    const Hour first = std::max(start, Hour{p.commissioning_date});
    if (first >= end)
      continue;
    const std::size_t off = std::size_t((first - start).count());
    HourlySeries mw{first, std::vector<double>(n_hours - off)};
    for (std::size_t k = 0; k < mw.size(); ++k)
      mw.values[k] = curve.capacity_factor(truth_speed(p.location, *p.turbine.hub_height_m,
                                                       drive[off + k])) *
                     p.installed_capacity_mw;
    truth_parks.emplace(p.park_id, daily_energy(mw, p.park_id));
  }
  for (auto g2 : {Grouping::park, Grouping::state, Grouping::subsystem, Grouping::country})
    for (auto &[k, v] : aggregate_generation(truth_parks, parks, g2))
      b.truth.emplace(k, std::move(v));
  io::write_generation(dir / "observed.csv", b.truth);

  // Reference capacities equal to the registry ones (capacity factor 1).
  {
    std::map<std::string, CapacitySeries> ref;
    const Day first = day_of(start), last = day_of(end) - std::chrono::days{1};
    ref.emplace("Brazil", capacity_timeseries(parks, nullptr, first, last, "Brazil"));
    for (const char *sub : {"NorthEast", "South"}) {
      bool any = false;
      for (const auto &p : parks)
        any = any || to_string(p.subsystem) == sub;
      if (any)
        ref.emplace(sub, capacity_timeseries(parks, region_filter(Grouping::subsystem, sub),
                                             first, last, sub));
    }
    io::write_capacity(dir / "reference_capacity.csv", ref);
  }

  b.config = dir / "windsim.conf";
  std::ofstream conf(b.config, std::ios::binary | std::ios::trunc);
  conf << "# synthetic scenario, seed " << s.seed << ", coarse-grid bias "
       << io::format_number(s.bias) << "\n"
       << "input.grid = grid.csv\n"
       << "input.raster = raster.csv\n"
       << "input.parks = parks.csv\n"
       << "input.stations = stations.csv\n"
       << "input.measurements = measurements.csv\n"
       << "input.observed = observed.csv\n"
       << "input.reference_capacity = reference_capacity.csv\n"
       << "input.hub_training = hub_training.csv\n"
       << "\n"
       << "interpolation.method = nn, bli, bci, idw\n"
       << "biascorr.method = none, mean_gwa, mean_station, hm_station\n"
       << "vertical.method = power_law_10_50\n"
       << "turbine.hub_model = fit\n"
       << "biascorr.max_station_km = 40\n"
       << "biascorr.min_correlation = 0.5\n"
       << "sweep.km_list = 0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100\n"
       << "output.dir = out\n";
  if (!conf)
    throw Error("cannot write " + b.config.string());
  return b;
}

} // namespace windsim
