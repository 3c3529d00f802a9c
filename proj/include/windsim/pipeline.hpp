#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "windsim/biascorr.hpp"
#include "windsim/config.hpp"
#include "windsim/error.hpp"
#include "windsim/fleet.hpp"
#include "windsim/grid.hpp"
#include "windsim/io.hpp"
#include "windsim/series.hpp"
#include "windsim/turbine.hpp"
#include "windsim/validate.hpp"
#include "windsim/vertical.hpp"

namespace windsim {

/// Too many parks fell back or were excluded (CLI exit code 3).
class DegradationError : public Error {
public:
  using Error::Error;
};

struct Inputs {
  std::unique_ptr<WindGrid> grid;
  std::optional<MeanWindRaster> raster;
  std::vector<WindPark> parks; // resolved turbine data, sorted by park_id
  std::vector<io::ExcludedPark> excluded;
  std::vector<StationSite> stations; // qualified only
  std::map<std::string, HourlySeries> station_speed;
  std::vector<std::string> station_notes;
  std::map<std::string, GenerationSeries> observed;
  std::map<std::string, CapacitySeries> reference_capacity;
  Hour window_start{}, window_end{}; // [start, end)
  Warnings warnings;

  std::size_t n_hours() const { return std::size_t((window_end - window_start).count()); }
};

namespace detail {

inline bool needs_stations(const RunConfig &c) {
  for (auto m : c.corrections)
    if (m == CorrectionMethod::mean_station || m == CorrectionMethod::hm_station)
      return true;
  return false;
}

inline bool needs_raster(const RunConfig &c) {
  if (c.no_station_fallback == CorrectionMethod::mean_gwa && needs_stations(c))
    return true;
  return std::find(c.corrections.begin(), c.corrections.end(),
                   CorrectionMethod::mean_gwa) != c.corrections.end();
}

inline void resolve_turbines(const RunConfig &cfg, Inputs &in) {
  std::optional<HubHeightModel> model = cfg.hub_coeffs;
  if (cfg.hub_model == HubModelSource::fit) {
    const auto rows = io::read_hub_training(cfg.input.hub_training);
    try {
      model = fit_hub_height_model(rows);
    } catch (const Error &e) {
      throw IngestError(cfg.input.hub_training.string(), 0, e.what());
    }
    if (model->slope < 0)
      in.warnings.add("hub height regression has a negative slope");
  }
  auto &parks = in.parks;
  if (model)
    for (auto &p : parks)
      if (!p.turbine.hub_height_m && p.turbine.rotor_diameter_m)
        p.turbine.hub_height_m =
            estimate_hub_height(*model, *p.turbine.rotor_diameter_m, cfg.hub_floor);

  auto spec = [](WindPark &p) -> TurbineSpec & { return p.turbine; };
  const auto has = [&](auto field) {
    return std::any_of(parks.begin(), parks.end(),
                       [&](const WindPark &p) { return field(p).has_value(); });
  };
  if (has([](const WindPark &p) { return p.turbine.hub_height_m; }))
    fill_missing_from_cohort(std::span(parks), TurbineField::hub_height, spec);
  for (auto &p : parks)
    if (!p.turbine.hub_height_m) {
      p.turbine.hub_height_m = cfg.default_hub_height;
      in.warnings.add("park " + p.park_id + ": hub height defaulted");
    }
  if (!parks.empty()) {
    if (!has([](const WindPark &p) { return p.turbine.specific_power; }))
      throw ConfigError("no park carries a rotor diameter; specific power cannot be estimated");
    fill_missing_from_cohort(std::span(parks), TurbineField::specific_power, spec);
  }
}

inline void load_stations(const RunConfig &cfg, Inputs &in) {
  const auto sites = io::read_stations(cfg.input.stations);
  const auto series = io::read_measurements(cfg.input.measurements, sites);
  QualificationRules rules;
  rules.epoch_start_year = cfg.epoch_start_year;
  for (const auto &site : sites) {
    const auto it = series.find(site.station_id);
    if (it == series.end()) {
      in.station_notes.push_back(site.station_id + " = no measurements");
      continue;
    }
    const auto cleaned = clean_constant_runs(it->second, cfg.min_run_hours);
    const auto q = qualify_station(cleaned, rules);
    if (!q.qualified) {
      in.station_notes.push_back(site.station_id + " = not qualified");
      continue;
    }
    in.station_notes.push_back(site.station_id + " = qualified");
    in.stations.push_back(site);
    in.station_speed.emplace(site.station_id,
                             mask_unusable_months(cleaned, q.usable_months).speed);
  }
}

} // namespace detail

/// Loads every input the model stages need. Observed data are loaded when
/// configured.
inline Inputs load_inputs(const RunConfig &cfg) {
  Inputs in;
  if (cfg.input.grid.empty())
    throw ConfigError("input.grid is required");
  if (cfg.input.parks.empty())
    throw ConfigError("input.parks is required");
  in.grid = std::make_unique<WindGrid>(io::read_wind_grid(cfg.input.grid, &in.warnings));
  if (needs_2m_level(cfg.vertical) && !in.grid->has_2m())
    throw ConfigError(std::string(to_string(cfg.vertical)) +
                      " needs u2/v2 columns in the grid file");

  in.window_start = in.grid->start();
  in.window_end = in.grid->time(in.grid->n_times());
  if (cfg.start_date)
    in.window_start = std::max(in.window_start, Hour{*cfg.start_date});
  if (cfg.end_date)
    in.window_end = std::min(in.window_end, Hour{*cfg.end_date + std::chrono::days{1}});
  if (in.window_end <= in.window_start)
    throw ConfigError("simulation window does not overlap the grid time range");

  if (detail::needs_raster(cfg)) {
    if (cfg.input.raster.empty())
      throw ConfigError("mean_gwa needs input.raster");
    in.raster = io::read_raster(cfg.input.raster);
  } else if (!cfg.input.raster.empty()) {
    in.raster = io::read_raster(cfg.input.raster);
  }

  auto table = io::read_parks(cfg.input.parks, &in.warnings);
  in.parks = std::move(table.parks);
  in.excluded = std::move(table.excluded);
  std::sort(in.parks.begin(), in.parks.end(),
            [](const WindPark &a, const WindPark &b) { return a.park_id < b.park_id; });
  detail::resolve_turbines(cfg, in);

  if (detail::needs_stations(cfg) &&
      (cfg.input.stations.empty() || cfg.input.measurements.empty()))
    throw ConfigError("station corrections need input.stations and input.measurements");
  if (!cfg.input.stations.empty() && !cfg.input.measurements.empty())
    detail::load_stations(cfg, in);

  if (!cfg.input.observed.empty())
    in.observed = io::read_generation(cfg.input.observed);
  if (!cfg.input.reference_capacity.empty())
    in.reference_capacity = io::read_capacity(cfg.input.reference_capacity);
  return in;
}

enum class ParkStatus { corrected, uncorrected, excluded };

inline std::string_view to_string(ParkStatus s) {
  switch (s) {
  case ParkStatus::corrected:
    return "corrected";
  case ParkStatus::uncorrected:
    return "uncorrected";
  case ParkStatus::excluded:
    return "excluded";
  }
  return "?";
}

struct ParkOutcome {
  std::string park_id;
  ParkStatus status = ParkStatus::uncorrected;
  CorrectionMethod applied = CorrectionMethod::none;
  std::string note; // fallback or exclusion reason
  bool fell_back = false;
};

struct ComboResult {
  Interpolation interpolation = Interpolation::nearest;
  CorrectionMethod correction = CorrectionMethod::none;
  std::string tag;
  std::map<std::string, GenerationSeries> parks;
  std::map<std::string, GenerationSeries> states, subsystems, country;
  std::map<std::string, CapacitySeries> capacity; // used for relative metrics
  std::map<std::string, double> capacity_factors;
  std::vector<ParkOutcome> outcomes;
  std::size_t fallback_alpha_hours = 0;
  std::size_t negative_speeds = 0;

  std::size_t count(ParkStatus s) const {
    return std::size_t(std::count_if(outcomes.begin(), outcomes.end(),
                                     [&](const ParkOutcome &o) { return o.status == s; }));
  }

  /// Region series of every level keyed by label; coarser levels win on clashes.
  std::map<std::string, GenerationSeries> all_regions() const {
    std::map<std::string, GenerationSeries> out;
    for (const auto *level : {&country, &subsystems, &states, &parks})
      for (const auto &[k, v] : *level)
        out.emplace(k, v);
    return out;
  }
};

/// Runs the per-park chain for one (interpolation, correction) pair. Level
/// and hub-height series are cached per park and interpolation so several
/// corrections and sweep runs share them.
class Simulator {
public:
  Simulator(const RunConfig &cfg, const Inputs &in) : cfg_(cfg), in_(in) {}

  ComboResult run(Interpolation interp, CorrectionMethod corr, double max_km,
                  CorrectionMethod no_station_fallback) {
    ComboResult r;
    r.interpolation = interp;
    r.correction = corr;
    r.tag = method_tag(interp, corr);
    for (const auto &e : in_.excluded)
      r.outcomes.push_back({e.park_id, ParkStatus::excluded, CorrectionMethod::none, e.reason,
                            false});

    std::vector<WindPark> simulated;
    for (std::size_t i = 0; i < in_.parks.size(); ++i) {
      const WindPark &p = in_.parks[i];
      const ParkModel &m = model(i, interp);
      ParkOutcome o{p.park_id, ParkStatus::uncorrected, CorrectionMethod::none, {}, false};
      if (!m.ok) {
        o.status = ParkStatus::excluded;
        o.note = m.error;
        r.outcomes.push_back(o);
        continue;
      }
      const Hour first = std::max(in_.window_start, Hour{p.commissioning_date});
      if (first >= in_.window_end) {
        o.status = ParkStatus::excluded;
        o.note = "commissioned after the simulation window";
        r.outcomes.push_back(o);
        continue;
      }
      r.fallback_alpha_hours += m.fallback_alpha_hours;
      r.negative_speeds += m.negative_speeds;

      HourlySeries hub = correct(p, m, corr, max_km, no_station_fallback, o);
      r.outcomes.push_back(o);

      const PowerCurve &curve = *m.curve;
      const std::size_t off = std::size_t((first - in_.window_start).count());
      HourlySeries mw{first, std::vector<double>(hub.size() - off)};
      for (std::size_t k = 0; k < mw.size(); ++k)
        mw.values[k] = curve.capacity_factor(hub.values[off + k]) * p.installed_capacity_mw;
      auto daily = daily_energy(mw, p.park_id);
      if (daily.empty())
        continue;
      r.parks.emplace(p.park_id, std::move(daily));
      simulated.push_back(p);
    }
    std::sort(r.outcomes.begin(), r.outcomes.end(),
              [](const ParkOutcome &a, const ParkOutcome &b) { return a.park_id < b.park_id; });
    aggregate(r, simulated);
    return r;
  }

private:
  struct ParkModel {
    bool ok = false;
    std::string error;
    std::optional<PowerCurve> curve;
    std::vector<double> hub, h10, w50; // over the window
    std::size_t fallback_alpha_hours = 0;
    std::size_t negative_speeds = 0;
  };

  const ParkModel &model(std::size_t park, Interpolation interp) {
    const auto key = std::make_pair(park, interp);
    if (const auto it = cache_.find(key); it != cache_.end())
      return it->second;
    ParkModel &m = cache_[key];
    const WindPark &p = in_.parks[park];
    const WindGrid &g = *in_.grid;
    try {
      m.curve = build_power_curve(*p.turbine.specific_power, cfg_.curve);
    } catch (const Error &e) {
      m.error = std::string("power curve: ") + e.what();
      return m;
    }
    Stencil st;
    try {
      st = make_stencil(interp, g.geometry(), p.location);
    } catch (const Error &e) {
      m.error = std::string(to_string(interp)) + ": " + e.what();
      return m;
    }
    const double disph = std::max(0.0, st.apply(g.displacement().values));
    const double hub_h = *p.turbine.hub_height_m;
    const bool with2 = needs_2m_level(cfg_.vertical);
    const std::size_t t0 = std::size_t((in_.window_start - g.start()).count());
    const std::size_t n = in_.n_hours();
    m.hub.resize(n);
    m.h10.resize(n);
    m.w50.resize(n);
    auto at = [&](Component c, std::size_t t) { return st.apply(g.field(c, t).values); };
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t t = t0 + k;
      LevelSpeeds s;
      s.w10 = effective_speed(at(Component::u10, t), at(Component::v10, t));
      s.w50 = effective_speed(at(Component::u50, t), at(Component::v50, t));
      if (with2)
        s.w2 = effective_speed(at(Component::u2, t), at(Component::v2, t));
      s.displacement = disph;
      const auto hub = extrapolate_levels(cfg_.vertical, s, hub_h, cfg_.fallback_alpha);
      const auto low = extrapolate_levels(cfg_.vertical, s, 10.0, cfg_.fallback_alpha);
      if (hub.used_fallback)
        ++m.fallback_alpha_hours;
      if (hub.value < 0.0)
        ++m.negative_speeds;
      m.hub[k] = std::max(0.0, hub.value);
      m.h10[k] = std::max(0.0, low.value);
      m.w50[k] = s.w50;
    }
    m.ok = true;
    return m;
  }

  std::optional<double> gwa_factor(const WindPark &p, const ParkModel &m,
                                   std::string &why) const {
    if (!in_.raster) {
      why = "no raster configured";
      return std::nullopt;
    }
    const double ref = raster_lookup(*in_.raster, p.location, HeightTag::m50);
    try {
      return mean_factor(ref, mean(m.w50));
    } catch (const Error &e) {
      why = std::string("mean_gwa: ") + e.what();
      return std::nullopt;
    }
  }

  HourlySeries correct(const WindPark &p, const ParkModel &m, CorrectionMethod corr,
                       double max_km, CorrectionMethod no_station_fallback,
                       ParkOutcome &o) const {
    HourlySeries hub{in_.window_start, m.hub};
    auto uncorrected = [&](std::string why) {
      o.status = ParkStatus::uncorrected;
      o.applied = CorrectionMethod::none;
      o.note = std::move(why);
      o.fell_back = true;
      return hub;
    };
    auto with_gwa = [&](std::string prefix) {
      std::string why;
      const auto f = gwa_factor(p, m, why);
      if (!f)
        return uncorrected(prefix.empty() ? why : prefix + "; " + why);
      o.status = ParkStatus::corrected;
      o.applied = CorrectionMethod::mean_gwa;
      o.note = std::move(prefix);
      o.fell_back = !o.note.empty();
      return apply_mean_correction(hub, *f, CorrectionMethod::mean_gwa).speed;
    };

    switch (corr) {
    case CorrectionMethod::none:
      o.status = ParkStatus::uncorrected;
      return hub;
    case CorrectionMethod::mean_gwa:
      return with_gwa({});
    case CorrectionMethod::mean_station:
    case CorrectionMethod::hm_station:
      break;
    }

    auto no_station = [&](std::string why) {
      if (no_station_fallback == CorrectionMethod::mean_gwa)
        return with_gwa(why);
      return uncorrected(why);
    };
    std::ostringstream km;
    km << max_km;
    const auto match = match_station(p.location, in_.stations, max_km);
    if (!match)
      return no_station("no qualified station within " + km.str() + " km");
    const HourlySeries &ref = in_.station_speed.at(match->station_id);
    const HourlySeries model10{in_.window_start, m.h10};

    auto mean_station = [&](std::string note) {
      PairedMeans pm;
      double f = 0;
      try {
        pm = paired_means(ref, model10);
        f = mean_factor(pm.reference, pm.model);
      } catch (const Error &e) {
        return no_station("station " + match->station_id + ": " + e.what());
      }
      o.status = ParkStatus::corrected;
      o.applied = CorrectionMethod::mean_station;
      o.fell_back = !note.empty();
      o.note = note.empty() ? "station " + match->station_id : std::move(note);
      return apply_mean_correction(hub, f, CorrectionMethod::mean_station).speed;
    };
    if (corr == CorrectionMethod::mean_station)
      return mean_station({});

    const auto factors = hm_factors(ref, model10, cfg_.utc_offset_hours);
    const auto corrected10 = apply_hm_correction(model10, factors).speed;
    const auto gate = correction_gate(ref, corrected10, cfg_.min_correlation);
    if (gate.method != CorrectionMethod::hm_station) {
      std::ostringstream why;
      why << "station " << match->station_id << ": ";
      if (gate.correlation)
        why << "correlation " << io::format_number(*gate.correlation) << " below "
            << io::format_number(cfg_.min_correlation);
      else
        why << "correlation undefined over " << gate.n_pairs << " paired hours";
      return mean_station(why.str());
    }
    o.status = ParkStatus::corrected;
    o.applied = CorrectionMethod::hm_station;
    o.note = "station " + match->station_id + ", correlation " +
             io::format_number(*gate.correlation);
    return apply_hm_correction(hub, factors).speed;
  }

  void aggregate(ComboResult &r, const std::vector<WindPark> &simulated) const {
    const std::string &country = cfg_.country_label;
    r.states = aggregate_generation(r.parks, simulated, Grouping::state, country);
    r.subsystems = aggregate_generation(r.parks, simulated, Grouping::subsystem, country);
    r.country = aggregate_generation(r.parks, simulated, Grouping::country, country);
    if (simulated.empty())
      return;

    const Day first = day_of(in_.window_start + std::chrono::hours{23});
    const Day last = day_of(in_.window_end) - std::chrono::days{1};
    std::map<std::string, CapacitySeries> model_cap;
    auto cap_for = [&](Grouping g, const std::string &label) -> const CapacitySeries & {
      auto it = model_cap.find(label);
      if (it == model_cap.end())
        it = model_cap
                 .emplace(label, capacity_timeseries(simulated,
                                                     region_filter(g, label, country),
                                                     first, std::max(first, last), label))
                 .first;
      return it->second;
    };

    // Capacity correction factor per label; falls back to the enclosing region.
    auto own_factor = [&](Grouping g, const std::string &label) -> std::optional<double> {
      if (!cfg_.capacity_correction)
        return std::nullopt;
      const auto ref = in_.reference_capacity.find(label);
      if (ref == in_.reference_capacity.end())
        return std::nullopt;
      try {
        return capacity_correction_factor(ref->second, cap_for(g, label));
      } catch (const Error &e) {
        warnings_.add("capacity correction for " + label + " skipped: " + e.what());
        return std::nullopt;
      }
    };
    const double cf_country = own_factor(Grouping::country, country).value_or(1.0);
    std::map<std::string, double> cf_sub;
    for (const auto &[label, s] : r.subsystems)
      cf_sub[label] = own_factor(Grouping::subsystem, label).value_or(cf_country);
    auto subsystem_cf = [&](const WindPark &p) {
      const auto l = region_label(p, Grouping::subsystem, country);
      return l ? cf_sub.at(*l) : cf_country;
    };
    std::map<std::string, double> cf_state;
    for (const auto &[label, s] : r.states) {
      const auto member = std::find_if(simulated.begin(), simulated.end(),
                                       [&](const WindPark &p) { return p.state == label; });
      cf_state[label] =
          own_factor(Grouping::state, label).value_or(subsystem_cf(*member));
    }
    std::map<std::string, double> cf_park;
    for (const auto &p : simulated)
      cf_park[p.park_id] = own_factor(Grouping::park, p.park_id).value_or(subsystem_cf(p));

    auto finish = [&](Grouping g, std::map<std::string, GenerationSeries> &level,
                      const std::map<std::string, double> &cf) {
      for (auto &[label, s] : level) {
        const double f = cf.at(label);
        if (f != 1.0)
          s = apply_capacity_correction(s, f);
        r.capacity_factors[label] = f;
        const auto ref = in_.reference_capacity.find(label);
        r.capacity[label] = ref != in_.reference_capacity.end()
                                ? ref->second
                                : apply_capacity_correction(cap_for(g, label), f);
      }
    };
    finish(Grouping::park, r.parks, cf_park);
    finish(Grouping::state, r.states, cf_state);
    finish(Grouping::subsystem, r.subsystems, cf_sub);
    finish(Grouping::country, r.country, {{country, cf_country}});
  }

  const RunConfig &cfg_;
  const Inputs &in_;
  std::map<std::pair<std::size_t, Interpolation>, ParkModel> cache_;

public:
  mutable Warnings warnings_;
};

struct SweepRow {
  double max_km = 0;
  std::string region;
  std::size_t n_corrected = 0;
  MetricReport report;
};

/// Owns the loaded inputs and writes every stage's outputs below cfg.out_dir.
class Pipeline {
public:
  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {}

  const RunConfig &config() const { return cfg_; }
  const fs::path &out_dir() const { return cfg_.out_dir; }

  static std::string tag_dir(const std::string &tag) {
    std::string d = tag;
    std::replace(d.begin(), d.end(), ':', '_');
    return d;
  }

  Inputs &inputs() {
    if (!inputs_) {
      inputs_ = std::make_unique<Inputs>(load_inputs(cfg_));
      sim_ = std::make_unique<Simulator>(cfg_, *inputs_);
    }
    return *inputs_;
  }

  /// One combination without writing anything.
  ComboResult simulate_one(Interpolation i, CorrectionMethod c, double max_km,
                           CorrectionMethod no_station_fallback) {
    inputs();
    return sim_->run(i, c, max_km, no_station_fallback);
  }

  std::vector<ComboResult> simulate() {
    auto &in = inputs();
    std::vector<ComboResult> results;
    for (auto i : cfg_.interpolations)
      for (auto c : cfg_.corrections) {
        auto r = sim_->run(i, c, cfg_.max_station_km, cfg_.no_station_fallback);
        const fs::path dir = cfg_.out_dir / "simulate" / tag_dir(r.tag);
        io::write_generation(dir / "park.csv", r.parks);
        io::write_generation(dir / "state.csv", r.states);
        io::write_generation(dir / "subsystem.csv", r.subsystems);
        io::write_generation(dir / "country.csv", r.country);
        io::write_capacity(dir / "capacity.csv", r.capacity);
        results.push_back(std::move(r));
      }
    write_manifest(in, results);
    for (const auto &r : results) {
      std::size_t degraded = 0;
      for (const auto &o : r.outcomes)
        if (o.status == ParkStatus::excluded || o.fell_back)
          ++degraded;
      const double total = double(r.outcomes.size());
      if (total > 0 && double(degraded) / total > cfg_.max_fallback_fraction) {
        std::ostringstream os;
        os << r.tag << ": " << degraded << " of " << r.outcomes.size()
           << " parks fell back or were excluded (tolerance "
           << io::format_number(cfg_.max_fallback_fraction) << ")";
        degradation_.push_back(os.str());
      }
    }
    return results;
  }

  /// Compares the simulate outputs on disk with the observed series.
  std::vector<MetricReport> validate() {
    if (cfg_.input.observed.empty())
      throw ConfigError("validate needs input.observed");
    const auto observed = inputs_ ? inputs_->observed : io::read_generation(cfg_.input.observed);
    Warnings w;
    std::vector<MetricReport> rows;
    std::vector<std::tuple<std::string, std::string, PairedDays>> diffs;
    for (auto i : cfg_.interpolations)
      for (auto c : cfg_.corrections) {
        const std::string tag = method_tag(i, c);
        const fs::path dir = cfg_.out_dir / "simulate" / tag_dir(tag);
        std::map<std::string, GenerationSeries> sim;
        for (const char *level : {"country.csv", "subsystem.csv", "state.csv", "park.csv"}) {
          if (!fs::exists(dir / level))
            throw IngestError((dir / level).string(), 0,
                              "simulate output missing; run simulate first");
          for (auto &[k, v] : io::read_generation(dir / level))
            if (!sim.emplace(k, std::move(v)).second)
              w.add("region label " + k + " appears at two aggregation levels");
        }
        const auto cap = io::read_capacity(dir / "capacity.csv");
        for (auto &r : evaluate(sim, observed, cap, tag, &w)) {
          diffs.emplace_back(r.region, tag,
                             pair_by_date(sim.at(r.region), observed.at(r.region)));
          rows.push_back(std::move(r));
        }
      }
    io::write_reports(cfg_.out_dir / "validation.csv", rows);
    if (cfg_.daily_diff) {
      io::CsvWriter out(cfg_.out_dir / "daily_diff.csv",
                        {"region", "method", "date", "sim_gwh", "obs_gwh", "diff_gwh"});
      for (const auto &[region, tag, p] : diffs)
        for (std::size_t k = 0; k < p.dates.size(); ++k)
          out.row(region, tag, p.dates[k], p.a[k], p.b[k], p.a[k] - p.b[k]);
      out.close();
    }
    write_log("validate.log", w);
    return rows;
  }

  /// Repeats the mean_station run for each distance limit.
  std::vector<SweepRow> sweep_distance() {
    auto &in = inputs();
    if (cfg_.input.stations.empty() || cfg_.input.measurements.empty())
      throw ConfigError("sweep-distance needs input.stations and input.measurements");
    if (in.observed.empty())
      throw ConfigError("sweep-distance needs input.observed");
    const Interpolation interp = cfg_.interpolations.front();
    Warnings w;
    std::vector<SweepRow> rows;
    std::ostringstream log;
    for (double km : cfg_.sweep_km) {
      const auto r = sim_->run(interp, CorrectionMethod::mean_station, km, CorrectionMethod::none);
      const std::size_t n = r.count(ParkStatus::corrected);
      log << "max_km " << io::format_number(km) << " = " << n << " corrected parks\n";
      for (auto &m : evaluate(r.all_regions(), in.observed, r.capacity, r.tag, &w))
        rows.push_back({km, m.region, n, std::move(m)});
    }
    io::CsvWriter out(cfg_.out_dir / "sweep_distance.csv",
                      {"max_km", "region", "n_corrected_parks", "correlation", "rmse_gwh",
                       "mbe_gwh", "rel_rmse", "rel_mbe"});
    for (const auto &s : rows)
      out.row(s.max_km, s.region, s.n_corrected, s.report.correlation, s.report.rmse,
              s.report.mbe, s.report.rel_rmse, s.report.rel_mbe);
    out.close();
    write_log("sweep_distance.log", w, log.str());
    return rows;
  }

  /// Throws DegradationError when a simulate run exceeded the tolerance.
  void check_degradation() const {
    if (degradation_.empty())
      return;
    std::string msg;
    for (const auto &d : degradation_)
      msg += (msg.empty() ? "" : "; ") + d;
    throw DegradationError(msg);
  }

  const std::vector<std::string> &warnings() const { return printed_; }

private:
  void write_log(const std::string &name, const Warnings &w, const std::string &head = {}) {
    fs::create_directories(cfg_.out_dir);
    std::ofstream out(cfg_.out_dir / name, std::ios::binary | std::ios::trunc);
    out << head;
    for (const auto &m : w.messages) {
      out << "warning: " << m << '\n';
      printed_.push_back(m);
    }
  }

  void write_manifest(const Inputs &in, const std::vector<ComboResult> &results) {
    std::ostringstream os;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg_.hash));
    os << "config_hash = " << hash << '\n';
    os << "window = " << format_hour(in.window_start) << " .. "
       << format_hour(in.window_end - std::chrono::hours{1}) << '\n';
    os << "vertical = " << to_string(cfg_.vertical) << '\n';
    os << "parks_registry = " << in.parks.size() + in.excluded.size() << '\n';
    os << "stations_qualified = " << in.stations.size() << '\n';
    for (const auto &s : in.station_notes)
      os << "station " << s << '\n';
    for (const auto &r : results) {
      os << "\n[" << r.tag << "]\n";
      os << "parks_corrected = " << r.count(ParkStatus::corrected) << '\n';
      os << "parks_uncorrected = " << r.count(ParkStatus::uncorrected) << '\n';
      os << "parks_excluded = " << r.count(ParkStatus::excluded) << '\n';
      os << "fallback_alpha_hours = " << r.fallback_alpha_hours << '\n';
      os << "negative_speeds_clamped = " << r.negative_speeds << '\n';
      for (const auto &[label, f] : r.capacity_factors)
        if (!r.parks.contains(label))
          os << "capacity_factor " << label << " = " << io::format_number(f) << '\n';
      for (const auto &o : r.outcomes) {
        os << "park " << o.park_id << " = ";
        if (o.status == ParkStatus::excluded)
          os << "excluded";
        else
          os << to_string(o.applied);
        if (!o.note.empty())
          os << (o.fell_back || o.status == ParkStatus::excluded ? " (fallback: " : " (")
             << o.note << ')';
        os << '\n';
      }
    }
    Warnings all = in.warnings;
    for (const auto &m : sim_->warnings_.messages)
      all.add(m);
    if (!all.messages.empty()) {
      os << "\n[warnings]\n";
      for (const auto &m : all.messages) {
        os << m << '\n';
        printed_.push_back(m);
      }
    }
    fs::create_directories(cfg_.out_dir);
    std::ofstream out(cfg_.out_dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    out << os.str();
    if (!out)
      throw Error("cannot write manifest");
  }

  RunConfig cfg_;
  std::unique_ptr<Inputs> inputs_;
  std::unique_ptr<Simulator> sim_;
  std::vector<std::string> degradation_;
  std::vector<std::string> printed_;
};

inline std::vector<ComboResult> run_simulate(const RunConfig &cfg) {
  Pipeline p(cfg);
  auto r = p.simulate();
  p.check_degradation();
  return r;
}

inline std::vector<MetricReport> run_validate(const RunConfig &cfg) {
  Pipeline p(cfg);
  return p.validate();
}

inline std::vector<SweepRow> run_sweep_distance(const RunConfig &cfg) {
  Pipeline p(cfg);
  return p.sweep_distance();
}

/// simulate, validate, and the distance sweep when stations are configured.
inline std::vector<MetricReport> run_full(const RunConfig &cfg) {
  Pipeline p(cfg);
  p.simulate();
  auto reports = p.validate();
  if (!cfg.input.stations.empty() && !cfg.input.measurements.empty())
    p.sweep_distance();
  p.check_degradation();
  return reports;
}

} // namespace windsim
