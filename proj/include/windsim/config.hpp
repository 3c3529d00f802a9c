#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "windsim/biascorr.hpp"
#include "windsim/error.hpp"
#include "windsim/fleet.hpp"
#include "windsim/grid.hpp"
#include "windsim/time.hpp"
#include "windsim/turbine.hpp"
#include "windsim/vertical.hpp"

namespace windsim {

namespace fs = std::filesystem;

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Flat `key = value` file. `#` starts a comment; blank lines are ignored.
class ConfigFile {
public:
  static ConfigFile parse(std::string_view text, std::string source = "<config>") {
    ConfigFile c;
    c.source_ = std::move(source);
    c.text_ = std::string(text);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto eol = text.find('\n', pos);
      std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(c.source_ + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty())
        throw ConfigError(c.source_ + ":" + std::to_string(line_no) + ": empty key");
      if (c.values_.contains(key))
        throw ConfigError(c.source_ + ":" + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
      c.values_[key] = {value, line_no};
    }
    return c;
  }

  static ConfigFile load(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  const std::string &source() const { return source_; }
  const std::string &text() const { return text_; }
  bool has(const std::string &key) const { return values_.contains(key); }

  std::optional<std::string> get(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  std::string get_or(const std::string &key, std::string fallback) const {
    return get(key).value_or(std::move(fallback));
  }

  double number(const std::string &key, double fallback) const {
    const auto v = get(key);
    if (!v)
      return fallback;
    return to_number(key, *v);
  }

  std::vector<std::string> list(const std::string &key, std::vector<std::string> fallback) const {
    const auto v = get(key);
    if (!v)
      return fallback;
    std::vector<std::string> out;
    std::string_view rest = *v;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty())
        fail(key, "empty list item");
      out.emplace_back(item);
      if (comma == std::string_view::npos)
        break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  std::vector<double> numbers(const std::string &key, std::vector<double> fallback) const {
    if (!has(key))
      return fallback;
    std::vector<double> out;
    for (const auto &s : list(key, {}))
      out.push_back(to_number(key, s));
    return out;
  }

  bool boolean(const std::string &key, bool fallback) const {
    const auto v = get(key);
    if (!v)
      return fallback;
    if (*v == "true" || *v == "yes" || *v == "1")
      return true;
    if (*v == "false" || *v == "no" || *v == "0")
      return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  /// Keys present in the file but never read.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto &[k, v] : values_)
      if (!used_.contains(k))
        out.push_back(k);
    return out;
  }

  [[noreturn]] void fail(const std::string &key, const std::string &what) const {
    const auto it = values_.find(key);
    const std::string where =
        it == values_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": " + key + ": " + what);
  }

private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  }

  double to_number(const std::string &key, std::string_view s) const {
    // allow simple fractions such as 1/7
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
      const double a = to_number(key, trim(s.substr(0, slash)));
      const double b = to_number(key, trim(s.substr(slash + 1)));
      if (b == 0.0)
        fail(key, "division by zero");
      return a / b;
    }
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      fail(key, "not a number: '" + std::string(s) + "'");
    return v;
  }

  std::string source_;
  std::string text_;
  std::map<std::string, Entry> values_;
  mutable std::set<std::string> used_;
};

enum class HubModelSource { fit, coeffs };

struct RunConfig {
  struct Inputs {
    fs::path grid, raster, parks, stations, measurements, observed, reference_capacity,
        hub_training;
  } input;

  std::vector<Interpolation> interpolations{Interpolation::nearest};
  std::vector<CorrectionMethod> corrections{CorrectionMethod::none};

  VerticalMethod vertical = VerticalMethod::power_law_10_50;
  double fallback_alpha = 1.0 / 7.0;
  double default_hub_height = 108.0;

  PowerCurveParams curve;
  HubModelSource hub_model = HubModelSource::coeffs;
  std::optional<HubHeightModel> hub_coeffs;
  double hub_floor = 10.0;

  double max_station_km = 40.0;
  double min_correlation = 0.5;
  std::size_t min_run_hours = 120;
  int utc_offset_hours = 0;
  int epoch_start_year = 1999;
  CorrectionMethod no_station_fallback = CorrectionMethod::none;

  std::string country_label = std::string(kDefaultCountryLabel);
  bool capacity_correction = true;

  std::optional<Day> start_date, end_date;
  fs::path out_dir = "out";
  double max_fallback_fraction = 1.0;
  bool daily_diff = true;
  std::vector<double> sweep_km{30, 40, 50, 60, 70, 80};

  struct Synthetic {
    std::uint64_t seed = 42;
    double bias = 0.2;
    double noise = 0.15;
    int years = 4;
    int start_year = 2012;
    std::size_t n_parks = 12;
  } synthetic;

  std::uint64_t hash = 0; // of the config text plus overrides
};

/// Method tag used in reports and output paths, e.g. "bli:mean_gwa".
inline std::string method_tag(Interpolation i, CorrectionMethod c) {
  return std::string(to_string(i)) + ":" + std::string(to_string(c));
}

namespace detail {

inline int to_int(const ConfigFile &f, const std::string &key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9)
    f.fail(key, "expected an integer");
  return int(v);
}

} // namespace detail

/// The synthetic.* keys alone; other keys are left for the caller.
inline RunConfig::Synthetic synthetic_settings(const ConfigFile &f) {
  RunConfig c;
  c.synthetic.seed = std::uint64_t(detail::to_int(
      f, "synthetic.seed", f.number("synthetic.seed", double(c.synthetic.seed))));
  c.synthetic.bias = f.number("synthetic.bias", c.synthetic.bias);
  c.synthetic.noise = f.number("synthetic.noise", c.synthetic.noise);
  c.synthetic.years =
      detail::to_int(f, "synthetic.years", f.number("synthetic.years", c.synthetic.years));
  c.synthetic.start_year = detail::to_int(
      f, "synthetic.start_year", f.number("synthetic.start_year", c.synthetic.start_year));
  const double n_parks = f.number("synthetic.parks", double(c.synthetic.n_parks));
  c.synthetic.n_parks = std::size_t(detail::to_int(f, "synthetic.parks", n_parks));
  if (!(c.synthetic.bias > -1) || c.synthetic.years < 1 || c.synthetic.n_parks < 1 ||
      c.synthetic.noise < 0)
    f.fail("synthetic.bias", "synthetic settings out of range");
  // parks are commissioned from 2006 on, before the first simulated year
  if (c.synthetic.start_year < 2007 || c.synthetic.start_year > 2100)
    f.fail("synthetic.start_year", "must lie in 2007..2100");
  return c.synthetic;
}

/// Builds a RunConfig. Relative input paths resolve against `base_dir`.
inline RunConfig make_run_config(const ConfigFile &f, const fs::path &base_dir) {
  RunConfig c;
  auto path = [&](const char *key) -> fs::path {
    const auto v = f.get(key);
    if (!v || v->empty())
      return {};
    const fs::path p(*v);
    return p.is_absolute() ? p : base_dir / p;
  };
  c.input.grid = path("input.grid");
  c.input.raster = path("input.raster");
  c.input.parks = path("input.parks");
  c.input.stations = path("input.stations");
  c.input.measurements = path("input.measurements");
  c.input.observed = path("input.observed");
  c.input.reference_capacity = path("input.reference_capacity");
  c.input.hub_training = path("input.hub_training");

  c.interpolations.clear();
  for (const auto &s : f.list("interpolation.method", {"nn"})) {
    const auto m = parse_interpolation(s);
    if (!m)
      f.fail("interpolation.method", "unknown method '" + s + "'");
    if (std::find(c.interpolations.begin(), c.interpolations.end(), *m) ==
        c.interpolations.end())
      c.interpolations.push_back(*m);
  }
  c.corrections.clear();
  for (const auto &s : f.list("biascorr.method", {"none"})) {
    const auto m = parse_correction_method(s);
    if (!m)
      f.fail("biascorr.method", "unknown method '" + s + "'");
    if (std::find(c.corrections.begin(), c.corrections.end(), *m) == c.corrections.end())
      c.corrections.push_back(*m);
  }

  if (const auto v = f.get("vertical.method")) {
    const auto m = parse_vertical_method(*v);
    if (!m)
      f.fail("vertical.method", "unknown method '" + *v + "'");
    c.vertical = *m;
  }
  c.fallback_alpha = f.number("vertical.fallback_alpha", c.fallback_alpha);
  c.default_hub_height = f.number("vertical.default_hub_height", c.default_hub_height);
  if (!(c.default_hub_height > 0))
    f.fail("vertical.default_hub_height", "must be positive");

  c.curve.cut_in = f.number("turbine.cut_in", c.curve.cut_in);
  c.curve.cut_out = f.number("turbine.cut_out", c.curve.cut_out);
  c.curve.cp = f.number("turbine.cp", c.curve.cp);
  c.curve.air_density = f.number("turbine.air_density", c.curve.air_density);
  if (!(c.curve.cut_in > 0) || !(c.curve.cut_out > c.curve.cut_in))
    f.fail("turbine.cut_out", "need 0 < cut_in < cut_out");
  if (!(c.curve.cp > 0) || !(c.curve.air_density > 0))
    f.fail("turbine.cp", "cp and air density must be positive");
  const std::string hub_model = f.get_or("turbine.hub_model", "coeffs");
  if (hub_model == "fit")
    c.hub_model = HubModelSource::fit;
  else if (hub_model == "coeffs")
    c.hub_model = HubModelSource::coeffs;
  else
    f.fail("turbine.hub_model", "expected fit or coeffs");
  if (f.has("turbine.hub_intercept") || f.has("turbine.hub_slope"))
    c.hub_coeffs = HubHeightModel{f.number("turbine.hub_intercept", 0.0),
                                  f.number("turbine.hub_slope", 0.0)};
  c.hub_floor = f.number("turbine.hub_floor", c.hub_floor);
  if (c.hub_model == HubModelSource::fit && c.input.hub_training.empty())
    f.fail("turbine.hub_model", "fit requires input.hub_training");

  c.max_station_km = f.number("biascorr.max_station_km", c.max_station_km);
  c.min_correlation = f.number("biascorr.min_correlation", c.min_correlation);
  const double run = f.number("biascorr.min_run_hours", double(c.min_run_hours));
  if (!(run >= 1))
    f.fail("biascorr.min_run_hours", "must be at least 1");
  c.min_run_hours = std::size_t(detail::to_int(f, "biascorr.min_run_hours", run));
  c.utc_offset_hours = detail::to_int(
      f, "biascorr.utc_offset_hours", f.number("biascorr.utc_offset_hours", 0));
  c.epoch_start_year = detail::to_int(
      f, "biascorr.epoch_start_year", f.number("biascorr.epoch_start_year", 1999));
  if (!(c.max_station_km >= 0))
    f.fail("biascorr.max_station_km", "must be non-negative");
  if (!(c.min_correlation >= -1 && c.min_correlation <= 1))
    f.fail("biascorr.min_correlation", "must lie in [-1, 1]");
  if (const auto v = f.get("biascorr.no_station_fallback")) {
    const auto m = parse_correction_method(*v);
    if (!m || (*m != CorrectionMethod::none && *m != CorrectionMethod::mean_gwa))
      f.fail("biascorr.no_station_fallback", "expected none or mean_gwa");
    c.no_station_fallback = *m;
  }

  c.country_label = f.get_or("fleet.country_label", c.country_label);
  c.capacity_correction = f.boolean("fleet.capacity_correction", c.capacity_correction);

  if (const auto v = f.get("simulation.start_date")) {
    c.start_date = parse_day(*v);
    if (!c.start_date)
      f.fail("simulation.start_date", "expected YYYY-MM-DD");
  }
  if (const auto v = f.get("simulation.end_date")) {
    c.end_date = parse_day(*v);
    if (!c.end_date)
      f.fail("simulation.end_date", "expected YYYY-MM-DD");
  }
  if (c.start_date && c.end_date && *c.end_date < *c.start_date)
    f.fail("simulation.end_date", "date range is empty");

  if (const auto v = f.get("output.dir"))
    c.out_dir = fs::path(*v).is_absolute() ? fs::path(*v) : base_dir / *v;
  c.daily_diff = f.boolean("output.daily_diff", c.daily_diff);
  c.max_fallback_fraction = f.number("pipeline.max_fallback_fraction", 1.0);
  if (!(c.max_fallback_fraction >= 0 && c.max_fallback_fraction <= 1))
    f.fail("pipeline.max_fallback_fraction", "must lie in [0, 1]");
  c.sweep_km = f.numbers("sweep.km_list", c.sweep_km);
  for (double km : c.sweep_km)
    if (!(km >= 0))
      f.fail("sweep.km_list", "distances must be non-negative");

  c.synthetic = synthetic_settings(f);

  if (c.input.grid.empty())
    f.fail("input.grid", "required");
  if (c.input.parks.empty())
    f.fail("input.parks", "required");
  auto uses = [&](CorrectionMethod m) {
    return std::find(c.corrections.begin(), c.corrections.end(), m) != c.corrections.end();
  };
  if ((uses(CorrectionMethod::mean_station) || uses(CorrectionMethod::hm_station)) &&
      (c.input.stations.empty() || c.input.measurements.empty()))
    f.fail("biascorr.method", "station corrections need input.stations and input.measurements");
  if ((uses(CorrectionMethod::mean_gwa) ||
       c.no_station_fallback == CorrectionMethod::mean_gwa) &&
      c.input.raster.empty())
    f.fail("biascorr.method", "mean_gwa needs input.raster");

  if (const auto extra = f.unused(); !extra.empty())
    f.fail(extra.front(), "unknown configuration key");
  c.hash = fnv1a64(f.text());
  return c;
}

inline RunConfig load_run_config(const fs::path &path) {
  const auto f = ConfigFile::load(path);
  return make_run_config(f, path.parent_path());
}

/// Applies a --method override. Accepts an interpolation name, a correction
/// name, or a full "interp:correction" tag.
inline void apply_method_override(RunConfig &c, std::string_view name) {
  if (const auto colon = name.find(':'); colon != std::string_view::npos) {
    apply_method_override(c, name.substr(0, colon));
    apply_method_override(c, name.substr(colon + 1));
    return;
  }
  if (const auto i = parse_interpolation(name))
    c.interpolations = {*i};
  else if (const auto m = parse_correction_method(name))
    c.corrections = {*m};
  else
    throw ConfigError("unknown method '" + std::string(name) + "'");
  c.hash = fnv1a64(name, fnv1a64("|", c.hash));
}

} // namespace windsim
