#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "windsim/biascorr.hpp"
#include "windsim/error.hpp"
#include "windsim/fleet.hpp"
#include "windsim/grid.hpp"
#include "windsim/series.hpp"
#include "windsim/time.hpp"
#include "windsim/validate.hpp"

namespace windsim::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- reading

/// Header-driven CSV reader. Fields are comma separated; double quotes may
/// enclose a field containing commas. Blank lines are skipped.
class CsvReader {
public:
  explicit CsvReader(const fs::path &path) : file_(path.string()), in_(path) {
    if (!in_)
      throw IngestError(file_, 0, "cannot open file");
    if (!read_line())
      throw IngestError(file_, 1, "empty file, header expected");
    header_ = fields_;
  }

  const std::string &file() const { return file_; }
  std::size_t line() const { return line_; }

  std::optional<std::size_t> optional_column(std::string_view name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end())
      return std::nullopt;
    return std::size_t(it - header_.begin());
  }

  std::size_t column(std::string_view name) const {
    if (auto c = optional_column(name))
      return *c;
    throw IngestError(file_, 1, "missing column '" + std::string(name) + "'");
  }

  /// Advances to the next data row. False at end of file.
  bool next() {
    if (!read_line())
      return false;
    if (fields_.size() != header_.size())
      fail("expected " + std::to_string(header_.size()) + " fields, found " +
           std::to_string(fields_.size()));
    return true;
  }

  std::string_view field(std::size_t c) const { return fields_[c]; }
  bool empty(std::size_t c) const { return fields_[c].empty(); }

  std::optional<double> optional_number(std::size_t c) const {
    const std::string &s = fields_[c];
    if (s.empty())
      return std::nullopt;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
      fail("column '" + header_[c] + "': not a number: '" + s + "'");
    return v;
  }

  double number(std::size_t c) const {
    if (auto v = optional_number(c))
      return *v;
    fail("column '" + header_[c] + "' is empty");
  }

  Day day(std::size_t c) const {
    if (auto d = parse_day(fields_[c]))
      return *d;
    fail("column '" + header_[c] + "': bad date '" + fields_[c] + "'");
  }

  Hour hour(std::size_t c) const {
    if (auto h = parse_hour(fields_[c]))
      return *h;
    fail("column '" + header_[c] + "': bad timestamp '" + fields_[c] + "'");
  }

  [[noreturn]] void fail(const std::string &what) const {
    throw IngestError(file_, line_, what);
  }

private:
  bool read_line() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      if (!raw.empty() && raw.back() == '\r')
        raw.pop_back();
      if (raw.find_first_not_of(" \t") == std::string::npos)
        continue;
      split(raw);
      return true;
    }
    return false;
  }

  void split(const std::string &raw) {
    fields_.clear();
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const char ch = raw[i];
      if (quoted) {
        if (ch == '"' && i + 1 < raw.size() && raw[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields_.push_back(trim(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (quoted)
      fail("unterminated quote");
    fields_.push_back(trim(cur));
  }

  static std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos)
      return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
  }

  std::string file_;
  std::ifstream in_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
};

// ---------------------------------------------------------------- writing

/// Numbers are written with 6 significant digits; absent values as empty.
inline std::string format_number(double v) {
  if (!std::isfinite(v))
    return {};
  std::ostringstream os;
  os.precision(6);
  os << v;
  std::string s = os.str();
  return s == "-0" ? "0" : s;
}

class CsvWriter {
public:
  CsvWriter(const fs::path &path, std::initializer_list<std::string_view> header)
      : path_(path) {
    if (path.has_parent_path())
      fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_)
      throw Error("cannot write " + path.string());
    bool first = true;
    for (auto h : header) {
      if (!first)
        out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... T> void row(const T &...fields) {
    bool first = true;
    ((out_ << (first ? "" : ","), put(fields), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_)
      throw Error("write failed: " + path_.string());
  }

private:
  void put(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
      out_ << s;
      return;
    }
    out_ << '"';
    for (char c : s) {
      if (c == '"')
        out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  void put(const std::string &s) { put(std::string_view(s)); }
  void put(const char *s) { put(std::string_view(s)); }
  void put(double v) { out_ << format_number(v); }
  void put(const std::optional<double> &v) {
    if (v)
      put(*v);
  }
  void put(std::size_t v) { out_ << v; }
  void put(int v) { out_ << v; }
  void put(Day d) { out_ << format_day(d); }
  void put(Hour h) { out_ << format_hour(h); }

  fs::path path_;
  std::ofstream out_;
};

// ---------------------------------------------------------------- grid

namespace detail {

inline bool close_to(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-6 * std::max(1.0, scale);
}

// Longitude step in (-180, 180], so grids crossing the antimeridian work.
inline double lon_step(double from, double to) {
  double d = std::fmod(to - from, 360.0);
  if (d <= -180.0)
    d += 360.0;
  if (d > 180.0)
    d -= 360.0;
  return d;
}

} // namespace detail

/// Reads `time,lat,lon,u10,v10,u50,v50,disph[,u2,v2]` rows ordered by
/// (time, lat, lon) with consecutive hourly time blocks. The displacement
/// height is taken from the first block; later deviations are warned once.
inline WindGrid read_wind_grid(const fs::path &path, Warnings *warnings = nullptr) {
  CsvReader r(path);
  const std::size_t ct = r.column("time"), cla = r.column("lat"), clo = r.column("lon"),
                    cu10 = r.column("u10"), cv10 = r.column("v10"),
                    cu50 = r.column("u50"), cv50 = r.column("v50"),
                    cd = r.column("disph");
  const auto cu2 = r.optional_column("u2"), cv2 = r.optional_column("v2");
  if (cu2.has_value() != cv2.has_value())
    throw IngestError(r.file(), 1, "columns u2 and v2 must appear together");
  const bool with2 = cu2.has_value();

  WindGrid::Components c;
  std::vector<double> disph;
  std::vector<double> lats, lons; // first-block node coordinates, row-major
  std::optional<Hour> start, block_time;
  std::size_t block_rows = 0, block_size = 0, n_times = 0;
  bool disph_varies = false;

  auto close_block = [&] {
    if (block_size == 0)
      block_size = block_rows;
    else if (block_rows != block_size)
      r.fail("time block has " + std::to_string(block_rows) + " rows, expected " +
             std::to_string(block_size));
  };

  while (r.next()) {
    const Hour t = r.hour(ct);
    if (!block_time) {
      start = block_time = t;
    } else if (t != *block_time) {
      if (t != *block_time + std::chrono::hours{1})
        r.fail("timestamps must advance by exactly one hour");
      close_block();
      block_time = t;
      block_rows = 0;
    }
    if (block_rows == 0)
      ++n_times;
    const double lat = r.number(cla), lon = r.number(clo);
    const std::size_t k = block_rows++;
    if (block_size == 0) {
      lats.push_back(lat);
      lons.push_back(lon);
      disph.push_back(r.number(cd));
    } else {
      if (k >= block_size)
        r.fail("time block has more rows than the first one");
      if (lat != lats[k] || lon != lons[k])
        r.fail("node coordinates differ from the first time block");
      if (!detail::close_to(r.number(cd), disph[k], disph[k]))
        disph_varies = true;
    }
    c.u10.push_back(r.number(cu10));
    c.v10.push_back(r.number(cv10));
    c.u50.push_back(r.number(cu50));
    c.v50.push_back(r.number(cv50));
    if (with2) {
      c.u2.push_back(r.number(*cu2));
      c.v2.push_back(r.number(*cv2));
    }
  }
  if (!start)
    throw IngestError(r.file(), r.line(), "grid file has no data rows");
  close_block();

  // Infer the geometry from the first block.
  std::size_t nlon = 1;
  while (nlon < lats.size() && lats[nlon] == lats[0])
    ++nlon;
  if (lats.size() % nlon != 0)
    throw IngestError(r.file(), 2, "first time block is not a complete lat x lon grid");
  GridGeometry g;
  g.nlon = nlon;
  g.nlat = lats.size() / nlon;
  g.lat0 = lats[0];
  g.lon0 = lons[0];
  g.dlat = g.nlat > 1 ? lats[nlon] - lats[0] : 1.0;
  g.dlon = nlon > 1 ? detail::lon_step(lons[0], lons[1]) : 1.0;
  if (!(g.dlat > 0.0) || !(g.dlon > 0.0))
    throw IngestError(r.file(), 2, "grid rows must be ordered by increasing lat, lon");
  for (std::size_t i = 0; i < g.nlat; ++i)
    for (std::size_t j = 0; j < nlon; ++j) {
      const std::size_t k = i * nlon + j;
      const double want_lat = g.lat0 + g.dlat * double(i);
      const double step = detail::lon_step(g.lon0, lons[k]);
      const double want_step = g.dlon * double(j);
      if (!detail::close_to(lats[k], want_lat, g.dlat * 1e3) ||
          !detail::close_to(std::fmod(step - want_step + 540.0, 360.0) - 180.0, 0.0,
                            g.dlon * 1e3))
        throw IngestError(r.file(), 2 + k, "grid nodes are not regularly spaced");
    }
  try {
    g.validate();
  } catch (const Error &e) {
    throw IngestError(r.file(), 2, e.what());
  }
  if (disph_varies && warnings)
    warnings->add(r.file() + ": displacement height varies in time; first time block used");
  return WindGrid(g, *start, n_times, std::move(c), std::move(disph));
}

inline void write_wind_grid(const fs::path &path, const WindGrid &w) {
  const bool with2 = w.has_2m();
  CsvWriter out(path, with2 ? std::initializer_list<std::string_view>{
                                  "time", "lat", "lon", "u10", "v10", "u50", "v50",
                                  "disph", "u2", "v2"}
                            : std::initializer_list<std::string_view>{
                                  "time", "lat", "lon", "u10", "v10", "u50", "v50",
                                  "disph"});
  const auto &g = w.geometry();
  const auto disph = w.displacement();
  for (std::size_t t = 0; t < w.n_times(); ++t) {
    const auto u10 = w.field(Component::u10, t), v10 = w.field(Component::v10, t),
               u50 = w.field(Component::u50, t), v50 = w.field(Component::v50, t);
    for (std::size_t i = 0; i < g.nlat; ++i)
      for (std::size_t j = 0; j < g.nlon; ++j) {
        const GridPoint p = g.node(i, j);
        if (with2)
          out.row(w.time(t), p.lat(), p.lon(), u10.at(i, j), v10.at(i, j), u50.at(i, j),
                  v50.at(i, j), disph.at(i, j), w.field(Component::u2, t).at(i, j),
                  w.field(Component::v2, t).at(i, j));
        else
          out.row(w.time(t), p.lat(), p.lon(), u10.at(i, j), v10.at(i, j), u50.at(i, j),
                  v50.at(i, j), disph.at(i, j));
      }
  }
  out.close();
}

// ---------------------------------------------------------------- raster

/// Reads `lat,lon,mean50[,mean100,mean200]` rows in any order covering a
/// complete regular grid.
inline MeanWindRaster read_raster(const fs::path &path) {
  CsvReader r(path);
  const std::size_t cla = r.column("lat"), clo = r.column("lon"), c50 = r.column("mean50");
  const auto c100 = r.optional_column("mean100"), c200 = r.optional_column("mean200");
  struct Row {
    double lat, lon, m50;
    std::optional<double> m100, m200;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (r.next()) {
    Row row{r.number(cla), r.number(clo), r.number(c50), std::nullopt, std::nullopt,
            r.line()};
    if (c100)
      row.m100 = r.number(*c100);
    if (c200)
      row.m200 = r.number(*c200);
    if (row.m50 < 0 || row.m100.value_or(0) < 0 || row.m200.value_or(0) < 0)
      r.fail("negative mean wind speed");
    rows.push_back(row);
  }
  if (rows.empty())
    throw IngestError(r.file(), r.line(), "raster file has no data rows");

  auto axis = [&](auto get) {
    std::vector<double> v;
    for (const auto &row : rows)
      v.push_back(get(row));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto lats = axis([](const Row &x) { return x.lat; });
  const auto lons = axis([](const Row &x) { return x.lon; });
  GridGeometry g;
  g.nlat = lats.size();
  g.nlon = lons.size();
  g.lat0 = lats.front();
  g.lon0 = lons.front();
  g.dlat = g.nlat > 1 ? lats[1] - lats[0] : 1.0;
  g.dlon = g.nlon > 1 ? lons[1] - lons[0] : 1.0;
  for (std::size_t i = 0; i < g.nlat; ++i)
    if (!detail::close_to(lats[i], g.lat0 + g.dlat * double(i), g.dlat * 1e3))
      throw IngestError(r.file(), 0, "raster latitudes are not regularly spaced");
  for (std::size_t j = 0; j < g.nlon; ++j)
    if (!detail::close_to(lons[j], g.lon0 + g.dlon * double(j), g.dlon * 1e3))
      throw IngestError(r.file(), 0, "raster longitudes are not regularly spaced");
  if (rows.size() != g.size())
    throw IngestError(r.file(), 0,
                      "raster has " + std::to_string(rows.size()) + " rows for " +
                          std::to_string(g.size()) + " grid cells");

  std::vector<double> m50(g.size(), -1.0), m100, m200;
  if (c100)
    m100.assign(g.size(), 0.0);
  if (c200)
    m200.assign(g.size(), 0.0);
  for (const auto &row : rows) {
    const auto i = std::size_t(std::lower_bound(lats.begin(), lats.end(), row.lat) - lats.begin());
    const auto j = std::size_t(std::lower_bound(lons.begin(), lons.end(), row.lon) - lons.begin());
    const std::size_t k = g.flat(i, j);
    if (m50[k] >= 0.0)
      throw IngestError(r.file(), row.line, "duplicate raster cell");
    m50[k] = row.m50;
    if (c100)
      m100[k] = *row.m100;
    if (c200)
      m200[k] = *row.m200;
  }
  try {
    return MeanWindRaster(g, std::move(m50), std::move(m100), std::move(m200));
  } catch (const IngestError &) {
    throw;
  } catch (const Error &e) {
    throw IngestError(r.file(), 0, e.what());
  }
}

inline void write_raster(const fs::path &path, const MeanWindRaster &r) {
  const bool h100 = r.has(HeightTag::m100), h200 = r.has(HeightTag::m200);
  if (h200 && !h100)
    throw Error("raster writer: mean200 without mean100 is not supported");
  CsvWriter out(path, h200   ? std::initializer_list<std::string_view>{"lat", "lon", "mean50",
                                                                     "mean100", "mean200"}
                      : h100 ? std::initializer_list<std::string_view>{"lat", "lon", "mean50",
                                                                       "mean100"}
                             : std::initializer_list<std::string_view>{"lat", "lon", "mean50"});
  const auto &g = r.geometry();
  for (std::size_t i = 0; i < g.nlat; ++i)
    for (std::size_t j = 0; j < g.nlon; ++j) {
      const std::size_t k = g.flat(i, j);
      const double lat = g.lat0 + g.dlat * double(i), lon = g.lon0 + g.dlon * double(j);
      const double m50 = r.layer(HeightTag::m50)[k];
      if (h200)
        out.row(lat, lon, m50, r.layer(HeightTag::m100)[k], r.layer(HeightTag::m200)[k]);
      else if (h100)
        out.row(lat, lon, m50, r.layer(HeightTag::m100)[k]);
      else
        out.row(lat, lon, m50);
    }
  out.close();
}

// ---------------------------------------------------------------- parks

struct ExcludedPark {
  std::string park_id;
  std::string reason;
};

struct ParkTable {
  std::vector<WindPark> parks; // file order
  std::vector<ExcludedPark> excluded;
};

/// Reads the park registry. Parks lacking state, coordinates, subsystem,
/// capacity or commissioning date are excluded with a reason; malformed
/// values abort with the offending line.
inline ParkTable read_parks(const fs::path &path, Warnings *warnings = nullptr) {
  CsvReader r(path);
  const std::size_t cid = r.column("park_id"), cname = r.column("name"),
                    cla = r.column("lat"), clo = r.column("lon"), cst = r.column("state"),
                    csub = r.column("subsystem"), ccap = r.column("capacity_mw"),
                    cn = r.column("n_turbines"), ckw = r.column("turbine_kw"),
                    cdia = r.column("rotor_diameter_m"), chub = r.column("hub_height_m"),
                    ccom = r.column("commissioning_date");
  ParkTable out;
  std::set<std::string> ids;
  while (r.next()) {
    const std::string id(r.field(cid));
    if (id.empty())
      r.fail("empty park_id");
    if (!ids.insert(id).second)
      r.fail("duplicate park_id '" + id + "'");
    auto exclude = [&](std::string why) {
      out.excluded.push_back({id, why});
      if (warnings)
        warnings->add("park " + id + " excluded: " + why);
    };
    const auto lat = r.optional_number(cla), lon = r.optional_number(clo);
    const auto cap = r.optional_number(ccap);
    const auto n = r.optional_number(cn), kw = r.optional_number(ckw);
    const auto dia = r.optional_number(cdia), hub = r.optional_number(chub);
    const std::optional<Day> com =
        r.empty(ccom) ? std::nullopt : std::optional<Day>(r.day(ccom));
    if (r.empty(cst)) {
      exclude("missing state");
      continue;
    }
    if (!lat || !lon) {
      exclude("missing coordinates");
      continue;
    }
    if (!com) {
      exclude("missing commissioning date");
      continue;
    }
    if (!cap) {
      exclude("missing installed capacity");
      continue;
    }
    const auto sub = parse_subsystem(r.field(csub));
    if (!sub) {
      exclude("unknown subsystem '" + std::string(r.field(csub)) + "'");
      continue;
    }
    if (!(*lat >= -90 && *lat <= 90) || !(*lon >= -180 && *lon < 360))
      r.fail("coordinates out of range");
    if (n && (*n < 1 || *n != std::floor(*n)))
      r.fail("n_turbines must be a positive integer");
    if ((kw && !(*kw > 0)) || (dia && !(*dia > 0)) || (hub && !(*hub > 0)))
      r.fail("turbine dimensions must be positive");

    WindPark p;
    p.park_id = id;
    p.name = std::string(r.field(cname));
    p.location = GridPoint(*lat, *lon);
    p.state = std::string(r.field(cst));
    p.subsystem = *sub;
    p.installed_capacity_mw = *cap;
    if (n)
      p.n_turbines = std::size_t(*n);
    else if (kw)
      p.n_turbines = std::max<std::size_t>(1, std::size_t(std::lround(*cap * 1000 / *kw)));
    p.turbine.capacity_kw = kw ? *kw : *cap * 1000 / double(p.n_turbines);
    p.turbine.rotor_diameter_m = dia;
    p.turbine.hub_height_m = hub;
    if (dia)
      p.turbine.specific_power = specific_power(p.turbine.capacity_kw, *dia);
    p.turbine.install_year = year_of(*com);
    p.commissioning_date = *com;
    try {
      if (auto w = check_park(p); w && warnings)
        warnings->add(*w);
    } catch (const Error &e) {
      r.fail(e.what());
    }
    out.parks.push_back(std::move(p));
  }
  return out;
}

inline void write_parks(const fs::path &path, std::span<const WindPark> parks) {
  CsvWriter out(path, {"park_id", "name", "lat", "lon", "state", "subsystem",
                       "capacity_mw", "n_turbines", "turbine_kw", "rotor_diameter_m",
                       "hub_height_m", "commissioning_date"});
  for (const auto &p : parks)
    out.row(p.park_id, p.name, p.location.lat(), p.location.lon(), p.state,
            to_string(p.subsystem), p.installed_capacity_mw, p.n_turbines,
            p.turbine.capacity_kw, p.turbine.rotor_diameter_m, p.turbine.hub_height_m,
            p.commissioning_date);
  out.close();
}

// ---------------------------------------------------------------- stations

inline std::vector<StationSite> read_stations(const fs::path &path) {
  CsvReader r(path);
  const std::size_t cid = r.column("station_id"), cla = r.column("lat"),
                    clo = r.column("lon");
  std::vector<StationSite> out;
  std::set<std::string> ids;
  while (r.next()) {
    const std::string id(r.field(cid));
    if (id.empty() || !ids.insert(id).second)
      r.fail("empty or duplicate station_id '" + id + "'");
    const double lat = r.number(cla), lon = r.number(clo);
    if (!(lat >= -90 && lat <= 90) || !(lon >= -180 && lon < 360))
      r.fail("coordinates out of range");
    out.push_back({id, GridPoint(lat, lon)});
  }
  return out;
}

inline void write_stations(const fs::path &path, std::span<const StationSite> stations) {
  CsvWriter out(path, {"station_id", "lat", "lon"});
  for (const auto &s : stations)
    out.row(s.station_id, s.location.lat(), s.location.lon());
  out.close();
}

/// Reads `station_id,time,speed_10m` rows in any order into one contiguous
/// hourly series per station, spanning its first to last row. Hours without
/// a row and empty speeds are missing.
inline std::map<std::string, StationSeries>
read_measurements(const fs::path &path, std::span<const StationSite> stations) {
  std::map<std::string, const StationSite *> by_id;
  for (const auto &s : stations)
    by_id.emplace(s.station_id, &s);

  CsvReader r(path);
  const std::size_t cid = r.column("station_id"), ct = r.column("time"),
                    cv = r.column("speed_10m");
  struct Sample {
    Hour t;
    double v;
    std::size_t line;
  };
  std::map<std::string, std::vector<Sample>> rows;
  while (r.next()) {
    const std::string id(r.field(cid));
    if (!by_id.contains(id))
      r.fail("measurement for unknown station '" + id + "'");
    const double v = r.optional_number(cv).value_or(kMissing);
    if (v < 0)
      r.fail("negative wind speed");
    rows[id].push_back({r.hour(ct), v, r.line()});
  }

  std::map<std::string, StationSeries> out;
  for (auto &[id, samples] : rows) {
    std::sort(samples.begin(), samples.end(),
              [](const Sample &a, const Sample &b) { return a.t < b.t; });
    StationSeries s{id, by_id.at(id)->location, HourlySeries{samples.front().t, {}}};
    s.speed.values.assign(std::size_t((samples.back().t - samples.front().t).count()) + 1,
                          kMissing);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (k > 0 && samples[k].t == samples[k - 1].t)
        throw IngestError(r.file(), samples[k].line,
                          "duplicate measurement for station '" + id + "'");
      s.speed.values[*s.speed.index_of(samples[k].t)] = samples[k].v;
    }
    out.emplace(id, std::move(s));
  }
  return out;
}

inline void write_measurements(const fs::path &path,
                               const std::map<std::string, StationSeries> &series) {
  CsvWriter out(path, {"station_id", "time", "speed_10m"});
  for (const auto &[id, s] : series)
    for (std::size_t i = 0; i < s.speed.size(); ++i)
      out.row(id, s.speed.time(i), s.speed.values[i]);
  out.close();
}

// ---------------------------------------------------------------- daily series

/// Reads `region,date,<value_column>` rows in any order, one series per region.
template <class Unit>
std::map<std::string, DailySeries<Unit>> read_daily(const fs::path &path,
                                                    std::string_view value_column) {
  CsvReader r(path);
  const std::size_t creg = r.column("region"), cd = r.column("date"),
                    cv = r.column(value_column);
  std::map<std::string, std::vector<std::tuple<Day, double, std::size_t>>> rows;
  while (r.next()) {
    const std::string region(r.field(creg));
    if (region.empty())
      r.fail("empty region");
    const double v = r.number(cv);
    if (v < 0)
      r.fail("negative " + std::string(value_column));
    rows[region].emplace_back(r.day(cd), v, r.line());
  }
  std::map<std::string, DailySeries<Unit>> out;
  for (auto &[region, v] : rows) {
    std::sort(v.begin(), v.end());
    DailySeries<Unit> s;
    s.label = region;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k > 0 && std::get<0>(v[k]) == std::get<0>(v[k - 1]))
        throw IngestError(r.file(), std::get<2>(v[k]),
                          "duplicate date for region '" + region + "'");
      s.dates.push_back(std::get<0>(v[k]));
      s.values.push_back(std::get<1>(v[k]));
    }
    out.emplace(region, std::move(s));
  }
  return out;
}

template <class Unit>
void write_daily(const fs::path &path, std::string_view value_column,
                 const std::map<std::string, DailySeries<Unit>> &series) {
  CsvWriter out(path, {"region", "date", value_column});
  for (const auto &[region, s] : series)
    for (std::size_t i = 0; i < s.size(); ++i)
      out.row(region, s.dates[i], s.values[i]);
  out.close();
}

inline std::map<std::string, GenerationSeries> read_generation(const fs::path &path) {
  return read_daily<GigawattHourUnit>(path, "generation_gwh");
}

inline std::map<std::string, CapacitySeries> read_capacity(const fs::path &path) {
  return read_daily<MegawattUnit>(path, "capacity_mw");
}

inline void write_generation(const fs::path &path,
                             const std::map<std::string, GenerationSeries> &s) {
  write_daily(path, "generation_gwh", s);
}

inline void write_capacity(const fs::path &path,
                           const std::map<std::string, CapacitySeries> &s) {
  write_daily(path, "capacity_mw", s);
}

// ---------------------------------------------------------------- hub heights

inline std::vector<std::pair<double, double>> read_hub_training(const fs::path &path) {
  CsvReader r(path);
  const std::size_t cd = r.column("diameter_m"), ch = r.column("hub_height_m");
  std::vector<std::pair<double, double>> out;
  while (r.next()) {
    const double d = r.number(cd), h = r.number(ch);
    if (!(d > 0) || !(h > 0))
      r.fail("diameter and hub height must be positive");
    out.emplace_back(d, h);
  }
  return out;
}

inline void write_hub_training(const fs::path &path,
                               std::span<const std::pair<double, double>> rows) {
  CsvWriter out(path, {"diameter_m", "hub_height_m"});
  for (const auto &[d, h] : rows)
    out.row(d, h);
  out.close();
}

// ---------------------------------------------------------------- reports

inline void write_reports(const fs::path &path, std::span<const MetricReport> reports) {
  CsvWriter out(path, {"region", "method", "n_days", "correlation", "rmse_gwh", "mbe_gwh",
                       "mean_sim_gwh", "mean_obs_gwh", "mean_capacity_mw", "rel_rmse",
                       "rel_mbe"});
  for (const auto &r : reports)
    out.row(r.region, r.method, r.n_days, r.correlation, r.rmse, r.mbe, r.mean_sim,
            r.mean_obs, r.mean_capacity, r.rel_rmse, r.rel_mbe);
  out.close();
}

/// Inverse of write_reports. The report window is not stored.
inline std::vector<MetricReport> read_reports(const fs::path &path) {
  CsvReader r(path);
  const std::size_t creg = r.column("region"), cm = r.column("method"),
                    cn = r.column("n_days"), cc = r.column("correlation"),
                    crm = r.column("rmse_gwh"), cmb = r.column("mbe_gwh"),
                    cs = r.column("mean_sim_gwh"), co = r.column("mean_obs_gwh"),
                    ccap = r.column("mean_capacity_mw"), crr = r.column("rel_rmse"),
                    crb = r.column("rel_mbe");
  std::vector<MetricReport> out;
  while (r.next()) {
    MetricReport m;
    m.region = std::string(r.field(creg));
    m.method = std::string(r.field(cm));
    const double n = r.number(cn);
    if (n < 0 || n != std::floor(n))
      r.fail("n_days must be a non-negative integer");
    m.n_days = std::size_t(n);
    m.correlation = r.optional_number(cc);
    m.rmse = r.number(crm);
    m.mbe = r.number(cmb);
    m.mean_sim = r.number(cs);
    m.mean_obs = r.number(co);
    m.mean_capacity = r.optional_number(ccap);
    m.rel_rmse = r.optional_number(crr);
    m.rel_mbe = r.optional_number(crb);
    out.push_back(std::move(m));
  }
  return out;
}

} // namespace windsim::io
