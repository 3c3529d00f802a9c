#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windsim/error.hpp"
#include "windsim/time.hpp"

namespace windsim {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Geographic point in degrees. Longitude is normalized to [-180, 180).
class GridPoint {
public:
  GridPoint() = default;
  GridPoint(double lat, double lon) : lat_(lat), lon_(normalize_lon(lon)) {
    if (!(lat >= -90.0 && lat <= 90.0))
      throw DegenerateInputError("latitude out of range: " + std::to_string(lat));
    if (!(lon >= -180.0 && lon < 360.0))
      throw DegenerateInputError("longitude out of range: " + std::to_string(lon));
  }

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GridPoint &, const GridPoint &) = default;

  static double normalize_lon(double lon) {
    double x = std::fmod(lon + 180.0, 360.0);
    if (x < 0.0)
      x += 360.0;
    return x - 180.0;
  }

private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Great-circle distance on a sphere of radius 6371 km.
inline double haversine_km(const GridPoint &a, const GridPoint &b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dphi = (b.lat() - a.lat()) * deg;
  const double dlam = (b.lon() - a.lon()) * deg;
  const double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlam / 2.0);
  double h = s1 * s1 + std::cos(a.lat() * deg) * std::cos(b.lat() * deg) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

struct CellIndex {
  std::size_t lat = 0;
  std::size_t lon = 0;
  friend auto operator<=>(const CellIndex &, const CellIndex &) = default;
};

/// Regular lat-lon node layout with a south-west origin.
struct GridGeometry {
  double lat0 = 0.0;
  double lon0 = 0.0;
  double dlat = 1.0;
  double dlon = 1.0;
  std::size_t nlat = 0;
  std::size_t nlon = 0;

  void validate() const {
    if (!(dlat > 0.0) || !(dlon > 0.0))
      throw DegenerateInputError("grid spacing must be positive");
    if (nlat < 1 || nlon < 1)
      throw DegenerateInputError("grid has no nodes");
    if (lat0 < -90.0 || lat0 + dlat * double(nlat - 1) > 90.0 + 1e-9)
      throw DegenerateInputError("grid latitudes leave [-90, 90]");
    if (dlon * double(nlon - 1) >= 360.0)
      throw DegenerateInputError("grid wraps more than once in longitude");
  }

  std::size_t size() const { return nlat * nlon; }
  std::size_t flat(std::size_t i, std::size_t j) const { return i * nlon + j; }

  GridPoint node(std::size_t i, std::size_t j) const {
    return GridPoint{lat0 + dlat * double(i),
                     GridPoint::normalize_lon(lon0 + dlon * double(j))};
  }

  /// Fractional (lat, lon) node index of a point. Longitude offsets are
  /// taken in [-dlon/2, 360 - dlon/2) so grids given in 0..360 work.
  std::array<double, 2> fractional_index(const GridPoint &p) const {
    double dl = std::fmod(p.lon() - lon0 + 0.5 * dlon, 360.0);
    if (dl < 0.0)
      dl += 360.0;
    dl -= 0.5 * dlon;
    return {(p.lat() - lat0) / dlat, dl / dlon};
  }
};

/// One 2-D field (a single component at a single hour) over a geometry.
struct GridField {
  const GridGeometry *geometry = nullptr;
  std::span<const double> values;

  double at(std::size_t i, std::size_t j) const {
    return values[geometry->flat(i, j)];
  }
};

enum class Interpolation { nearest, bilinear, bicubic, idw };

inline std::string_view to_string(Interpolation m) {
  switch (m) {
  case Interpolation::nearest:
    return "nn";
  case Interpolation::bilinear:
    return "bli";
  case Interpolation::bicubic:
    return "bci";
  case Interpolation::idw:
    return "idw";
  }
  return "?";
}

inline std::optional<Interpolation> parse_interpolation(std::string_view s) {
  if (s == "nn")
    return Interpolation::nearest;
  if (s == "bli")
    return Interpolation::bilinear;
  if (s == "bci")
    return Interpolation::bicubic;
  if (s == "idw")
    return Interpolation::idw;
  return std::nullopt;
}

/// Interpolation as a weighted sum of node values. Every supported method is
/// linear in the field, so one stencil serves all hours and components.
struct Stencil {
  struct Term {
    std::size_t node; // flat index
    double weight;
  };
  std::vector<Term> terms;

  double apply(std::span<const double> field) const {
    double s = 0.0;
    for (const auto &t : terms)
      s += t.weight * field[t.node];
    return s;
  }
};

namespace detail {

inline constexpr double kIndexTol = 1e-9;
inline constexpr double kNodeSnap = 1e-10;

inline std::string describe(const GridPoint &p) {
  return "(" + std::to_string(p.lat()) + ", " + std::to_string(p.lon()) + ")";
}

// Lower node index and offset in [0, 1] of the cell enclosing `f`, for a
// stencil reaching `below` nodes under and `above` nodes over the lower node.
inline std::optional<std::pair<std::size_t, double>>
enclosing(double f, std::size_t n, std::size_t below, std::size_t above) {
  const double lo = double(below);
  const double hi = double(n) - 1.0 - double(above) + 1.0;
  if (n < below + above + 1 || f < lo - kIndexTol || f > hi + kIndexTol)
    return std::nullopt;
  // rounding noise in the index must not leak weight off an exact node
  if (const double r = std::round(f); std::abs(f - r) <= kNodeSnap)
    f = r;
  f = std::clamp(f, lo, hi);
  auto i0 = std::size_t(std::floor(f));
  if (i0 + above > n - 1)
    i0 = n - 1 - above;
  return std::pair{i0, f - double(i0)};
}

// Cubic Lagrange weights for nodes at -1, 0, 1, 2 evaluated at t.
inline std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

} // namespace detail

/// Node with the smallest great-circle distance to `p`; ties go to the smaller
/// lat index, then the smaller lon index. Accepts points up to half a cell
/// outside the node bounding box.
inline CellIndex nearest_cell(const GridGeometry &g, const GridPoint &p) {
  const auto [fi, fj] = g.fractional_index(p);
  const double tol = detail::kIndexTol;
  if (fi < -0.5 - tol || fi > double(g.nlat) - 0.5 + tol || fj < -0.5 - tol ||
      fj > double(g.nlon) - 0.5 + tol)
    throw OutOfDomainError("point " + detail::describe(p) + " outside grid");
  // Distance grows with |dlon| on every row, so the nearest column is the same
  // for all rows; only the rows need an exhaustive scan.
  const double jc = std::ceil(fj - 0.5);
  const auto j = std::size_t(std::clamp(jc, 0.0, double(g.nlon - 1)));
  CellIndex best{0, j};
  double best_d = haversine_km(g.node(0, j), p);
  for (std::size_t i = 1; i < g.nlat; ++i) {
    const double d = haversine_km(g.node(i, j), p);
    if (d < best_d - 1e-9) {
      best_d = d;
      best = {i, j};
    }
  }
  return best;
}

inline Stencil nearest_stencil(const GridGeometry &g, const GridPoint &p) {
  const auto c = nearest_cell(g, p);
  return Stencil{{{g.flat(c.lat, c.lon), 1.0}}};
}

/// Separable linear weights: along longitude first, then latitude.
inline Stencil bilinear_stencil(const GridGeometry &g, const GridPoint &p) {
  const auto [fi, fj] = g.fractional_index(p);
  const auto ci = detail::enclosing(fi, g.nlat, 0, 1);
  const auto cj = detail::enclosing(fj, g.nlon, 0, 1);
  if (!ci || !cj)
    throw OutOfDomainError("point " + detail::describe(p) +
                           " outside bilinear domain");
  const auto [i0, ty] = *ci;
  const auto [j0, tx] = *cj;
  return Stencil{{{g.flat(i0, j0), (1.0 - ty) * (1.0 - tx)},
                  {g.flat(i0, j0 + 1), (1.0 - ty) * tx},
                  {g.flat(i0 + 1, j0), ty * (1.0 - tx)},
                  {g.flat(i0 + 1, j0 + 1), ty * tx}}};
}

/// Separable cubic Lagrange weights over the 4x4 neighbourhood.
inline Stencil bicubic_stencil(const GridGeometry &g, const GridPoint &p) {
  const auto [fi, fj] = g.fractional_index(p);
  const auto ci = detail::enclosing(fi, g.nlat, 1, 2);
  const auto cj = detail::enclosing(fj, g.nlon, 1, 2);
  if (!ci || !cj)
    throw OutOfDomainError("point " + detail::describe(p) +
                           " has no full 4x4 neighbourhood");
  const auto [i0, ty] = *ci;
  const auto [j0, tx] = *cj;
  const auto wy = detail::cubic_weights(ty);
  const auto wx = detail::cubic_weights(tx);
  Stencil s;
  s.terms.reserve(16);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      s.terms.push_back({g.flat(i0 + a - 1, j0 + b - 1), wy[a] * wx[b]});
  return s;
}

/// Weighted mean with weights 1/d. A zero distance returns that value alone.
inline double inverse_distance_mean(std::span<const double> values,
                                    std::span<const double> distances) {
  if (values.size() != distances.size() || values.empty())
    throw DegenerateInputError("inverse_distance_mean: bad input sizes");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (distances[k] == 0.0)
      return values[k];
    num += values[k] / distances[k];
    den += 1.0 / distances[k];
  }
  return num / den;
}

/// Inverse-distance weights (exponent 1) over the four enclosing nodes.
inline Stencil idw_stencil(const GridGeometry &g, const GridPoint &p) {
  const auto [fi, fj] = g.fractional_index(p);
  const auto ci = detail::enclosing(fi, g.nlat, 0, 1);
  const auto cj = detail::enclosing(fj, g.nlon, 0, 1);
  if (!ci || !cj)
    throw OutOfDomainError("point " + detail::describe(p) + " outside IDW domain");
  const std::size_t i0 = ci->first, j0 = cj->first;
  Stencil s;
  double den = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double d = haversine_km(g.node(i0 + a, j0 + b), p);
      if (d == 0.0)
        return Stencil{{{g.flat(i0 + a, j0 + b), 1.0}}};
      s.terms.push_back({g.flat(i0 + a, j0 + b), 1.0 / d});
      den += 1.0 / d;
    }
  }
  for (auto &t : s.terms)
    t.weight /= den;
  return s;
}

inline Stencil make_stencil(Interpolation m, const GridGeometry &g,
                            const GridPoint &p) {
  switch (m) {
  case Interpolation::nearest:
    return nearest_stencil(g, p);
  case Interpolation::bilinear:
    return bilinear_stencil(g, p);
  case Interpolation::bicubic:
    return bicubic_stencil(g, p);
  case Interpolation::idw:
    return idw_stencil(g, p);
  }
  throw Error("unknown interpolation method");
}

inline double bilinear(const GridField &f, const GridPoint &p) {
  const auto [fi, fj] = f.geometry->fractional_index(p);
  const auto ci = detail::enclosing(fi, f.geometry->nlat, 0, 1);
  const auto cj = detail::enclosing(fj, f.geometry->nlon, 0, 1);
  if (!ci || !cj)
    throw OutOfDomainError("point " + detail::describe(p) +
                           " outside bilinear domain");
  const auto [i0, ty] = *ci;
  const auto [j0, tx] = *cj;
  const double south = f.at(i0, j0) + tx * (f.at(i0, j0 + 1) - f.at(i0, j0));
  const double north =
      f.at(i0 + 1, j0) + tx * (f.at(i0 + 1, j0 + 1) - f.at(i0 + 1, j0));
  return south + ty * (north - south);
}

struct BicubicResult {
  double value;
  bool negative; ///< value < 0; the value itself is left unclamped
};

inline BicubicResult bicubic(const GridField &f, const GridPoint &p) {
  const double v = bicubic_stencil(*f.geometry, p).apply(f.values);
  return {v, v < 0.0};
}

inline double idw(const GridField &f, const GridPoint &p) {
  return idw_stencil(*f.geometry, p).apply(f.values);
}

inline double nearest(const GridField &f, const GridPoint &p) {
  const auto c = nearest_cell(*f.geometry, p);
  return f.at(c.lat, c.lon);
}

enum class Component { u10, v10, u50, v50, u2, v2 };

/// Hourly u/v wind components at 10 m above displacement height and 50 m
/// above ground (optionally 2 m above displacement height), plus a
/// time-invariant displacement height per node.
class WindGrid {
public:
  struct Components {
    std::vector<double> u10, v10, u50, v50;
    std::vector<double> u2, v2; // optional, both empty when absent
  };

  WindGrid(GridGeometry geometry, Hour start, std::size_t n_times,
           Components c, std::vector<double> disph)
      : geometry_(geometry), start_(start), n_times_(n_times),
        disph_(std::move(disph)) {
    geometry_.validate();
    const std::size_t n = geometry_.size() * n_times_;
    if (c.u10.size() != n || c.v10.size() != n || c.u50.size() != n ||
        c.v50.size() != n)
      throw DegenerateInputError("wind grid component size mismatch");
    if (c.u2.size() != c.v2.size() || (!c.u2.empty() && c.u2.size() != n))
      throw DegenerateInputError("wind grid 2 m component size mismatch");
    if (disph_.size() != geometry_.size())
      throw DegenerateInputError("displacement height size mismatch");
    for (double d : disph_)
      if (!(d >= 0.0))
        throw DegenerateInputError("negative displacement height");
    data_ = {std::move(c.u10), std::move(c.v10), std::move(c.u50),
             std::move(c.v50), std::move(c.u2),  std::move(c.v2)};
  }

  const GridGeometry &geometry() const { return geometry_; }
  Hour start() const { return start_; }
  std::size_t n_times() const { return n_times_; }
  Hour time(std::size_t t) const { return start_ + std::chrono::hours{t}; }
  bool has_2m() const { return !data_[4].empty(); }

  GridField field(Component c, std::size_t t) const {
    const auto &v = data_[std::size_t(c)];
    if (v.empty())
      throw Error("wind grid has no 2 m components");
    return {&geometry_, std::span<const double>(v).subspan(t * geometry_.size(),
                                                           geometry_.size())};
  }

  GridField displacement() const { return {&geometry_, disph_}; }

private:
  GridGeometry geometry_;
  Hour start_;
  std::size_t n_times_;
  std::array<std::vector<double>, 6> data_;
  std::vector<double> disph_;
};

enum class HeightTag { m50, m100, m200 };

inline HeightTag parse_height_tag(std::string_view s) {
  if (s == "50" || s == "mean50")
    return HeightTag::m50;
  if (s == "100" || s == "mean100")
    return HeightTag::m100;
  if (s == "200" || s == "mean200")
    return HeightTag::m200;
  throw Error("unknown raster height tag: " + std::string(s));
}

/// Long-term mean wind speeds on a fine grid at 50 m (100 m and 200 m optional).
class MeanWindRaster {
public:
  MeanWindRaster(GridGeometry geometry, std::vector<double> mean50,
                 std::vector<double> mean100 = {},
                 std::vector<double> mean200 = {})
      : geometry_(geometry),
        means_{std::move(mean50), std::move(mean100), std::move(mean200)} {
    geometry_.validate();
    if (means_[0].size() != geometry_.size())
      throw DegenerateInputError("raster mean50 size mismatch");
    for (const auto &m : means_) {
      if (!m.empty() && m.size() != geometry_.size())
        throw DegenerateInputError("raster layer size mismatch");
      for (double v : m)
        if (!(v >= 0.0))
          throw DegenerateInputError("raster mean must be non-negative");
    }
  }

  const GridGeometry &geometry() const { return geometry_; }
  bool has(HeightTag t) const { return !means_[std::size_t(t)].empty(); }
  std::span<const double> layer(HeightTag t) const {
    if (!has(t))
      throw Error("raster has no layer for requested height");
    return means_[std::size_t(t)];
  }

private:
  GridGeometry geometry_;
  std::array<std::vector<double>, 3> means_;
};

inline double raster_lookup(const MeanWindRaster &r, const GridPoint &p,
                            HeightTag tag) {
  const auto layer = r.layer(tag);
  const auto c = nearest_cell(r.geometry(), p);
  return layer[r.geometry().flat(c.lat, c.lon)];
}

} // namespace windsim
