#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windsim/error.hpp"

namespace windsim {

inline double effective_speed(double u, double v) { return std::hypot(u, v); }

/// Power-law shear exponent and the two heights it was derived from.
struct ShearParams {
  double alpha = 1.0 / 7.0;
  double h_lo = 10.0;
  double h_hi = 50.0;
};

/// alpha = ln(w_hi / w_lo) / ln(h_hi / h_lo).
inline ShearParams shear_exponent(double w_lo, double h_lo, double w_hi,
                                  double h_hi) {
  if (!(w_lo > 0.0) || !(w_hi > 0.0))
    throw DegenerateInputError("shear exponent needs positive wind speeds");
  if (!(h_lo > 0.0) || !(h_hi > h_lo))
    throw DegenerateInputError("shear exponent needs 0 < h_lo < h_hi");
  return {std::log(w_hi / w_lo) / std::log(h_hi / h_lo), h_lo, h_hi};
}

inline double power_law_extrapolate(double w_ref, double h_ref, double h_target,
                                    double alpha) {
  if (!(h_ref > 0.0) || !(h_target > 0.0))
    throw DegenerateInputError("power law needs positive heights");
  if (h_target == h_ref)
    return w_ref;
  return w_ref * std::pow(h_target / h_ref, alpha);
}

/// Speed profile w(h) = a + b ln(h).
struct LogProfileFit {
  double a = 0.0;
  double b = 0.0;
};

/// Ordinary least squares of speed on ln(height).
inline LogProfileFit log_profile_fit(std::span<const double> heights,
                                     std::span<const double> speeds) {
  if (heights.size() != speeds.size())
    throw DegenerateInputError("log profile: heights and speeds differ in length");
  for (double h : heights)
    if (!(h > 0.0))
      throw DegenerateInputError("log profile: heights must be positive");
  const std::size_t n = heights.size();
  if (n < 2)
    throw RankDeficiencyError("log profile needs two distinct heights");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(heights[k]);
    my += speeds[k];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(heights[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (speeds[k] - my);
  }
  if (!(sxx > 0.0))
    throw RankDeficiencyError("log profile needs two distinct heights");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

struct ProfileValue {
  double value;
  bool negative; ///< value < 0; the value itself is left unclamped
};

inline ProfileValue log_profile_predict(const LogProfileFit &fit,
                                        double h_target) {
  const double v = fit.a + fit.b * std::log(h_target);
  return {v, v < 0.0};
}

/// How hub-height speeds are derived from the model levels.
enum class VerticalMethod {
  power_law_10_50,   // alpha from 10 m+disp / 50 m, extrapolate from 50 m
  power_law_2_10,    // alpha from 2 m+disp / 10 m+disp, extrapolate from 10 m+disp
  power_law_2_10_50, // alpha from 2 m+disp / 10 m+disp, extrapolate from 50 m
  log_profile,       // least squares on ln(h) through all three levels
};

inline std::string_view to_string(VerticalMethod m) {
  switch (m) {
  case VerticalMethod::power_law_10_50:
    return "power_law_10_50";
  case VerticalMethod::power_law_2_10:
    return "power_law_2_10";
  case VerticalMethod::power_law_2_10_50:
    return "power_law_2_10_50";
  case VerticalMethod::log_profile:
    return "log_profile";
  }
  return "?";
}

inline std::optional<VerticalMethod> parse_vertical_method(std::string_view s) {
  for (auto m : {VerticalMethod::power_law_10_50, VerticalMethod::power_law_2_10,
                 VerticalMethod::power_law_2_10_50, VerticalMethod::log_profile})
    if (to_string(m) == s)
      return m;
  return std::nullopt;
}

inline bool needs_2m_level(VerticalMethod m) {
  return m != VerticalMethod::power_law_10_50;
}

/// Effective speeds of one hour at the model levels of one location.
struct LevelSpeeds {
  double w10 = 0.0;              // 10 m above displacement height
  double w50 = 0.0;              // 50 m above ground
  std::optional<double> w2;      // 2 m above displacement height
  double displacement = 0.0;     // m
};

/// Speed at `h_target` metres above ground together with whether the
/// fallback exponent was substituted or the profile went negative.
struct ExtrapolatedSpeed {
  double value = 0.0;
  bool used_fallback = false;
  bool negative = false;
};

namespace detail {

inline double alpha_or_fallback(double w_lo, double h_lo, double w_hi,
                                double h_hi, double fallback, bool &used) {
  if (w_lo > 0.0 && w_hi > 0.0 && h_lo > 0.0 && h_hi > h_lo)
    return shear_exponent(w_lo, h_lo, w_hi, h_hi).alpha;
  used = true;
  return fallback;
}

} // namespace detail

/// Extrapolates one hour of level speeds to `h_target` metres above ground.
/// Degenerate exponents (calm hours, crossing heights) use `fallback_alpha`.
inline ExtrapolatedSpeed extrapolate_levels(VerticalMethod method,
                                            const LevelSpeeds &s,
                                            double h_target,
                                            double fallback_alpha) {
  const double h10 = 10.0 + s.displacement;
  const double h2 = 2.0 + s.displacement;
  ExtrapolatedSpeed out;
  if (needs_2m_level(method) && !s.w2)
    throw Error(std::string(to_string(method)) + " needs 2 m wind components");
  switch (method) {
  case VerticalMethod::power_law_10_50: {
    const double alpha = detail::alpha_or_fallback(s.w10, h10, s.w50, 50.0,
                                                   fallback_alpha, out.used_fallback);
    out.value = power_law_extrapolate(s.w50, 50.0, h_target, alpha);
    break;
  }
  case VerticalMethod::power_law_2_10: {
    const double alpha = detail::alpha_or_fallback(*s.w2, h2, s.w10, h10,
                                                   fallback_alpha, out.used_fallback);
    out.value = power_law_extrapolate(s.w10, h10, h_target, alpha);
    break;
  }
  case VerticalMethod::power_law_2_10_50: {
    const double alpha = detail::alpha_or_fallback(*s.w2, h2, s.w10, h10,
                                                   fallback_alpha, out.used_fallback);
    out.value = power_law_extrapolate(s.w50, 50.0, h_target, alpha);
    break;
  }
  case VerticalMethod::log_profile: {
    const double hs[] = {h2, h10, 50.0};
    const double ws[] = {*s.w2, s.w10, s.w50};
    const auto p = log_profile_predict(log_profile_fit(hs, ws), h_target);
    out.value = p.value;
    out.negative = p.negative;
    break;
  }
  }
  return out;
}

} // namespace windsim
