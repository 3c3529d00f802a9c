#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace windsim {

/// An hour on the UTC time line.
using Hour = std::chrono::sys_time<std::chrono::hours>;
/// A UTC calendar day.
using Day = std::chrono::sys_days;

namespace detail {

inline bool parse_int(std::string_view s, int &out) {
  if (s.empty())
    return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::optional<Day> parse_ymd(std::string_view s) {
  // YYYY-MM-DD
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
      !parse_int(s.substr(8, 2), d))
    return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok())
    return std::nullopt;
  return Day{ymd};
}

} // namespace detail

/// Parses `YYYY-MM-DD`.
inline std::optional<Day> parse_day(std::string_view s) {
  return detail::parse_ymd(s);
}

/// Parses an ISO-8601 UTC timestamp on a whole hour. Accepts
/// `YYYY-MM-DDTHH[:MM[:SS]][Z]` with `T` or a space as separator. Minutes and
/// seconds, when given, must be zero.
inline std::optional<Hour> parse_hour(std::string_view s) {
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z'))
    s.remove_suffix(1);
  if (s.size() < 13 || (s[10] != 'T' && s[10] != ' '))
    return std::nullopt;
  auto day = detail::parse_ymd(s.substr(0, 10));
  if (!day)
    return std::nullopt;
  int hh = 0;
  if (!detail::parse_int(s.substr(11, 2), hh) || hh < 0 || hh > 23)
    return std::nullopt;
  std::string_view rest = s.substr(13);
  while (!rest.empty()) {
    int v = 0;
    if (rest.size() < 3 || rest[0] != ':' ||
        !detail::parse_int(rest.substr(1, 2), v) || v != 0)
      return std::nullopt;
    rest.remove_prefix(3);
  }
  return Hour{*day} + std::chrono::hours{hh};
}

inline std::string format_day(Day d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

inline std::string format_hour(Hour h) {
  const Day d = std::chrono::floor<std::chrono::days>(h);
  const auto hh = (h - Hour{d}).count();
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d", int(hh));
  return format_day(d) + buf + ":00:00Z";
}

inline Day day_of(Hour h) { return std::chrono::floor<std::chrono::days>(h); }

inline int year_of(Day d) {
  return int(std::chrono::year_month_day{d}.year());
}

/// Month in 1..12.
inline int month_of(Day d) {
  return int(unsigned(std::chrono::year_month_day{d}.month()));
}

/// Hour of day in 0..23.
inline int hour_of_day(Hour h) { return int((h - Hour{day_of(h)}).count()); }

inline Day make_day(int y, int m, int d) {
  return Day{std::chrono::year_month_day{std::chrono::year{y},
                                         std::chrono::month{unsigned(m)},
                                         std::chrono::day{unsigned(d)}}};
}

} // namespace windsim
