#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

#include "regmine/errors.hpp"

namespace regmine {

// Epoch milliseconds, UTC. Strings are kept alongside so outputs can echo the
// source form byte-for-byte.
using EpochMs = std::int64_t;

namespace detail {

inline bool read_digits(const std::string& s, size_t& pos, int count, long& out) {
  long v = 0;
  for (int i = 0; i < count; ++i) {
    if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') return false;
    v = v * 10 + (s[pos] - '0');
    ++pos;
  }
  out = v;
  return true;
}

// Days since 1970-01-01 from a civil date; valid across the whole int range.
inline std::int64_t days_from_civil(long y, long m, long d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool days_in_month_ok(long y, long m, long d) {
  static const int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int max = dim[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) max = 29;
  return d <= max;
}

}  // namespace detail

// Accepts YYYY-MM-DDTHH:MM:SS with optional .fraction and a mandatory zone
// (Z or +-HH:MM or +-HHMM). Anything else is InvalidTimestamp.
inline EpochMs parse_iso8601(const std::string& s) {
  using detail::read_digits;
  size_t pos = 0;
  long year, mon, day, hour, min, sec;
  if (!read_digits(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, mon) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, day) || pos >= s.size() || (s[pos] != 'T' && s[pos] != 't'))
    fail(Errc::InvalidTimestamp, "bad date in '" + s + "'");
  ++pos;
  if (!read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':' ||
      !read_digits(s, pos, 2, min) || pos >= s.size() || s[pos++] != ':' ||
      !read_digits(s, pos, 2, sec))
    fail(Errc::InvalidTimestamp, "bad time in '" + s + "'");
  if (!detail::days_in_month_ok(year, mon, day) || hour > 23 || min > 59 || sec > 60)
    fail(Errc::InvalidTimestamp, "out-of-range field in '" + s + "'");

  long millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int scale = 100;
    size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) millis += (s[pos] - '0') * scale;
      scale /= 10;
      ++digits;
      ++pos;
    }
    if (digits == 0) fail(Errc::InvalidTimestamp, "empty fraction in '" + s + "'");
  }

  long offset_min = 0;
  if (pos >= s.size()) fail(Errc::InvalidTimestamp, "missing zone in '" + s + "'");
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    ++pos;
    long oh, om;
    if (!read_digits(s, pos, 2, oh)) fail(Errc::InvalidTimestamp, "bad zone in '" + s + "'");
    if (pos < s.size() && s[pos] == ':') ++pos;
    if (!read_digits(s, pos, 2, om)) fail(Errc::InvalidTimestamp, "bad zone in '" + s + "'");
    if (oh > 14 || om > 59) fail(Errc::InvalidTimestamp, "bad zone in '" + s + "'");
    offset_min = sign * (oh * 60 + om);
  } else {
    fail(Errc::InvalidTimestamp, "missing zone in '" + s + "'");
  }
  if (pos != s.size()) fail(Errc::InvalidTimestamp, "trailing garbage in '" + s + "'");

  const std::int64_t days = detail::days_from_civil(year, mon, day);
  std::int64_t secs = days * 86400 + hour * 3600 + min * 60 + sec;
  secs -= offset_min * 60;
  return secs * 1000 + millis;
}

}  // namespace regmine
