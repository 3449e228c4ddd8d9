#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace ccsim {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr bool is_leap_year(std::int64_t y) noexcept {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) noexcept {
  constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (m == 2 && is_leap_year(y)) ? 29u : kDays[m - 1];
}

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  constexpr std::int64_t days_since_epoch() const noexcept {
    return days_from_civil(year, month, day);
  }

  static constexpr CivilDate from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
  }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
  }

  // Accepts YYYY-MM-DD only.
  static std::optional<CivilDate> parse_iso(std::string_view text) {
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) {
      text.remove_suffix(1);
    }
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t from, std::size_t len) -> std::optional<int> {
      int v = 0;
      for (std::size_t i = from; i < from + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
        v = v * 10 + (text[i] - '0');
      }
      return v;
    };
    auto y = digits(0, 4);
    auto m = digits(5, 2);
    auto d = digits(8, 2);
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1) return std::nullopt;
    if (static_cast<unsigned>(*d) > days_in_month(*y, static_cast<unsigned>(*m))) return std::nullopt;
    return CivilDate{*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d)};
  }

  friend constexpr auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

// Wall-clock instant at one-second resolution, seconds since 1970-01-01 00:00 (no zone).
struct Timestamp {
  std::int64_t epoch_seconds = 0;

  constexpr CivilDate date() const noexcept {
    return CivilDate::from_days(floor_div(epoch_seconds, kSecondsPerDay));
  }
  constexpr std::int64_t seconds_of_day() const noexcept {
    return epoch_seconds - floor_div(epoch_seconds, kSecondsPerDay) * kSecondsPerDay;
  }
  static constexpr Timestamp from_parts(CivilDate d, std::int64_t seconds_of_day) noexcept {
    return Timestamp{d.days_since_epoch() * kSecondsPerDay + seconds_of_day};
  }

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

 private:
  static constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
  }
};

// strptime-like parser for the tokens %Y %m %d %H %M %S. Numeric fields accept
// one or more digits (so both "1/2/2014 8:04:37" and "01/02/2014 08:04:37"
// match "%m/%d/%Y %H:%M:%S"). A space in the format matches one or more blanks.
inline std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
  std::int64_t year = -1;
  int month = -1, day = -1, hour = 0, minute = 0, second = 0;
  std::size_t pos = 0;
  auto skip_blanks = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  skip_blanks();
  for (std::size_t f = 0; f < format.size(); ++f) {
    const char fc = format[f];
    if (fc == '%' && f + 1 < format.size()) {
      const char tok = format[++f];
      const std::size_t max_digits = tok == 'Y' ? 4 : 2;
      std::size_t n = 0;
      std::int64_t value = 0;
      while (pos < text.size() && n < max_digits && text[pos] >= '0' && text[pos] <= '9') {
        value = value * 10 + (text[pos] - '0');
        ++pos;
        ++n;
      }
      if (n == 0) return std::nullopt;
      switch (tok) {
        case 'Y': year = value; break;
        case 'm': month = static_cast<int>(value); break;
        case 'd': day = static_cast<int>(value); break;
        case 'H': hour = static_cast<int>(value); break;
        case 'M': minute = static_cast<int>(value); break;
        case 'S': second = static_cast<int>(value); break;
        default: return std::nullopt;
      }
    } else if (fc == ' ') {
      if (pos >= text.size() || (text[pos] != ' ' && text[pos] != '\t')) return std::nullopt;
      skip_blanks();
    } else {
      if (pos >= text.size() || text[pos] != fc) return std::nullopt;
      ++pos;
    }
  }
  skip_blanks();
  if (pos != text.size()) return std::nullopt;
  if (year < 0 || month < 1 || month > 12 || day < 1) return std::nullopt;
  if (static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  const CivilDate date{static_cast<int>(year), static_cast<unsigned>(month), static_cast<unsigned>(day)};
  return Timestamp::from_parts(date, hour * 3600 + minute * 60 + second);
}

// Inverse of parse_timestamp; numeric fields are zero-padded.
inline std::string format_timestamp(Timestamp ts, std::string_view format) {
  const CivilDate d = ts.date();
  const std::int64_t sod = ts.seconds_of_day();
  std::string out;
  char buf[8];
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      switch (format[++f]) {
        case 'Y': std::snprintf(buf, sizeof buf, "%04d", d.year); break;
        case 'm': std::snprintf(buf, sizeof buf, "%02u", d.month); break;
        case 'd': std::snprintf(buf, sizeof buf, "%02u", d.day); break;
        case 'H': std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(sod / 3600)); break;
        case 'M': std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(sod / 60 % 60)); break;
        case 'S': std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(sod % 60)); break;
        default: buf[0] = '\0'; break;
      }
      out += buf;
    } else {
      out += format[f];
    }
  }
  return out;
}

// "HH:MM" or "HH:MM:SS" to seconds of day.
inline std::optional<std::int64_t> parse_clock(std::string_view text) {
  auto ts = parse_timestamp(std::string("1970-01-01 ") + std::string(text), "%Y-%m-%d %H:%M:%S");
  if (!ts) ts = parse_timestamp(std::string("1970-01-01 ") + std::string(text), "%Y-%m-%d %H:%M");
  if (!ts) return std::nullopt;
  return ts->seconds_of_day();
}

}  // namespace ccsim
