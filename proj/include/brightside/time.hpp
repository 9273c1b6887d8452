#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace brightside {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

// "2020-01-02T03:04:05Z"
std::string format_timestamp(Timestamp ts);
// "2020-01-02"
std::string format_date(Date d);
// "2020-01"
std::string format_month(Date d);

// Accepts YYYY-MM-DD and YYYY-MM-DDTHH:MM:SS with an optional fractional
// part and a Z / +HH:MM / -HH:MM suffix.
std::optional<Timestamp> parse_iso8601(std::string_view text);
// Strict YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
// RFC 822 / 1123 as used in RSS pubDate: "Tue, 10 Jun 2003 04:00:00 GMT".
std::optional<Timestamp> parse_rfc822(std::string_view text);
// Tries ISO 8601 first, then RFC 822.
std::optional<Timestamp> parse_any_timestamp(std::string_view text);

Timestamp now_utc();

inline Date date_of(Timestamp ts) {
  return Date{std::chrono::floor<std::chrono::days>(ts)};
}

}  // namespace brightside
