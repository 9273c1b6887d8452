#include "brightside/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace brightside {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi,
                                        int sec, int offset_minutes) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} -
         minutes{offset_minutes};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_timestamp(Timestamp ts) {
  auto dp = floor<days>(ts);
  year_month_day ymd{dp};
  hh_mm_ss hms{ts - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_month(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()));
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) ||
      !read_int(text, 8, 2, d))
    return std::nullopt;
  Date ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  text = trim(text);
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  if (text.size() == 10) return sys_days{*date};
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
  int h = 0, mi = 0, s = 0;
  if (!read_int(text, 11, 2, h) || text.size() < 16 || text[13] != ':' ||
      !read_int(text, 14, 2, mi))
    return std::nullopt;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!read_int(text, pos + 1, 2, s)) return std::nullopt;
    pos += 3;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  int offset = 0;
  if (pos < text.size()) {
    char z = text[pos];
    if (z == 'Z' || z == 'z') {
      ++pos;
    } else if (z == '+' || z == '-') {
      int oh = 0, om = 0;
      if (!read_int(text, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < text.size() && text[mpos] == ':') ++mpos;
      if (!read_int(text, mpos, 2, om)) return std::nullopt;
      offset = (oh * 60 + om) * (z == '-' ? -1 : 1);
      pos = mpos + 2;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return make_timestamp(static_cast<int>(date->year()),
                        static_cast<int>(static_cast<unsigned>(date->month())),
                        static_cast<int>(static_cast<unsigned>(date->day())), h,
                        mi, s, offset);
}

std::optional<Timestamp> parse_rfc822(std::string_view text) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun",
      "jul", "aug", "sep", "oct", "nov", "dec"};
  text = trim(text);
  if (auto comma = text.find(','); comma != std::string_view::npos)
    text = trim(text.substr(comma + 1));

  // day month year hh:mm[:ss] zone
  std::array<std::string_view, 5> parts{};
  std::size_t n = 0;
  while (!text.empty() && n < parts.size()) {
    auto sp = text.find(' ');
    parts[n++] = text.substr(0, sp);
    text = sp == std::string_view::npos ? std::string_view{} : trim(text.substr(sp));
  }
  if (n < 4) return std::nullopt;

  int d = 0, y = 0, h = 0, mi = 0, s = 0;
  if (!read_int(parts[0], 0, parts[0].size(), d) || parts[0].size() > 2)
    return std::nullopt;
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (parts[1].size() >= 3) {
      std::string lower;
      for (char c : parts[1].substr(0, 3))
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      if (lower == kMonths[i]) mo = static_cast<int>(i) + 1;
    }
  }
  if (mo == 0 || !read_int(parts[2], 0, parts[2].size(), y)) return std::nullopt;
  if (parts[2].size() == 2) y += y < 50 ? 2000 : 1900;
  auto clock = parts[3];
  if (!read_int(clock, 0, 2, h) || clock.size() < 5 || clock[2] != ':' ||
      !read_int(clock, 3, 2, mi))
    return std::nullopt;
  if (clock.size() >= 8 && clock[5] == ':' && !read_int(clock, 6, 2, s))
    return std::nullopt;

  int offset = 0;
  if (n == 5) {
    auto zone = parts[4];
    if (zone.size() == 5 && (zone[0] == '+' || zone[0] == '-')) {
      int oh = 0, om = 0;
      if (!read_int(zone, 1, 2, oh) || !read_int(zone, 3, 2, om)) return std::nullopt;
      offset = (oh * 60 + om) * (zone[0] == '-' ? -1 : 1);
    } else if (zone == "EST") {
      offset = -5 * 60;
    } else if (zone == "EDT") {
      offset = -4 * 60;
    } else if (zone == "CST") {
      offset = -6 * 60;
    } else if (zone == "CDT") {
      offset = -5 * 60;
    } else if (zone == "MST") {
      offset = -7 * 60;
    } else if (zone == "MDT") {
      offset = -6 * 60;
    } else if (zone == "PST") {
      offset = -8 * 60;
    } else if (zone == "PDT") {
      offset = -7 * 60;
    }
    // GMT, UT, UTC, Z and unknown military zones read as UTC.
  }
  return make_timestamp(y, mo, d, h, mi, s, offset);
}

std::optional<Timestamp> parse_any_timestamp(std::string_view text) {
  if (auto ts = parse_iso8601(text)) return ts;
  return parse_rfc822(text);
}

Timestamp now_utc() { return floor<seconds>(system_clock::now()); }

}  // namespace brightside
