#include "brightside/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace brightside {

std::string Url::origin() const {
  std::string o = scheme + "://" + host;
  if (port != 0) o += ":" + std::to_string(port);
  return o;
}

std::string Url::target() const { return query.empty() ? path : path + "?" + query; }

std::optional<Url> parse_url(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

  auto sep = text.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  Url u;
  u.scheme.assign(text.substr(0, sep));
  std::transform(u.scheme.begin(), u.scheme.end(), u.scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  text.remove_prefix(sep + 3);

  if (auto hash = text.find('#'); hash != std::string_view::npos) {
    u.fragment.assign(text.substr(hash + 1));
    text = text.substr(0, hash);
  }
  auto path_start = text.find_first_of("/?");
  std::string_view authority = text.substr(0, path_start);
  std::string_view rest = path_start == std::string_view::npos ? std::string_view{} : text.substr(path_start);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (authority.empty()) return std::nullopt;

  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    auto port_str = authority.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
    if (ec != std::errc{} || ptr != port_str.data() + port_str.size() || port <= 0 || port > 65535)
      return std::nullopt;
    u.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  u.host.assign(authority);

  if (auto q = rest.find('?'); q != std::string_view::npos) {
    u.query.assign(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  u.path = rest.empty() ? "/" : std::string(rest);
  return u;
}

}  // namespace brightside
