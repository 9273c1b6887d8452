#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace brightside {

struct Url {
  std::string scheme;  // lowercase
  std::string host;    // as written
  int port = 0;        // 0 when absent
  std::string path;    // starts with '/', never empty
  std::string query;   // without '?'
  std::string fragment;

  // "scheme://host[:port]" suitable for an HTTP client.
  std::string origin() const;
  // path + ("?" + query when non-empty)
  std::string target() const;
};

// Only absolute http(s) URLs are accepted.
std::optional<Url> parse_url(std::string_view text);

}  // namespace brightside
