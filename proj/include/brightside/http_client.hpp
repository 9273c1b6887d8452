#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace brightside {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
};

// Transport failures (DNS, connect, timeout) come back as nullopt with
// `error` filled; any HTTP status is a response.
struct HttpResult {
  std::optional<HttpResponse> response;
  std::string error;
};

HttpResult http_get(const std::string& url, std::chrono::milliseconds timeout);
HttpResult http_post_json(const std::string& url, const std::string& body,
                          std::chrono::milliseconds timeout);

}  // namespace brightside
