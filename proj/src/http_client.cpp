#include "brightside/http_client.hpp"

#include <httplib.h>

#include "brightside/url.hpp"

namespace brightside {

namespace {

void set_timeouts(httplib::Client& client, std::chrono::milliseconds timeout) {
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
}

HttpResult convert(const httplib::Result& res) {
  HttpResult out;
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  HttpResponse r;
  r.status = res->status;
  r.body = res->body;
  r.content_type = res->get_header_value("Content-Type");
  out.response = std::move(r);
  return out;
}

}  // namespace

HttpResult http_get(const std::string& url, std::chrono::milliseconds timeout) {
  auto u = parse_url(url);
  if (!u) return {std::nullopt, "invalid url: " + url};
  httplib::Client client(u->origin());
  set_timeouts(client, timeout);
  client.set_follow_location(true);
  return convert(client.Get(u->target()));
}

HttpResult http_post_json(const std::string& url, const std::string& body,
                          std::chrono::milliseconds timeout) {
  auto u = parse_url(url);
  if (!u) return {std::nullopt, "invalid url: " + url};
  httplib::Client client(u->origin());
  set_timeouts(client, timeout);
  return convert(client.Post(u->target(), body, "application/json"));
}

}  // namespace brightside
