#include "brightside/server.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "brightside/error.hpp"
#include "brightside/store.hpp"

// after Eigen (_res)
#include <httplib.h>

namespace brightside {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", std::string(code)}, {"message", message}});
}

// nullopt means the parameter was malformed and an error was sent.
std::optional<std::size_t> page_limit(const httplib::Request& req, httplib::Response& res, std::size_t cap) {
  if (!req.has_param("limit")) return cap;
  const auto s = req.get_param_value("limit");
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0) {
    send_error(res, 400, "bad_request", "limit must be a positive integer");
    return std::nullopt;
  }
  return std::min(n, cap);
}

// Missing parameter -> fallback; nullopt when malformed (400 sent).
std::optional<std::optional<Date>> date_param(const httplib::Request& req, httplib::Response& res) {
  if (!req.has_param("date")) return std::optional<Date>{};
  auto d = parse_date(req.get_param_value("date"));
  if (!d) {
    send_error(res, 400, "bad_request", "date must be YYYY-MM-DD");
    return std::nullopt;
  }
  return std::optional<Date>{*d};
}

json queue_entry_json(const QueueEntry& q) {
  return {{"id", q.article_id},        {"title", q.title},           {"url", q.url},
          {"source", q.source},        {"mean_score", q.mean_score}, {"enqueued_at", format_timestamp(q.enqueued_at)}};
}

std::string health_problem(const Store& store) {
  std::error_code ec;
  if (!fs::is_directory(store.models_dir(), ec)) return "models directory missing";
  if (!fs::is_directory(store.data_dir(), ec)) return "data directory missing";
  fs::directory_iterator it(store.data_dir(), ec);
  if (ec) return "data directory unreadable: " + ec.message();
  for (const char* name : {"articles.jsonl", "queue.jsonl", "curated.jsonl"}) {
    const auto p = store.data_dir() / name;
    if (!fs::exists(p, ec)) continue;
    if (!fs::is_regular_file(p, ec)) return std::string(name) + " is not a file";
    std::ifstream in(p);
    if (!in) return std::string(name) + " is unreadable";
  }
  return {};
}

}  // namespace

struct ApiServer::Impl {
  ServerConfig cfg;
  Store store;
  httplib::Server http;
  std::thread thread;
  int bound_port = 0;

  explicit Impl(ServerConfig c) : cfg(std::move(c)), store(cfg.root) { routes(); }

  bool origin_allowed(const std::string& origin) const {
    return std::any_of(cfg.cors_origins.begin(), cfg.cors_origins.end(),
                       [&](const std::string& o) { return o == "*" || o == origin; });
  }

  void routes() {
    http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (origin.empty() || !origin_allowed(origin)) return;
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    });
    http.Options(R"(/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      res.status = origin_allowed(origin) ? 204 : 403;
      if (res.status == 204) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
      }
    });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      } catch (...) {
        send_error(res, 500, "internal", "unknown failure");
      }
    });
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) send_error(res, 404, "not_found", "no such endpoint");
      else if (res.status == 405) send_error(res, 405, "method_not_allowed", "method not allowed");
    });

    http.Get("/v1/feed", [this](const httplib::Request& req, httplib::Response& res) { feed(req, res); });
    http.Get("/v1/articles/:id", [this](const httplib::Request& req, httplib::Response& res) { article(req, res); });
    http.Get("/v1/queue", [this](const httplib::Request& req, httplib::Response& res) { queue(req, res); });
    http.Post("/v1/queue/:id/verdict",
              [this](const httplib::Request& req, httplib::Response& res) { verdict(req, res); });
    http.Get("/v1/stats", [this](const httplib::Request& req, httplib::Response& res) { stats(req, res); });
    http.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      auto problem = health_problem(store);
      if (problem.empty()) send_json(res, 200, {{"status", "ok"}});
      else send_error(res, 503, "unavailable", problem);
    });
  }

  void feed(const httplib::Request& req, httplib::Response& res) {
    auto date = date_param(req, res);
    if (!date) return;
    auto limit = page_limit(req, res, cfg.max_page_size);
    if (!limit) return;
    auto d = *date ? *date : store.latest_feed_date();
    if (!d) return send_error(res, 404, "not_found", "no feed has been published");
    auto record = store.read_feed(*d);
    if (!record) return send_error(res, 404, "not_found", "no feed for " + format_date(*d));

    std::map<std::string, Article> by_id;
    for (auto& s : store.read_articles()) by_id.emplace(s.article.id, std::move(s.article));
    json items = json::array();
    for (const auto& e : record->articles) {
      if (items.size() >= *limit) break;
      json item = {{"id", e.article_id}, {"mean_score", e.mean_score}};
      if (auto it = by_id.find(e.article_id); it != by_id.end()) {
        item["title"] = it->second.title;
        item["url"] = it->second.url;
        item["source"] = it->second.source_name;
      } else {
        item["title"] = item["url"] = item["source"] = nullptr;
      }
      items.push_back(std::move(item));
    }
    send_json(res, 200, {{"date", format_date(*d)}, {"articles", std::move(items)}});
  }

  void article(const httplib::Request& req, httplib::Response& res) {
    const auto id = req.path_params.at("id");
    auto stored = store.find_article(id);
    if (!stored) return send_error(res, 404, "not_found", "unknown article " + id);
    send_json(res, 200,
              {{"article", to_json(stored->article)}, {"verdict", to_json(stored->verdict)}, {"run_date", stored->run_date}});
  }

  void queue(const httplib::Request& req, httplib::Response& res) {
    auto limit = page_limit(req, res, cfg.max_page_size);
    if (!limit) return;
    auto pending = store.queue();
    json items = json::array();
    for (std::size_t i = 0; i < pending.size() && i < *limit; ++i) items.push_back(queue_entry_json(pending[i]));
    send_json(res, 200, {{"size", pending.size()}, {"items", std::move(items)}});
  }

  void verdict(const httplib::Request& req, httplib::Response& res) {
    const auto id = req.path_params.at("id");
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
      return send_error(res, 400, "bad_request", "body must be a JSON object");
    if (!body.contains("label") || !body["label"].is_string())
      return send_error(res, 400, "bad_request", "label is required");
    auto label = parse_curator_label(body["label"].get<std::string>());
    if (!label) return send_error(res, 400, "bad_request", "label must be positive, negative or skip");
    std::string curator = "anonymous";
    if (body.contains("curator") && body["curator"].is_string()) curator = body["curator"].get<std::string>();
    try {
      const auto size = store.record_curator_verdict(id, *label, curator);
      send_json(res, 200, {{"id", id}, {"label", std::string(curator_label_name(*label))}, {"queue_size", size}});
    } catch (const Error& e) {
      if (e.code() != Errc::NotFound) throw;
      send_error(res, 404, "not_found", e.what());
    }
  }

  void stats(const httplib::Request& req, httplib::Response& res) {
    auto date = date_param(req, res);
    if (!date) return;
    auto d = *date ? *date : store.latest_feed_date();
    if (!d) return send_error(res, 404, "not_found", "no pipeline run recorded");
    auto s = store.read_run_stats(*d);
    if (!s) return send_error(res, 404, "not_found", "no run for " + format_date(*d));
    send_json(res, 200, *s);
  }
};

ApiServer::ApiServer(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
  std::error_code ec;
  fs::create_directories(impl_->store.data_dir(), ec);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start() {
  auto& im = *impl_;
  im.bound_port = im.cfg.port == 0 ? im.http.bind_to_any_port(im.cfg.host)
                                   : (im.http.bind_to_port(im.cfg.host, im.cfg.port) ? im.cfg.port : -1);
  if (im.bound_port < 0)
    throw Error(Errc::IoError, "cannot bind " + im.cfg.host + ":" + std::to_string(im.cfg.port));
  im.thread = std::thread([&im] { im.http.listen_after_bind(); });
  im.http.wait_until_ready();
  return im.bound_port;
}

void ApiServer::run() {
  auto& im = *impl_;
  im.bound_port = im.cfg.port == 0 ? im.http.bind_to_any_port(im.cfg.host)
                                   : (im.http.bind_to_port(im.cfg.host, im.cfg.port) ? im.cfg.port : -1);
  if (im.bound_port < 0)
    throw Error(Errc::IoError, "cannot bind " + im.cfg.host + ":" + std::to_string(im.cfg.port));
  im.http.listen_after_bind();
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int ApiServer::port() const noexcept { return impl_->bound_port; }

}  // namespace brightside
