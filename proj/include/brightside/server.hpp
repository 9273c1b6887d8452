#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace brightside {

inline constexpr std::size_t kMaxPageSize = 100;

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path root;  // store root: data/ and models/
  std::vector<std::string> cors_origins;  // "*" allows any
  std::size_t max_page_size = kMaxPageSize;
};

// REST front end over a Store:
//
//   GET  /v1/feed?date=YYYY-MM-DD&limit=N
//   GET  /v1/articles/{id}
//   GET  /v1/queue?limit=N
//   POST /v1/queue/{id}/verdict  {"label": "positive"|"negative"|"skip", "curator": "..."}
//   GET  /v1/stats?date=YYYY-MM-DD
//   GET  /healthz
//
// Errors are {"error": "<code>", "message": "..."}.
class ApiServer {
 public:
  explicit ApiServer(ServerConfig cfg);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace brightside
