#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "brightside/corpus.hpp"
#include "brightside/http_client.hpp"
#include "brightside/pipeline.hpp"
#include "brightside/time.hpp"

namespace brightside {

class Store;

enum class SourceKind { Rss, Atom, JsonApi };

std::string_view source_kind_name(SourceKind k) noexcept;
std::optional<SourceKind> parse_source_kind(std::string_view s);

struct SourceConfig {
  std::string name;
  SourceKind kind = SourceKind::Rss;
  std::string url;
  std::chrono::hours poll_interval{24};
  double per_host_rate_limit = 1.0;  // requests per second
  std::chrono::milliseconds timeout{10000};
  int retries = 2;
  std::chrono::milliseconds backoff{1000};  // doubles per retry
};

// Errc::ConfigError for an invalid url, negative retries or a non-positive
// rate limit.
void validate(const SourceConfig& s);

// JSON list of {"name","kind","url"} with optional "poll_interval_hours",
// "rate_limit", "timeout_ms", "retries", "backoff_ms".
std::vector<SourceConfig> sources_from_json(const nlohmann::json& j);
std::vector<SourceConfig> load_sources(const std::filesystem::path& path);

struct RawItem {
  std::string title;
  std::string link;
  std::string published;  // as found; empty when absent
};

struct ParsedDocument {
  std::vector<RawItem> items;
  std::size_t skipped = 0;  // entries without a title or link
};

// Errc::FormatError when the document is not the declared kind.
ParsedDocument parse_document(std::string_view body, SourceKind kind);

enum class SourceErrorKind { Http, Network, Parse };

std::string_view source_error_kind_name(SourceErrorKind k) noexcept;

struct SourceError {
  std::string source;
  SourceErrorKind kind = SourceErrorKind::Network;
  int status = 0;  // HTTP status for kind Http
  std::string message;
};

nlohmann::json to_json(const SourceError& e);

struct FetchResult {
  std::vector<RawItem> items;
  std::size_t skipped = 0;
  std::optional<SourceError> error;
};

// --- time and transport seams -----------------------------------------------

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() const override;
  void sleep_for(std::chrono::milliseconds d) override;
};

// Per-host spacing of 1/rate seconds between request starts. Slots are
// reserved under a lock and slept outside it, so concurrent callers queue up.
class RateLimiter {
 public:
  explicit RateLimiter(Clock& clock) : clock_(clock) {}
  void acquire(const std::string& host, double per_second);

 private:
  Clock& clock_;
  std::mutex mu_;
  std::map<std::string, Clock::time_point> next_;
};

using Fetcher = std::function<HttpResult(const std::string& url, std::chrono::milliseconds timeout)>;

struct FetchEnv {
  Fetcher fetch;  // http_get when empty
  Clock* clock = nullptr;  // SystemClock when null
  RateLimiter* limiter = nullptr;  // one per run when null
};

// Retries transport errors and non-2xx responses `retries` times with
// backoff 1x, 2x, ... Parse failures are not retried.
FetchResult fetch_source(const SourceConfig& src, FetchEnv& env);

// --- normalization and dedup ------------------------------------------------

// Runs of whitespace become one space; leading and trailing removed.
std::string collapse_whitespace(std::string_view s);

// Lowercase scheme and host, no fragment, no utm_* query keys. Returns
// nullopt for anything that is not an absolute http(s) url.
std::optional<std::string> canonicalize_url(std::string_view url);

// Errc::SkipItem for an empty title or an unusable link.
Article normalize(const RawItem& item, const SourceConfig& src, Timestamp fetched_at);

// FNV-1a over the tokenized title and the canonical url host + path.
std::uint64_t dedup_key(const Article& a);

class DedupWindow {
 public:
  explicit DedupWindow(std::chrono::days horizon = std::chrono::days{14}) : horizon_(horizon) {}

  std::chrono::days horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return seen_.size(); }
  bool contains(std::uint64_t key) const { return seen_.count(key) != 0; }

  // Drops keys whose age is at least the horizon.
  void evict(Timestamp now);
  void insert(std::uint64_t key, Timestamp at) { seen_.emplace(key, at); }

  nlohmann::json to_json() const;
  static DedupWindow from_json(const nlohmann::json& j);

 private:
  std::chrono::days horizon_;
  std::map<std::uint64_t, Timestamp> seen_;
};

DedupWindow load_dedup_window(const std::filesystem::path& path);
void save_dedup_window(const std::filesystem::path& path, const DedupWindow& w);

// Evicts, then keeps the first occurrence of every unseen key and records it.
std::vector<Article> dedup(std::span<const Article> articles, DedupWindow& window, Timestamp now);

// --- daily run ----------------------------------------------------------------

struct SourceReport {
  std::string source;
  std::size_t fetched = 0;
  std::size_t skipped = 0;
};

struct IngestReport {
  Date date{};
  std::size_t fetched = 0;  // every entry seen in a fetched document
  std::size_t skipped = 0;
  std::size_t deduped = 0;
  std::size_t entered_cascade = 0;
  std::size_t accepted = 0;
  std::size_t capped = 0;
  std::size_t rejected = 0;
  std::size_t queued = 0;
  std::vector<SourceReport> sources;
  std::vector<SourceError> errors;
  std::vector<std::string> feed;  // published ids, in order
};

nlohmann::json to_json(const IngestReport& r);

struct DailyOptions {
  std::optional<Date> date;        // date_of(now) when absent
  std::optional<Timestamp> now;    // now_utc() when absent
  std::size_t max_in_flight = 8;
};

// Fetch (concurrent, failures isolated) -> normalize -> dedup -> cascade ->
// persist articles, queue, run stats, feed, dedup window. Throws
// Errc::AlreadyPublished before fetching if the date already has a feed, and
// Errc::IoError without publishing when every source failed.
IngestReport run_daily(std::span<const SourceConfig> sources, const CascadeConfig& cfg,
                       std::span<const std::unique_ptr<Stage>> stages, Store& store, FetchEnv& env,
                       const DailyOptions& opts = {});

}  // namespace brightside
