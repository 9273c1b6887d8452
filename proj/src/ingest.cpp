#include "brightside/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "brightside/error.hpp"
#include "brightside/features.hpp"
#include "brightside/hash.hpp"
#include "brightside/store.hpp"
#include "brightside/url.hpp"

namespace brightside {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using json = nlohmann::json;

std::string_view source_kind_name(SourceKind k) noexcept {
  switch (k) {
    case SourceKind::Rss: return "rss";
    case SourceKind::Atom: return "atom";
    case SourceKind::JsonApi: return "json_api";
  }
  return "rss";
}

std::optional<SourceKind> parse_source_kind(std::string_view s) {
  if (s == "rss") return SourceKind::Rss;
  if (s == "atom") return SourceKind::Atom;
  if (s == "json_api") return SourceKind::JsonApi;
  return std::nullopt;
}

std::string_view source_error_kind_name(SourceErrorKind k) noexcept {
  switch (k) {
    case SourceErrorKind::Http: return "http";
    case SourceErrorKind::Network: return "network";
    case SourceErrorKind::Parse: return "parse";
  }
  return "network";
}

json to_json(const SourceError& e) {
  json j = {{"source", e.source}, {"kind", std::string(source_error_kind_name(e.kind))}, {"message", e.message}};
  if (e.kind == SourceErrorKind::Http) j["status"] = e.status;
  return j;
}

void validate(const SourceConfig& s) {
  if (s.name.empty()) throw Error(Errc::ConfigError, "source without a name");
  if (!parse_url(s.url)) throw Error(Errc::ConfigError, "source '" + s.name + "' has an invalid url");
  if (s.retries < 0) throw Error(Errc::ConfigError, "source '" + s.name + "' has negative retries");
  if (!(s.per_host_rate_limit > 0.0))
    throw Error(Errc::ConfigError, "source '" + s.name + "' needs a positive rate limit");
  if (s.timeout.count() <= 0) throw Error(Errc::ConfigError, "source '" + s.name + "' needs a positive timeout");
}

std::vector<SourceConfig> sources_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::ConfigError, "sources file must be a JSON list");
  std::vector<SourceConfig> out;
  try {
    for (const auto& sj : j) {
      SourceConfig s;
      s.name = sj.at("name").get<std::string>();
      auto kind = parse_source_kind(sj.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::ConfigError, "unknown source kind " + sj.at("kind").dump());
      s.kind = *kind;
      s.url = sj.at("url").get<std::string>();
      s.poll_interval = std::chrono::hours(sj.value("poll_interval_hours", 24));
      s.per_host_rate_limit = sj.value("rate_limit", 1.0);
      s.timeout = std::chrono::milliseconds(sj.value("timeout_ms", 10000));
      s.retries = sj.value("retries", 2);
      s.backoff = std::chrono::milliseconds(sj.value("backoff_ms", 1000));
      validate(s);
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("bad sources file: ") + e.what());
  }
  return out;
}

std::vector<SourceConfig> load_sources(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read sources file " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ConfigError, "sources file is not JSON");
  return sources_from_json(j);
}

// --- document parsing ---------------------------------------------------------

namespace {

std::optional<std::string> child_text(const pt::ptree& node, const char* name) {
  auto c = node.get_child_optional(name);
  if (!c) return std::nullopt;
  return c->data();
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string atom_link(const pt::ptree& entry) {
  std::string fallback;
  for (const auto& [key, child] : entry) {
    if (key != "link") continue;
    auto href = child.get_optional<std::string>("<xmlattr>.href");
    if (!href) {
      if (!blank(child.data())) fallback = child.data();
      continue;
    }
    auto rel = child.get<std::string>("<xmlattr>.rel", "alternate");
    if (rel == "alternate") return *href;
    if (fallback.empty()) fallback = *href;
  }
  return fallback;
}

pt::ptree read_xml_tree(std::string_view body) {
  std::istringstream in{std::string(body)};
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::FormatError, std::string("malformed XML: ") + e.message());
  }
  return tree;
}

ParsedDocument parse_rss(std::string_view body) {
  auto tree = read_xml_tree(body);
  auto channel = tree.get_child_optional("rss.channel");
  if (!channel) throw Error(Errc::FormatError, "not an RSS 2.0 document");
  ParsedDocument doc;
  for (const auto& [key, item] : *channel) {
    if (key != "item") continue;
    auto title = child_text(item, "title");
    auto link = child_text(item, "link");
    if (!title || !link || blank(*link)) {
      ++doc.skipped;
      continue;
    }
    doc.items.push_back({*title, *link, child_text(item, "pubDate").value_or(child_text(item, "dc:date").value_or(""))});
  }
  return doc;
}

ParsedDocument parse_atom(std::string_view body) {
  auto tree = read_xml_tree(body);
  auto feed = tree.get_child_optional("feed");
  if (!feed) throw Error(Errc::FormatError, "not an Atom document");
  ParsedDocument doc;
  for (const auto& [key, entry] : *feed) {
    if (key != "entry") continue;
    auto title = child_text(entry, "title");
    auto link = atom_link(entry);
    if (!title || link.empty()) {
      ++doc.skipped;
      continue;
    }
    auto when = child_text(entry, "published");
    if (!when) when = child_text(entry, "updated");
    doc.items.push_back({*title, link, when.value_or("")});
  }
  return doc;
}

ParsedDocument parse_json_api(std::string_view body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("articles") || !j["articles"].is_array())
    throw Error(Errc::FormatError, "expected {\"articles\": [...]}");
  ParsedDocument doc;
  for (const auto& a : j["articles"]) {
    if (!a.is_object() || !a.contains("title") || !a["title"].is_string() || !a.contains("url") ||
        !a["url"].is_string()) {
      ++doc.skipped;
      continue;
    }
    std::string when;
    if (a.contains("publishedAt") && a["publishedAt"].is_string()) when = a["publishedAt"].get<std::string>();
    doc.items.push_back({a["title"].get<std::string>(), a["url"].get<std::string>(), when});
  }
  return doc;
}

}  // namespace

ParsedDocument parse_document(std::string_view body, SourceKind kind) {
  switch (kind) {
    case SourceKind::Rss: return parse_rss(body);
    case SourceKind::Atom: return parse_atom(body);
    case SourceKind::JsonApi: return parse_json_api(body);
  }
  throw Error(Errc::FormatError, "unknown source kind");
}

// --- fetching -------------------------------------------------------------------

SystemClock::time_point SystemClock::now() const { return std::chrono::steady_clock::now(); }

void SystemClock::sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

void RateLimiter::acquire(const std::string& host, double per_second) {
  const auto spacing = std::chrono::duration_cast<Clock::time_point::duration>(
      std::chrono::duration<double>(1.0 / per_second));
  Clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = clock_.now();
    auto it = next_.find(host);
    slot = (it == next_.end() || it->second < now) ? now : it->second;
    next_[host] = slot + spacing;
  }
  const auto wait = slot - clock_.now();
  if (wait > Clock::time_point::duration::zero())
    clock_.sleep_for(std::chrono::ceil<std::chrono::milliseconds>(wait));
}

FetchResult fetch_source(const SourceConfig& src, FetchEnv& env) {
  SystemClock system_clock;
  Clock& clock = env.clock ? *env.clock : system_clock;
  std::optional<RateLimiter> own_limiter;
  if (!env.limiter) own_limiter.emplace(clock);
  RateLimiter& limiter = env.limiter ? *env.limiter : *own_limiter;
  const Fetcher& fetch = env.fetch ? env.fetch : Fetcher(http_get);

  FetchResult result;
  auto url = parse_url(src.url);
  if (!url) {
    result.error = SourceError{src.name, SourceErrorKind::Network, 0, "invalid url"};
    return result;
  }
  std::string host = url->host;
  std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  SourceError last{src.name, SourceErrorKind::Network, 0, ""};
  for (int attempt = 0; attempt <= src.retries; ++attempt) {
    if (attempt > 0) clock.sleep_for(src.backoff * (1 << (attempt - 1)));
    limiter.acquire(host, src.per_host_rate_limit);
    auto res = fetch(src.url, src.timeout);
    if (!res.response) {
      last = {src.name, SourceErrorKind::Network, 0, res.error};
      continue;
    }
    if (res.response->status < 200 || res.response->status >= 300) {
      last = {src.name, SourceErrorKind::Http, res.response->status,
              "HTTP " + std::to_string(res.response->status)};
      continue;
    }
    try {
      auto doc = parse_document(res.response->body, src.kind);
      result.items = std::move(doc.items);
      result.skipped = doc.skipped;
    } catch (const Error& e) {
      result.error = SourceError{src.name, SourceErrorKind::Parse, res.response->status, e.what()};
    }
    return result;
  }
  result.error = last;
  return result;
}

// --- normalization ------------------------------------------------------------

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += ch;
  }
  return out;
}

std::optional<std::string> canonicalize_url(std::string_view text) {
  auto u = parse_url(text);
  if (!u) return std::nullopt;
  std::string host = u->host;
  std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  std::string query;
  std::string_view q = u->query;
  while (!q.empty()) {
    auto amp = q.find('&');
    auto part = q.substr(0, amp);
    q = amp == std::string_view::npos ? std::string_view{} : q.substr(amp + 1);
    if (part.empty()) continue;
    auto key = part.substr(0, part.find('='));
    std::string lower(key);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower.rfind("utm_", 0) == 0) continue;
    if (!query.empty()) query += '&';
    query += part;
  }

  std::string out = u->scheme + "://" + host;
  const bool default_port = u->port == 0 || (u->scheme == "http" && u->port == 80) ||
                            (u->scheme == "https" && u->port == 443);
  if (!default_port) out += ":" + std::to_string(u->port);
  out += u->path;
  if (!query.empty()) out += "?" + query;
  return out;
}

Article normalize(const RawItem& item, const SourceConfig& src, Timestamp fetched_at) {
  Article a;
  a.title = collapse_whitespace(item.title);
  if (a.title.empty()) throw Error(Errc::SkipItem, "empty title");
  auto url = canonicalize_url(item.link);
  if (!url) throw Error(Errc::SkipItem, "unusable link '" + item.link + "'");
  a.url = *url;
  a.source_name = src.name;
  a.fetched_at = fetched_at;
  a.published_at = parse_any_timestamp(item.published).value_or(fetched_at);
  a.id = make_article_id(a.title, a.url);
  return a;
}

std::uint64_t dedup_key(const Article& a) {
  std::string key;
  for (const auto& t : tokenize(a.title)) {
    if (!key.empty()) key += ' ';
    key += t;
  }
  key += '\x1f';
  if (auto u = parse_url(a.url)) {
    std::string host = u->host;
    std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    key += host + u->path;
  } else {
    key += a.url;
  }
  return fnv1a64(key);
}

void DedupWindow::evict(Timestamp now) {
  for (auto it = seen_.begin(); it != seen_.end();) {
    if (now - it->second >= horizon_) it = seen_.erase(it);
    else ++it;
  }
}

json DedupWindow::to_json() const {
  json seen = json::array();
  for (const auto& [k, t] : seen_) seen.push_back({{"key", to_hex(k)}, {"at", format_timestamp(t)}});
  return {{"horizon_days", horizon_.count()}, {"seen", std::move(seen)}};
}

DedupWindow DedupWindow::from_json(const json& j) {
  try {
    DedupWindow w{std::chrono::days{j.value("horizon_days", 14)}};
    for (const auto& e : j.at("seen")) {
      auto at = parse_iso8601(e.at("at").get<std::string>());
      if (!at) throw Error(Errc::FormatError, "bad timestamp in dedup window");
      w.insert(std::stoull(e.at("key").get<std::string>(), nullptr, 16), *at);
    }
    return w;
  } catch (const json::exception& e) {
    throw Error(Errc::FormatError, std::string("bad dedup window: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::FormatError, std::string("bad dedup key: ") + e.what());
  }
}

DedupWindow load_dedup_window(const fs::path& path) {
  auto j = read_json_file(path);
  return j ? DedupWindow::from_json(*j) : DedupWindow{};
}

void save_dedup_window(const fs::path& path, const DedupWindow& w) {
  write_file_atomic(path, w.to_json().dump() + "\n");
}

std::vector<Article> dedup(std::span<const Article> articles, DedupWindow& window, Timestamp now) {
  window.evict(now);
  std::vector<Article> fresh;
  for (const auto& a : articles) {
    const auto k = dedup_key(a);
    if (window.contains(k)) continue;
    window.insert(k, now);
    fresh.push_back(a);
  }
  return fresh;
}

// --- daily run ----------------------------------------------------------------

json to_json(const IngestReport& r) {
  json sources = json::array();
  for (const auto& s : r.sources) sources.push_back({{"source", s.source}, {"fetched", s.fetched}, {"skipped", s.skipped}});
  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back(to_json(e));
  return {{"date", format_date(r.date)},
          {"fetched", r.fetched},
          {"skipped", r.skipped},
          {"deduped", r.deduped},
          {"entered_cascade", r.entered_cascade},
          {"accepted", r.accepted},
          {"capped", r.capped},
          {"rejected", r.rejected},
          {"queued", r.queued},
          {"feed", r.feed},
          {"sources", std::move(sources)},
          {"errors", std::move(errors)}};
}

IngestReport run_daily(std::span<const SourceConfig> sources, const CascadeConfig& cfg,
                       std::span<const std::unique_ptr<Stage>> stages, Store& store, FetchEnv& env,
                       const DailyOptions& opts) {
  const Timestamp now = opts.now.value_or(now_utc());
  IngestReport report;
  report.date = opts.date.value_or(date_of(now));
  if (store.read_feed(report.date))
    throw Error(Errc::AlreadyPublished, "feed for " + format_date(report.date) + " is already published");

  SystemClock system_clock;
  FetchEnv shared = env;
  if (!shared.clock) shared.clock = &system_clock;
  std::optional<RateLimiter> limiter;
  if (!shared.limiter) shared.limiter = &limiter.emplace(*shared.clock);

  std::vector<FetchResult> results(sources.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < sources.size();) {
      try {
        results[i] = fetch_source(sources[i], shared);
      } catch (const std::exception& e) {
        results[i] = FetchResult{};
        results[i].error = SourceError{sources[i].name, SourceErrorKind::Network, 0, e.what()};
      }
    }
  };
  const std::size_t n_workers = std::min(std::max<std::size_t>(opts.max_in_flight, 1), sources.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  std::vector<Article> normalized;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto& r = results[i];
    SourceReport sr{sources[i].name, r.items.size() + r.skipped, r.skipped};
    for (const auto& item : r.items) {
      try {
        normalized.push_back(normalize(item, sources[i], now));
      } catch (const Error& e) {
        if (e.code() != Errc::SkipItem) throw;
        ++sr.skipped;
      }
    }
    report.fetched += sr.fetched;
    report.skipped += sr.skipped;
    report.sources.push_back(std::move(sr));
    if (r.error) report.errors.push_back(*r.error);
  }
  if (!sources.empty() && report.errors.size() == sources.size())
    throw Error(Errc::IoError, "every source failed; nothing published for " + format_date(report.date));

  auto window = load_dedup_window(store.dedup_path());
  auto fresh = dedup(normalized, window, now);
  report.deduped = normalized.size() - fresh.size();
  report.entered_cascade = fresh.size();

  auto result = run_cascade(fresh, cfg, stages);

  std::vector<QueueEntry> queue;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const auto& v = result.verdicts[i];
    switch (v.status) {
      case FinalStatus::Accepted: ++report.accepted; break;
      case FinalStatus::Capped: ++report.capped; break;
      case FinalStatus::Rejected: ++report.rejected; break;
    }
    if (v.borderline)
      queue.push_back({fresh[i].id, fresh[i].title, fresh[i].url, fresh[i].source_name, v.mean_score, now});
  }
  report.queued = queue.size();
  for (const auto& f : result.feed) report.feed.push_back(f.article_id);

  const auto run_date = format_date(report.date);
  store.append_articles(fresh, result.verdicts, run_date);
  store.enqueue(queue);

  std::vector<StageName> order;
  json models = json::array();
  for (const auto& s : cfg.stages) {
    order.push_back(s.name);
    models.push_back({{"stage", std::string(stage_name(s.name))},
                      {"model", s.remote ? s.remote->endpoint : s.model_ref}});
  }
  json stage_counts = json::array();
  for (const auto& c : cascade_stats(result.verdicts, order))
    stage_counts.push_back(
        {{"stage", std::string(stage_name(c.stage))}, {"in", c.in}, {"passed", c.passed}, {"rejected", c.rejected}});
  store.write_run_stats(report.date, {{"date", run_date},
                                      {"stages", std::move(stage_counts)},
                                      {"models", std::move(models)},
                                      {"report", to_json(report)}});

  FeedRecord feed;
  feed.date = report.date;
  feed.articles = result.feed;
  store.publish_feed(std::move(feed));
  save_dedup_window(store.dedup_path(), window);
  return report;
}

}  // namespace brightside
