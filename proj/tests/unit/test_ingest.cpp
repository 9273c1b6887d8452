#include <doctest.h>

#include <map>
#include <mutex>

#include "brightside/ingest.hpp"
#include "brightside/store.hpp"
#include "testkit.hpp"

using namespace brightside;
using namespace std::chrono_literals;

namespace {

class FakeClock final : public Clock {
 public:
  time_point now() const override {
    std::lock_guard lock(mu_);
    return t_;
  }
  void sleep_for(std::chrono::milliseconds d) override {
    std::lock_guard lock(mu_);
    sleeps.push_back(d);
    t_ += d;
  }
  std::vector<std::chrono::milliseconds> sleeps;

 private:
  mutable std::mutex mu_;
  time_point t_{};
};

std::string rss(const std::vector<std::pair<std::string, std::string>>& items) {
  std::string s = R"(<?xml version="1.0"?><rss version="2.0"><channel><title>t</title>)";
  for (auto& [title, link] : items) {
    s += "<item>";
    if (!title.empty()) s += "<title>" + title + "</title>";
    s += "<link>" + link + "</link><pubDate>Tue, 10 Mar 2020 04:00:00 GMT</pubDate></item>";
  }
  return s + "</channel></rss>";
}

HttpResult ok(std::string body) { return {HttpResponse{200, std::move(body), "application/xml"}, ""}; }
HttpResult status(int code) { return {HttpResponse{code, "", "text/plain"}, ""}; }

SourceConfig source(std::string name, std::string url, SourceKind kind = SourceKind::Rss) {
  SourceConfig s;
  s.name = std::move(name);
  s.url = std::move(url);
  s.kind = kind;
  s.per_host_rate_limit = 1000.0;
  return s;
}

Article article(std::string title, std::string url) {
  RawItem r{std::move(title), std::move(url), ""};
  return normalize(r, source("s", "https://s.example/feed"), *parse_iso8601("2020-03-10T00:00:00Z"));
}

std::vector<std::unique_ptr<Stage>> pass_all(const CascadeConfig& cfg, double score) {
  std::vector<std::unique_ptr<Stage>> out;
  for (auto& s : cfg.stages)
    out.push_back(std::make_unique<bt::FakeStage>(s.name, [score](const Article&) {
      StageOutcome o;
      o.score = score;
      o.decision = score >= 0.5;
      return o;
    }));
  return out;
}

}  // namespace

TEST_CASE("parse RSS, Atom and JSON documents") {
  auto doc = parse_document(rss({{"Koalas rescued", "https://a.example/1"}, {"Fires rage", "https://a.example/2"}}),
                            SourceKind::Rss);
  REQUIRE(doc.items.size() == 2);
  CHECK(doc.items[0].title == "Koalas rescued");
  CHECK(doc.items[1].link == "https://a.example/2");
  CHECK(doc.items[0].published == "Tue, 10 Mar 2020 04:00:00 GMT");
  CHECK(doc.skipped == 0);

  auto partial = parse_document(rss({{"Good", "https://a.example/1"}, {"", "https://a.example/2"}}), SourceKind::Rss);
  CHECK(partial.items.size() == 1);
  CHECK(partial.skipped == 1);

  const std::string atom = R"(<?xml version="1.0" encoding="utf-8"?>
<feed xmlns="http://www.w3.org/2005/Atom"><title>t</title>
  <entry><title>Atom one</title><link rel="self" href="https://b.example/self"/>
    <link rel="alternate" href="https://b.example/one"/><updated>2020-03-10T05:00:00Z</updated></entry>
  <entry><title>Atom two</title><link href="https://b.example/two"/><published>2020-03-09T05:00:00Z</published></entry>
  <entry><link href="https://b.example/none"/></entry>
</feed>)";
  auto a = parse_document(atom, SourceKind::Atom);
  REQUIRE(a.items.size() == 2);
  CHECK(a.items[0].link == "https://b.example/one");
  CHECK(a.items[0].published == "2020-03-10T05:00:00Z");
  CHECK(a.items[1].published == "2020-03-09T05:00:00Z");
  CHECK(a.skipped == 1);

  auto j = parse_document(
      R"({"articles":[{"title":"Json one","url":"https://c.example/1","publishedAt":"2020-03-10T01:00:00Z"},
          {"title":"no url"}]})",
      SourceKind::JsonApi);
  REQUIRE(j.items.size() == 1);
  CHECK(j.items[0].title == "Json one");
  CHECK(j.skipped == 1);

  CHECK(bt::error_code([&] { parse_document(atom, SourceKind::Rss); }) == Errc::FormatError);
  CHECK(bt::error_code([&] { parse_document("<rss", SourceKind::Rss); }) == Errc::FormatError);
  CHECK(bt::error_code([&] { parse_document("{}", SourceKind::JsonApi); }) == Errc::FormatError);
  CHECK(bt::error_code([&] { parse_document("[1]", SourceKind::JsonApi); }) == Errc::FormatError);
}

TEST_CASE("normalize") {
  const auto fetched = *parse_iso8601("2020-03-10T12:00:00Z");
  auto src = source("wire", "https://feed.example/rss");
  auto a = normalize({"  Fires  rage\n", "https://EX.com/a?utm_source=x#frag", ""}, src, fetched);
  CHECK(a.title == "Fires rage");
  CHECK(a.url == "https://ex.com/a");
  CHECK(a.published_at == fetched);
  CHECK(a.fetched_at == fetched);
  CHECK(a.source_name == "wire");
  CHECK(a.id == bt::expected_article_id("Fires rage", "https://ex.com/a"));

  auto dated = normalize({"x", "https://ex.com/b", "Tue, 10 Mar 2020 04:00:00 GMT"}, src, fetched);
  CHECK(format_timestamp(dated.published_at) == "2020-03-10T04:00:00Z");

  CHECK(bt::error_code([&] { normalize({" \n ", "https://ex.com/a", ""}, src, fetched); }) == Errc::SkipItem);
  CHECK(bt::error_code([&] { normalize({"t", "ftp://ex.com/a", ""}, src, fetched); }) == Errc::SkipItem);

  CHECK(canonicalize_url("https://EX.com/a?utm_source=x#frag") == "https://ex.com/a");
  CHECK(canonicalize_url("HTTP://Ex.com:80/p?id=3&UTM_Medium=y&b=2") == "http://ex.com/p?id=3&b=2");
  CHECK(canonicalize_url("https://ex.com:443") == "https://ex.com/");
  CHECK(canonicalize_url("https://ex.com:8443/x") == "https://ex.com:8443/x");
  CHECK_FALSE(canonicalize_url("not a url"));
  CHECK(collapse_whitespace("\t a \n\n b  ") == "a b");
}

TEST_CASE("dedup") {
  const auto now = *parse_iso8601("2020-03-10T00:00:00Z");
  DedupWindow w;
  std::vector<Article> batch = {article("Fires rage in NSW", "https://ex.com/a?utm_source=1"),
                                article("FIRES RAGE IN NSW!", "https://EX.com/a"),
                                article("Koalas rescued", "https://ex.com/k")};
  auto fresh = dedup(batch, w, now);
  REQUIRE(fresh.size() == 2);
  CHECK(fresh[0].title == "Fires rage in NSW");
  CHECK(fresh[1].title == "Koalas rescued");
  CHECK(w.size() == 2);
  CHECK(dedup(batch, w, now).empty());

  DedupWindow old;
  old.insert(dedup_key(batch[2]), now - std::chrono::days{15});
  CHECK(dedup(std::span(batch).subspan(2), old, now).size() == 1);
  DedupWindow recent;
  recent.insert(dedup_key(batch[2]), now - std::chrono::days{13});
  CHECK(dedup(std::span(batch).subspan(2), recent, now).empty());

  DedupWindow edge;
  edge.insert(1, now - std::chrono::days{14});
  edge.evict(now);
  CHECK(edge.size() == 0);

  bt::TempDir dir;
  save_dedup_window(dir.path() / "d.json", w);
  auto back = load_dedup_window(dir.path() / "d.json");
  CHECK(back.size() == 2);
  CHECK(back.contains(dedup_key(batch[0])));
  CHECK(back.to_json() == w.to_json());
  CHECK(load_dedup_window(dir.path() / "missing.json").size() == 0);
}

TEST_CASE("rate limiter spaces requests per host") {
  FakeClock clock;
  RateLimiter lim(clock);
  std::vector<Clock::time_point> starts;
  for (int i = 0; i < 5; ++i) {
    lim.acquire("a.example", 2.0);
    starts.push_back(clock.now());
    lim.acquire("b.example", 2.0);
  }
  for (std::size_t i = 1; i < starts.size(); ++i) CHECK(starts[i] - starts[i - 1] >= 500ms);
  CHECK(starts.back() - starts.front() == 2000ms);
}

TEST_CASE("fetch_source retries and classifies errors") {
  FakeClock clock;
  RateLimiter lim(clock);
  int calls = 0;
  FetchEnv env{[&](const std::string&, std::chrono::milliseconds) {
                 ++calls;
                 return status(404);
               },
               &clock, &lim};
  auto src = source("s", "https://a.example/rss");
  auto r = fetch_source(src, env);
  REQUIRE(r.error);
  CHECK(r.error->kind == SourceErrorKind::Http);
  CHECK(r.error->status == 404);
  CHECK(calls == 3);
  CHECK(std::count(clock.sleeps.begin(), clock.sleeps.end(), 1000ms) == 1);
  CHECK(std::count(clock.sleeps.begin(), clock.sleeps.end(), 2000ms) == 1);
  CHECK(to_json(*r.error)["kind"] == "http");

  calls = 0;
  env.fetch = [&](const std::string&, std::chrono::milliseconds) {
    return ++calls < 3 ? HttpResult{std::nullopt, "connection refused"} : ok(rss({{"t", "https://a.example/1"}}));
  };
  auto recovered = fetch_source(src, env);
  CHECK_FALSE(recovered.error);
  CHECK(recovered.items.size() == 1);

  calls = 0;
  env.fetch = [&](const std::string&, std::chrono::milliseconds) {
    ++calls;
    return ok("<html>nope</html>");
  };
  auto bad = fetch_source(src, env);
  REQUIRE(bad.error);
  CHECK(bad.error->kind == SourceErrorKind::Parse);
  CHECK(calls == 1);

  env.fetch = [&](const std::string&, std::chrono::milliseconds) { return HttpResult{std::nullopt, "timeout"}; };
  auto net = fetch_source(src, env);
  REQUIRE(net.error);
  CHECK(net.error->kind == SourceErrorKind::Network);
}

TEST_CASE("sources file") {
  auto list = sources_from_json(nlohmann::json::parse(R"([
    {"name":"a","kind":"rss","url":"https://a.example/rss"},
    {"name":"b","kind":"json_api","url":"https://b.example/api","poll_interval_hours":6,"rate_limit":0.5,
     "timeout_ms":2000,"retries":0,"backoff_ms":10}])"));
  REQUIRE(list.size() == 2);
  CHECK(list[0].poll_interval == 24h);
  CHECK(list[0].retries == 2);
  CHECK(list[1].kind == SourceKind::JsonApi);
  CHECK(list[1].poll_interval == 6h);
  CHECK(list[1].per_host_rate_limit == 0.5);
  CHECK(list[1].timeout == 2000ms);
  CHECK(list[1].retries == 0);

  auto bad = [](const char* t) {
    return bt::error_code([&] { sources_from_json(nlohmann::json::parse(t)); }) == Errc::ConfigError;
  };
  CHECK(bad(R"([{"name":"a","kind":"gopher","url":"https://a.example"}])"));
  CHECK(bad(R"([{"name":"a","kind":"rss","url":"nope"}])"));
  CHECK(bad(R"([{"name":"a","kind":"rss","url":"https://a.example","retries":-1}])"));
  CHECK(bad(R"({"name":"a"})"));
}

TEST_CASE("run_daily isolates failures and conserves counts") {
  bt::TempDir dir;
  Store store(dir.path());
  std::mutex mu;
  std::map<std::string, int> hits;
  FakeClock clock;
  FetchEnv env{[&](const std::string& url, std::chrono::milliseconds) {
                 {
                   std::lock_guard lock(mu);
                   ++hits[url];
                 }
                 if (url.find("down") != std::string::npos) return status(503);
                 return ok(rss({{"Koalas rescued", "https://a.example/1"},
                                {"koalas RESCUED", "https://a.example/1#x"},
                                {"", "https://a.example/3"},
                                {"Bad link", "mailto:x"},
                                {"Sunny day", "https://a.example/2"}}));
               },
               &clock, nullptr};
  std::vector<SourceConfig> sources = {source("up", "https://up.example/rss"),
                                       source("down", "https://down.example/rss")};
  auto cfg = default_cascade_config();
  auto stages = pass_all(cfg, 0.9);
  DailyOptions opts;
  opts.date = parse_date("2020-03-10");
  opts.now = parse_iso8601("2020-03-10T06:00:00Z");

  auto r = run_daily(sources, cfg, stages, store, env, opts);
  CHECK(hits["https://down.example/rss"] == 3);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].source == "down");
  CHECK(r.errors[0].status == 503);
  CHECK(r.fetched == 5);
  CHECK(r.skipped == 2);
  CHECK(r.deduped == 1);
  CHECK(r.entered_cascade == 2);
  CHECK(r.fetched == r.skipped + r.deduped + r.entered_cascade);
  CHECK(r.accepted == 2);
  REQUIRE(r.feed.size() == 2);
  CHECK(store.read_feed(*opts.date)->articles.size() == 2);
  CHECK(store.read_articles().size() == 2);
  auto stats = store.read_run_stats(*opts.date);
  REQUIRE(stats);
  CHECK((*stats)["stages"][0]["in"] == 2);

  CHECK(bt::error_code([&] { run_daily(sources, cfg, stages, store, env, opts); }) == Errc::AlreadyPublished);

  // the next day everything is a repeat: an explicit empty feed
  opts.date = parse_date("2020-03-11");
  opts.now = parse_iso8601("2020-03-11T06:00:00Z");
  auto again = run_daily(sources, cfg, stages, store, env, opts);
  CHECK(again.entered_cascade == 0);
  CHECK(again.deduped == 3);
  REQUIRE(store.read_feed(*opts.date));
  CHECK(store.read_feed(*opts.date)->articles.empty());

  std::vector<SourceConfig> all_down = {source("down", "https://down.example/rss")};
  opts.date = parse_date("2020-03-12");
  CHECK(bt::error_code([&] { run_daily(all_down, cfg, stages, store, env, opts); }) == Errc::IoError);
  CHECK_FALSE(store.read_feed(*opts.date));
}

TEST_CASE("run_daily queues borderline rejections") {
  bt::TempDir dir;
  Store store(dir.path());
  FakeClock clock;
  FetchEnv env{[&](const std::string&, std::chrono::milliseconds) {
                 return ok(rss({{"Mixed news", "https://a.example/m"}}));
               },
               &clock, nullptr};
  std::vector<SourceConfig> sources = {source("up", "https://up.example/rss")};
  auto cfg = default_cascade_config();
  auto stages = pass_all(cfg, 0.45);
  DailyOptions opts;
  opts.date = parse_date("2020-03-10");
  opts.now = parse_iso8601("2020-03-10T06:00:00Z");
  auto r = run_daily(sources, cfg, stages, store, env, opts);
  CHECK(r.rejected == 1);
  CHECK(r.queued == 1);
  REQUIRE(store.queue().size() == 1);
  CHECK(store.queue()[0].title == "Mixed news");
  CHECK(store.queue()[0].mean_score == 0.45);
}
