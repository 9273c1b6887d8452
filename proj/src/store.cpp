#include "brightside/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "brightside/error.hpp"

namespace brightside {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(Errc::IoError, what + ": " + std::strerror(errno));
}

class Fd {
 public:
  Fd(const fs::path& p, int flags, mode_t mode = 0644) : fd_(::open(p.c_str(), flags, mode)) {
    if (fd_ < 0) io_fail("cannot open " + p.string());
  }
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

void write_all(int fd, std::string_view bytes, const fs::path& p) {
  while (!bytes.empty()) {
    auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed for " + p.string());
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json stage_entries_json(const Verdict& v) { return to_json(v); }

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content, const BeforeRename& hook) {
  const auto dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
    write_all(fd.get(), content, tmp);
    if (::fsync(fd.get()) != 0) io_fail("fsync failed for " + tmp.string());
  }
  if (hook) hook(tmp);
  if (::rename(tmp.c_str(), path.c_str()) != 0) io_fail("rename failed for " + path.string());
  fsync_dir(dir);
}

void append_lines_durable(const fs::path& path, std::span<const std::string> lines) {
  if (lines.empty()) return;
  std::error_code ec;
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path(), ec);
  std::string buf;
  for (const auto& l : lines) {
    buf += l;
    buf += '\n';
  }
  Fd fd(path, O_WRONLY | O_CREAT | O_APPEND);
  write_all(fd.get(), buf, path);
  if (::fsync(fd.get()) != 0) io_fail("fsync failed for " + path.string());
}

JsonlContents read_jsonl(const fs::path& path) {
  JsonlContents out;
  if (!fs::exists(path)) return out;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      ++out.partial;
      break;
    }
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) ++out.corrupt;
    else out.records.push_back(std::move(j));
  }
  return out;
}

std::optional<json> read_json_file(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::FormatError, "malformed JSON in " + path.string());
  return j;
}

// --- models ------------------------------------------------------------------

void save_model_file(const fs::path& path, const ModelArtifact& a) {
  write_file_atomic(path, to_json(a).dump(2) + "\n");
}

ModelArtifact load_model_file(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::IoError, "no model artifact at " + path.string());
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::CorruptArtifact, "artifact is not JSON: " + path.string());
  return artifact_from_json(j);
}

std::string save_model(const fs::path& models_dir, const ModelArtifact& a,
                       std::optional<std::string> id) {
  std::string name = id ? *id : artifact_content_id(a);
  save_model_file(models_dir / (name + ".json"), a);
  return name;
}

ModelArtifact load_model(const fs::path& models_dir, std::string_view id) {
  return load_model_file(models_dir / (std::string(id) + ".json"));
}

std::string save_vocabulary(const fs::path& models_dir, const Vocabulary& v) {
  std::string id = v.id();
  write_file_atomic(models_dir / ("vocab-" + id + ".json"), v.to_json().dump() + "\n");
  return id;
}

Vocabulary load_vocabulary(const fs::path& models_dir, std::string_view id) {
  const auto path = models_dir / ("vocab-" + std::string(id) + ".json");
  if (!fs::exists(path)) throw Error(Errc::IoError, "no vocabulary at " + path.string());
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::CorruptArtifact, "vocabulary is not JSON: " + path.string());
  return Vocabulary::from_json(j);
}

// --- records -----------------------------------------------------------------

json to_json(const FeedRecord& f) {
  json arts = json::array();
  for (const auto& e : f.articles) arts.push_back({{"id", e.article_id}, {"mean_score", e.mean_score}});
  return {{"date", format_date(f.date)}, {"published", f.published}, {"articles", std::move(arts)}};
}

FeedRecord feed_from_json(const json& j) {
  FeedRecord f;
  auto d = parse_date(j.at("date").get<std::string>());
  if (!d) throw Error(Errc::FormatError, "feed has a bad date");
  f.date = *d;
  f.published = j.value("published", false);
  for (const auto& e : j.at("articles"))
    f.articles.push_back({e.at("id").get<std::string>(), e.at("mean_score").get<double>()});
  return f;
}

json to_json(const Article& a) {
  json j = {{"id", a.id},
            {"title", a.title},
            {"source", a.source_name},
            {"url", a.url},
            {"published_at", format_timestamp(a.published_at)},
            {"fetched_at", format_timestamp(a.fetched_at)}};
  if (a.body) j["body"] = *a.body;
  return j;
}

Article article_from_json(const json& j) {
  Article a;
  a.id = j.at("id").get<std::string>();
  a.title = j.at("title").get<std::string>();
  a.source_name = j.value("source", std::string{});
  a.url = j.value("url", std::string{});
  if (auto ts = parse_iso8601(j.value("published_at", std::string{}))) a.published_at = *ts;
  if (auto ts = parse_iso8601(j.value("fetched_at", std::string{}))) a.fetched_at = *ts;
  if (j.contains("body") && j["body"].is_string()) a.body = j["body"].get<std::string>();
  return a;
}

std::optional<CuratorLabel> parse_curator_label(std::string_view s) {
  if (s == "positive") return CuratorLabel::Positive;
  if (s == "negative") return CuratorLabel::Negative;
  if (s == "skip") return CuratorLabel::Skip;
  return std::nullopt;
}

std::string_view curator_label_name(CuratorLabel l) noexcept {
  switch (l) {
    case CuratorLabel::Positive: return "positive";
    case CuratorLabel::Negative: return "negative";
    case CuratorLabel::Skip: return "skip";
  }
  return "skip";
}

// --- Store -------------------------------------------------------------------

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::feed_path(Date d) const { return data_dir() / "feeds" / (format_date(d) + ".json"); }

fs::path Store::run_stats_path(Date d) const {
  return data_dir() / "runs" / (format_date(d) + ".json");
}

void Store::append_articles(std::span<const Article> articles, std::span<const Verdict> verdicts,
                            std::string_view run_date) {
  if (articles.size() != verdicts.size())
    throw Error(Errc::InvalidArgument, "articles and verdicts differ in length");
  if (articles.empty()) return;
  std::vector<std::string> lines;
  lines.reserve(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) {
    json j = to_json(articles[i]);
    j["verdict"] = stage_entries_json(verdicts[i]);
    j["run_date"] = std::string(run_date);
    lines.push_back(j.dump());
  }
  std::lock_guard lock(write_mu_);
  append_lines_durable(data_dir() / "articles.jsonl", lines);
}

std::vector<StoredArticle> Store::read_articles(std::size_t* partial) const {
  auto contents = read_jsonl(data_dir() / "articles.jsonl");
  if (partial) *partial = contents.partial;
  std::vector<StoredArticle> out;
  out.reserve(contents.records.size());
  for (const auto& j : contents.records) {
    try {
      StoredArticle s;
      s.article = article_from_json(j);
      s.verdict = verdict_from_json(j.at("verdict"));
      s.run_date = j.value("run_date", std::string{});
      out.push_back(std::move(s));
    } catch (const std::exception&) {
      // a structurally wrong record is skipped like a torn line
    }
  }
  return out;
}

std::optional<StoredArticle> Store::find_article(std::string_view id) const {
  std::optional<StoredArticle> found;
  for (auto& s : read_articles())
    if (s.article.id == id) found = std::move(s);
  return found;
}

void Store::publish_feed(FeedRecord record, const BeforeRename& hook) {
  std::lock_guard lock(write_mu_);
  const auto path = feed_path(record.date);
  if (fs::exists(path))
    throw Error(Errc::AlreadyPublished, "feed already published for " + format_date(record.date));
  std::stable_sort(record.articles.begin(), record.articles.end(),
                   [](const FeedEntry& a, const FeedEntry& b) { return a.mean_score > b.mean_score; });
  record.published = true;
  write_file_atomic(path, to_json(record).dump(2) + "\n", hook);
}

std::optional<FeedRecord> Store::read_feed(Date d) const {
  auto j = read_json_file(feed_path(d));
  if (!j) return std::nullopt;
  return feed_from_json(*j);
}

std::optional<Date> Store::latest_feed_date() const {
  const auto dir = data_dir() / "feeds";
  std::optional<Date> best;
  if (!fs::exists(dir)) return best;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    auto d = parse_date(e.path().stem().string());
    if (d && (!best || std::chrono::sys_days{*d} > std::chrono::sys_days{*best})) best = d;
  }
  return best;
}

void Store::enqueue(std::span<const QueueEntry> entries) {
  std::vector<std::string> lines;
  for (const auto& e : entries) {
    lines.push_back(json{{"op", "enqueue"},
                         {"id", e.article_id},
                         {"title", e.title},
                         {"url", e.url},
                         {"source", e.source},
                         {"mean_score", e.mean_score},
                         {"enqueued_at", format_timestamp(e.enqueued_at)}}
                        .dump());
  }
  std::lock_guard lock(write_mu_);
  append_lines_durable(data_dir() / "queue.jsonl", lines);
}

std::vector<QueueEntry> Store::queue() const {
  auto contents = read_jsonl(data_dir() / "queue.jsonl");
  std::vector<QueueEntry> pending;
  for (const auto& j : contents.records) {
    const auto op = j.value("op", std::string{});
    const auto id = j.value("id", std::string{});
    if (op == "enqueue") {
      if (std::any_of(pending.begin(), pending.end(),
                      [&](const QueueEntry& q) { return q.article_id == id; }))
        continue;
      QueueEntry q;
      q.article_id = id;
      q.title = j.value("title", std::string{});
      q.url = j.value("url", std::string{});
      q.source = j.value("source", std::string{});
      q.mean_score = j.value("mean_score", 0.0);
      if (auto ts = parse_iso8601(j.value("enqueued_at", std::string{}))) q.enqueued_at = *ts;
      pending.push_back(std::move(q));
    } else if (op == "resolve") {
      std::erase_if(pending, [&](const QueueEntry& q) { return q.article_id == id; });
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const QueueEntry& a, const QueueEntry& b) {
    return a.enqueued_at < b.enqueued_at;
  });
  return pending;
}

bool Store::in_any_feed(std::string_view id) const {
  const auto dir = data_dir() / "feeds";
  if (!fs::exists(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    auto j = read_json_file(e.path());
    if (!j) continue;
    for (const auto& a : j->value("articles", json::array()))
      if (a.value("id", std::string{}) == id) return true;
  }
  return false;
}

std::size_t Store::record_curator_verdict(std::string_view article_id, CuratorLabel label,
                                          std::string_view curator_id) {
  std::lock_guard lock(write_mu_);

  // Known ids: anything ever queued, plus published feed members.
  auto qlog = read_jsonl(data_dir() / "queue.jsonl");
  bool queued_ever = false;
  std::optional<json> enqueue_rec;
  for (const auto& j : qlog.records) {
    if (j.value("id", std::string{}) == article_id && j.value("op", std::string{}) == "enqueue") {
      queued_ever = true;
      enqueue_rec = j;
    }
  }
  if (!queued_ever && !in_any_feed(article_id))
    throw Error(Errc::NotFound, "article " + std::string(article_id) + " is not awaiting curation");

  std::string text;
  if (enqueue_rec) text = enqueue_rec->value("title", std::string{});
  if (text.empty()) {
    for (const auto& s : read_articles())
      if (s.article.id == article_id) text = s.article.title;
  }

  // Rewrite curated.jsonl so each article has at most one example.
  const auto curated_path = data_dir() / "curated.jsonl";
  auto existing = read_jsonl(curated_path);
  std::string content;
  for (const auto& j : existing.records)
    if (j.value("article_id", std::string{}) != article_id) content += j.dump() + "\n";
  if (label != CuratorLabel::Skip) {
    LabeledExample ex;
    ex.text = text.empty() ? std::string(article_id) : text;
    ex.label = label == CuratorLabel::Positive ? 1 : 0;
    ex.origin = Origin::Curator;
    ex.date = date_of(now_utc());
    json j = json::parse(to_jsonl_line(ex));
    j["article_id"] = std::string(article_id);
    j["curator"] = std::string(curator_id);
    content += j.dump() + "\n";
  }
  write_file_atomic(curated_path, content);

  const std::string resolve = json{{"op", "resolve"},
                                   {"id", std::string(article_id)},
                                   {"label", std::string(curator_label_name(label))},
                                   {"curator", std::string(curator_id)},
                                   {"at", format_timestamp(now_utc())}}
                                  .dump();
  append_lines_durable(data_dir() / "queue.jsonl", std::span<const std::string>(&resolve, 1));
  return queue().size();
}

std::vector<CuratedExample> Store::curated() const {
  std::vector<CuratedExample> out;
  for (const auto& j : read_jsonl(data_dir() / "curated.jsonl").records) {
    auto ex = from_jsonl_line(j.dump());
    if (!ex) continue;
    out.push_back({j.value("article_id", std::string{}), j.value("curator", std::string{}), *ex});
  }
  return out;
}

void Store::write_run_stats(Date d, const json& stats) {
  std::lock_guard lock(write_mu_);
  write_file_atomic(run_stats_path(d), stats.dump(2) + "\n");
}

std::optional<json> Store::read_run_stats(Date d) const { return read_json_file(run_stats_path(d)); }

}  // namespace brightside
