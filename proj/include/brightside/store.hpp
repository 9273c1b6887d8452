#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "brightside/artifact.hpp"
#include "brightside/corpus.hpp"
#include "brightside/features.hpp"
#include "brightside/pipeline.hpp"

namespace brightside {

// Test hook invoked after the temp file is durable and before the rename.
using BeforeRename = std::function<void(const std::filesystem::path& tmp)>;

// temp file + fsync + rename + directory fsync. Readers see the old content
// or the new content, never a prefix.
void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const BeforeRename& hook = {});

// Appends each line plus '\n' in one write and fsyncs before returning.
void append_lines_durable(const std::filesystem::path& path, std::span<const std::string> lines);

struct JsonlContents {
  std::vector<nlohmann::json> records;
  std::size_t partial = 0;  // trailing line without '\n' (torn append)
  std::size_t corrupt = 0;  // complete lines that fail to parse
};

// Missing file reads as empty.
JsonlContents read_jsonl(const std::filesystem::path& path);

std::optional<nlohmann::json> read_json_file(const std::filesystem::path& path);

// --- model artifacts -------------------------------------------------------

void save_model_file(const std::filesystem::path& path, const ModelArtifact& a);
// Errc::IoError when unreadable, then artifact_from_json() validation.
ModelArtifact load_model_file(const std::filesystem::path& path);

// models_dir/<id>.json; returns the id (content id unless given).
std::string save_model(const std::filesystem::path& models_dir, const ModelArtifact& a,
                       std::optional<std::string> id = std::nullopt);
ModelArtifact load_model(const std::filesystem::path& models_dir, std::string_view id);

// models_dir/vocab-<id>.json; returns the id.
std::string save_vocabulary(const std::filesystem::path& models_dir, const Vocabulary& v);
Vocabulary load_vocabulary(const std::filesystem::path& models_dir, std::string_view id);

// --- daily records ---------------------------------------------------------

struct FeedRecord {
  Date date{};
  std::vector<FeedEntry> articles;  // mean_score descending
  bool published = false;
};

nlohmann::json to_json(const FeedRecord& f);
FeedRecord feed_from_json(const nlohmann::json& j);

struct StoredArticle {
  Article article;
  Verdict verdict;
  std::string run_date;
};

nlohmann::json to_json(const Article& a);
Article article_from_json(const nlohmann::json& j);

struct QueueEntry {
  std::string article_id;
  std::string title;
  std::string url;
  std::string source;
  double mean_score = 0.0;
  Timestamp enqueued_at{};
};

enum class CuratorLabel { Positive, Negative, Skip };

std::optional<CuratorLabel> parse_curator_label(std::string_view s);
std::string_view curator_label_name(CuratorLabel l) noexcept;

struct CuratedExample {
  std::string article_id;
  std::string curator_id;
  LabeledExample example;
};

// File-backed persistence rooted at a directory:
//
//   data/articles.jsonl    article + verdict trail per line
//   data/feeds/<date>.json published daily feeds
//   data/queue.jsonl       curation queue events (enqueue / resolve)
//   data/curated.jsonl     curator-labeled examples, one per article
//   data/runs/<date>.json  per-run cascade statistics
//   data/dedup.json        ingest dedup window
//   models/<id>.json, models/vocab-<id>.json
//
// One writer per Store instance: every mutation takes the same lock.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path data_dir() const { return root_ / "data"; }
  std::filesystem::path models_dir() const { return root_ / "models"; }
  std::filesystem::path feed_path(Date d) const;
  std::filesystem::path run_stats_path(Date d) const;
  std::filesystem::path dedup_path() const { return data_dir() / "dedup.json"; }

  // No-op on an empty batch. Articles and verdicts pair up by position.
  void append_articles(std::span<const Article> articles, std::span<const Verdict> verdicts,
                       std::string_view run_date);
  std::vector<StoredArticle> read_articles(std::size_t* partial = nullptr) const;
  std::optional<StoredArticle> find_article(std::string_view id) const;

  // Errc::AlreadyPublished if a feed exists for the date.
  void publish_feed(FeedRecord record, const BeforeRename& hook = {});
  std::optional<FeedRecord> read_feed(Date d) const;
  std::optional<Date> latest_feed_date() const;

  void enqueue(std::span<const QueueEntry> entries);
  // Pending entries, oldest first.
  std::vector<QueueEntry> queue() const;

  // Removes the article from the queue and stores (or replaces, or for skip
  // deletes) its curator example. Errc::NotFound when the article was never
  // queued and is in no feed. Returns the queue size afterwards.
  std::size_t record_curator_verdict(std::string_view article_id, CuratorLabel label,
                                     std::string_view curator_id);
  std::vector<CuratedExample> curated() const;

  void write_run_stats(Date d, const nlohmann::json& stats);
  std::optional<nlohmann::json> read_run_stats(Date d) const;

 private:
  bool in_any_feed(std::string_view id) const;

  std::filesystem::path root_;
  mutable std::mutex write_mu_;
};

}  // namespace brightside
