#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brightside/time.hpp"

namespace brightside {

// A normalized news item. `id` is derived from the normalized title and the
// canonical url, see make_article_id().
struct Article {
  std::string id;
  std::string title;
  std::optional<std::string> body;
  std::string source_name;
  std::string url;
  Timestamp published_at{};
  Timestamp fetched_at{};
};

// FNV-1a-64 over `title + '\n' + canonical_url`, hex encoded.
std::string make_article_id(std::string_view normalized_title,
                            std::string_view canonical_url);

enum class LabelKind { Binary, Ordinal };
enum class Origin { Dataset, Curator };

std::string_view origin_name(Origin o) noexcept;

struct LabeledExample {
  std::string text;
  int label = 0;  // {0,1} for Binary, [1,5] for Ordinal
  LabelKind kind = LabelKind::Binary;
  Origin origin = Origin::Dataset;
  std::optional<Date> date;
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

enum class DatasetFormat { HeadlinesCsv, TweetsCsv, RatingsCsv, Jsonl };

std::optional<DatasetFormat> parse_dataset_format(std::string_view name);
std::string_view dataset_format_name(DatasetFormat f) noexcept;

// Picks the format from the extension (.jsonl) or the CSV header line.
DatasetFormat detect_dataset_format(const std::filesystem::path& path);

struct LoadedDataset {
  std::vector<LabeledExample> examples;
  std::size_t skipped = 0;   // malformed rows
  std::size_t dropped = 0;   // score == 0 rows (no class assigned)
  std::size_t rows = 0;      // data rows seen, header excluded
};

// score > 0 -> 1, score < 0 -> 0, score == 0 -> nullopt (dropped).
// Throws Errc::InvalidScore for NaN / infinity.
std::optional<int> binarize_label(double score);

LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

DatasetSplit split_dataset(std::vector<LabeledExample> examples,
                           std::uint64_t seed, double ratio = 0.8);

// Writes examples in the jsonl dataset format.
std::string to_jsonl_line(const LabeledExample& ex);
std::optional<LabeledExample> from_jsonl_line(std::string_view line);

// RFC 4180 field splitting for one physical line; handles "" escapes.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);

}  // namespace brightside
