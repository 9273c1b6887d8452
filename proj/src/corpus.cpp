#include "brightside/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "brightside/error.hpp"
#include "brightside/hash.hpp"

namespace brightside {

namespace {

using json = nlohmann::json;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<int> parse_int(std::string_view s) {
  try {
    std::size_t used = 0;
    int v = std::stoi(std::string(s), &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<double> parse_double(std::string_view s) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(s), &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string trim_copy(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// Column positions resolved from the header.
struct Columns {
  int text = -1;
  int label = -1;
  int date = -1;
};

Columns resolve_columns(const std::vector<std::string>& header, DatasetFormat format) {
  Columns cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto name = lower(trim_copy(header[i]));
    int idx = static_cast<int>(i);
    if (name == "text") cols.text = idx;
    if (name == "date") cols.date = idx;
    if ((format == DatasetFormat::HeadlinesCsv && name == "score") ||
        (format == DatasetFormat::TweetsCsv && name == "label") ||
        (format == DatasetFormat::RatingsCsv && name == "rating"))
      cols.label = idx;
  }
  if (cols.text < 0 || cols.label < 0)
    throw Error(Errc::FormatError,
                std::string("missing required column for ") +
                    std::string(dataset_format_name(format)));
  return cols;
}

}  // namespace

std::string make_article_id(std::string_view normalized_title,
                            std::string_view canonical_url) {
  auto h = fnv1a64(normalized_title);
  h = fnv1a64("\n", h);
  h = fnv1a64(canonical_url, h);
  return to_hex(h);
}

std::string_view origin_name(Origin o) noexcept {
  return o == Origin::Curator ? "curator" : "dataset";
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
  if (name == "headlines_csv") return DatasetFormat::HeadlinesCsv;
  if (name == "tweets_csv") return DatasetFormat::TweetsCsv;
  if (name == "ratings_csv") return DatasetFormat::RatingsCsv;
  if (name == "jsonl") return DatasetFormat::Jsonl;
  return std::nullopt;
}

std::string_view dataset_format_name(DatasetFormat f) noexcept {
  switch (f) {
    case DatasetFormat::HeadlinesCsv: return "headlines_csv";
    case DatasetFormat::TweetsCsv: return "tweets_csv";
    case DatasetFormat::RatingsCsv: return "ratings_csv";
    case DatasetFormat::Jsonl: return "jsonl";
  }
  return "unknown";
}

DatasetFormat detect_dataset_format(const std::filesystem::path& path) {
  if (path.extension() == ".jsonl") return DatasetFormat::Jsonl;
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  auto fields = split_csv_line(strip_cr(header));
  if (fields) {
    for (auto& f : *fields) f = lower(trim_copy(f));
    auto has = [&](std::string_view n) {
      return std::find(fields->begin(), fields->end(), n) != fields->end();
    };
    if (has("score") && has("text")) return DatasetFormat::HeadlinesCsv;
    if (has("rating") && has("text")) return DatasetFormat::RatingsCsv;
    if (has("label") && has("text")) return DatasetFormat::TweetsCsv;
  }
  throw Error(Errc::FormatError, "cannot infer dataset format of " + path.string());
}

std::optional<int> binarize_label(double score) {
  if (!std::isfinite(score))
    throw Error(Errc::InvalidScore, "sentiment score is not finite");
  if (score > 0.0) return 1;
  if (score < 0.0) return 0;
  return std::nullopt;
}

std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty() && !field_was_quoted) cur.push_back(c);
      else {
        quoted = true;
        field_was_quoted = true;
      }
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

std::string to_jsonl_line(const LabeledExample& ex) {
  json j;
  j["text"] = ex.text;
  j["label"] = ex.label;
  j["kind"] = ex.kind == LabelKind::Ordinal ? "ordinal" : "binary";
  j["origin"] = std::string(origin_name(ex.origin));
  if (ex.date) j["date"] = format_date(*ex.date);
  return j.dump();
}

std::optional<LabeledExample> from_jsonl_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
      !j["label"].is_number_integer())
    return std::nullopt;
  LabeledExample ex;
  ex.text = j["text"].get<std::string>();
  ex.label = j["label"].get<int>();
  if (j.contains("kind") && j["kind"].is_string()) {
    auto kind = j["kind"].get<std::string>();
    if (kind == "ordinal") ex.kind = LabelKind::Ordinal;
    else if (kind == "binary") ex.kind = LabelKind::Binary;
    else return std::nullopt;
  } else {
    ex.kind = ex.label >= 2 ? LabelKind::Ordinal : LabelKind::Binary;
  }
  if (j.contains("origin")) {
    if (!j["origin"].is_string()) return std::nullopt;
    auto origin = j["origin"].get<std::string>();
    if (origin == "curator") ex.origin = Origin::Curator;
    else if (origin == "dataset") ex.origin = Origin::Dataset;
    else return std::nullopt;
  }
  if (j.contains("date") && j["date"].is_string()) {
    ex.date = parse_date(j["date"].get<std::string>());
    if (!ex.date) {
      if (auto ts = parse_iso8601(j["date"].get<std::string>())) ex.date = date_of(*ts);
    }
  }
  bool valid_label = ex.kind == LabelKind::Binary ? (ex.label == 0 || ex.label == 1)
                                                   : (ex.label >= 1 && ex.label <= 5);
  if (!valid_label || ex.text.empty()) return std::nullopt;
  return ex;
}

LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());

  LoadedDataset out;
  std::string line;

  if (format == DatasetFormat::Jsonl) {
    while (std::getline(in, line)) {
      line = strip_cr(std::move(line));
      if (trim_copy(line).empty()) continue;
      ++out.rows;
      if (auto ex = from_jsonl_line(line)) out.examples.push_back(std::move(*ex));
      else ++out.skipped;
    }
    return out;
  }

  if (!std::getline(in, line)) return out;  // empty file
  auto header = split_csv_line(strip_cr(line));
  if (!header) throw Error(Errc::FormatError, "unparseable CSV header");
  Columns cols = resolve_columns(*header, format);
  const auto needed = static_cast<std::size_t>(std::max({cols.text, cols.label, cols.date})) + 1;

  while (std::getline(in, line)) {
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    ++out.rows;
    auto fields = split_csv_line(line);
    if (!fields || fields->size() < needed) {
      ++out.skipped;
      continue;
    }
    LabeledExample ex;
    ex.text = (*fields)[static_cast<std::size_t>(cols.text)];
    if (trim_copy(ex.text).empty()) {
      ++out.skipped;
      continue;
    }
    const auto& raw = (*fields)[static_cast<std::size_t>(cols.label)];
    if (format == DatasetFormat::HeadlinesCsv) {
      auto score = parse_double(trim_copy(raw));
      if (!score || !std::isfinite(*score) || *score < -1.0 || *score > 1.0) {
        ++out.skipped;
        continue;
      }
      auto label = binarize_label(*score);
      if (!label) {
        ++out.dropped;
        continue;
      }
      ex.label = *label;
    } else if (format == DatasetFormat::TweetsCsv) {
      auto v = parse_int(trim_copy(raw));
      if (!v || (*v != 0 && *v != 4)) {
        ++out.skipped;
        continue;
      }
      ex.label = *v == 4 ? 1 : 0;
    } else {
      auto v = parse_int(trim_copy(raw));
      if (!v || *v < 1 || *v > 5) {
        ++out.skipped;
        continue;
      }
      ex.label = *v;
      ex.kind = LabelKind::Ordinal;
    }
    if (cols.date >= 0) {
      const auto& d = (*fields)[static_cast<std::size_t>(cols.date)];
      ex.date = parse_date(d);
      if (!ex.date && !trim_copy(d).empty()) {
        if (auto ts = parse_iso8601(d)) ex.date = date_of(*ts);
      }
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

DatasetSplit split_dataset(std::vector<LabeledExample> examples, std::uint64_t seed,
                           double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(Errc::InvalidRatio, "split ratio must lie in (0,1)");
  if (examples.size() < 2)
    throw Error(Errc::InvalidRatio, "need at least two examples to split");

  std::mt19937_64 rng(seed);
  std::shuffle(examples.begin(), examples.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(examples.size())));

  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  split.train.assign(std::make_move_iterator(examples.begin()),
                     std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(n_train)));
  split.test.assign(std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                    std::make_move_iterator(examples.end()));
  return split;
}

}  // namespace brightside
