#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "brightside/corpus.hpp"
#include "brightside/error.hpp"
#include "testkit.hpp"

using namespace brightside;

namespace {

using bt::error_code;

std::vector<LabeledExample> numbered(int n) {
  std::vector<LabeledExample> v;
  for (int i = 0; i < n; ++i) v.push_back({"headline " + std::to_string(i), i % 2});
  return v;
}

}  // namespace

TEST_CASE("binarize_label") {
  CHECK(binarize_label(0.3) == 1);
  CHECK(binarize_label(-0.2) == 0);
  CHECK_FALSE(binarize_label(0.0).has_value());
  CHECK_FALSE(binarize_label(-0.0).has_value());
  CHECK(binarize_label(1e-300) == 1);
  CHECK(binarize_label(-1e-300) == 0);
  CHECK(error_code([] { binarize_label(std::numeric_limits<double>::quiet_NaN()); }) == Errc::InvalidScore);
  CHECK(error_code([] { binarize_label(std::numeric_limits<double>::infinity()); }) == Errc::InvalidScore);
}

TEST_CASE("article id is FNV-1a of title and canonical url") {
  CHECK(make_article_id("Koalas saved", "https://news.example/k") ==
        bt::expected_article_id("Koalas saved", "https://news.example/k"));
  CHECK(make_article_id("a", "b") != make_article_id("a", "c"));
}

TEST_CASE("split_csv_line") {
  auto f = split_csv_line(R"("good news, for koalas",0.8,2020-01-02)");
  REQUIRE(f);
  REQUIRE(f->size() == 3);
  CHECK((*f)[0] == "good news, for koalas");
  CHECK((*f)[1] == "0.8");
  auto q = split_csv_line(R"("she said ""hi""",1)");
  REQUIRE(q);
  CHECK((*q)[0] == R"(she said "hi")");
  CHECK_FALSE(split_csv_line(R"("unterminated,1)"));
  auto empty = split_csv_line("a,,b");
  REQUIRE(empty);
  CHECK(empty->size() == 3);
  CHECK((*empty)[1].empty());
}

TEST_CASE("load_dataset headlines_csv") {
  bt::TempDir dir;
  const auto p = dir.path() / "h.csv";
  bt::write_file(p,
                 "text,score,date\n"
                 "\"good news for koalas\",0.8,2020-01-02\n"
                 "bad day,-0.5,2020-01-03\n"
                 "flat,0,2020-01-04\n"
                 "broken row\n"
                 "out of range,1.5,2020-01-05\n"
                 "crlf line,0.1,2020-02-01\r\n");
  auto ds = load_dataset(p, DatasetFormat::HeadlinesCsv);
  REQUIRE(ds.examples.size() == 3);
  CHECK(ds.examples[0].text == "good news for koalas");
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.examples[0].kind == LabelKind::Binary);
  REQUIRE(ds.examples[0].date);
  CHECK(format_date(*ds.examples[0].date) == "2020-01-02");
  CHECK(ds.examples[1].label == 0);
  CHECK(ds.examples[2].text == "crlf line");
  CHECK(ds.dropped == 1);
  CHECK(ds.skipped == 2);
  CHECK(ds.rows == 6);
  std::size_t ones = 0, zeros = 0;
  for (auto& e : ds.examples) (e.label == 1 ? ones : zeros)++;
  CHECK(ones + zeros + ds.dropped == ds.rows - ds.skipped);
}

TEST_CASE("load_dataset column order follows the header") {
  bt::TempDir dir;
  const auto p = dir.path() / "h.csv";
  bt::write_file(p, "date,text,score\n2020-03-01,hello there,0.4\n");
  auto ds = load_dataset(p, DatasetFormat::HeadlinesCsv);
  REQUIRE(ds.examples.size() == 1);
  CHECK(ds.examples[0].text == "hello there");
  CHECK(ds.examples[0].label == 1);
}

TEST_CASE("load_dataset tweets_csv maps 0/4") {
  bt::TempDir dir;
  const auto p = dir.path() / "t.csv";
  bt::write_file(p, "label,text\n4,lovely morning\n0,awful commute\n2,neutral row\n");
  auto ds = load_dataset(p, DatasetFormat::TweetsCsv);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.examples[1].label == 0);
  CHECK(ds.skipped == 1);
}

TEST_CASE("load_dataset ratings_csv keeps ordinal labels") {
  bt::TempDir dir;
  const auto p = dir.path() / "r.csv";
  bt::write_file(p, "rating,text\n5,great\n1,terrible\n6,bad rating\nx,bad number\n");
  auto ds = load_dataset(p, DatasetFormat::RatingsCsv);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.examples[0].label == 5);
  CHECK(ds.examples[0].kind == LabelKind::Ordinal);
  CHECK(ds.examples[1].label == 1);
  CHECK(ds.skipped == 2);
}

TEST_CASE("load_dataset errors and empty input") {
  bt::TempDir dir;
  const auto empty = dir.path() / "e.csv";
  bt::write_file(empty, "");
  auto ds = load_dataset(empty, DatasetFormat::HeadlinesCsv);
  CHECK(ds.examples.empty());
  CHECK(ds.skipped == 0);

  const auto missing_col = dir.path() / "m.csv";
  bt::write_file(missing_col, "text,date\nhello,2020-01-01\n");
  CHECK(error_code([&] { load_dataset(missing_col, DatasetFormat::HeadlinesCsv); }) == Errc::FormatError);
  CHECK(error_code([&] { load_dataset(dir.path() / "nope.csv", DatasetFormat::HeadlinesCsv); }) == Errc::IoError);
}

TEST_CASE("jsonl round trip and format detection") {
  LabeledExample a{"curated headline", 1, LabelKind::Binary, Origin::Curator, parse_date("2020-05-06")};
  LabeledExample b{"five stars", 5, LabelKind::Ordinal, Origin::Dataset, std::nullopt};
  bt::TempDir dir;
  const auto p = dir.path() / "x.jsonl";
  bt::write_file(p, to_jsonl_line(a) + "\n" + to_jsonl_line(b) + "\n{\"text\":\"no label\"}\n\n");
  CHECK(detect_dataset_format(p) == DatasetFormat::Jsonl);
  auto ds = load_dataset(p, DatasetFormat::Jsonl);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.skipped == 1);
  CHECK(ds.examples[0].text == a.text);
  CHECK(ds.examples[0].origin == Origin::Curator);
  REQUIRE(ds.examples[0].date);
  CHECK(format_date(*ds.examples[0].date) == "2020-05-06");
  CHECK(ds.examples[1].kind == LabelKind::Ordinal);
  CHECK(ds.examples[1].label == 5);

  const auto h = dir.path() / "h.csv";
  bt::write_file(h, "text,score,date\n");
  CHECK(detect_dataset_format(h) == DatasetFormat::HeadlinesCsv);
  const auto r = dir.path() / "r.csv";
  bt::write_file(r, "rating,text\n");
  CHECK(detect_dataset_format(r) == DatasetFormat::RatingsCsv);

  CHECK(parse_dataset_format("tweets_csv") == DatasetFormat::TweetsCsv);
  CHECK_FALSE(parse_dataset_format("xml"));
}

TEST_CASE("split_dataset") {
  auto s = split_dataset(numbered(10), 7, 0.8);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);

  std::set<std::string> seen;
  for (auto& e : s.train) seen.insert(e.text);
  for (auto& e : s.test) CHECK(seen.insert(e.text).second);
  CHECK(seen.size() == 10);

  auto again = split_dataset(numbered(10), 7, 0.8);
  for (std::size_t i = 0; i < s.train.size(); ++i) CHECK(s.train[i].text == again.train[i].text);
  for (std::size_t i = 0; i < s.test.size(); ++i) CHECK(s.test[i].text == again.test[i].text);

  CHECK(split_dataset(numbered(7), 1, 0.5).train.size() == 3);

  CHECK(error_code([] { split_dataset(numbered(1), 1, 0.8); }) == Errc::InvalidRatio);
  CHECK(error_code([] { split_dataset(numbered(4), 1, 0.0); }) == Errc::InvalidRatio);
  CHECK(error_code([] { split_dataset(numbered(4), 1, 1.0); }) == Errc::InvalidRatio);
}

TEST_CASE("bundled corpus loads") {
  auto h = load_dataset(bt::corpus_dir() / "headlines.csv", DatasetFormat::HeadlinesCsv);
  CHECK(h.rows == 2000);
  CHECK(h.skipped == 0);
  CHECK(h.examples.size() + h.dropped == 2000);
  auto r = load_dataset(bt::corpus_dir() / "ratings.csv", DatasetFormat::RatingsCsv);
  CHECK(r.examples.size() == 1000);
  auto ho = load_dataset(bt::corpus_dir() / "holdout.csv", DatasetFormat::HeadlinesCsv);
  CHECK(ho.examples.size() == 200);
}
