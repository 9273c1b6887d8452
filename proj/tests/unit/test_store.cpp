#include <doctest.h>

#include <random>

#include "brightside/store.hpp"
#include "testkit.hpp"

using namespace brightside;
namespace fs = std::filesystem;

namespace {

std::vector<FeatureVector> probe_vectors(Index dim, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<FeatureVector> out;
  for (int k = 0; k < n; ++k) {
    std::vector<double> d(static_cast<std::size_t>(dim));
    for (auto& v : d) v = g(rng);
    d.back() = 1.0;
    out.push_back(bt::features_of(d));
  }
  return out;
}

template <typename M>
M reload(const M& model, const bt::TempDir& dir, Index seq_len = 0) {
  ModelArtifact a;
  if constexpr (std::is_same_v<M, LstmParams>) a = to_artifact(model, seq_len);
  else a = to_artifact(model);
  a.created_at = "2020-01-01T00:00:00Z";
  const auto id = save_model(dir.path(), a);
  return std::get<M>(model_from_artifact(load_model(dir.path(), id)));
}

Article sample_article(int i) {
  Article a = bt::make_article("Headline " + std::to_string(i), "https://news.example/" + std::to_string(i));
  a.source_name = "wire";
  a.body = i % 2 == 0 ? std::optional<std::string>("body") : std::nullopt;
  a.published_at = *parse_iso8601("2020-03-01T08:00:00Z");
  a.fetched_at = *parse_iso8601("2020-03-01T09:30:00Z");
  return a;
}

Verdict sample_verdict(const Article& a) {
  Verdict v;
  v.article_id = a.id;
  v.entries = {{StageName::Sequential, 0.75, true, ""}};
  v.status = FinalStatus::Accepted;
  v.mean_score = 0.75;
  return v;
}

Date day(const char* s) { return *parse_date(s); }

}  // namespace

TEST_CASE("model artifacts round-trip bit-exactly") {
  bt::TempDir dir;
  const auto xs = probe_vectors(6, 10, 1);

  Mlp mlp = make_mlp(6, std::vector<Index>{5, 3}, 4);
  Mlp mlp2 = reload(mlp, dir);
  for (auto& x : xs) CHECK(mlp_forward(mlp2, x) == mlp_forward(mlp, x));

  SvmModel svm;
  svm.w = Eigen::VectorXd::Random(6);
  svm.lambda = 0.01;
  svm.epochs_trained = 3;
  SvmModel svm2 = reload(svm, dir);
  for (auto& x : xs) CHECK(svm_decision(svm2, x) == svm_decision(svm, x));
  CHECK(svm2.lambda == 0.01);
  CHECK(svm2.epochs_trained == 3);

  OrdinalModel ord = make_ordinal(6);
  ord.W = Eigen::MatrixXd::Random(5, 6);
  ord.b = Eigen::VectorXd::Random(5);
  OrdinalModel ord2 = reload(ord, dir);
  for (auto& x : xs) CHECK(rate(ord2, x).probs == rate(ord, x).probs);

  LstmShape shape;
  shape.index_space = 9;
  shape.embed_dim = 4;
  shape.hidden = 3;
  shape.head = 2;
  LstmParams lstm = make_lstm(shape, 8);
  LstmParams lstm2 = reload(lstm, dir, 7);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<Index> tok(0, 8);
  for (int k = 0; k < 10; ++k) {
    TokenSequence s;
    for (int t = 0; t < 7; ++t) s.indices.push_back(tok(rng));
    CHECK(lstm_predict(lstm2, s) == lstm_predict(lstm, s));
  }
  CHECK(lstm2.dropout_rate == lstm.dropout_rate);
  CHECK(artifact_sequence_length(to_artifact(lstm, 7)) == 7);
}

TEST_CASE("artifact validation") {
  ModelArtifact a = to_artifact(SvmModel{Eigen::VectorXd::Ones(3), 1e-4, 1});
  auto j = to_json(a);
  CHECK(j["format_version"] == 1);
  CHECK(j["model_type"] == "svm");

  auto v2 = j;
  v2["format_version"] = 2;
  CHECK(bt::error_code([&] { artifact_from_json(v2); }) == Errc::UnsupportedVersion);

  ModelArtifact bad;
  bad.model_type = ModelType::Ordinal;
  bad.arrays.push_back({"W", {2, 3}, {1, 2, 3, 4, 5}});
  CHECK(bt::error_code([&] { artifact_from_json(to_json(bad)); }) == Errc::CorruptArtifact);

  auto garbled = j;
  garbled["arrays"][0]["values"] = "***";
  CHECK(bt::error_code([&] { artifact_from_json(garbled); }) == Errc::CorruptArtifact);

  CHECK(base64_decode(base64_encode("any carnal pleas")) == "any carnal pleas");
  CHECK(base64_encode("Ma") == "TWE=");
  CHECK(bt::error_code([] { base64_decode("abc"); }) == Errc::CorruptArtifact);

  // content id ignores created_at
  ModelArtifact b = a;
  b.created_at = "2030-01-01T00:00:00Z";
  CHECK(artifact_content_id(a) == artifact_content_id(b));
  CHECK(artifact_content_id(a).rfind("svm-", 0) == 0);

  bt::TempDir dir;
  bt::write_file(dir.path() / "broken.json", "{\"format_version\":");
  CHECK(bt::error_code([&] { load_model(dir.path(), "broken"); }).has_value());
  CHECK(bt::error_code([&] { load_model(dir.path(), "absent"); }) == Errc::IoError);
}

TEST_CASE("vocabulary files") {
  bt::TempDir dir;
  std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"a"}};
  auto v = build_vocabulary(docs);
  const auto id = save_vocabulary(dir.path(), v);
  CHECK(fs::exists(dir.path() / ("vocab-" + id + ".json")));
  CHECK(load_vocabulary(dir.path(), id).id() == id);
  CHECK(bt::error_code([&] { load_vocabulary(dir.path(), "missing"); }) == Errc::IoError);
}

TEST_CASE("article log append and partial lines") {
  bt::TempDir dir;
  Store store(dir.path());
  std::vector<Article> arts = {sample_article(1), sample_article(2), sample_article(3)};
  std::vector<Verdict> vs;
  for (auto& a : arts) vs.push_back(sample_verdict(a));
  store.append_articles(arts, vs, "2020-03-01");
  store.append_articles({}, {}, "2020-03-01");

  auto back = store.read_articles();
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(to_json(back[i].article) == to_json(arts[i]));
    CHECK(to_json(back[i].verdict) == to_json(vs[i]));
    CHECK(back[i].run_date == "2020-03-01");
  }
  CHECK(back[0].article.body == std::nullopt);
  CHECK(back[1].article.body == "body");

  auto found = store.find_article(arts[2].id);
  REQUIRE(found);
  CHECK(found->article.title == "Headline 3");
  CHECK_FALSE(store.find_article("0000"));

  const auto log = store.data_dir() / "articles.jsonl";
  auto content = bt::read_file(log);
  bt::write_file(log, content + R"({"article":{"id":"torn")");
  std::size_t partial = 0;
  CHECK(store.read_articles(&partial).size() == 3);
  CHECK(partial == 1);
  auto raw = read_jsonl(log);
  CHECK(raw.records.size() == 3);
  CHECK(raw.partial == 1);

  bt::write_file(log, content + "not json\n");
  auto bad = read_jsonl(log);
  CHECK(bad.corrupt == 1);
  CHECK(bad.records.size() == 3);
  CHECK(read_jsonl(dir.path() / "none.jsonl").records.empty());
}

TEST_CASE("feeds publish once") {
  bt::TempDir dir;
  Store store(dir.path());
  FeedRecord f;
  f.date = day("2020-03-01");
  f.articles = {{"b", 0.9}, {"a", 0.8}, {"c", 0.7}};
  store.publish_feed(f);
  auto back = store.read_feed(f.date);
  REQUIRE(back);
  CHECK(back->published);
  REQUIRE(back->articles.size() == 3);
  CHECK(back->articles[0].article_id == "b");
  CHECK(back->articles[2].article_id == "c");
  CHECK(bt::error_code([&] { store.publish_feed(f); }) == Errc::AlreadyPublished);

  FeedRecord empty;
  empty.date = day("2020-03-02");
  store.publish_feed(empty);
  REQUIRE(store.read_feed(empty.date));
  CHECK(store.read_feed(empty.date)->articles.empty());
  CHECK(store.latest_feed_date() == empty.date);
  CHECK_FALSE(store.read_feed(day("2020-03-03")));

  const auto text = bt::read_file(store.feed_path(f.date));
  CHECK(text == to_json(*back).dump(2) + "\n");
  CHECK(feed_from_json(nlohmann::json::parse(text)).articles.size() == 3);
}

TEST_CASE("a crash before rename leaves nothing visible") {
  bt::TempDir dir;
  Store store(dir.path());
  FeedRecord f;
  f.date = day("2020-04-01");
  f.articles = {{"x", 1.0}};
  fs::path seen_tmp;
  CHECK_THROWS(store.publish_feed(f, [&](const fs::path& tmp) {
    seen_tmp = tmp;
    CHECK(fs::exists(tmp));
    CHECK_FALSE(fs::exists(store.feed_path(f.date)));
    throw std::runtime_error("simulated crash");
  }));
  CHECK_FALSE(fs::exists(store.feed_path(f.date)));
  CHECK_FALSE(store.read_feed(f.date));
  CHECK_FALSE(store.latest_feed_date());
  store.publish_feed(f);
  CHECK(store.read_feed(f.date));

  const auto p = dir.path() / "file.json";
  write_file_atomic(p, "old\n");
  CHECK_THROWS(write_file_atomic(p, "new content\n", [&](const fs::path& tmp) {
    CHECK(bt::read_file(tmp) == "new content\n");
    CHECK(bt::read_file(p) == "old\n");
    throw std::runtime_error("simulated crash");
  }));
  CHECK(bt::read_file(p) == "old\n");
  write_file_atomic(p, "new content\n");
  CHECK(bt::read_file(p) == "new content\n");
}

TEST_CASE("curation queue and curator verdicts") {
  bt::TempDir dir;
  Store store(dir.path());
  const auto t0 = *parse_iso8601("2020-03-01T10:00:00Z");
  std::vector<QueueEntry> q = {{"id1", "Koala found safe", "https://x/1", "wire", 0.5, t0},
                               {"id2", "Mixed news", "https://x/2", "wire", 0.45, t0},
                               {"id3", "Odd story", "https://x/3", "wire", 0.41, t0}};
  store.enqueue(q);
  REQUIRE(store.queue().size() == 3);
  CHECK(store.queue()[0].article_id == "id1");
  CHECK(store.queue()[0].enqueued_at == t0);

  CHECK(store.record_curator_verdict("id1", CuratorLabel::Positive, "ana") == 2);
  auto cur = store.curated();
  REQUIRE(cur.size() == 1);
  CHECK(cur[0].article_id == "id1");
  CHECK(cur[0].curator_id == "ana");
  CHECK(cur[0].example.label == 1);
  CHECK(cur[0].example.text == "Koala found safe");
  CHECK(cur[0].example.origin == Origin::Curator);

  CHECK(store.record_curator_verdict("id1", CuratorLabel::Positive, "ana") == 2);
  CHECK(store.curated().size() == 1);
  store.record_curator_verdict("id1", CuratorLabel::Negative, "ben");
  REQUIRE(store.curated().size() == 1);
  CHECK(store.curated()[0].example.label == 0);

  CHECK(store.record_curator_verdict("id2", CuratorLabel::Skip, "ana") == 1);
  CHECK(store.curated().size() == 1);
  CHECK(store.queue().size() == 1);
  CHECK(store.queue()[0].article_id == "id3");

  CHECK(bt::error_code([&] { store.record_curator_verdict("nope", CuratorLabel::Positive, "ana"); }) ==
        Errc::NotFound);

  FeedRecord f;
  f.date = day("2020-03-01");
  f.articles = {{"feedonly", 0.9}};
  store.publish_feed(f);
  store.record_curator_verdict("feedonly", CuratorLabel::Negative, "ana");
  CHECK(store.curated().size() == 2);

  CHECK(parse_curator_label("positive") == CuratorLabel::Positive);
  CHECK(parse_curator_label("skip") == CuratorLabel::Skip);
  CHECK_FALSE(parse_curator_label("maybe"));
}

TEST_CASE("run stats") {
  bt::TempDir dir;
  Store store(dir.path());
  CHECK_FALSE(store.read_run_stats(day("2020-01-01")));
  store.write_run_stats(day("2020-01-01"), nlohmann::json{{"date", "2020-01-01"}, {"n", 3}});
  auto s = store.read_run_stats(day("2020-01-01"));
  REQUIRE(s);
  CHECK((*s)["n"] == 3);
}
