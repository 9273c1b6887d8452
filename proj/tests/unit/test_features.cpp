#include <doctest.h>

#include <cmath>

#include "brightside/features.hpp"

using namespace brightside;

using Tokens = std::vector<std::string>;

TEST_CASE("tokenize") {
  CHECK(tokenize("Fires rage in NSW") == Tokens{"fires", "rage", "in", "nsw"});
  CHECK(tokenize("don't panic") == Tokens{"don't", "panic"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("'quoted' words'") == Tokens{"quoted", "words"});
  CHECK(tokenize("covid-19: 3,000 cases!") == Tokens{"covid", "19", "3", "000", "cases"});
  CHECK(tokenize("it\xE2\x80\x99s fine") == Tokens{"it's", "fine"});
  CHECK(tokenize("Café open") == Tokens{"café", "open"});

  const auto once = tokenize("Sydney's  BIG day -- out!");
  std::string joined;
  for (auto& t : once) joined += t + " ";
  CHECK(tokenize(joined) == once);
}

TEST_CASE("build_vocabulary ordering and cap") {
  std::vector<Tokens> docs = {{"a", "b"}, {"a"}};
  auto v = build_vocabulary(docs, 10);
  CHECK(v.size() == 2);
  CHECK(v.index_of("a") == 2);
  CHECK(v.index_of("b") == 3);
  CHECK(v.index_of("zzz") == kOovIndex);
  CHECK(v.n_docs() == 2);
  CHECK(v.df(2) == 2);

  std::vector<Tokens> tie = {{"b"}, {"a"}};
  auto t = build_vocabulary(tie, 1);
  CHECK(t.size() == 1);
  CHECK(t.index_of("a") == 2);
  CHECK(t.index_of("b") == kOovIndex);

  auto e = build_vocabulary(std::vector<Tokens>{}, 10);
  CHECK(e.size() == 0);
  CHECK(e.n_docs() == 0);

  // document frequency, not term frequency
  std::vector<Tokens> repeat = {{"x", "x", "x"}, {"y"}, {"y"}};
  auto r = build_vocabulary(repeat, 10);
  CHECK(r.index_of("y") == 2);
  CHECK(r.df(r.index_of("x")) == 1);
}

TEST_CASE("vocabulary json round trip") {
  std::vector<Tokens> docs = {{"fires", "rage"}, {"fires"}, {"koala"}};
  auto v = build_vocabulary(docs, 10);
  auto j = v.to_json();
  CHECK(j["version"] == 1);
  CHECK(j["n_docs"] == 3);
  REQUIRE(j["tokens"].size() == 3);
  CHECK(j["tokens"][0]["t"] == "fires");
  CHECK(j["tokens"][0]["i"] == 2);
  CHECK(j["tokens"][0]["df"] == 2);
  auto back = Vocabulary::from_json(j);
  CHECK(back.id() == v.id());
  CHECK(back.index_of("koala") == v.index_of("koala"));
}

TEST_CASE("vectorize_tfidf") {
  std::vector<Tokens> one = {{"a", "b"}};
  auto v = build_vocabulary(one, 10);
  Tokens doc = {"a", "a", "b"};
  auto fv = vectorize_tfidf(doc, v);
  CHECK(fv.dimension == 3);
  // oracle: idf = ln(2/2)+1 = 1 for both; tf (2,1) normalized by sqrt(5)
  CHECK(fv.weight(0) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(fv.weight(1) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(fv.weight(0) == doctest::Approx(0.894).epsilon(1e-3));
  CHECK(fv.weight(2) == 1.0);

  auto oov = vectorize_tfidf(Tokens{"zzz"}, v);
  CHECK(oov.weight(0) == 0.0);
  CHECK(oov.weight(1) == 0.0);
  CHECK(oov.weight(2) == 1.0);
  auto empty = vectorize_tfidf(Tokens{}, v);
  CHECK(empty.entries.size() == 1);
  CHECK(empty.weight(2) == 1.0);

  for (std::size_t i = 1; i < fv.entries.size(); ++i) CHECK(fv.entries[i - 1].first < fv.entries[i].first);
}

TEST_CASE("vectorize_tfidf unequal idf and unit norm") {
  std::vector<Tokens> docs = {{"a", "b"}, {"a"}, {"c"}};
  auto v = build_vocabulary(docs, 10);
  Tokens doc = {"a", "b", "b", "zzz"};
  auto fv = vectorize_tfidf(doc, v);
  const double idf_a = std::log(4.0 / 3.0) + 1.0;
  const double idf_b = std::log(4.0 / 2.0) + 1.0;
  const double wa = 1 * idf_a, wb = 2 * idf_b;
  const double n = std::sqrt(wa * wa + wb * wb);
  const Index ia = v.index_of("a") - kFirstTokenIndex, ib = v.index_of("b") - kFirstTokenIndex;
  CHECK(fv.weight(ia) == doctest::Approx(wa / n).epsilon(1e-12));
  CHECK(fv.weight(ib) == doctest::Approx(wb / n).epsilon(1e-12));
  CHECK(v.idf(v.index_of("a")) == doctest::Approx(idf_a));

  auto dense = fv.to_dense();
  CHECK(dense.size() == v.feature_dimension());
  CHECK(dense.head(dense.size() - 1).norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("encode_sequence") {
  std::vector<Tokens> docs = {{"fires", "rage"}, {"fires"}};
  auto v = build_vocabulary(docs, 10);
  auto s = encode_sequence(Tokens{"fires", "rage"}, v, 5);
  CHECK(s.indices == std::vector<Index>{0, 0, 0, 2, 3});
  CHECK(s.length_unpadded == 2);

  auto o = encode_sequence(Tokens{"zzz"}, v, 2);
  CHECK(o.indices == std::vector<Index>{0, 1});

  Tokens forty;
  for (int i = 0; i < 40; ++i) forty.push_back(i < 10 ? "rage" : "fires");
  auto t = encode_sequence(forty, v, 30);
  CHECK(t.length() == 30);
  CHECK(t.length_unpadded == 30);
  for (auto i : t.indices) CHECK(i == 2);

  auto e = encode_sequence(Tokens{}, v, 4);
  CHECK(e.indices == std::vector<Index>{0, 0, 0, 0});
  CHECK(e.length_unpadded == 0);
}
