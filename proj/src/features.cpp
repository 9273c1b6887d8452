#include "brightside/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "brightside/error.hpp"
#include "brightside/hash.hpp"

namespace brightside {

namespace {

bool is_ascii_word(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  // First pass: map the input to a sequence of "units": word bytes, apostrophes
  // and separators, so the apostrophe rule can look at both neighbours.
  enum class Kind { Word, Apostrophe, Sep };
  std::vector<std::pair<Kind, std::string>> units;
  for (std::size_t i = 0; i < text.size();) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (is_ascii_word(c))
        units.emplace_back(Kind::Word, std::string(1, static_cast<char>(std::tolower(c))));
      else if (c == '\'')
        units.emplace_back(Kind::Apostrophe, "'");
      else
        units.emplace_back(Kind::Sep, "");
      ++i;
      continue;
    }
    std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
    len = std::min(len, text.size() - i);
    auto cp = text.substr(i, len);
    if (len == 3 && static_cast<unsigned char>(cp[0]) == 0xE2 &&
        (static_cast<unsigned char>(cp[1]) == 0x80 || static_cast<unsigned char>(cp[1]) == 0x81)) {
      if (cp == "\xE2\x80\x99") units.emplace_back(Kind::Apostrophe, "'");
      else units.emplace_back(Kind::Sep, "");
    } else if (len == 2 && static_cast<unsigned char>(cp[0]) == 0xC2) {
      // Latin-1 punctuation and NBSP (U+0080..U+00BF).
      units.emplace_back(Kind::Sep, "");
    } else {
      units.emplace_back(Kind::Word, std::string(cp));
    }
    i += len;
  }

  std::vector<std::string> tokens;
  std::string cur;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& [kind, s] = units[u];
    if (kind == Kind::Word) {
      cur += s;
    } else if (kind == Kind::Apostrophe && !cur.empty() && u + 1 < units.size() &&
               units[u + 1].first == Kind::Word) {
      cur += '\'';
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Index Vocabulary::index_of(std::string_view token) const {
  auto it = lookup_.find(std::string(token));
  return it == lookup_.end() ? kOovIndex : it->second;
}

double Vocabulary::idf(Index index) const {
  const double n = static_cast<double>(n_docs_);
  return std::log((1.0 + n) / (1.0 + static_cast<double>(df(index)))) + 1.0;
}

void Vocabulary::add(std::string token, std::size_t df) {
  const Index idx = static_cast<Index>(tokens_.size()) + kFirstTokenIndex;
  lookup_.emplace(token, idx);
  tokens_.push_back(std::move(token));
  df_.push_back(df);
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json toks = nlohmann::json::array();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    toks.push_back({{"t", tokens_[i]},
                    {"i", static_cast<Index>(i) + kFirstTokenIndex},
                    {"df", df_[i]}});
  }
  return {{"version", 1}, {"n_docs", n_docs_}, {"tokens", std::move(toks)}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1)
      throw Error(Errc::UnsupportedVersion, "vocabulary version must be 1");
    Vocabulary v;
    v.n_docs_ = j.at("n_docs").get<std::size_t>();
    const auto& toks = j.at("tokens");
    for (std::size_t k = 0; k < toks.size(); ++k) {
      const auto& t = toks[k];
      if (t.at("i").get<Index>() != static_cast<Index>(k) + kFirstTokenIndex)
        throw Error(Errc::CorruptArtifact, "vocabulary indices are not contiguous");
      auto df = t.at("df").get<std::size_t>();
      if (df > v.n_docs_) throw Error(Errc::CorruptArtifact, "df exceeds n_docs");
      v.add(t.at("t").get<std::string>(), df);
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptArtifact, std::string("bad vocabulary: ") + e.what());
  }
}

std::string Vocabulary::id() const { return to_hex(fnv1a64(to_json().dump())); }

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                            std::size_t max_size) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  // std::map iteration is already token-ascending; a stable sort keeps that
  // order among equal frequencies.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);

  Vocabulary v;
  v.n_docs_ = docs.size();
  for (auto& [token, count] : ranked) v.add(std::move(token), count);
  return v;
}

double FeatureVector::weight(Index i) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), i,
                             [](const auto& e, Index k) { return e.first < k; });
  return it != entries.end() && it->first == i ? it->second : 0.0;
}

Eigen::VectorXd FeatureVector::to_dense() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension);
  for (const auto& [i, w] : entries) x[i] = w;
  return x;
}

FeatureVector vectorize_tfidf(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<Index, double> tf;
  for (const auto& t : tokens) {
    Index idx = vocab.index_of(t);
    if (idx >= kFirstTokenIndex) tf[idx] += 1.0;
  }

  FeatureVector fv;
  fv.dimension = vocab.feature_dimension();
  double norm2 = 0.0;
  for (const auto& [idx, count] : tf) {
    double w = count * vocab.idf(idx);
    fv.entries.emplace_back(idx - kFirstTokenIndex, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : fv.entries) e.second *= inv;
  }
  fv.entries.emplace_back(fv.dimension - 1, 1.0);
  return fv;
}

TokenSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab,
                              Index length) {
  if (length < 1) throw Error(Errc::InvalidArgument, "sequence length must be >= 1");
  TokenSequence seq;
  seq.indices.assign(static_cast<std::size_t>(length), kPadIndex);
  const auto n = static_cast<Index>(tokens.size());
  const Index kept = std::min(n, length);
  seq.length_unpadded = kept;
  for (Index k = 0; k < kept; ++k) {
    const auto& tok = tokens[static_cast<std::size_t>(n - kept + k)];
    seq.indices[static_cast<std::size_t>(length - kept + k)] = vocab.index_of(tok);
  }
  return seq;
}

}  // namespace brightside
