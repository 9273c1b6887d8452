#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace brightside {

using Index = Eigen::Index;

inline constexpr Index kPadIndex = 0;
inline constexpr Index kOovIndex = 1;
inline constexpr Index kFirstTokenIndex = 2;
inline constexpr std::size_t kDefaultVocabSize = 20000;
inline constexpr Index kDefaultSequenceLength = 30;

// Lowercases and splits on anything that is not a letter, a digit or an
// apostrophe between two word characters. Non-ASCII code points count as
// letters, except the U+2000..U+206F punctuation block (U+2019 is folded to
// an ASCII apostrophe).
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;

  // Index of `token`, or kOovIndex.
  Index index_of(std::string_view token) const;
  std::size_t df(Index index) const { return df_.at(static_cast<std::size_t>(index - kFirstTokenIndex)); }
  const std::string& token(Index index) const {
    return tokens_.at(static_cast<std::size_t>(index - kFirstTokenIndex));
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t n_docs() const noexcept { return n_docs_; }
  // Sequence models need room for padding and OOV rows.
  Index index_space() const noexcept { return static_cast<Index>(size()) + kFirstTokenIndex; }
  // TF-IDF width: one slot per token plus the bias slot.
  Index feature_dimension() const noexcept { return static_cast<Index>(size()) + 1; }

  double idf(Index index) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);
  // Stable content id (hex FNV-1a of the canonical JSON dump).
  std::string id() const;

  friend Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                                     std::size_t max_size);

 private:
  void add(std::string token, std::size_t df);

  std::vector<std::string> tokens_;  // by index - kFirstTokenIndex
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, Index> lookup_;
  std::size_t n_docs_ = 0;
};

// Keeps the `max_size` tokens with the highest document frequency, ties broken
// by ascending token; indices follow that order starting at 2.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                            std::size_t max_size = kDefaultVocabSize);

// Sparse, sorted by index, bias slot last.
struct FeatureVector {
  std::vector<std::pair<Index, double>> entries;
  Index dimension = 0;

  double weight(Index i) const;
  Eigen::VectorXd to_dense() const;
};

// tf * (ln((1+N)/(1+df)) + 1), L2-normalized over token slots, bias = 1.
FeatureVector vectorize_tfidf(std::span<const std::string> tokens, const Vocabulary& vocab);

struct TokenSequence {
  std::vector<Index> indices;  // exactly `length` entries, zeros first
  Index length_unpadded = 0;

  Index length() const noexcept { return static_cast<Index>(indices.size()); }
};

// OOV -> 1, keeps the last `length` tokens, pre-pads with 0.
TokenSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab,
                              Index length = kDefaultSequenceLength);

}  // namespace brightside
