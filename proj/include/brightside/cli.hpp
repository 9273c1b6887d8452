#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brightside/corpus.hpp"

namespace brightside {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitIo = 3 };

// Loaded stage model plus its vocabulary, usable on raw text.
class Classifier {
 public:
  struct Prediction {
    double probability = 0.0;  // P(positive) or, for ordinal, mass at rating >= 4
    int label = 0;
  };

  static Classifier load(const std::filesystem::path& artifact_path);

  // Errc::DegenerateData when the text has no tokens.
  Prediction predict(std::string_view text, double threshold = 0.5) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

struct AnalyzeResult {
  std::size_t sample = 0;
  std::size_t negatives = 0;
  std::size_t positives = 0;
  struct Month {
    std::string month;  // YYYY-MM
    double mean_score = 0.0;
    std::size_t count = 0;
  };
  std::vector<Month> months;  // ascending

  double ratio() const;           // negatives / positives
  double excess_percent() const;  // (ratio - 1) * 100
};

inline constexpr std::size_t kDefaultAnalyzeSample = 10000;

// Shuffles with `seed`, keeps the first `sample` examples and classifies them.
// Monthly means are over 2p - 1 in sample order; undated rows count toward the
// totals only.
AnalyzeResult analyze(std::vector<LabeledExample> examples, const Classifier& model, std::size_t sample,
                      std::uint64_t seed);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Entry point shared by the binary and the tests.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace brightside
