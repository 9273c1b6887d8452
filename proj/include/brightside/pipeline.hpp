#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "brightside/corpus.hpp"
#include "brightside/ordinal.hpp"
#include "brightside/remote_rater.hpp"

namespace brightside {

enum class StageName { Sequential, Lstm, Svm, Strict };

std::string_view stage_name(StageName s) noexcept;
std::optional<StageName> parse_stage_name(std::string_view s);

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kStrictModeThreshold = 0.7;

struct StageSpec {
  StageName name = StageName::Sequential;
  double threshold = kDefaultThreshold;  // unused by the strict stage
  std::string model_ref;                 // artifact id under <root>/models
  StrictPolicy policy;                   // strict stage only
  std::optional<RemoteRaterConfig> remote;  // strict stage only
};

struct CascadeConfig {
  std::vector<StageSpec> stages;
  std::size_t daily_cap = 15;
  double borderline_lo = 0.4;
  double borderline_hi = 0.6;
};

// sequential, lstm, svm, strict with threshold 0.5 and empty model refs.
CascadeConfig default_cascade_config();

// Raises every probabilistic threshold to at least 0.7.
CascadeConfig with_strict_mode(CascadeConfig cfg);

// Throws Errc::ConfigError on duplicate stages, out-of-range thresholds,
// an empty stage list or a zero cap.
void validate(const CascadeConfig& cfg);

// {"stages":[{"name":..,"threshold":..,"model":..}],"daily_cap":15,
//  "borderline":[0.4,0.6]} plus optional "strict_mode": true and, on the
// strict stage, "policy": {"min_rating","min_mass"} and "remote":
// {"endpoint","timeout_ms","max_batch"}.
CascadeConfig cascade_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CascadeConfig& cfg);
CascadeConfig load_cascade_config(const std::filesystem::path& path);

struct StageOutcome {
  double score = 0.0;
  // Set by stages that decide for themselves (strict); otherwise the cascade
  // compares score against the stage threshold.
  std::optional<bool> decision;
  // Non-empty means the stage could not evaluate the article: it is rejected.
  std::string error;
};

// One filter of the cascade. Implementations must be pure per article.
class Stage {
 public:
  virtual ~Stage() = default;
  virtual StageName name() const = 0;
  // One outcome per article, same order.
  virtual std::vector<StageOutcome> evaluate(std::span<const Article* const> batch) const = 0;
};

struct StageEntry {
  StageName stage = StageName::Sequential;
  double score = 0.0;
  bool passed = false;
  std::string error;
};

enum class FinalStatus { Accepted, Capped, Rejected };

std::string_view final_status_name(FinalStatus s) noexcept;

struct Verdict {
  std::string article_id;
  std::vector<StageEntry> entries;  // executed stages, cascade order
  FinalStatus status = FinalStatus::Rejected;
  std::optional<StageName> rejected_at;
  bool borderline = false;
  double mean_score = 0.0;  // over executed stages
};

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

struct FeedEntry {
  std::string article_id;
  double mean_score = 0.0;
};

struct CascadeResult {
  std::vector<FeedEntry> feed;     // top daily_cap accepted, mean score descending
  std::vector<Verdict> verdicts;   // input order
};

// Stage i sees only survivors of stage i-1. `stages` follow cfg.stages in
// order and name; Errc::ConfigError otherwise.
CascadeResult run_cascade(std::span<const Article> articles, const CascadeConfig& cfg,
                          std::span<const std::unique_ptr<Stage>> stages);

// Runs every stage regardless of earlier failures.
Verdict score_headline(std::string_view text, const CascadeConfig& cfg,
                       std::span<const std::unique_ptr<Stage>> stages);

struct StageCount {
  StageName stage = StageName::Sequential;
  std::size_t in = 0;
  std::size_t passed = 0;
  std::size_t rejected = 0;
};

std::vector<StageCount> cascade_stats(std::span<const Verdict> verdicts,
                                      std::span<const StageName> stage_order);

// Builds model-backed stages from <models_dir>/<model_ref>.json and the
// referenced vocabularies. Missing or mismatched artifacts throw
// Errc::ConfigError.
std::vector<std::unique_ptr<Stage>> load_stages(const CascadeConfig& cfg,
                                                const std::filesystem::path& models_dir);

}  // namespace brightside
