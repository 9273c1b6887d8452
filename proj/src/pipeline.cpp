#include "brightside/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "brightside/activations.hpp"
#include "brightside/artifact.hpp"
#include "brightside/error.hpp"
#include "brightside/features.hpp"
#include "brightside/store.hpp"

namespace brightside {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view stage_name(StageName s) noexcept {
  switch (s) {
    case StageName::Sequential: return "sequential";
    case StageName::Lstm: return "lstm";
    case StageName::Svm: return "svm";
    case StageName::Strict: return "strict";
  }
  return "unknown";
}

std::optional<StageName> parse_stage_name(std::string_view s) {
  if (s == "sequential") return StageName::Sequential;
  if (s == "lstm") return StageName::Lstm;
  if (s == "svm") return StageName::Svm;
  if (s == "strict") return StageName::Strict;
  return std::nullopt;
}

std::string_view final_status_name(FinalStatus s) noexcept {
  switch (s) {
    case FinalStatus::Accepted: return "accepted";
    case FinalStatus::Capped: return "capped";
    case FinalStatus::Rejected: return "rejected";
  }
  return "rejected";
}

CascadeConfig default_cascade_config() {
  CascadeConfig cfg;
  for (auto n : {StageName::Sequential, StageName::Lstm, StageName::Svm, StageName::Strict}) {
    StageSpec s;
    s.name = n;
    cfg.stages.push_back(s);
  }
  return cfg;
}

CascadeConfig with_strict_mode(CascadeConfig cfg) {
  for (auto& s : cfg.stages)
    if (s.name != StageName::Strict) s.threshold = std::max(s.threshold, kStrictModeThreshold);
  return cfg;
}

void validate(const CascadeConfig& cfg) {
  if (cfg.stages.empty()) throw Error(Errc::ConfigError, "cascade needs at least one stage");
  if (cfg.daily_cap < 1) throw Error(Errc::ConfigError, "daily_cap must be >= 1");
  if (!(cfg.borderline_lo <= cfg.borderline_hi))
    throw Error(Errc::ConfigError, "borderline band is inverted");
  std::set<StageName> seen;
  for (const auto& s : cfg.stages) {
    if (!seen.insert(s.name).second)
      throw Error(Errc::ConfigError, "duplicate stage " + std::string(stage_name(s.name)));
    if (!(s.threshold >= 0.0 && s.threshold <= 1.0))
      throw Error(Errc::ConfigError, "threshold out of [0,1] for " + std::string(stage_name(s.name)));
    if (s.name == StageName::Strict) validate(s.policy);
  }
}

CascadeConfig cascade_config_from_json(const json& j) {
  try {
    CascadeConfig cfg;
    for (const auto& sj : j.at("stages")) {
      StageSpec s;
      auto name = parse_stage_name(sj.at("name").get<std::string>());
      if (!name) throw Error(Errc::ConfigError, "unknown stage " + sj.at("name").dump());
      s.name = *name;
      s.threshold = sj.value("threshold", kDefaultThreshold);
      s.model_ref = sj.value("model", std::string{});
      if (sj.contains("policy")) {
        s.policy.min_rating = sj["policy"].value("min_rating", s.policy.min_rating);
        s.policy.min_mass = sj["policy"].value("min_mass", s.policy.min_mass);
      }
      if (sj.contains("remote")) {
        RemoteRaterConfig rc;
        rc.endpoint = sj["remote"].at("endpoint").get<std::string>();
        rc.timeout = std::chrono::milliseconds(sj["remote"].value("timeout_ms", 10000));
        rc.max_batch = sj["remote"].value("max_batch", std::size_t{64});
        s.remote = rc;
      }
      cfg.stages.push_back(std::move(s));
    }
    cfg.daily_cap = j.value("daily_cap", cfg.daily_cap);
    if (j.contains("borderline")) {
      const auto& b = j["borderline"];
      if (!b.is_array() || b.size() != 2) throw Error(Errc::ConfigError, "borderline must be [lo, hi]");
      cfg.borderline_lo = b[0].get<double>();
      cfg.borderline_hi = b[1].get<double>();
    }
    if (j.value("strict_mode", false)) cfg = with_strict_mode(std::move(cfg));
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("bad cascade config: ") + e.what());
  }
}

json to_json(const CascadeConfig& cfg) {
  json stages = json::array();
  for (const auto& s : cfg.stages) {
    json sj = {{"name", std::string(stage_name(s.name))}, {"threshold", s.threshold}, {"model", s.model_ref}};
    if (s.name == StageName::Strict)
      sj["policy"] = {{"min_rating", s.policy.min_rating}, {"min_mass", s.policy.min_mass}};
    if (s.remote)
      sj["remote"] = {{"endpoint", s.remote->endpoint},
                      {"timeout_ms", s.remote->timeout.count()},
                      {"max_batch", s.remote->max_batch}};
    stages.push_back(std::move(sj));
  }
  return {{"stages", std::move(stages)},
          {"daily_cap", cfg.daily_cap},
          {"borderline", {cfg.borderline_lo, cfg.borderline_hi}}};
}

CascadeConfig load_cascade_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read cascade config " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ConfigError, "cascade config is not JSON");
  return cascade_config_from_json(j);
}

json to_json(const Verdict& v) {
  json entries = json::array();
  for (const auto& e : v.entries) {
    json ej = {{"stage", std::string(stage_name(e.stage))}, {"score", e.score}, {"passed", e.passed}};
    if (!e.error.empty()) ej["error"] = e.error;
    entries.push_back(std::move(ej));
  }
  json j = {{"article_id", v.article_id},
            {"entries", std::move(entries)},
            {"final", std::string(final_status_name(v.status))},
            {"borderline", v.borderline},
            {"mean_score", v.mean_score}};
  j["rejected_at"] = v.rejected_at ? json(std::string(stage_name(*v.rejected_at))) : json(nullptr);
  return j;
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.article_id = j.at("article_id").get<std::string>();
  for (const auto& ej : j.at("entries")) {
    StageEntry e;
    auto n = parse_stage_name(ej.at("stage").get<std::string>());
    if (!n) throw Error(Errc::FormatError, "unknown stage in verdict");
    e.stage = *n;
    e.score = ej.at("score").get<double>();
    e.passed = ej.at("passed").get<bool>();
    e.error = ej.value("error", std::string{});
    v.entries.push_back(std::move(e));
  }
  const auto fin = j.at("final").get<std::string>();
  v.status = fin == "accepted" ? FinalStatus::Accepted
             : fin == "capped" ? FinalStatus::Capped
                               : FinalStatus::Rejected;
  if (j.contains("rejected_at") && j["rejected_at"].is_string())
    v.rejected_at = parse_stage_name(j["rejected_at"].get<std::string>());
  v.borderline = j.value("borderline", false);
  v.mean_score = j.value("mean_score", 0.0);
  return v;
}

namespace {

void check_stages(const CascadeConfig& cfg, std::span<const std::unique_ptr<Stage>> stages) {
  validate(cfg);
  if (stages.size() != cfg.stages.size())
    throw Error(Errc::ConfigError, "stage count does not match the cascade config");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!stages[i]) throw Error(Errc::ConfigError, "missing model for a configured stage");
    if (stages[i]->name() != cfg.stages[i].name)
      throw Error(Errc::ConfigError, "stage order does not match the cascade config");
  }
}

StageEntry decide(const StageSpec& spec, const StageOutcome& out) {
  StageEntry e;
  e.stage = spec.name;
  e.score = out.score;
  e.error = out.error;
  if (!out.error.empty()) e.passed = false;
  else if (out.decision) e.passed = *out.decision;
  else e.passed = out.score >= spec.threshold;
  return e;
}

void finish(Verdict& v, const CascadeConfig& cfg) {
  double sum = 0.0;
  for (const auto& e : v.entries) sum += e.score;
  v.mean_score = v.entries.empty() ? 0.0 : sum / static_cast<double>(v.entries.size());
  auto failed = std::find_if(v.entries.begin(), v.entries.end(), [](const StageEntry& e) { return !e.passed; });
  if (failed == v.entries.end()) {
    v.status = FinalStatus::Accepted;
    v.rejected_at.reset();
    v.borderline = false;
  } else {
    v.status = FinalStatus::Rejected;
    v.rejected_at = failed->stage;
    v.borderline = v.mean_score >= cfg.borderline_lo && v.mean_score < cfg.borderline_hi;
  }
}

}  // namespace

CascadeResult run_cascade(std::span<const Article> articles, const CascadeConfig& cfg,
                          std::span<const std::unique_ptr<Stage>> stages) {
  check_stages(cfg, stages);
  CascadeResult result;
  result.verdicts.resize(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) result.verdicts[i].article_id = articles[i].id;

  std::vector<std::size_t> alive(articles.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  for (std::size_t s = 0; s < stages.size() && !alive.empty(); ++s) {
    std::vector<const Article*> batch;
    batch.reserve(alive.size());
    for (auto i : alive) batch.push_back(&articles[i]);
    auto outcomes = stages[s]->evaluate(batch);
    if (outcomes.size() != batch.size())
      throw Error(Errc::StateError, "stage returned the wrong number of outcomes");
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      auto entry = decide(cfg.stages[s], outcomes[k]);
      if (entry.passed) next.push_back(alive[k]);
      result.verdicts[alive[k]].entries.push_back(std::move(entry));
    }
    alive = std::move(next);
  }
  for (auto& v : result.verdicts) finish(v, cfg);

  std::vector<std::size_t> accepted;
  for (std::size_t i = 0; i < result.verdicts.size(); ++i)
    if (result.verdicts[i].status == FinalStatus::Accepted) accepted.push_back(i);
  std::stable_sort(accepted.begin(), accepted.end(), [&](std::size_t a, std::size_t b) {
    return result.verdicts[a].mean_score > result.verdicts[b].mean_score;
  });
  for (std::size_t r = 0; r < accepted.size(); ++r) {
    auto& v = result.verdicts[accepted[r]];
    if (r < cfg.daily_cap) result.feed.push_back({v.article_id, v.mean_score});
    else v.status = FinalStatus::Capped;
  }
  return result;
}

Verdict score_headline(std::string_view text, const CascadeConfig& cfg,
                       std::span<const std::unique_ptr<Stage>> stages) {
  check_stages(cfg, stages);
  Article a;
  a.title = std::string(text);
  a.id = make_article_id(a.title, "");
  const Article* ptr = &a;
  Verdict v;
  v.article_id = a.id;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    auto outcomes = stages[s]->evaluate(std::span<const Article* const>(&ptr, 1));
    if (outcomes.size() != 1) throw Error(Errc::StateError, "stage returned the wrong number of outcomes");
    v.entries.push_back(decide(cfg.stages[s], outcomes.front()));
  }
  finish(v, cfg);
  return v;
}

std::vector<StageCount> cascade_stats(std::span<const Verdict> verdicts,
                                      std::span<const StageName> stage_order) {
  std::vector<StageCount> counts;
  for (auto n : stage_order) counts.push_back({n, 0, 0, 0});
  for (const auto& v : verdicts) {
    for (const auto& e : v.entries) {
      auto it = std::find_if(counts.begin(), counts.end(), [&](const StageCount& c) { return c.stage == e.stage; });
      if (it == counts.end()) continue;
      ++it->in;
      if (e.passed) ++it->passed;
      else ++it->rejected;
    }
  }
  return counts;
}

// --- model-backed stages -------------------------------------------------------

namespace {

constexpr std::string_view kDegenerate = "degenerate input: no tokens";

// Shared featurization: tokenize once, reject empty documents.
class TokenizingStage : public Stage {
 public:
  std::vector<StageOutcome> evaluate(std::span<const Article* const> batch) const override {
    std::vector<StageOutcome> out;
    out.reserve(batch.size());
    for (const Article* a : batch) {
      StageOutcome o;
      auto tokens = tokenize(a->title);
      if (tokens.empty()) {
        o.error = std::string(kDegenerate);
      } else {
        try {
          score_tokens(tokens, o);
        } catch (const std::exception& e) {
          o = StageOutcome{};
          o.error = std::string("featurization failed: ") + e.what();
        }
      }
      out.push_back(std::move(o));
    }
    return out;
  }

 protected:
  virtual void score_tokens(const std::vector<std::string>& tokens, StageOutcome& out) const = 0;
};

class SequentialStage final : public TokenizingStage {
 public:
  SequentialStage(Mlp m, Vocabulary v) : model_(std::move(m)), vocab_(std::move(v)) {}
  StageName name() const override { return StageName::Sequential; }

 protected:
  void score_tokens(const std::vector<std::string>& tokens, StageOutcome& out) const override {
    out.score = mlp_forward(model_, vectorize_tfidf(tokens, vocab_));
  }

 private:
  Mlp model_;
  Vocabulary vocab_;
};

class LstmStage final : public TokenizingStage {
 public:
  LstmStage(LstmParams p, Vocabulary v, Index len) : params_(std::move(p)), vocab_(std::move(v)), len_(len) {}
  StageName name() const override { return StageName::Lstm; }

 protected:
  void score_tokens(const std::vector<std::string>& tokens, StageOutcome& out) const override {
    auto seq = encode_sequence(tokens, vocab_, len_);
    for (auto& i : seq.indices)
      if (i >= params_.index_space()) i = kOovIndex;
    out.score = lstm_predict(params_, seq, Mode::Infer);
  }

 private:
  LstmParams params_;
  Vocabulary vocab_;
  Index len_;
};

class SvmStage final : public TokenizingStage {
 public:
  SvmStage(SvmModel m, Vocabulary v) : model_(std::move(m)), vocab_(std::move(v)) {}
  StageName name() const override { return StageName::Svm; }

 protected:
  void score_tokens(const std::vector<std::string>& tokens, StageOutcome& out) const override {
    out.score = svm_score(model_, vectorize_tfidf(tokens, vocab_));
  }

 private:
  SvmModel model_;
  Vocabulary vocab_;
};

class StrictStage final : public TokenizingStage {
 public:
  StrictStage(OrdinalModel m, Vocabulary v, StrictPolicy p)
      : model_(std::move(m)), vocab_(std::move(v)), policy_(p) {}
  StageName name() const override { return StageName::Strict; }

 protected:
  void score_tokens(const std::vector<std::string>& tokens, StageOutcome& out) const override {
    auto r = rate(model_, vectorize_tfidf(tokens, vocab_));
    out.score = mass_at_or_above(r.probs, policy_.min_rating);
    out.decision = accept(r.rating, r.probs, policy_);
  }

 private:
  OrdinalModel model_;
  Vocabulary vocab_;
  StrictPolicy policy_;
};

class RemoteStrictStage final : public Stage {
 public:
  RemoteStrictStage(RemoteRater rater, StrictPolicy p) : rater_(std::move(rater)), policy_(p) {}
  StageName name() const override { return StageName::Strict; }

  std::vector<StageOutcome> evaluate(std::span<const Article* const> batch) const override {
    std::vector<StageOutcome> out(batch.size());
    const std::size_t step = rater_.config().max_batch;
    for (std::size_t start = 0; start < batch.size(); start += step) {
      const std::size_t end = std::min(batch.size(), start + step);
      std::vector<std::string> texts;
      for (std::size_t k = start; k < end; ++k) texts.push_back(batch[k]->title);
      try {
        auto ratings = rater_.rate(texts);
        for (std::size_t k = start; k < end; ++k) {
          const auto& r = ratings[k - start];
          out[k].score = mass_at_or_above(r.probs, policy_.min_rating);
          out[k].decision = accept(r.rating, r.probs, policy_);
        }
      } catch (const Error& e) {
        // The whole batch is rejected.
        for (std::size_t k = start; k < end; ++k) {
          out[k] = StageOutcome{};
          out[k].error = std::string(errc_name(e.code())) + ": " + e.what();
        }
      }
    }
    return out;
  }

 private:
  RemoteRater rater_;
  StrictPolicy policy_;
};

ModelType expected_type(StageName s) {
  switch (s) {
    case StageName::Sequential: return ModelType::Mlp;
    case StageName::Lstm: return ModelType::Lstm;
    case StageName::Svm: return ModelType::Svm;
    case StageName::Strict: return ModelType::Ordinal;
  }
  return ModelType::Mlp;
}

}  // namespace

std::vector<std::unique_ptr<Stage>> load_stages(const CascadeConfig& cfg, const fs::path& models_dir) {
  validate(cfg);
  std::vector<std::unique_ptr<Stage>> stages;
  for (const auto& spec : cfg.stages) {
    if (spec.name == StageName::Strict && spec.remote) {
      stages.push_back(std::make_unique<RemoteStrictStage>(RemoteRater(*spec.remote), spec.policy));
      continue;
    }
    if (spec.model_ref.empty())
      throw Error(Errc::ConfigError, "no model configured for stage " + std::string(stage_name(spec.name)));
    ModelArtifact art;
    Vocabulary vocab;
    try {
      art = load_model(models_dir, spec.model_ref);
      vocab = load_vocabulary(models_dir, art.vocab_ref);
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, "cannot load model '" + spec.model_ref + "': " + e.what());
    }
    if (art.model_type != expected_type(spec.name))
      throw Error(Errc::ConfigError, "model '" + spec.model_ref + "' has the wrong type for stage " +
                                         std::string(stage_name(spec.name)));
    auto model = model_from_artifact(art);
    switch (spec.name) {
      case StageName::Sequential:
        stages.push_back(std::make_unique<SequentialStage>(std::get<Mlp>(std::move(model)), std::move(vocab)));
        break;
      case StageName::Lstm:
        stages.push_back(std::make_unique<LstmStage>(std::get<LstmParams>(std::move(model)), std::move(vocab),
                                                     artifact_sequence_length(art)));
        break;
      case StageName::Svm:
        stages.push_back(std::make_unique<SvmStage>(std::get<SvmModel>(std::move(model)), std::move(vocab)));
        break;
      case StageName::Strict:
        stages.push_back(
            std::make_unique<StrictStage>(std::get<OrdinalModel>(std::move(model)), std::move(vocab), spec.policy));
        break;
    }
  }
  return stages;
}

}  // namespace brightside
