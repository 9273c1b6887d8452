#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "brightside/corpus.hpp"
#include "brightside/error.hpp"
#include "brightside/features.hpp"
#include "brightside/optim.hpp"
#include "brightside/pipeline.hpp"

#include <httplib.h>
#undef _res

namespace bt {

namespace fs = std::filesystem;

// Independent FNV-1a-64, written from the published constants.
std::uint64_t fnv_oracle(std::string_view bytes);
std::string hex16(std::uint64_t v);
std::string expected_article_id(std::string_view title, std::string_view canonical_url);

fs::path corpus_dir();

// Code of the brightside::Error thrown by fn, nullopt when nothing is thrown.
std::optional<brightside::Errc> error_code(const std::function<void()>& fn);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, std::string_view content);

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t coords = 0;
};

// Central differences of `loss` over every coordinate of `params` (skipping
// coordinates for which `skip(tensor, row, col)` is true), compared with
// `analytic`.
GradCheck check_gradient(brightside::ParamRefs params, const brightside::ParamRefs& analytic,
                         const std::function<double()>& loss, double h = 1e-5,
                         const std::function<bool(std::size_t, Eigen::Index, Eigen::Index)>& skip = {});

// Sparse vector with the nonzero coordinates of `dense`.
brightside::FeatureVector features_of(const std::vector<double>& dense);

brightside::Article make_article(std::string title, std::string url = "https://news.example/a");

// Stage whose outcome is a pure function of the article.
class FakeStage final : public brightside::Stage {
 public:
  using Fn = std::function<brightside::StageOutcome(const brightside::Article&)>;
  FakeStage(brightside::StageName name, Fn fn) : name_(name), fn_(std::move(fn)) {}
  brightside::StageName name() const override { return name_; }
  std::vector<brightside::StageOutcome> evaluate(
      std::span<const brightside::Article* const> batch) const override;
  mutable std::size_t calls = 0;
  mutable std::size_t seen = 0;

 private:
  brightside::StageName name_;
  Fn fn_;
};

// Saturated hand-built models over a small lexicon. Every stage scores exactly
// 1.0 unless its reject token appears:
//   sequential rejects "grim", svm rejects "meh", strict rejects "tepid";
// lstm accepts everything.
inline constexpr std::string_view kSeqReject = "grim";
inline constexpr std::string_view kSvmReject = "meh";
inline constexpr std::string_view kStrictReject = "tepid";

brightside::Vocabulary fixture_vocabulary(const std::vector<std::string>& extra_words = {});
// Writes vocab-<id>.json and sequential/lstm/svm/strict.json into models_dir.
void write_fixture_models(const fs::path& models_dir, const std::vector<std::string>& extra_words = {});
brightside::CascadeConfig fixture_cascade_config();

// httplib server on 127.0.0.1 and a free port, served from a background thread.
class FixtureServer {
 public:
  FixtureServer();
  ~FixtureServer();
  httplib::Server& http() { return server_; }
  int start();
  std::string base_url() const;
  void stop();

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace bt
