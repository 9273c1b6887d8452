#include "brightside/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <csignal>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <sys/stat.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "brightside/artifact.hpp"
#include "brightside/error.hpp"
#include "brightside/features.hpp"
#include "brightside/ingest.hpp"
#include "brightside/pipeline.hpp"
#include "brightside/server.hpp"
#include "brightside/store.hpp"

namespace brightside {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

// --- classifier -----------------------------------------------------------------

struct Classifier::Impl {
  AnyModel model;
  Vocabulary vocab;
  Index sequence_length = kDefaultSequenceLength;
  StrictPolicy policy;
};

Classifier Classifier::load(const fs::path& artifact_path) {
  auto art = load_model_file(artifact_path);
  auto impl = std::make_shared<Impl>();
  impl->vocab = load_vocabulary(artifact_path.parent_path(), art.vocab_ref);
  impl->sequence_length = artifact_sequence_length(art);
  impl->model = model_from_artifact(art);
  Classifier c;
  c.impl_ = std::move(impl);
  return c;
}

Classifier::Prediction Classifier::predict(std::string_view text, double threshold) const {
  auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(Errc::DegenerateData, "degenerate input: headline has no tokens");
  const auto& im = *impl_;
  Prediction p;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Mlp>) {
          p.probability = mlp_forward(m, vectorize_tfidf(tokens, im.vocab));
          p.label = p.probability >= threshold ? 1 : 0;
        } else if constexpr (std::is_same_v<M, LstmParams>) {
          auto seq = encode_sequence(tokens, im.vocab, im.sequence_length);
          for (auto& i : seq.indices)
            if (i >= m.index_space()) i = kOovIndex;
          p.probability = lstm_predict(m, seq);
          p.label = p.probability >= threshold ? 1 : 0;
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          p.probability = svm_score(m, vectorize_tfidf(tokens, im.vocab));
          p.label = p.probability >= threshold ? 1 : 0;
        } else {
          auto r = rate(m, vectorize_tfidf(tokens, im.vocab));
          p.probability = mass_at_or_above(r.probs, im.policy.min_rating);
          p.label = accept(r.rating, r.probs, im.policy) ? 1 : 0;
        }
      },
      im.model);
  return p;
}

// --- analyze ------------------------------------------------------------------------

double AnalyzeResult::ratio() const {
  return positives == 0 ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(negatives) / static_cast<double>(positives);
}

double AnalyzeResult::excess_percent() const { return (ratio() - 1.0) * 100.0; }

AnalyzeResult analyze(std::vector<LabeledExample> examples, const Classifier& model, std::size_t sample,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(examples.begin(), examples.end(), rng);
  examples.resize(std::min(sample, examples.size()));

  std::vector<Classifier::Prediction> preds(examples.size());
  std::vector<std::string> errors(examples.size());
  const std::size_t n_threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, examples.size()); ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < examples.size();) {
          try {
            preds[i] = model.predict(examples[i].text);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        }
      });
  }

  AnalyzeResult r;
  std::map<std::string, std::pair<double, std::size_t>> months;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!errors[i].empty()) continue;
    ++r.sample;
    if (preds[i].label == 1) ++r.positives;
    else ++r.negatives;
    if (!examples[i].date) continue;
    auto& [sum, count] = months[format_month(*examples[i].date)];
    sum += 2.0 * preds[i].probability - 1.0;
    ++count;
  }
  for (const auto& [m, sc] : months)
    r.months.push_back({m, sc.first / static_cast<double>(sc.second), sc.second});
  return r;
}

// --- command plumbing ----------------------------------------------------------------

namespace {

constexpr double kOrdinalLearningRate = 0.05;

enum class Format { Text, Json, Csv };

const std::map<std::string, Format> kFormats{{"text", Format::Text}, {"json", Format::Json}, {"csv", Format::Csv}};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::IoError:
    case Errc::StageFailure: return kExitIo;
    default: return kExitData;
  }
}

int fail(std::ostream& err, const Error& e) {
  err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
  return exit_code_for(e.code());
}

std::string created_at_for(const fs::path& data) {
  struct stat st {};
  if (::stat(data.c_str(), &st) != 0) return format_timestamp(now_utc());
  return format_timestamp(Timestamp{std::chrono::seconds{st.st_mtime}});
}

LoadedDataset read_data(const fs::path& path, const std::string& format_name) {
  if (!fs::exists(path)) throw Error(Errc::IoError, "data file not found: " + path.string());
  DatasetFormat format;
  if (format_name.empty()) {
    format = detect_dataset_format(path);
  } else {
    auto f = parse_dataset_format(format_name);
    if (!f) throw Error(Errc::InvalidArgument, "unknown dataset format " + format_name);
    format = *f;
  }
  return load_dataset(path, format);
}

int binary_label(const LabeledExample& ex) {
  return ex.kind == LabelKind::Ordinal ? (ex.label >= 4 ? 1 : 0) : ex.label;
}

void print_kv_text(std::ostream& out, const json& j, const std::string& prefix = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) print_kv_text(out, *it, key);
    else out << key << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
  }
}

void print_kv_csv(std::ostream& out, const json& j, const std::string& prefix = "") {
  if (prefix.empty()) out << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      print_kv_csv(out, *it, key);
      continue;
    }
    std::string v = it->is_string() ? it->get<std::string>() : it->dump();
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out << key << "," << v << "\n";
  }
}

void emit(std::ostream& out, Format f, const json& j) {
  switch (f) {
    case Format::Json: out << j.dump(2) << "\n"; break;
    case Format::Csv: print_kv_csv(out, j); break;
    case Format::Text: print_kv_text(out, j); break;
  }
}

volatile std::sig_atomic_t g_stop = 0;

extern "C" void on_signal(int) { g_stop = 1; }

struct Options {
  Format format = Format::Text;
  std::string root = ".";

  // train
  std::string model_kind;
  std::string data;
  std::string data_format;
  std::string out_path;
  std::string report_path;
  std::uint64_t seed = 42;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  double lambda = 1e-4;
  std::size_t batch_size = 32;
  std::size_t patience = 3;
  std::size_t vocab_size = kDefaultVocabSize;
  Index seq_len = kDefaultSequenceLength;

  // eval / analyze
  std::string model_path;
  double threshold = kDefaultThreshold;
  std::size_t sample = kDefaultAnalyzeSample;
  std::string monthly_csv;

  // rate / run-pipeline / serve
  std::string headline;
  std::string config;
  std::string sources;
  std::string date;
  bool loop = false;
  std::string addr = "127.0.0.1:8080";
  std::vector<std::string> cors;
};

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  auto kind = parse_model_type(o.model_kind);
  if (!kind) throw Error(Errc::InvalidArgument, "unknown model " + o.model_kind);
  auto data = read_data(o.data, o.data_format);
  const bool ordinal = *kind == ModelType::Ordinal;

  std::vector<std::vector<std::string>> docs;
  std::vector<int> ys;
  for (const auto& ex : data.examples) {
    if ((ex.kind == LabelKind::Ordinal) != ordinal) continue;
    auto tokens = tokenize(ex.text);
    if (tokens.empty()) continue;
    docs.push_back(std::move(tokens));
    ys.push_back(ex.label);
  }
  if (docs.empty())
    throw Error(Errc::DegenerateData, std::string("no ") + (ordinal ? "ordinal" : "binary") + " examples in " + o.data);
  if (data.skipped) err << "warning: skipped " << data.skipped << " malformed rows\n";

  auto vocab = build_vocabulary(docs, o.vocab_size);
  TrainConfig tc;
  tc.seed = o.seed;
  tc.batch_size = o.batch_size;
  tc.early_stop_patience = o.patience;
  if (o.epochs) tc.max_epochs = *o.epochs;
  if (o.learning_rate) tc.adam.alpha = *o.learning_rate;
  else if (ordinal) tc.adam.alpha = kOrdinalLearningRate;

  auto features = [&] {
    std::vector<FeatureVector> xs;
    xs.reserve(docs.size());
    for (const auto& d : docs) xs.push_back(vectorize_tfidf(d, vocab));
    return xs;
  };

  ModelArtifact art;
  json report;
  switch (*kind) {
    case ModelType::Mlp: {
      MlpTraining opts;
      opts.train = tc;
      TrainReport r;
      art = to_artifact(train_mlp(features(), ys, opts, &r));
      report = to_json(r);
      break;
    }
    case ModelType::Lstm: {
      std::vector<TokenSequence> xs;
      for (const auto& d : docs) xs.push_back(encode_sequence(d, vocab, o.seq_len));
      LstmTraining opts;
      opts.shape.index_space = vocab.index_space();
      opts.train = tc;
      TrainReport r;
      art = to_artifact(train_lstm(xs, ys, opts, &r), o.seq_len);
      report = to_json(r);
      break;
    }
    case ModelType::Svm: {
      SvmTraining opts;
      opts.lambda = o.lambda;
      opts.seed = o.seed;
      if (o.epochs) opts.epochs = *o.epochs;
      auto xs = features();
      auto m = train_svm(xs, ys, opts);
      std::size_t ok = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) ok += svm_label(svm_decision(m, xs[i])) == ys[i] ? 1 : 0;
      report = {{"epochs_run", m.epochs_trained},
                {"train_accuracy", static_cast<double>(ok) / static_cast<double>(xs.size())},
                {"objective", svm_objective(m.w, xs, ys, m.lambda)},
                {"n_train", xs.size()}};
      art = to_artifact(m);
      break;
    }
    case ModelType::Ordinal: {
      TrainReport r;
      art = to_artifact(train_ordinal(features(), ys, tc, &r));
      report = to_json(r);
      break;
    }
  }

  const fs::path out_path = o.out_path;
  const auto dir = out_path.parent_path().empty() ? fs::path(".") : out_path.parent_path();
  fs::create_directories(dir);
  art.vocab_ref = save_vocabulary(dir, vocab);
  art.created_at = created_at_for(o.data);
  save_model_file(out_path, art);

  json summary = {{"model", std::string(model_type_name(*kind))},
                  {"artifact", out_path.string()},
                  {"id", out_path.stem().string()},
                  {"vocab_ref", art.vocab_ref},
                  {"n_examples", docs.size()},
                  {"seed", o.seed},
                  {"report", report}};
  fs::path report_path = o.report_path.empty() ? fs::path(out_path).replace_extension(".report.json") : fs::path(o.report_path);
  write_file_atomic(report_path, summary.dump(2) + "\n");
  emit(out, o.format, summary);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  auto model = Classifier::load(o.model_path);
  auto data = read_data(o.data, o.data_format);
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0, skipped = 0;
  for (const auto& ex : data.examples) {
    Classifier::Prediction p;
    try {
      p = model.predict(ex.text, o.threshold);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateData) throw;
      ++skipped;
      continue;
    }
    const int y = binary_label(ex);
    if (p.label == 1) (y == 1 ? tp : fp)++;
    else (y == 1 ? fn : tn)++;
  }
  if (skipped) err << "warning: " << skipped << " examples had no tokens and were not scored\n";
  const std::size_t n = tp + fp + tn + fn;
  if (n == 0) throw Error(Errc::DegenerateData, "no scorable examples in " + o.data);
  json result = {{"n", n},
                 {"accuracy", static_cast<double>(tp + tn) / static_cast<double>(n)},
                 {"false_positive_rate", fp + tn == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(fp + tn)},
                 {"leaks", fp},
                 {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}}};
  emit(out, o.format, result);
  return kExitOk;
}

void write_monthly_csv(std::ostream& out, const AnalyzeResult& r) {
  out << "month,mean_score,count\n";
  for (const auto& m : r.months) out << m.month << "," << format_double(m.mean_score) << "," << m.count << "\n";
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  auto model = Classifier::load(o.model_path);
  auto data = read_data(o.data, o.data_format);
  if (o.sample > data.examples.size())
    err << "warning: sample " << o.sample << " exceeds dataset size " << data.examples.size() << "; using "
        << data.examples.size() << "\n";
  auto r = analyze(std::move(data.examples), model, o.sample, o.seed);

  if (!o.monthly_csv.empty()) {
    std::ostringstream s;
    write_monthly_csv(s, r);
    write_file_atomic(o.monthly_csv, s.str());
  }
  switch (o.format) {
    case Format::Csv:
      out << "label,count\n0," << r.negatives << "\n1," << r.positives << "\n\n";
      out << "metric,value\nsample," << r.sample << "\nratio_neg_pos," << format_double(r.ratio())
          << "\nexcess_percent," << format_double(r.excess_percent()) << "\n\n";
      write_monthly_csv(out, r);
      break;
    case Format::Json: {
      json months = json::array();
      for (const auto& m : r.months) months.push_back({{"month", m.month}, {"mean_score", m.mean_score}, {"count", m.count}});
      json j = {{"sample", r.sample},
                {"counts", {{"0", r.negatives}, {"1", r.positives}}},
                {"ratio_neg_pos", r.positives ? json(r.ratio()) : json(nullptr)},
                {"excess_percent", r.positives ? json(r.excess_percent()) : json(nullptr)},
                {"months", std::move(months)}};
      out << j.dump(2) << "\n";
      break;
    }
    case Format::Text:
      out << "sample: " << r.sample << "\nnegative: " << r.negatives << "\npositive: " << r.positives
          << "\nnegatives per positive: " << format_double(r.ratio()) << "\nnegatives exceed positives by: "
          << std::fixed << std::setprecision(2) << r.excess_percent() << "%\n"
          << std::defaultfloat;
      write_monthly_csv(out, r);
      break;
  }
  return kExitOk;
}

int cmd_rate(const Options& o, std::ostream& out, std::ostream& err) {
  if (tokenize(o.headline).empty()) {
    err << "error: degenerate input: headline has no tokens\n";
    return kExitData;
  }
  auto cfg = load_cascade_config(o.config);
  auto stages = load_stages(cfg, Store(o.root).models_dir());
  auto v = score_headline(o.headline, cfg, stages);
  switch (o.format) {
    case Format::Json: {
      auto j = to_json(v);
      j["headline"] = o.headline;
      out << j.dump(2) << "\n";
      break;
    }
    case Format::Csv:
      out << "stage,score,passed,error\n";
      for (const auto& e : v.entries)
        out << stage_name(e.stage) << "," << format_double(e.score) << "," << (e.passed ? "true" : "false") << ","
            << e.error << "\n";
      out << "final," << format_double(v.mean_score) << "," << (v.status == FinalStatus::Accepted ? "true" : "false")
          << ",\n";
      break;
    case Format::Text:
      for (const auto& e : v.entries) {
        out << std::left << std::setw(11) << stage_name(e.stage) << std::fixed << std::setprecision(4) << e.score
            << "  " << (e.passed ? "pass" : "fail");
        if (!e.error.empty()) out << "  (" << e.error << ")";
        out << "\n";
      }
      out << std::defaultfloat;
      if (v.status == FinalStatus::Accepted) out << "ACCEPTED";
      else out << "REJECTED at " << stage_name(*v.rejected_at);
      out << " mean=" << std::fixed << std::setprecision(4) << v.mean_score << std::defaultfloat << "\n";
      break;
  }
  return kExitOk;
}

int cmd_run_pipeline(const Options& o, std::ostream& out, std::ostream& err) {
  auto sources = load_sources(o.sources);
  auto cfg = load_cascade_config(o.config);
  Store store(o.root);
  auto stages = load_stages(cfg, store.models_dir());
  FetchEnv env;

  auto once = [&](std::optional<Date> date) {
    DailyOptions opts;
    opts.date = date;
    auto report = run_daily(sources, cfg, stages, store, env, opts);
    emit(out, o.format, to_json(report));
    out.flush();
  };

  std::optional<Date> date;
  if (!o.date.empty()) {
    date = parse_date(o.date);
    if (!date) throw Error(Errc::InvalidArgument, "date must be YYYY-MM-DD");
  }
  if (!o.loop) {
    once(date);
    return kExitOk;
  }
  auto interval = std::chrono::hours(24);
  for (const auto& s : sources) interval = std::min(interval, s.poll_interval);
  for (;;) {
    try {
      once(std::nullopt);
    } catch (const Error& e) {
      if (e.code() != Errc::AlreadyPublished && e.code() != Errc::IoError) throw;
      err << "warning: " << e.what() << "\n";
    }
    std::this_thread::sleep_for(interval);
  }
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream&) {
  ServerConfig sc;
  sc.root = o.root;
  sc.cors_origins = o.cors;
  auto colon = o.addr.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "--addr must be host:port");
  sc.host = o.addr.substr(0, colon);
  const auto port_str = o.addr.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port_str.data(), port_str.data() + port_str.size(), sc.port);
  if (ec != std::errc{} || ptr != port_str.data() + port_str.size() || sc.port < 0 || sc.port > 65535)
    throw Error(Errc::InvalidArgument, "bad port in --addr");
  ApiServer server(sc);
  g_stop = 0;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int port = server.start();
  out << "listening on " << sc.host << ":" << port << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"brightside: positive-news filtering cascade"};
  app.require_subcommand(1);
  Options o;
  std::string format = "text";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--root", o.root, "Store root holding data/ and models/");
  };

  auto* train = app.add_subcommand("train", "Train a stage model");
  common(train);
  train->add_option("--model", o.model_kind, "mlp | lstm | svm | ordinal")->required()
      ->check(CLI::IsMember({"mlp", "lstm", "svm", "ordinal"}));
  train->add_option("--data", o.data, "Dataset file")->required();
  train->add_option("--data-format", o.data_format, "headlines_csv | tweets_csv | ratings_csv | jsonl");
  train->add_option("--out", o.out_path, "Artifact path (<models>/<id>.json)")->required();
  train->add_option("--report", o.report_path, "Training report path");
  train->add_option("--seed", o.seed);
  train->add_option("--epochs", o.epochs);
  train->add_option("--learning-rate", o.learning_rate, "Adam step size")->check(CLI::PositiveNumber);
  train->add_option("--lambda", o.lambda, "SVM regularization")->check(CLI::PositiveNumber);
  train->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--patience", o.patience)->check(CLI::PositiveNumber);
  train->add_option("--vocab-size", o.vocab_size)->check(CLI::PositiveNumber);
  train->add_option("--seq-len", o.seq_len)->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Score a model on a labeled dataset");
  common(eval);
  eval->add_option("--model", o.model_path, "Artifact path")->required();
  eval->add_option("--data", o.data)->required();
  eval->add_option("--data-format", o.data_format);
  eval->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));

  auto* an = app.add_subcommand("analyze", "Sentiment counts and monthly means over a dated corpus");
  common(an);
  an->add_option("--data", o.data)->required();
  an->add_option("--data-format", o.data_format);
  an->add_option("--model", o.model_path, "Artifact path")->required();
  an->add_option("--sample", o.sample)->check(CLI::PositiveNumber);
  an->add_option("--seed", o.seed);
  an->add_option("--monthly-csv", o.monthly_csv, "Also write month,mean_score,count here");

  auto* rt = app.add_subcommand("rate", "Trace one headline through the cascade");
  common(rt);
  rt->add_option("headline", o.headline)->required();
  rt->add_option("--config", o.config, "Cascade config")->required();

  auto* rp = app.add_subcommand("run-pipeline", "Fetch, filter and publish the daily feed");
  common(rp);
  rp->add_option("--sources", o.sources)->required();
  rp->add_option("--config", o.config)->required();
  rp->add_option("--date", o.date, "YYYY-MM-DD (default: today, UTC)");
  rp->add_flag("--loop", o.loop, "Run every poll interval instead of once");

  auto* sv = app.add_subcommand("serve", "Serve the HTTP API");
  common(sv);
  sv->add_option("--addr", o.addr, "host:port");
  sv->add_option("--cors", o.cors, "Allowed CORS origin (repeatable)");

  std::vector<const char*> argv{"brightside"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  o.format = kFormats.at(format);

  try {
    if (train->parsed()) return cmd_train(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (an->parsed()) return cmd_analyze(o, out, err);
    if (rt->parsed()) return cmd_rate(o, out, err);
    if (rp->parsed()) return cmd_run_pipeline(o, out, err);
    if (sv->parsed()) return cmd_serve(o, out, err);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) {
      err << "usage error: " << e.what() << "\n";
      return kExitUsage;
    }
    return fail(err, e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace brightside
