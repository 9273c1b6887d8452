#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "brightside/error.hpp"
#include "brightside/optim.hpp"

namespace brightside {

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 20;
  std::size_t early_stop_patience = 3;
  std::uint64_t seed = 42;
  double validation_fraction = 0.1;
  AdamHyper adam;
};

void validate(const TrainConfig& cfg);

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based; 0 when nothing ran
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
};

nlohmann::json to_json(const TrainReport& r);

// Throws Errc::DegenerateData unless both binary classes appear.
void require_both_classes(std::span<const int> labels);

// The model-specific half of a training run.
//
//   Model              copyable parameter bundle
//   params(Model&)     -> ParamRefs, fixed order
//   zero_like(Model)   -> Model with all-zero tensors of the same shapes
//   accumulate(model, i, grad, rng) -> per-example loss, adds d loss / d params
//                      of example i into grad (train mode)
//   eval_loss(model, i) -> loss of example i in inference mode
//   correct(model, i)  -> prediction of example i matches its label
template <typename Model>
struct TrainHooks {
  ParamRefs (*params)(Model&);
  Model (*zero_like)(const Model&);
  std::function<double(const Model&, std::size_t, Model&, std::mt19937_64&)> accumulate;
  std::function<double(const Model&, std::size_t)> eval_loss;
  std::function<bool(const Model&, std::size_t)> correct;
  // Applied to the averaged batch gradient before the optimizer step.
  std::function<void(Model&)> post_batch;
};

// Mini-batch Adam with early stopping on validation loss. Returns the
// snapshot with the lowest validation loss (training loss when no
// validation examples are held out). Deterministic for a given seed.
template <typename Model>
Model fit(Model model, std::size_t n_examples, const TrainConfig& cfg,
          const TrainHooks<Model>& hooks, TrainReport& report) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);

  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(n_examples));
  if (n_val >= n_examples) n_val = 0;
  std::vector<std::size_t> val(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<std::size_t> train(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));

  report = TrainReport{};
  report.n_train = train.size();
  report.n_val = val.size();

  AdamState adam;
  adam.hyper = cfg.adam;
  Model best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  auto mean_loss = [&](const Model& m, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += hooks.eval_loss(m, i);
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
  };

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(train.size(), start + cfg.batch_size);
      Model grad = hooks.zero_like(model);
      for (std::size_t k = start; k < end; ++k)
        epoch_loss += hooks.accumulate(model, train[k], grad, rng);
      auto grefs = hooks.params(grad);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grefs) g *= inv;
      if (hooks.post_batch) hooks.post_batch(grad);
      auto prefs = hooks.params(model);
      auto cgrefs = const_refs(grefs);
      adam_step(prefs, cgrefs, adam);
    }
    const double tl = train.empty() ? 0.0 : epoch_loss / static_cast<double>(train.size());
    report.train_loss.push_back(tl);
    const double vl = val.empty() ? mean_loss(model, train) : mean_loss(model, val);
    report.val_loss.push_back(vl);
    report.epochs_run = epoch;

    if (vl < best_loss) {
      best_loss = vl;
      best = model;
      report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience) {
      break;
    }
  }

  auto accuracy = [&](const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    std::size_t ok = 0;
    for (auto i : idx) ok += hooks.correct(best, i) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(idx.size());
  };
  report.train_accuracy = accuracy(train);
  report.val_accuracy = accuracy(val);
  return best;
}

}  // namespace brightside
