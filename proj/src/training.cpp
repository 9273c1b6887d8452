#include "brightside/training.hpp"

#include <json.hpp>

namespace brightside {

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw Error(Errc::InvalidArgument, "batch_size must be >= 1");
  if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0))
    throw Error(Errc::InvalidArgument, "validation_fraction must lie in [0,1)");
}

nlohmann::json to_json(const TrainReport& r) {
  return {{"epochs_run", r.epochs_run},   {"best_epoch", r.best_epoch},
          {"train_loss", r.train_loss},   {"val_loss", r.val_loss},
          {"train_accuracy", r.train_accuracy}, {"val_accuracy", r.val_accuracy},
          {"n_train", r.n_train},         {"n_val", r.n_val}};
}

void require_both_classes(std::span<const int> labels) {
  bool pos = false, neg = false;
  for (int y : labels) {
    pos = pos || y == 1;
    neg = neg || y == 0;
  }
  if (!pos || !neg)
    throw Error(Errc::DegenerateData, "training data must contain both classes");
}

}  // namespace brightside
