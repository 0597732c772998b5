#ifndef NORMLEX_NMT_TRAINER_H_
#define NORMLEX_NMT_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "normlex/nmt/model.h"

namespace normlex {
namespace nmt {

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double lr = 0.0;  // learning rate used during this epoch
};

struct TrainOptions {
  int max_epochs = 50;
  double min_lr = 1e-6;
  // Global gradient-norm clipping per mini-batch; 0 disables it.
  double clip_norm = 5.0;
  // Called after every epoch with the current (not best) model. Returning
  // false stops training.
  std::function<bool(const EpochStats &, const TranslationModel &)> on_epoch_end;
};

// Optimizer state carried across epochs.
struct TrainState {
  ParamBuffer first_moment;
  ParamBuffer second_moment;
  uint64_t step = 0;
  double current_lr = 0.0;
  double best_dev_loss = 0.0;
  int epoch = 0;
};

struct TrainResult {
  TranslationModel model;  // parameters of the epoch with the lowest dev loss
  std::vector<EpochStats> log;
  int best_epoch = 0;
  double best_dev_loss = 0.0;
};

// Builds character vocabularies from `train`, initializes a model from
// `cfg` and trains it. Throws EmptyDataset if either set is empty.
TrainResult train(const std::vector<TrainingExample> &train,
                  const std::vector<TrainingExample> &dev, const ModelConfig &cfg,
                  const TrainOptions &options = {});

// Trains an existing model. Mini-batches of config().batch_size come from a
// seeded shuffle of `train`; each example contributes the gradient of its
// lowest-loss target. The learning rate halves whenever the mean dev loss
// rises above the previous epoch's, and training stops after max_epochs or
// once the rate falls below min_lr.
TrainResult train_model(TranslationModel model, const std::vector<TrainingExample> &train,
                        const std::vector<TrainingExample> &dev, const TrainOptions &options = {});

double mean_loss(const TranslationModel &model, const std::vector<TrainingExample> &examples);

// Fraction of examples whose greedy decode equals one of their targets.
double exact_match_rate(const TranslationModel &model,
                        const std::vector<TrainingExample> &examples);

struct GradientCheckOptions {
  double epsilon = 1e-5;
  int samples_per_tensor = 200;
  uint64_t seed = 17;
  // Denominator floor of the relative error: |a - n| / max(|a|, |n|, floor).
  double abs_floor = 1e-6;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::vector<std::pair<std::string, double>> per_tensor;
};

// Compares analytic gradients with central differences on a seeded sample
// of coordinates of every parameter tensor.
GradientCheckResult gradient_check(TranslationModel model, const TrainingExample &example,
                                   const GradientCheckOptions &options = {});

// Reads `source<TAB>target` lines. Repeated sources (compared lowercased)
// are merged into one example with several targets.
std::vector<TrainingExample> read_parallel_corpus(const std::filesystem::path &path);
std::vector<TrainingExample> parse_parallel_corpus(std::string_view contents,
                                                   const std::string &name = "<input>");

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_TRAINER_H_
