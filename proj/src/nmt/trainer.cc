#include "normlex/nmt/trainer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "file_util.h"
#include "normlex/errors.h"
#include "normlex/text.h"

namespace normlex {
namespace nmt {

namespace {

void shuffle(std::vector<std::size_t> *order, std::mt19937_64 *rng) {
  for (std::size_t i = order->size(); i > 1; --i) {
    std::swap((*order)[i - 1], (*order)[(*rng)() % i]);
  }
}

void adam_update(const ModelConfig &cfg, const ParamBuffer &grad, TrainState *state,
                 ParamBuffer *params) {
  ++state->step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state->step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state->step));
  const double lr = state->current_lr;
  const std::vector<double> &g = grad.data();
  std::vector<double> &m = state->first_moment.data();
  std::vector<double> &v = state->second_moment.data();
  std::vector<double> &p = params->data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_eps);
  }
}

}  // namespace

double mean_loss(const TranslationModel &model, const std::vector<TrainingExample> &examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto &ex : examples) total += multi_target_loss(model, ex);
  return total / static_cast<double>(examples.size());
}

double exact_match_rate(const TranslationModel &model,
                        const std::vector<TrainingExample> &examples) {
  if (examples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto &ex : examples) {
    const std::string out = decode_greedy(model, ex.source);
    for (const auto &t : ex.targets) {
      if (text::lowercase(t) == out) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

TrainResult train(const std::vector<TrainingExample> &train,
                  const std::vector<TrainingExample> &dev, const ModelConfig &cfg,
                  const TrainOptions &options) {
  if (train.empty()) throw EmptyDataset("training set");
  if (dev.empty()) throw EmptyDataset("development set");
  std::vector<std::string> sources, targets;
  for (const auto &ex : train) {
    sources.push_back(ex.source);
    targets.insert(targets.end(), ex.targets.begin(), ex.targets.end());
  }
  TranslationModel model(cfg, CharVocab::build(sources), CharVocab::build(targets));
  return train_model(std::move(model), train, dev, options);
}

TrainResult train_model(TranslationModel model, const std::vector<TrainingExample> &train,
                        const std::vector<TrainingExample> &dev, const TrainOptions &options) {
  if (train.empty()) throw EmptyDataset("training set");
  if (dev.empty()) throw EmptyDataset("development set");
  for (const auto &ex : train) {
    if (ex.source.empty() || ex.targets.empty()) throw Error("empty source or target list");
  }
  const ModelConfig &cfg = model.config();

  TrainState state;
  state.first_moment = model.zero_like();
  state.second_moment = model.zero_like();
  state.current_lr = cfg.initial_lr;
  state.best_dev_loss = std::numeric_limits<double>::infinity();

  TrainResult result{model, {}, 0, std::numeric_limits<double>::infinity()};
  std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ParamBuffer grad = model.zero_like();
  double previous_dev = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    if (state.current_lr < options.min_lr) break;
    state.epoch = epoch;
    shuffle(&order, &rng);
    double train_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      grad.set_zero();
      for (std::size_t i = start; i < end; ++i) {
        train_total += multi_target_loss_and_gradient(model, train[order[i]], &grad);
      }
      Eigen::Map<Eigen::VectorXd> g(grad.data().data(), static_cast<Eigen::Index>(grad.data().size()));
      g /= static_cast<double>(end - start);
      if (options.clip_norm > 0) {
        const double norm = g.norm();
        if (norm > options.clip_norm) g *= options.clip_norm / norm;
      }
      adam_update(cfg, grad, &state, &model.params());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_total / static_cast<double>(train.size());
    stats.dev_loss = mean_loss(model, dev);
    stats.lr = state.current_lr;
    result.log.push_back(stats);

    if (stats.dev_loss < state.best_dev_loss) {
      state.best_dev_loss = stats.dev_loss;
      result.model = model;
      result.best_epoch = epoch;
      result.best_dev_loss = stats.dev_loss;
    }
    if (stats.dev_loss > previous_dev) state.current_lr /= 2.0;
    previous_dev = stats.dev_loss;

    if (options.on_epoch_end && !options.on_epoch_end(stats, model)) break;
  }
  return result;
}

GradientCheckResult gradient_check(TranslationModel model, const TrainingExample &example,
                                   const GradientCheckOptions &options) {
  if (options.samples_per_tensor < 1) throw Error("gradient check needs at least one sample");
  ParamBuffer grad = model.zero_like();
  multi_target_loss_and_gradient(model, example, &grad);

  GradientCheckResult result;
  std::mt19937_64 rng(options.seed);
  std::vector<double> &p = model.params().data();
  for (const auto &t : model.params().table().tensors()) {
    std::vector<std::size_t> coords(t.size());
    std::iota(coords.begin(), coords.end(), t.offset);
    if (coords.size() > static_cast<std::size_t>(options.samples_per_tensor)) {
      shuffle(&coords, &rng);
      coords.resize(options.samples_per_tensor);
    }
    double worst = 0.0;
    for (std::size_t i : coords) {
      const double saved = p[i];
      p[i] = saved + options.epsilon;
      const double plus = multi_target_loss(model, example);
      p[i] = saved - options.epsilon;
      const double minus = multi_target_loss(model, example);
      p[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double analytic = grad.data()[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), options.abs_floor});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    result.per_tensor.emplace_back(t.name, worst);
    result.max_relative_error = std::max(result.max_relative_error, worst);
  }
  return result;
}

std::vector<TrainingExample> parse_parallel_corpus(std::string_view contents,
                                                   const std::string &name) {
  std::vector<TrainingExample> out;
  std::map<std::string, std::size_t> by_source;
  internal::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(name, line_no, "expected source<TAB>target");
    std::string_view source = text::trim(fields[0]);
    std::string_view target = text::trim(fields[1]);
    if (source.empty() || target.empty()) throw ParseError(name, line_no, "empty source or target");
    const std::string key = text::lowercase(source);
    auto [it, inserted] = by_source.emplace(key, out.size());
    if (inserted) out.push_back(TrainingExample{std::string(source), {}});
    auto &targets = out[it->second].targets;
    if (std::find(targets.begin(), targets.end(), target) == targets.end()) {
      targets.emplace_back(target);
    }
  });
  return out;
}

std::vector<TrainingExample> read_parallel_corpus(const std::filesystem::path &path) {
  auto contents = internal::read_file(path);
  if (!contents) throw Error("cannot read parallel corpus " + path.string());
  return parse_parallel_corpus(*contents, path.string());
}

}  // namespace nmt
}  // namespace normlex
