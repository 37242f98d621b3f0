#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sentclust/error.hpp"
#include "sentclust/eval.hpp"
#include "sentclust/label.hpp"
#include "sentclust/random.hpp"

namespace sentclust {

using Probabilities = std::array<double, kNumClasses>;

/// Floor applied to the gold-class probability before taking its log.
inline constexpr double kProbabilityFloor = 1e-12;

struct TrainExample {
  Eigen::VectorXd features;
  SentimentLabel label = SentimentLabel::Neutral;
  /// Per-example confidence; 1.0 when the data carries none.
  double alpha = 1.0;
};

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Zero to two ReLU hidden layers followed by a linear layer onto the four
/// classes.
struct ModelParams {
  std::size_t input_dim = 0;
  std::vector<Layer> layers;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }
};

enum class LossKind { CrossEntropy, GoldDistanceWeighted };

inline constexpr std::string_view to_string(LossKind k) {
  return k == LossKind::CrossEntropy ? "ce" : "gdw-ce";
}

inline LossKind parse_loss_kind(std::string_view s) {
  if (s == "ce" || s == "CE") return LossKind::CrossEntropy;
  if (s == "gdw-ce" || s == "GDW-CE" || s == "gdwce") return LossKind::GoldDistanceWeighted;
  throw DataError("unknown loss '" + std::string(s) + "' (expected ce or gdw-ce)");
}

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  int max_epochs = 100;
  int patience = 10;
  double clip_norm = 1.0;
  LossKind loss_kind = LossKind::CrossEntropy;
  std::vector<std::size_t> hidden_sizes;
  std::uint64_t seed = 0;
  /// Record the global gradient norm of every optimizer step.
  bool log_grad_norms = false;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw DataError("train: learning_rate must be > 0");
    if (batch_size == 0) throw DataError("train: batch_size must be > 0");
    if (max_epochs <= 0) throw DataError("train: max_epochs must be > 0");
    if (patience <= 0) throw DataError("train: patience must be > 0");
    if (!(clip_norm > 0.0)) throw DataError("train: clip_norm must be > 0");
    for (auto h : hidden_sizes) {
      if (h == 0) throw DataError("train: hidden sizes must be > 0");
    }
  }
};

struct TrainReport {
  int epochs_run = 0;
  /// 1-based epoch whose parameters were returned.
  int best_epoch = 0;
  double best_dev_macro_f1 = -1.0;
  std::vector<double> per_epoch_dev_macro_f1;
  std::vector<double> per_epoch_train_loss;
  bool stopped_early = false;
  /// Filled when TrainConfig::log_grad_norms is set.
  std::vector<double> pre_clip_grad_norms;
  std::vector<double> post_clip_grad_norms;
  std::vector<std::string> warnings;
};

// Model ---------------------------------------------------------------------

/// Weights and biases uniform in +-1/sqrt(fan_in).
inline ModelParams init_model(std::size_t input_dim, std::span<const std::size_t> hidden_sizes,
                              Rng& rng) {
  if (input_dim == 0) throw DataError("model: input_dim must be > 0");
  ModelParams params;
  params.input_dim = input_dim;
  std::size_t fan_in = input_dim;
  auto add_layer = [&](std::size_t out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Layer layer;
    layer.weight.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in));
    layer.bias.resize(static_cast<Eigen::Index>(out));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.uniform(-bound, bound);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = rng.uniform(-bound, bound);
    params.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto h : hidden_sizes) add_layer(h);
  add_layer(kNumClasses);
  return params;
}

namespace classifier_detail {

/// Column-wise softmax with max subtraction.
inline Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits.rowwise() - logits.colwise().maxCoeff();
  out = out.array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  // inputs to each layer (in x B)
  std::vector<Eigen::MatrixXd> pre_activations;
  Eigen::MatrixXd probs;  // 4 x B
};

/// `inputs` is input_dim x B (one column per example).
inline ForwardCache forward_batch(const ModelParams& params, const Eigen::MatrixXd& inputs) {
  ForwardCache cache;
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = (layer.weight * a).colwise() + layer.bias;
    cache.activations.push_back(std::move(a));
    if (l + 1 < params.layers.size()) {
      a = z.cwiseMax(0.0);
    } else {
      cache.probs = softmax_columns(z);
    }
    cache.pre_activations.push_back(std::move(z));
  }
  return cache;
}

inline void check_shapes(const ModelParams& params) {
  if (params.layers.empty()) throw DataError("model has no layers");
  auto in = static_cast<Eigen::Index>(params.input_dim);
  for (const auto& l : params.layers) {
    if (l.weight.cols() != in || l.bias.size() != l.weight.rows()) {
      throw DataError("model layer shapes do not chain");
    }
    in = l.weight.rows();
  }
  if (in != static_cast<Eigen::Index>(kNumClasses)) {
    throw DataError("model output layer must have 4 units");
  }
}

}  // namespace classifier_detail

/// Class probabilities for one feature vector.
inline Probabilities forward(const ModelParams& params, const Eigen::VectorXd& features) {
  if (static_cast<std::size_t>(features.size()) != params.input_dim) {
    throw DataError("forward: feature length " + std::to_string(features.size()) +
                    " != input_dim " + std::to_string(params.input_dim));
  }
  const auto cache = classifier_detail::forward_batch(params, features);
  Probabilities p{};
  for (std::size_t k = 0; k < kNumClasses; ++k) p[k] = cache.probs(static_cast<Eigen::Index>(k), 0);
  return p;
}

inline SentimentLabel argmax(const Probabilities& p) {
  return label_at(static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()));
}

// Losses --------------------------------------------------------------------

inline double example_cross_entropy(const Probabilities& p, SentimentLabel gold) {
  return -std::log(std::max(p[index_of(gold)], kProbabilityFloor));
}

/// Sum over examples of alpha_i * H(Y'_i, Y_i).
inline double loss_gdwce(std::span<const Probabilities> predicted,
                         std::span<const SentimentLabel> gold, std::span<const double> alphas) {
  if (predicted.size() != gold.size() || gold.size() != alphas.size()) {
    throw DataError("loss_gdwce: predictions, labels and alphas differ in length");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    loss += alphas[i] * example_cross_entropy(predicted[i], gold[i]);
  }
  return loss;
}

/// Mean cross-entropy over the batch.
inline double loss_ce(std::span<const Probabilities> predicted,
                      std::span<const SentimentLabel> gold) {
  if (predicted.size() != gold.size()) {
    throw DataError("loss_ce: predictions and labels differ in length");
  }
  if (predicted.empty()) throw DataError("loss_ce: empty batch");
  double loss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    loss += example_cross_entropy(predicted[i], gold[i]);
  }
  return loss / static_cast<double>(predicted.size());
}

// Backpropagation -------------------------------------------------------------

using Gradients = std::vector<Layer>;

struct BatchView {
  Eigen::MatrixXd inputs;  // input_dim x B
  std::vector<SentimentLabel> labels;
  std::vector<double> alphas;
};

inline BatchView make_batch(std::span<const TrainExample> examples,
                            std::span<const std::size_t> order = {}) {
  const std::size_t b = order.empty() ? examples.size() : order.size();
  BatchView batch;
  if (b == 0) return batch;
  const auto dim = examples[order.empty() ? 0 : order[0]].features.size();
  batch.inputs.resize(dim, static_cast<Eigen::Index>(b));
  for (std::size_t i = 0; i < b; ++i) {
    const auto& ex = examples[order.empty() ? i : order[i]];
    if (ex.features.size() != dim) throw DataError("inconsistent feature dimensions");
    batch.inputs.col(static_cast<Eigen::Index>(i)) = ex.features;
    batch.labels.push_back(ex.label);
    batch.alphas.push_back(ex.alpha);
  }
  return batch;
}

/// Loss of `batch` under `loss` and its gradient with respect to every
/// parameter. CE is the batch mean; GDW-CE the alpha-weighted sum.
inline double loss_and_gradients(const ModelParams& params, const BatchView& batch,
                                 LossKind loss, Gradients* grads) {
  using classifier_detail::forward_batch;
  const auto cache = forward_batch(params, batch.inputs);
  const auto b = batch.inputs.cols();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kNumClasses), b);
  double value = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double w = loss == LossKind::CrossEntropy ? 1.0 / static_cast<double>(b) : batch.alphas[ui];
    const auto gold = static_cast<Eigen::Index>(index_of(batch.labels[ui]));
    const double p_gold = cache.probs(gold, i);
    value += w * -std::log(std::max(p_gold, kProbabilityFloor));
    // Below the floor the loss is constant in the logits.
    if (p_gold >= kProbabilityFloor && w != 0.0) {
      delta.col(i) = w * cache.probs.col(i);
      delta(gold, i) -= w;
    }
  }
  if (!grads) return value;
  grads->assign(params.layers.size(), Layer{});
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    auto& g = (*grads)[l];
    g.weight = delta * cache.activations[l].transpose();
    g.bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = params.layers[l].weight.transpose() * delta;
      delta = back.array() * (cache.pre_activations[l - 1].array() > 0.0).cast<double>();
    }
  }
  return value;
}

inline double global_norm(const Gradients& grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.weight.squaredNorm() + g.bias.squaredNorm();
  return std::sqrt(sq);
}

/// Rescales so the global L2 norm is at most `max_norm`. Returns the norm
/// before clipping.
inline double clip_gradients(Gradients& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads) {
      g.weight *= scale;
      g.bias *= scale;
    }
  }
  return norm;
}

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& params, double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& l : params.layers) {
      m_.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                    Eigen::VectorXd::Zero(l.bias.size())});
    }
    v_ = m_;
  }

  void step(ModelParams& params, const Gradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      update(params.layers[l].weight, grads[l].weight, m_[l].weight, v_[l].weight, c1, c2);
      update(params.layers[l].bias, grads[l].bias, m_[l].bias, v_[l].bias, c1, c2);
    }
  }

 private:
  template <typename P, typename G>
  void update(P& p, const G& g, P& m, P& v, double c1, double c2) const {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseAbs2();
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Layer> m_;
  std::vector<Layer> v_;
};

// Training ------------------------------------------------------------------

inline std::vector<SentimentLabel> predict_labels(const ModelParams& params,
                                                  std::span<const TrainExample> examples) {
  std::vector<SentimentLabel> out;
  out.reserve(examples.size());
  constexpr std::size_t chunk = 1024;
  for (std::size_t start = 0; start < examples.size(); start += chunk) {
    const auto n = std::min(chunk, examples.size() - start);
    const auto batch = make_batch(examples.subspan(start, n));
    const auto cache = classifier_detail::forward_batch(params, batch.inputs);
    for (Eigen::Index i = 0; i < cache.probs.cols(); ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < cache.probs.rows(); ++k) {
        if (cache.probs(k, i) > cache.probs(best, i)) best = k;
      }
      out.push_back(label_at(static_cast<std::size_t>(best)));
    }
  }
  return out;
}

inline double evaluate_macro_f1(const ModelParams& params, std::span<const TrainExample> examples) {
  std::vector<SentimentLabel> gold;
  gold.reserve(examples.size());
  for (const auto& ex : examples) gold.push_back(ex.label);
  return macro_f1(gold, predict_labels(params, examples));
}

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

/// Mini-batch Adam with global-norm clipping and early stopping on dev
/// Macro-F1. Returns the parameters of the best dev epoch.
inline TrainResult train(std::span<const TrainExample> train_set,
                         std::span<const TrainExample> dev_set, const TrainConfig& config) {
  config.validate();
  if (train_set.empty() || dev_set.empty()) throw DataError("train: empty train or dev set");
  const auto dim = static_cast<std::size_t>(train_set.front().features.size());
  if (dim == 0) throw DataError("train: zero-length feature vectors");
  for (auto set : {train_set, dev_set}) {
    for (const auto& ex : set) {
      if (static_cast<std::size_t>(ex.features.size()) != dim) {
        throw DataError("train: inconsistent feature dimensions");
      }
      if (!(ex.alpha >= 0.0 && ex.alpha <= 1.0)) throw DataError("train: alpha outside [0, 1]");
    }
  }

  TrainResult result;
  auto& report = result.report;
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& ex : train_set) counts[index_of(ex.label)] += 1;
  for (auto label : kAllLabels) {
    if (counts[index_of(label)] == 0) {
      report.warnings.push_back("class '" + std::string(to_string(label)) +
                                "' has no training examples");
    }
  }

  Rng rng(config.seed);
  ModelParams params = init_model(dim, config.hidden_sizes, rng);
  AdamOptimizer adam(params, config.learning_rate, config.adam_beta1, config.adam_beta2,
                     config.adam_epsilon);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  ModelParams best = params;
  Gradients grads;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto n = std::min(config.batch_size, order.size() - start);
      const auto batch = make_batch(train_set, std::span<const std::size_t>(order).subspan(start, n));
      const double loss = loss_and_gradients(params, batch, config.loss_kind, &grads);
      if (!std::isfinite(loss)) {
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             " (learning_rate " + std::to_string(config.learning_rate) + ")");
      }
      epoch_loss += loss;
      const double pre = clip_gradients(grads, config.clip_norm);
      if (config.log_grad_norms) {
        report.pre_clip_grad_norms.push_back(pre);
        report.post_clip_grad_norms.push_back(global_norm(grads));
      }
      adam.step(params, grads);
    }
    report.per_epoch_train_loss.push_back(epoch_loss);
    const double score = evaluate_macro_f1(params, dev_set);
    report.per_epoch_dev_macro_f1.push_back(score);
    report.epochs_run = epoch;
    if (score > report.best_dev_macro_f1) {
      report.best_dev_macro_f1 = score;
      report.best_epoch = epoch;
      best = params;
    }
    if (epoch - report.best_epoch >= config.patience) {
      report.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  result.params = std::move(best);
  return result;
}

// Random search -------------------------------------------------------------

struct SearchSpace {
  double min_learning_rate = 1e-5;
  double max_learning_rate = 1e-2;
  std::vector<std::size_t> hidden_sizes = {64, 128, 256, 512};
  std::vector<std::size_t> layer_counts = {0, 1, 2};
};

struct TrialRecord {
  std::size_t index = 0;
  TrainConfig config;
  bool ok = false;
  double dev_macro_f1 = -1.0;
  double eval_macro_f1 = -1.0;
  int epochs_run = 0;
  std::string error;
};

struct SearchResult {
  ModelParams best;
  std::size_t best_trial = 0;
  TrainReport best_report;
  std::vector<TrialRecord> trials;
};

/// Samples n_trials configurations (log-uniform learning rate, hidden size,
/// layer count) on top of `base`, trains each, and keeps the one with the
/// highest Macro-F1 on `eval_set`.
inline std::vector<TrainConfig> sample_trials(std::size_t n_trials, std::uint64_t seed,
                                              const TrainConfig& base,
                                              const SearchSpace& space = {}) {
  if (space.hidden_sizes.empty() || space.layer_counts.empty() ||
      !(space.min_learning_rate > 0.0) || space.max_learning_rate < space.min_learning_rate) {
    throw DataError("search: invalid search space");
  }
  Rng rng(derive_seed(seed, "search"));
  std::vector<TrainConfig> out;
  const double lo = std::log(space.min_learning_rate);
  const double hi = std::log(space.max_learning_rate);
  for (std::size_t t = 0; t < n_trials; ++t) {
    TrainConfig c = base;
    c.learning_rate = std::exp(rng.uniform(lo, hi));
    const auto hidden = space.hidden_sizes[rng.below(space.hidden_sizes.size())];
    const auto layers = space.layer_counts[rng.below(space.layer_counts.size())];
    c.hidden_sizes.assign(layers, hidden);
    c.seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    out.push_back(std::move(c));
  }
  return out;
}

inline SearchResult random_search(std::span<const TrainExample> train_set,
                                  std::span<const TrainExample> dev_set,
                                  std::span<const TrainExample> eval_set, std::size_t n_trials,
                                  std::uint64_t seed, const TrainConfig& base = {},
                                  const SearchSpace& space = {}) {
  if (n_trials == 0) throw DataError("search: n_trials must be >= 1");
  if (eval_set.empty()) throw DataError("search: empty evaluation set");
  SearchResult result;
  std::optional<std::size_t> best;
  const auto configs = sample_trials(n_trials, seed, base, space);
  for (std::size_t t = 0; t < configs.size(); ++t) {
    TrialRecord rec;
    rec.index = t;
    rec.config = configs[t];
    try {
      auto trained = train(train_set, dev_set, configs[t]);
      rec.ok = true;
      rec.dev_macro_f1 = trained.report.best_dev_macro_f1;
      rec.epochs_run = trained.report.epochs_run;
      rec.eval_macro_f1 = evaluate_macro_f1(trained.params, eval_set);
      if (!best || rec.eval_macro_f1 > result.trials[*best].eval_macro_f1) {
        best = t;
        result.best = std::move(trained.params);
        result.best_report = std::move(trained.report);
      }
    } catch (const DataError& e) {
      rec.error = e.what();
    }
    result.trials.push_back(std::move(rec));
  }
  if (!best) throw DataError("search: every trial failed (first error: " + result.trials.front().error + ")");
  result.best_trial = *best;
  return result;
}

// Gradient check ------------------------------------------------------------

namespace classifier_detail {

inline double& parameter_at(ModelParams& p, std::size_t flat) {
  for (auto& l : p.layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (flat < nw) return l.weight.data()[flat];
    flat -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (flat < nb) return l.bias.data()[flat];
    flat -= nb;
  }
  throw DataError("parameter index out of range");
}

inline double gradient_at(const Gradients& g, std::size_t flat) {
  for (const auto& l : g) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (flat < nw) return l.weight.data()[flat];
    flat -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (flat < nb) return l.bias.data()[flat];
    flat -= nb;
  }
  throw DataError("parameter index out of range");
}

}  // namespace classifier_detail

struct GradientCheckOptions {
  double step = 1e-5;
  std::size_t min_parameters = 50;
  std::uint64_t seed = 0;
};

/// Max relative error |a - n| / max(|a| + |n|, 1e-8) between backprop
/// gradients and central differences, over a random subsample of parameters
/// (all of them when the model has fewer than min_parameters).
inline double gradient_check(const ModelParams& params, std::span<const TrainExample> batch,
                             LossKind loss, const GradientCheckOptions& options = {}) {
  if (batch.empty()) throw DataError("gradient_check: empty batch");
  classifier_detail::check_shapes(params);
  const auto view = make_batch(batch);
  Gradients analytic;
  loss_and_gradients(params, view, loss, &analytic);

  const std::size_t total = params.parameter_count();
  std::vector<std::size_t> indices(total);
  for (std::size_t i = 0; i < total; ++i) indices[i] = i;
  Rng rng(options.seed);
  rng.shuffle(std::span<std::size_t>(indices));
  indices.resize(std::min(total, std::max(options.min_parameters, total / 10)));

  ModelParams probe = params;
  double worst = 0.0;
  for (auto idx : indices) {
    double& p = classifier_detail::parameter_at(probe, idx);
    const double original = p;
    p = original + options.step;
    const double plus = loss_and_gradients(probe, view, loss, nullptr);
    p = original - options.step;
    const double minus = loss_and_gradients(probe, view, loss, nullptr);
    p = original;
    const double numeric = (plus - minus) / (2.0 * options.step);
    const double a = classifier_detail::gradient_at(analytic, idx);
    const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
    worst = std::max(worst, rel);
  }
  return worst;
}

// Serialization -------------------------------------------------------------

inline nlohmann::ordered_json to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["input_dim"] = p.input_dim;
  j["n_classes"] = kNumClasses;
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : p.layers) {
    nlohmann::ordered_json jl;
    jl["in"] = l.weight.cols();
    jl["out"] = l.weight.rows();
    jl["activation"] = (&l == &p.layers.back()) ? "softmax" : "relu";
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(l.weight.cols()));
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) row[static_cast<std::size_t>(c)] = l.weight(r, c);
      rows.push_back(std::move(row));
    }
    jl["weight"] = std::move(rows);
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  return j;
}

inline ModelParams model_from_json(const nlohmann::json& j) {
  ModelParams p;
  try {
    p.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& jl : j.at("layers")) {
      const auto rows = jl.at("weight").get<std::vector<std::vector<double>>>();
      const auto bias = jl.at("bias").get<std::vector<double>>();
      Layer l;
      l.weight.resize(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != l.weight.cols()) {
          throw DataError("model: ragged weight matrix");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          l.weight(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      l.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
      p.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  classifier_detail::check_shapes(p);
  return p;
}

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},       {"patience", c.patience},
          {"clip_norm", c.clip_norm},         {"loss", std::string(to_string(c.loss_kind))},
          {"hidden_sizes", c.hidden_sizes},   {"seed", c.seed}};
}

inline nlohmann::ordered_json to_json(const TrainReport& r) {
  return {{"epochs_run", r.epochs_run},
          {"best_epoch", r.best_epoch},
          {"best_dev_macro_f1", r.best_dev_macro_f1},
          {"stopped_early", r.stopped_early},
          {"per_epoch_dev_macro_f1", r.per_epoch_dev_macro_f1},
          {"per_epoch_train_loss", r.per_epoch_train_loss},
          {"warnings", r.warnings}};
}

inline nlohmann::ordered_json to_json(const TrialRecord& t) {
  nlohmann::ordered_json j;
  j["trial"] = t.index;
  j["config"] = to_json(t.config);
  j["ok"] = t.ok;
  j["dev_macro_f1"] = t.dev_macro_f1;
  j["eval_macro_f1"] = t.eval_macro_f1;
  j["epochs_run"] = t.epochs_run;
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

}  // namespace sentclust
