#pragma once

// Sparse multinomial (MaxEnt) n-gram classifier. Weights are addressed by
// composite key "label \x1f feature"; a missing key weighs 0. The same scorer
// runs over the full-precision SourceModel and over a CompressedModel.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nluc/compressed_map.hpp"
#include "nluc/error.hpp"
#include "nluc/features.hpp"
#include "nluc/string_map.hpp"

namespace nluc {

struct LabeledUtterance {
  std::string label;
  std::string text;
};

struct SourceModel {
  std::vector<std::string> classes;
  std::vector<double> biases;
  StringMap<double> weights;

  double weight(std::string_view key) const {
    auto it = weights.find(key);
    return it == weights.end() ? 0.0 : it->second;
  }

  std::size_t class_index(std::string_view label) const {
    auto it = std::find(classes.begin(), classes.end(), label);
    return it == classes.end() ? classes.size() : static_cast<std::size_t>(it - classes.begin());
  }

  std::size_t add_class(std::string_view label) {
    const std::size_t i = class_index(label);
    if (i < classes.size()) return i;
    classes.emplace_back(label);
    biases.push_back(0.0);
    return classes.size() - 1;
  }

  // Zero weights are not stored.
  void set_weight(std::string_view label, std::string_view feature, double w) {
    add_class(label);
    auto key = composite_key(label, feature);
    if (w == 0.0) weights.erase(key);
    else weights.insert_or_assign(std::move(key), w);
  }
};

struct CompressedModel {
  std::vector<std::string> classes;
  std::vector<double> biases;
  CompressedWeightMap map;

  double weight(std::string_view key) const { return map.lookup(key).weight; }
};

template <class M>
concept ScoringModel = requires(const M& m, std::string_view key) {
  { m.classes } -> std::convertible_to<const std::vector<std::string>&>;
  { m.biases } -> std::convertible_to<const std::vector<double>&>;
  { m.weight(key) } -> std::convertible_to<double>;
};

// Biases stay full precision; the weight map goes through the compressor.
inline CompressedModel compress_model(const SourceModel& src, const CompressOptions& options = {}) {
  return {src.classes, src.biases, CompressedWeightMap::build(src.weights, options)};
}

template <ScoringModel M>
std::vector<double> score(const M& model, const FeatureVector& fv) {
  std::vector<double> scores(model.classes.size());
  std::string key;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    key.assign(model.classes[c]);
    key.push_back(kKeySeparator);
    const std::size_t prefix = key.size();
    double s = model.biases[c];
    for (const auto& f : fv) {
      key.resize(prefix);
      key.append(f);
      s += model.weight(key);
    }
    scores[c] = s;
  }
  return scores;
}

// Argmax; ties resolve to the earliest class.
inline std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

inline std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& v : p) z += (v = std::exp(v - mx));
  for (double& v : p) v /= z;
  return p;
}

template <ScoringModel M>
std::size_t predict(const M& model, const FeatureVector& fv) {
  return argmax(score(model, fv));
}

// --- training ---------------------------------------------------------------

struct TrainOptions {
  unsigned epochs = 10;
  double lr = 0.1;
  double l1 = 0.0;
  std::uint64_t seed = 1;
  unsigned max_ngram = 2;
};

struct TrainResult {
  SourceModel model;
  // Mean negative log-likelihood over the training set after each epoch.
  std::vector<double> epoch_loss;
};

inline constexpr double kPruneThreshold = 1e-8;

// Plain SGD on multinomial logistic loss with an optional L1 proximal step on
// the weights touched by each example. Deterministic for a fixed seed.
inline TrainResult train_sgd(std::span<const LabeledUtterance> data, const TrainOptions& opt = {}) {
  std::vector<std::string> classes;
  StringMap<std::uint32_t> feature_ids;
  std::vector<std::string> feature_names;
  struct Example {
    std::uint32_t label;
    std::vector<std::uint32_t> features;
  };
  std::vector<Example> examples;
  examples.reserve(data.size());

  for (const auto& u : data) {
    if (u.label.find(kKeySeparator) != std::string::npos)
      throw Error(Errc::invalid_argument, "class label contains the key separator");
    auto it = std::find(classes.begin(), classes.end(), u.label);
    const auto label = static_cast<std::uint32_t>(it - classes.begin());
    if (it == classes.end()) classes.push_back(u.label);
    Example ex{label, {}};
    for (auto& f : extract_features(u.text, opt.max_ngram)) {
      auto [fit, inserted] = feature_ids.try_emplace(f, static_cast<std::uint32_t>(feature_names.size()));
      if (inserted) feature_names.push_back(f);
      ex.features.push_back(fit->second);
    }
    examples.push_back(std::move(ex));
  }
  if (classes.size() < 2) throw Error(Errc::invalid_argument, "training needs at least two classes");

  const std::size_t n_classes = classes.size();
  std::vector<double> w(feature_names.size() * n_classes, 0.0);
  std::vector<double> bias(n_classes, 0.0);
  std::vector<double> scores(n_classes);

  auto forward = [&](const Example& ex) {
    for (std::size_t c = 0; c < n_classes; ++c) scores[c] = bias[c];
    for (auto f : ex.features)
      for (std::size_t c = 0; c < n_classes; ++c) scores[c] += w[f * n_classes + c];
    return softmax(scores);
  };

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opt.seed);

  TrainResult result;
  for (unsigned epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const Example& ex = examples[idx];
      auto p = forward(ex);
      p[ex.label] -= 1.0;
      for (std::size_t c = 0; c < n_classes; ++c) bias[c] -= opt.lr * p[c];
      for (auto f : ex.features) {
        for (std::size_t c = 0; c < n_classes; ++c) {
          double& wc = w[f * n_classes + c];
          wc -= opt.lr * p[c];
          if (opt.l1 > 0.0) wc = std::copysign(std::max(0.0, std::abs(wc) - opt.lr * opt.l1), wc);
        }
      }
    }

    double loss = 0.0;
    for (const auto& ex : examples) loss -= std::log(std::max(forward(ex)[ex.label], 1e-300));
    result.epoch_loss.push_back(loss / static_cast<double>(examples.size()));
  }

  SourceModel& m = result.model;
  m.classes = classes;
  m.biases = bias;
  for (std::size_t f = 0; f < feature_names.size(); ++f)
    for (std::size_t c = 0; c < n_classes; ++c)
      if (const double v = w[f * n_classes + c]; std::abs(v) >= kPruneThreshold)
        m.weights.emplace(composite_key(classes[c], feature_names[f]), v);
  return result;
}

// --- evaluation -------------------------------------------------------------

struct AgreementReport {
  std::uint64_t n_utterances = 0;
  double agreement_rate = 0.0;
  double src_accuracy = 0.0;
  double comp_accuracy = 0.0;
  // (comp_error - src_error) / src_error; 0 when both errors are 0 and
  // +infinity when only the source is error-free.
  double relative_error_increase = 0.0;
};

template <ScoringModel A, ScoringModel B>
AgreementReport evaluate_agreement(const A& src, const B& comp, std::span<const LabeledUtterance> testset,
                                   unsigned max_ngram = 2) {
  if (src.classes != comp.classes) throw Error(Errc::class_mismatch, "models disagree on the class list");
  if (src.classes.empty()) throw Error(Errc::invalid_argument, "model has no classes");

  AgreementReport r;
  std::uint64_t agree = 0, src_ok = 0, comp_ok = 0;
  for (const auto& u : testset) {
    const auto fv = extract_features(u.text, max_ngram);
    const std::size_t a = predict(src, fv);
    const std::size_t b = predict(comp, fv);
    agree += a == b;
    src_ok += src.classes[a] == u.label;
    comp_ok += comp.classes[b] == u.label;
  }
  r.n_utterances = testset.size();
  if (r.n_utterances == 0) return r;
  const auto n = static_cast<double>(r.n_utterances);
  r.agreement_rate = static_cast<double>(agree) / n;
  r.src_accuracy = static_cast<double>(src_ok) / n;
  r.comp_accuracy = static_cast<double>(comp_ok) / n;
  const double src_err = 1.0 - r.src_accuracy;
  const double comp_err = 1.0 - r.comp_accuracy;
  if (src_ok == r.n_utterances)
    r.relative_error_increase = comp_ok == r.n_utterances ? 0.0 : std::numeric_limits<double>::infinity();
  else
    r.relative_error_increase = (comp_err - src_err) / src_err;
  return r;
}

}  // namespace nluc
