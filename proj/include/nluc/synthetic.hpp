#pragma once

// Seeded generators for synthetic weight maps, non-member probes and
// intent-classification datasets.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nluc/features.hpp"
#include "nluc/linear_model.hpp"

namespace nluc {

struct SyntheticModelOptions {
  std::uint64_t entries = 100000;
  double mean_key_bytes = 20.0;
  unsigned classes = 8;
  double weight_stddev = 0.5;
  std::uint64_t seed = 1;
};

// Composite keys "c<j>\x1f<feature>" whose lengths average mean_key_bytes.
// Every feature starts with a base-26 encoding of its entry number, so keys
// are unique by construction.
inline std::vector<std::pair<std::string, double>> synthetic_model_entries(const SyntheticModelOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> weight(0.0, opt.weight_stddev);
  std::uniform_int_distribution<int> letter('a', 'z');

  int id_len = 1;
  for (std::uint64_t cap = 26; cap < opt.entries; cap *= 26) ++id_len;

  std::vector<std::pair<std::string, double>> out;
  out.reserve(opt.entries);
  for (std::uint64_t i = 0; i < opt.entries; ++i) {
    std::string key = "c" + std::to_string(i % std::max(1u, opt.classes));
    key.push_back(kKeySeparator);
    const double target_feature = std::max(1.0, opt.mean_key_bytes - static_cast<double>(key.size()));
    const int centre = static_cast<int>(std::lround(target_feature));
    const int spread = std::max(0, std::min(7, centre - id_len));
    const int len = std::uniform_int_distribution<int>(centre - spread, centre + spread)(rng);

    std::uint64_t v = i;
    for (int d = 0; d < id_len; ++d, v /= 26) key.push_back(static_cast<char>('a' + v % 26));
    for (int j = id_len; j < len; ++j) key.push_back(static_cast<char>(letter(rng)));

    double w = 0.0;
    while (w == 0.0) w = weight(rng);
    out.emplace_back(std::move(key), w);
  }
  return out;
}

// Probe keys never contain the 0x1f separator, so they are disjoint from any
// composite-key member set.
inline std::string synthetic_probe(std::uint64_t i, std::uint64_t seed = 0) {
  return "probe-" + std::to_string(seed) + "-" + std::to_string(i);
}

struct SyntheticDatasetOptions {
  std::size_t utterances = 6000;
  unsigned classes = 6;
  unsigned keywords_per_class = 30;
  unsigned shared_words = 400;
  // Per-token draw: class keyword, keyword of another class, one-off
  // out-of-vocabulary token, otherwise a shared filler word.
  double keyword_rate = 0.30;
  double confuser_rate = 0.08;
  double oov_rate = 0.03;
  unsigned min_tokens = 4;
  unsigned max_tokens = 12;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string pseudo_word(std::mt19937_64& rng) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                            "s", "t", "v", "z", "ch", "sh", "tr", "pl", "st", "gr"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ee"};
  std::uniform_int_distribution<int> syllables(1, 3), onset(0, 19), vowel(0, 7);
  std::string w;
  for (int s = syllables(rng); s > 0; --s) {
    w += kOnsets[onset(rng)];
    w += kVowels[vowel(rng)];
  }
  return w;
}

}  // namespace detail

inline std::vector<LabeledUtterance> synthetic_intent_dataset(const SyntheticDatasetOptions& opt) {
  static constexpr const char* kIntentNames[] = {
      "PlayMusic", "SetTemperature", "Navigate",   "GetWeather", "BuyItem",  "SetAlarm",
      "CallContact", "ReadNews",     "PlayMovie",  "TurnOnLights", "OrderFood", "SetTimer"};
  std::mt19937_64 rng(opt.seed);

  std::vector<std::string> labels;
  for (unsigned c = 0; c < opt.classes; ++c) {
    std::string name = kIntentNames[c % std::size(kIntentNames)];
    if (c >= std::size(kIntentNames)) name += std::to_string(c / std::size(kIntentNames));
    labels.push_back(std::move(name));
  }

  // Distinct vocabularies: keywords per class, then shared filler words.
  std::vector<std::string> vocab;
  {
    std::vector<std::string> seen;
    const std::size_t need = static_cast<std::size_t>(opt.classes) * opt.keywords_per_class + opt.shared_words;
    while (vocab.size() < need) {
      auto w = detail::pseudo_word(rng);
      if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
      seen.push_back(w);
      vocab.push_back(std::move(w));
    }
  }
  auto keyword = [&](unsigned c, std::size_t j) -> const std::string& {
    return vocab[c * opt.keywords_per_class + j];
  };
  const std::size_t filler_base = static_cast<std::size_t>(opt.classes) * opt.keywords_per_class;

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<unsigned> pick_class(0, opt.classes - 1);
  std::uniform_int_distribution<std::size_t> pick_kw(0, opt.keywords_per_class - 1);
  std::uniform_int_distribution<std::size_t> pick_filler(0, opt.shared_words - 1);
  std::uniform_int_distribution<unsigned> pick_len(opt.min_tokens, opt.max_tokens);

  std::vector<LabeledUtterance> out;
  out.reserve(opt.utterances);
  for (std::size_t i = 0; i < opt.utterances; ++i) {
    const unsigned c = pick_class(rng);
    std::string text;
    for (unsigned t = pick_len(rng); t > 0; --t) {
      const double r = u01(rng);
      std::string tok;
      if (r < opt.keyword_rate) tok = keyword(c, pick_kw(rng));
      else if (r < opt.keyword_rate + opt.confuser_rate) tok = keyword(pick_class(rng), pick_kw(rng));
      else if (r < opt.keyword_rate + opt.confuser_rate + opt.oov_rate) tok = detail::pseudo_word(rng) + "x" + std::to_string(i);
      else tok = vocab[filler_base + pick_filler(rng)];
      if (!text.empty()) text.push_back(' ');
      text += tok;
    }
    out.push_back({labels[c], std::move(text)});
  }
  return out;
}

}  // namespace nluc
