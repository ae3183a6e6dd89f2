#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace nluc {

inline constexpr char kKeySeparator = '\x1f';
inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";

// Active features of one utterance, sorted and unique.
using FeatureVector = std::vector<std::string>;

// Lowercased whitespace tokens. The key separator byte also splits tokens so
// no feature can contain it.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || ch == kKeySeparator) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

// Unigrams over the tokens, plus n-grams (2 <= n <= max_ngram) over the
// token sequence wrapped in <s> ... </s>.
inline FeatureVector extract_features(std::string_view utterance, unsigned max_ngram = 2) {
  const auto tokens = tokenize(utterance);
  FeatureVector out(tokens.begin(), tokens.end());

  std::vector<std::string_view> seq;
  seq.reserve(tokens.size() + 2);
  seq.push_back(kSentenceStart);
  for (const auto& t : tokens) seq.emplace_back(t);
  seq.push_back(kSentenceEnd);

  for (unsigned n = 2; n <= max_ngram && n <= seq.size(); ++n) {
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      std::string gram(seq[i]);
      for (std::size_t j = 1; j < n; ++j) {
        gram.push_back(' ');
        gram.append(seq[i + j]);
      }
      out.push_back(std::move(gram));
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::string composite_key(std::string_view label, std::string_view feature) {
  std::string key;
  key.reserve(label.size() + 1 + feature.size());
  key.append(label);
  key.push_back(kKeySeparator);
  key.append(feature);
  return key;
}

}  // namespace nluc
