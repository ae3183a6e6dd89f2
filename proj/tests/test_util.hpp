#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace nluc::testing {

// n distinct random byte strings of the given length (printable ASCII).
inline std::vector<std::string> random_keys(std::size_t n, std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ch(33, 126);
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string s(len, ' ');
    for (auto& c : s) c = static_cast<char>(ch(rng));
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

// Random bit array as words with n_bits valid bits and zeroed tail.
inline std::vector<std::uint64_t> random_words(std::uint64_t n_bits, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::vector<std::uint64_t> words((n_bits + 63) / 64, 0);
  for (std::uint64_t i = 0; i < n_bits; ++i)
    if (bit(rng)) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return words;
}

}  // namespace nluc::testing
