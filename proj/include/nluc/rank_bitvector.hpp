#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nluc/error.hpp"

namespace nluc {

// Immutable bit vector with a one-level rank directory: one cumulative 64-bit
// count per chunk of ChunkBits bits. rank(i) is exclusive, i.e. the number of
// ones at positions strictly below i.
//
// Bit j lives in bit (j % 64) of word (j / 64); bits past n_bits are zero.
template <unsigned ChunkBits = 512>
class BasicRankBitVector {
  static_assert(ChunkBits >= 64 && std::has_single_bit(ChunkBits),
                "chunk size must be a power of two of at least one word");
  static constexpr unsigned kWordsPerChunk = ChunkBits / 64;

 public:
  static constexpr unsigned chunk_size = ChunkBits;

  BasicRankBitVector() { chunk_ranks_.push_back(0); }

  BasicRankBitVector(std::vector<std::uint64_t> words, std::uint64_t n_bits)
      : words_(std::move(words)), n_bits_(n_bits) {
    if (words_.size() != (n_bits_ + 63) / 64)
      throw Error(Errc::invalid_argument, "word count does not match bit length");
    if (n_bits_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (n_bits_ % 64)) - 1;
    build_directory();
  }

  std::uint64_t size() const noexcept { return n_bits_; }
  std::uint64_t count_ones() const noexcept { return n_ones_; }

  bool get(std::uint64_t i) const {
    if (i >= n_bits_) throw Error(Errc::out_of_range, "bit index " + std::to_string(i));
    return test(i);
  }

  // Unchecked access for hot paths.
  bool test(std::uint64_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }

  std::uint64_t rank(std::uint64_t i) const {
    if (i > n_bits_) throw Error(Errc::out_of_range, "rank index " + std::to_string(i));
    return rank_unchecked(i);
  }

  std::uint64_t rank_unchecked(std::uint64_t i) const noexcept {
    if (i == n_bits_) return n_ones_;
    const std::uint64_t chunk = i / ChunkBits;
    std::uint64_t r = chunk_ranks_[chunk];
    const std::uint64_t last_word = i / 64;
    for (std::uint64_t w = chunk * kWordsPerChunk; w < last_word; ++w) r += std::popcount(words_[w]);
    if (const unsigned off = i % 64; off != 0)
      r += std::popcount(words_[last_word] & ((std::uint64_t{1} << off) - 1));
    return r;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<const std::uint64_t> chunk_ranks() const noexcept { return chunk_ranks_; }

  // Bits spent on the rank directory (not serialized; rebuilt on load).
  std::uint64_t directory_bits() const noexcept { return chunk_ranks_.size() * 64; }

 private:
  void build_directory() {
    const std::uint64_t n_chunks = n_bits_ == 0 ? 1 : (n_bits_ + ChunkBits - 1) / ChunkBits;
    chunk_ranks_.assign(n_chunks, 0);
    std::uint64_t total = 0;
    for (std::uint64_t w = 0; w < words_.size(); ++w) {
      if (w % kWordsPerChunk == 0) chunk_ranks_[w / kWordsPerChunk] = total;
      total += std::popcount(words_[w]);
    }
    n_ones_ = total;
  }

  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> chunk_ranks_;
  std::uint64_t n_bits_ = 0;
  std::uint64_t n_ones_ = 0;
};

using RankBitVector = BasicRankBitVector<512>;

}  // namespace nluc
