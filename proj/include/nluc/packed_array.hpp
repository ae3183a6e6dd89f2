#pragma once

#include <cstdint>
#include <vector>

#include "nluc/error.hpp"

namespace nluc {

// Fixed-width unsigned integers packed LSB-first into 64-bit words. Element i
// occupies bits [i*width, (i+1)*width) of the word stream; width 0 stores
// nothing and every element reads as 0.
class PackedArray {
 public:
  PackedArray() = default;

  PackedArray(std::uint64_t size, unsigned width) : size_(size), width_(width) {
    if (width > 64) throw Error(Errc::invalid_argument, "packed width exceeds 64 bits");
    words_.assign(word_count(size, width), 0);
  }

  static PackedArray from_words(std::uint64_t size, unsigned width, std::vector<std::uint64_t> words) {
    PackedArray a;
    if (width > 64) throw Error(Errc::invalid_argument, "packed width exceeds 64 bits");
    if (words.size() != word_count(size, width))
      throw Error(Errc::truncated, "packed array word count does not match its size");
    a.size_ = size;
    a.width_ = width;
    a.words_ = std::move(words);
    return a;
  }

  static std::uint64_t word_count(std::uint64_t size, unsigned width) noexcept {
    return (size * width + 63) / 64;
  }

  std::uint64_t get(std::uint64_t i) const noexcept {
    if (width_ == 0) return 0;
    const std::uint64_t bit = i * width_;
    const std::uint64_t w = bit / 64;
    const unsigned off = bit % 64;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & mask();
  }

  void set(std::uint64_t i, std::uint64_t value) noexcept {
    if (width_ == 0) return;
    value &= mask();
    const std::uint64_t bit = i * width_;
    const std::uint64_t w = bit / 64;
    const unsigned off = bit % 64;
    words_[w] = (words_[w] & ~(mask() << off)) | (value << off);
    if (off + width_ > 64) {
      const unsigned spill = off + width_ - 64;
      const std::uint64_t hi_mask = (std::uint64_t{1} << spill) - 1;
      words_[w + 1] = (words_[w + 1] & ~hi_mask) | (value >> (64 - off));
    }
  }

  std::uint64_t size() const noexcept { return size_; }
  unsigned width() const noexcept { return width_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::uint64_t size_in_bits() const noexcept { return words_.size() * 64; }

 private:
  std::uint64_t mask() const noexcept {
    return width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1;
  }

  std::uint64_t size_ = 0;
  unsigned width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace nluc
