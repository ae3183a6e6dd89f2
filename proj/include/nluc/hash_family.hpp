#pragma once

// Seeded 64-bit hash family h_0, h_1, ... used by the perfect hash levels and
// the fingerprint function. Member i of the family is MurmurHash64A with its
// seed parameter set to i.

#include <cstdint>
#include <cstring>
#include <string_view>

#include "nluc/error.hpp"

namespace nluc {

struct HashSeed {
  std::uint64_t value = 0;

  constexpr HashSeed() = default;
  constexpr explicit HashSeed(std::uint64_t v) : value(v) {}
  friend constexpr bool operator==(HashSeed, HashSeed) = default;
};

// Identifies the hash algorithm in serialized containers.
enum class HashAlgorithm : std::uint8_t {
  murmur64a = 1,
};

inline constexpr HashAlgorithm kDefaultHashAlgorithm = HashAlgorithm::murmur64a;

namespace detail {

inline std::uint64_t load_le64(const unsigned char* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace detail

// MurmurHash64A (Austin Appleby). Reads input as little-endian words so the
// value does not depend on host byte order.
inline std::uint64_t murmur64a(std::string_view key, std::uint64_t seed) noexcept {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;

  const auto* data = reinterpret_cast<const unsigned char*>(key.data());
  const std::size_t len = key.size();
  std::uint64_t h = seed ^ (static_cast<std::uint64_t>(len) * m);

  const std::size_t n_blocks = len / 8;
  for (std::size_t i = 0; i < n_blocks; ++i) {
    std::uint64_t k = detail::load_le64(data + 8 * i);
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }

  const unsigned char* tail = data + 8 * n_blocks;
  switch (len & 7) {
    case 7: h ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      h ^= std::uint64_t(tail[0]);
      h *= m;
  }

  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

inline std::uint64_t hash(std::string_view key, HashSeed seed) noexcept {
  return murmur64a(key, seed.value);
}

// Plain modulo bucket reduction.
inline std::uint64_t reduce(std::uint64_t h, std::uint64_t m) {
  if (m == 0) throw Error(Errc::invalid_argument, "reduce: bucket count must be positive");
  return h % m;
}

}  // namespace nluc
