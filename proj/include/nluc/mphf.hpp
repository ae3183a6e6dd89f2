#pragma once

// Multi-level minimal perfect hash over a static key set.
//
// Level i hashes the keys still unplaced (S_i) with seed i into a bit array of
// ceil(gamma * |S_i|) buckets. A bucket hit by exactly one key gets a 1 and
// places that key; every key in a colliding bucket moves on to S_{i+1}. The
// levels are concatenated into one bit array B and a placed key's index is the
// rank of its 1 in B. Keys still unplaced after max_levels go to an exact
// spill map and take the indices after the last rank.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nluc/bytes.hpp"
#include "nluc/error.hpp"
#include "nluc/hash_family.hpp"
#include "nluc/rank_bitvector.hpp"
#include "nluc/string_map.hpp"

namespace nluc {

struct MphfOptions {
  unsigned max_levels = 64;
  double gamma = 1.0;
};

class Mphf {
 public:
  struct Level {
    HashSeed seed;
    std::uint64_t size_bits = 0;
    std::uint64_t offset = 0;
  };

  struct SizeBreakdown {
    std::uint64_t level_bits = 0;
    std::uint64_t rank_directory_bits = 0;
    std::uint64_t metadata_bits = 0;
    std::uint64_t spill_bits = 0;

    std::uint64_t total() const noexcept {
      return level_bits + rank_directory_bits + metadata_bits + spill_bits;
    }
  };

  Mphf() = default;

  template <std::ranges::input_range R>
    requires std::convertible_to<std::ranges::range_reference_t<R>, std::string_view>
  static Mphf build(const R& keys, MphfOptions options = {}) {
    if (!(options.gamma >= 1.0) || !std::isfinite(options.gamma))
      throw Error(Errc::invalid_argument, "gamma must be a finite value >= 1");

    std::vector<std::string_view> current;
    for (auto&& k : keys) current.emplace_back(k);

    Mphf f;
    f.n_keys_ = current.size();
    f.gamma_ = options.gamma;

    std::vector<std::uint64_t> words;
    std::uint64_t offset = 0;
    std::vector<std::uint8_t> load;
    std::vector<std::uint64_t> bucket;
    std::vector<std::string_view> next;

    for (unsigned level = 0; level < options.max_levels && !current.empty(); ++level) {
      const HashSeed seed{level};
      const auto m = static_cast<std::uint64_t>(std::ceil(options.gamma * static_cast<double>(current.size())));
      f.survivors_.push_back(current.size());

      load.assign(m, 0);
      bucket.resize(current.size());
      for (std::size_t i = 0; i < current.size(); ++i) {
        bucket[i] = hash(current[i], seed) % m;
        if (load[bucket[i]] < 2) ++load[bucket[i]];
      }

      words.resize((offset + m + 63) / 64, 0);
      next.clear();
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (load[bucket[i]] == 1) {
          const std::uint64_t pos = offset + bucket[i];
          words[pos / 64] |= std::uint64_t{1} << (pos % 64);
        } else {
          next.push_back(current[i]);
        }
      }

      f.levels_.push_back({seed, m, offset});
      offset += m;
      current.swap(next);
    }

    f.bits_ = RankBitVector(std::move(words), offset);

    // Equal keys collide at every level, so any duplicate ends up here.
    std::uint64_t index = f.bits_.count_ones();
    for (std::string_view k : current) {
      auto [it, inserted] = f.spill_.emplace(std::string(k), index++);
      if (!inserted) throw Error(Errc::duplicate_key, "key \"" + std::string(k) + "\" appears more than once");
    }
    return f;
  }

  // Index of `key` if it is (or collides like) a member; nullopt when every
  // level lands on a 0 and the key is not in the spill map.
  std::optional<std::uint64_t> evaluate(std::string_view key) const {
    if (auto s = find_spill(key)) return s;
    return evaluate_levels(key);
  }

  std::optional<std::uint64_t> find_spill(std::string_view key) const {
    if (spill_.empty()) return std::nullopt;
    auto it = spill_.find(key);
    if (it == spill_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint64_t> evaluate_levels(std::string_view key) const {
    for (const Level& lv : levels_) {
      const std::uint64_t pos = lv.offset + hash(key, lv.seed) % lv.size_bits;
      if (bits_.test(pos)) return bits_.rank_unchecked(pos);
    }
    return std::nullopt;
  }

  std::uint64_t size() const noexcept { return n_keys_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  const RankBitVector& bits() const noexcept { return bits_; }
  const StringMap<std::uint64_t>& spill() const noexcept { return spill_; }

  // |S_i| for each level, recorded during construction (empty after load).
  const std::vector<std::uint64_t>& level_population() const noexcept { return survivors_; }

  SizeBreakdown size_breakdown() const {
    SizeBreakdown s;
    s.level_bits = bits_.size();
    s.rank_directory_bits = bits_.directory_bits();
    s.metadata_bits = 32 + 64 * levels_.size();
    s.spill_bits = spill_section_bits();
    return s;
  }

  // --- container sections ---------------------------------------------------

  void write_levels(ByteWriter& out) const {
    out.u32(static_cast<std::uint32_t>(levels_.size()));
    for (const Level& lv : levels_) out.u64(lv.size_bits);
    out.words(bits_.words());
  }

  void write_spill(ByteWriter& out) const {
    std::vector<std::pair<std::uint64_t, std::string_view>> entries;
    entries.reserve(spill_.size());
    for (const auto& [k, idx] : spill_) entries.emplace_back(idx, k);
    std::sort(entries.begin(), entries.end());
    out.u64(entries.size());
    for (const auto& [idx, k] : entries) {
      out.u32(static_cast<std::uint32_t>(k.size()));
      out.bytes(k);
      out.u64(idx);
    }
  }

  // Bits taken by write_spill's output.
  std::uint64_t spill_section_bits() const {
    std::uint64_t bits = 64;
    for (const auto& [k, idx] : spill_) bits += 32 + 8 * k.size() + 64;
    return bits;
  }

  struct LevelSection {
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> words;
  };

  static LevelSection read_levels(ByteReader& in) {
    LevelSection sec;
    const std::uint32_t count = in.u32();
    if (count > in.remaining() / 8) throw Error(Errc::truncated, "level table exceeds payload");
    std::uint64_t total = 0;
    sec.sizes.resize(count);
    for (auto& s : sec.sizes) {
      s = in.u64();
      if (s == 0 || s > (std::uint64_t{1} << 56)) throw Error(Errc::truncated, "malformed level size");
      total += s;
    }
    sec.words = in.words((total + 63) / 64);
    return sec;
  }

  static std::vector<std::pair<std::string, std::uint64_t>> read_spill(ByteReader& in) {
    const std::uint64_t count = in.u64();
    if (count > in.remaining() / 12) throw Error(Errc::truncated, "spill table exceeds payload");
    std::vector<std::pair<std::string, std::uint64_t>> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint32_t len = in.u32();
      std::string key = in.bytes(len);
      out.emplace_back(std::move(key), in.u64());
    }
    return out;
  }

  static Mphf from_sections(std::uint64_t n_keys, double gamma, LevelSection levels,
                            std::vector<std::pair<std::string, std::uint64_t>> spill) {
    Mphf f;
    f.n_keys_ = n_keys;
    f.gamma_ = gamma;
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < levels.sizes.size(); ++i) {
      f.levels_.push_back({HashSeed{i}, levels.sizes[i], offset});
      offset += levels.sizes[i];
    }
    f.bits_ = RankBitVector(std::move(levels.words), offset);

    const std::uint64_t placed = f.bits_.count_ones();
    if (placed + spill.size() != n_keys) throw Error(Errc::truncated, "malformed perfect hash: key count mismatch");
    std::vector<bool> seen(spill.size(), false);
    for (auto& [k, idx] : spill) {
      if (idx < placed || idx >= n_keys || seen[idx - placed])
        throw Error(Errc::truncated, "malformed perfect hash: bad spill index");
      seen[idx - placed] = true;
      if (!f.spill_.emplace(std::move(k), idx).second)
        throw Error(Errc::truncated, "malformed perfect hash: repeated spill key");
    }
    return f;
  }

 private:
  std::vector<Level> levels_;
  RankBitVector bits_;
  StringMap<std::uint64_t> spill_;
  std::vector<std::uint64_t> survivors_;
  std::uint64_t n_keys_ = 0;
  double gamma_ = 1.0;
};

}  // namespace nluc
