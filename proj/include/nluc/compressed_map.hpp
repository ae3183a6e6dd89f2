#pragma once

// Key-free compressed weight map: a minimal perfect hash addresses two packed
// arrays, b-bit key fingerprints and quantizer indices. Keys themselves are
// not stored (except the few in the perfect hash's spill map).
//
// Container layout, all integers little-endian:
//
//   "CWM1"            4 bytes magic
//   version           u16
//   hash algorithm    u8
//   flags             u8    bit0: modulo bucket reduction
//   k                 u32
//   fingerprint bits  u8
//   gamma             f64
//   n_keys            u64
//   levels            u32 count, count x u64 size_bits, ceil(sum/64) x u64 words
//   quantizer         u32 k, k x f64 centers
//   fingerprints      ceil(n*b/64) x u64
//   indices           ceil(n*index_bits/64) x u64
//   spill             u64 count, count x (u32 len, bytes, u64 index)
//   crc32             u32 over every preceding byte

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "nluc/bytes.hpp"
#include "nluc/error.hpp"
#include "nluc/hash_family.hpp"
#include "nluc/mphf.hpp"
#include "nluc/packed_array.hpp"
#include "nluc/quantizer.hpp"

namespace nluc {

inline constexpr char kContainerMagic[4] = {'C', 'W', 'M', '1'};
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::uint8_t kFlagModuloReduction = 0x01;
inline constexpr std::size_t kContainerHeaderBytes = 29;
inline constexpr HashSeed kFingerprintSeed{std::uint64_t{1} << 32};

enum class LookupStatus : std::uint8_t { present_probably, absent_certain };

inline const char* to_string(LookupStatus s) noexcept {
  return s == LookupStatus::present_probably ? "present-probably" : "absent-certain";
}

struct LookupResult {
  double weight = 0.0;
  LookupStatus status = LookupStatus::absent_certain;

  bool present() const noexcept { return status == LookupStatus::present_probably; }
  friend bool operator==(const LookupResult&, const LookupResult&) = default;
};

// Smallest b with 2^-b <= epsilon.
inline unsigned fingerprint_bits_for(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw Error(Errc::invalid_argument, "epsilon must lie in (0, 1]");
  unsigned b = 0;
  while (std::ldexp(1.0, -static_cast<int>(b)) > epsilon) {
    if (++b > 64) throw Error(Errc::invalid_argument, "epsilon below 2^-64 is not supported");
  }
  return b;
}

struct CompressOptions {
  std::uint32_t k = 256;
  double epsilon = 1e-4;
  MphfOptions mphf;
};

struct MapStats {
  std::uint64_t n_keys = 0;
  std::uint32_t k = 0;
  unsigned index_bits = 0;
  unsigned fingerprint_bits = 0;
  double effective_epsilon = 1.0;
  std::uint64_t level_count = 0;

  // Section sizes in bits. Packed sections are counted at their logical
  // width (n * bits); file_bits includes word padding.
  std::uint64_t mphf_level_bits = 0;
  std::uint64_t rank_directory_bits = 0;
  std::uint64_t mphf_metadata_bits = 0;
  std::uint64_t spill_bits = 0;
  std::uint64_t spill_keys = 0;
  std::uint64_t fingerprint_section_bits = 0;
  std::uint64_t index_section_bits = 0;
  std::uint64_t table_bits = 0;
  std::uint64_t header_bits = 0;

  std::uint64_t mphf_bits() const noexcept {
    return mphf_level_bits + rank_directory_bits + mphf_metadata_bits + spill_bits;
  }
  // In-memory footprint, rank directory included.
  std::uint64_t total_bits() const noexcept {
    return mphf_bits() + fingerprint_section_bits + index_section_bits + table_bits + header_bits;
  }
  std::uint64_t file_bits = 0;

  double bits_per_entry() const noexcept {
    return n_keys ? static_cast<double>(total_bits()) / static_cast<double>(n_keys) : 0.0;
  }
  double mphf_bits_per_entry() const noexcept {
    return n_keys ? static_cast<double>(mphf_bits()) / static_cast<double>(n_keys) : 0.0;
  }

  // Plain hash-map baseline n * (s + w) with s = 8 * avg key bytes, w = 64.
  double avg_key_bytes = 0.0;
  double baseline_bits() const noexcept {
    return static_cast<double>(n_keys) * (8.0 * avg_key_bytes + 64.0);
  }
  double fold_reduction() const noexcept {
    return total_bits() ? baseline_bits() / static_cast<double>(total_bits()) : 0.0;
  }
};

class CompressedWeightMap {
 public:
  CompressedWeightMap() = default;

  // entries: range of (key, weight) pairs. Zero weights are dropped. Keys are
  // viewed in place, so the range must yield references.
  template <std::ranges::input_range R>
    requires std::is_lvalue_reference_v<std::ranges::range_reference_t<const R>>
  static CompressedWeightMap build(const R& entries, const CompressOptions& options = {}) {
    const unsigned b = fingerprint_bits_for(options.epsilon);
    if (options.k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");

    std::vector<std::string_view> keys;
    std::vector<double> weights;
    for (auto&& [key, weight] : entries) {
      const double w = static_cast<double>(weight);
      if (w == 0.0) continue;
      keys.emplace_back(key);
      weights.push_back(w);
    }
    if (keys.empty()) throw Error(Errc::empty_input, "no non-zero weights to compress");

    CompressedWeightMap m;
    m.mphf_ = Mphf::build(keys, options.mphf);
    m.table_ = QuantizerTable::fit_linear(weights, options.k);
    m.fingerprint_bits_ = b;
    const std::uint64_t n = keys.size();
    m.fingerprints_ = PackedArray(n, b);
    m.indices_ = PackedArray(n, m.table_.index_bits());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::uint64_t slot = *m.mphf_.evaluate(keys[i]);
      m.fingerprints_.set(slot, m.fingerprint(keys[i]));
      m.indices_.set(slot, m.table_.quantize(weights[i]));
    }
    return m;
  }

  LookupResult lookup(std::string_view key) const {
    if (auto s = mphf_.find_spill(key)) return present(*s);
    const auto slot = mphf_.evaluate_levels(key);
    if (!slot) return {};
    if (fingerprint_bits_ > 0 && fingerprints_.get(*slot) != fingerprint(key)) return {};
    return present(*slot);
  }

  std::uint64_t size() const noexcept { return mphf_.size(); }
  unsigned fingerprint_bits() const noexcept { return fingerprint_bits_; }
  double effective_epsilon() const noexcept { return std::ldexp(1.0, -static_cast<int>(fingerprint_bits_)); }
  const QuantizerTable& table() const noexcept { return table_; }
  const Mphf& mphf() const noexcept { return mphf_; }

  MapStats stats(double avg_key_bytes = 0.0) const {
    MapStats s;
    s.n_keys = size();
    s.k = table_.k();
    s.index_bits = table_.index_bits();
    s.fingerprint_bits = fingerprint_bits_;
    s.effective_epsilon = effective_epsilon();
    s.level_count = mphf_.levels().size();
    const auto mb = mphf_.size_breakdown();
    s.mphf_level_bits = mb.level_bits;
    s.rank_directory_bits = mb.rank_directory_bits;
    s.mphf_metadata_bits = mb.metadata_bits;
    s.spill_bits = mb.spill_bits;
    s.spill_keys = mphf_.spill().size();
    s.fingerprint_section_bits = s.n_keys * fingerprint_bits_;
    s.index_section_bits = s.n_keys * s.index_bits;
    s.table_bits = 32 + 64ull * s.k;
    s.header_bits = 8 * kContainerHeaderBytes + 32;
    s.file_bits = s.header_bits + mb.metadata_bits + 64ull * mphf_.bits().words().size() + s.table_bits +
                  fingerprints_.size_in_bits() + indices_.size_in_bits() + mb.spill_bits;
    s.avg_key_bytes = avg_key_bytes;
    return s;
  }

  // --- serialization --------------------------------------------------------

  std::vector<unsigned char> to_bytes() const {
    ByteWriter out;
    out.bytes(std::string_view(kContainerMagic, 4));
    out.u16(kContainerVersion);
    out.u8(static_cast<std::uint8_t>(kDefaultHashAlgorithm));
    out.u8(kFlagModuloReduction);
    out.u32(table_.k());
    out.u8(static_cast<std::uint8_t>(fingerprint_bits_));
    out.f64(mphf_.gamma());
    out.u64(size());
    mphf_.write_levels(out);
    out.u32(table_.k());
    for (double c : table_.centers()) out.f64(c);
    out.words(fingerprints_.words());
    out.words(indices_.words());
    mphf_.write_spill(out);
    const auto& bytes = out.data();
    out.u32(static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size()))));
    return out.release();
  }

  std::uint64_t save(std::ostream& sink) const {
    const auto bytes = to_bytes();
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!sink) throw Error(Errc::io_error, "failed writing compressed map");
    return bytes.size();
  }

  static CompressedWeightMap from_bytes(std::span<const unsigned char> data) {
    const std::size_t magic_len = std::min<std::size_t>(data.size(), 4);
    for (std::size_t i = 0; i < magic_len; ++i)
      if (data[i] != static_cast<unsigned char>(kContainerMagic[i]))
        throw Error(Errc::bad_magic, "not a compressed weight map");
    if (data.size() < kContainerHeaderBytes + 4) throw Error(Errc::truncated, "file shorter than header");

    const std::size_t body = data.size() - 4;
    ByteReader crc_in(data.subspan(body));
    const std::uint32_t stored_crc = crc_in.u32();
    const auto actual_crc = static_cast<std::uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(body)));
    if (stored_crc != actual_crc) throw Error(Errc::checksum_mismatch, "container checksum does not match");

    ByteReader in(data.first(body));
    in.bytes(4);
    if (const auto version = in.u16(); version != kContainerVersion)
      throw Error(Errc::unsupported_version, "container version " + std::to_string(version));
    if (const auto alg = in.u8(); alg != static_cast<std::uint8_t>(HashAlgorithm::murmur64a))
      throw Error(Errc::unknown_hash_algorithm, "hash algorithm id " + std::to_string(alg));
    if (const auto flags = in.u8(); flags != kFlagModuloReduction)
      throw Error(Errc::unsupported_version, "unsupported flags " + std::to_string(flags));
    const std::uint32_t k = in.u32();
    const unsigned b = in.u8();
    const double gamma = in.f64();
    const std::uint64_t n = in.u64();
    if (k == 0 || b > 64 || !(gamma >= 1.0) || !std::isfinite(gamma) || n > (std::uint64_t{1} << 56))
      throw Error(Errc::truncated, "malformed header fields");

    auto levels = Mphf::read_levels(in);

    if (in.u32() != k) throw Error(Errc::truncated, "quantizer size disagrees with header");
    if (k > in.remaining() / 8) throw Error(Errc::truncated, "quantizer table exceeds payload");
    std::vector<double> centers(k);
    for (auto& c : centers) c = in.f64();

    const unsigned index_bits = QuantizerTable::index_bits_for(k);
    auto fp_words = in.words(PackedArray::word_count(n, b));
    auto idx_words = in.words(PackedArray::word_count(n, index_bits));
    auto spill = Mphf::read_spill(in);
    if (in.remaining() != 0) throw Error(Errc::truncated, "trailing bytes after spill section");

    CompressedWeightMap m;
    m.mphf_ = Mphf::from_sections(n, gamma, std::move(levels), std::move(spill));
    m.table_ = QuantizerTable::from_centers(std::move(centers));
    m.fingerprint_bits_ = b;
    m.fingerprints_ = PackedArray::from_words(n, b, std::move(fp_words));
    m.indices_ = PackedArray::from_words(n, index_bits, std::move(idx_words));
    for (std::uint64_t i = 0; i < n; ++i)
      if (m.indices_.get(i) >= k) throw Error(Errc::truncated, "quantizer index out of range");
    return m;
  }

  static CompressedWeightMap load(std::istream& source) {
    std::vector<unsigned char> data{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    if (source.bad()) throw Error(Errc::io_error, "failed reading compressed map");
    return from_bytes(data);
  }

 private:
  std::uint64_t fingerprint(std::string_view key) const noexcept {
    if (fingerprint_bits_ == 0) return 0;
    const std::uint64_t h = hash(key, kFingerprintSeed);
    return fingerprint_bits_ == 64 ? h : h & ((std::uint64_t{1} << fingerprint_bits_) - 1);
  }

  LookupResult present(std::uint64_t slot) const {
    return {table_.dequantize(indices_.get(slot)), LookupStatus::present_probably};
  }

  Mphf mphf_;
  QuantizerTable table_;
  unsigned fingerprint_bits_ = 0;
  PackedArray fingerprints_;
  PackedArray indices_;
};

}  // namespace nluc
