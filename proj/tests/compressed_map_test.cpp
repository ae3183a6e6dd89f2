#include "nluc/compressed_map.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "nluc/synthetic.hpp"
#include "test_util.hpp"

namespace nluc {
namespace {

using Entries = std::vector<std::pair<std::string, double>>;

Entries make_entries(std::size_t n, std::uint64_t seed) {
  return synthetic_model_entries({.entries = n, .mean_key_bytes = 20, .classes = 6, .seed = seed});
}

Errc load_error(const std::vector<unsigned char>& bytes) {
  try {
    CompressedWeightMap::from_bytes(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "load unexpectedly succeeded";
  return Errc::io_error;
}

void rewrite_crc(std::vector<unsigned char>& bytes) {
  const std::size_t body = bytes.size() - 4;
  const auto crc = static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(body)));
  for (int i = 0; i < 4; ++i) bytes[body + i] = static_cast<unsigned char>(crc >> (8 * i));
}

double false_positive_rate(const CompressedWeightMap& m, std::uint64_t probes, std::uint64_t seed) {
  std::uint64_t fp = 0;
  for (std::uint64_t i = 0; i < probes; ++i) fp += m.lookup(synthetic_probe(i, seed)).present();
  return static_cast<double>(fp) / static_cast<double>(probes);
}

TEST(FingerprintBits, FromEpsilon) {
  EXPECT_EQ(fingerprint_bits_for(1e-4), 14u);
  EXPECT_EQ(fingerprint_bits_for(1.0), 0u);
  EXPECT_EQ(fingerprint_bits_for(1.0 / 256), 8u);
  EXPECT_EQ(fingerprint_bits_for(0.5), 1u);
  EXPECT_EQ(fingerprint_bits_for(0.3), 2u);
  EXPECT_THROW(fingerprint_bits_for(0.0), Error);
  EXPECT_THROW(fingerprint_bits_for(1.5), Error);
  EXPECT_THROW(fingerprint_bits_for(-0.1), Error);
}

TEST(CompressedWeightMap, TwoEntryMap) {
  const Entries e{{"foo", 1.0}, {"bar", -1.0}};
  const auto m = CompressedWeightMap::build(e, {.k = 2, .epsilon = 1e-4});
  EXPECT_EQ(m.lookup("foo"), (LookupResult{1.0, LookupStatus::present_probably}));
  EXPECT_EQ(m.lookup("bar"), (LookupResult{-1.0, LookupStatus::present_probably}));
  EXPECT_EQ(m.fingerprint_bits(), 14u);
}

TEST(CompressedWeightMap, FallThroughKeyIsAbsentCertain) {
  // At gamma 1 the last level is all ones, so falling through needs either
  // wider levels or a level cap.
  const auto entries = make_entries(2000, 1);
  for (const MphfOptions opts : {MphfOptions{.gamma = 2.0}, MphfOptions{.max_levels = 3}}) {
    const auto m = CompressedWeightMap::build(entries, {.epsilon = 1.0, .mphf = opts});
    int found = 0;
    for (int i = 0; i < 100000 && found < 20; ++i) {
      const auto probe = synthetic_probe(i, 9);
      if (m.mphf().evaluate(probe)) continue;
      ++found;
      EXPECT_EQ(m.lookup(probe), (LookupResult{0.0, LookupStatus::absent_certain}));
    }
    EXPECT_EQ(found, 20);
  }
}

TEST(CompressedWeightMap, LastLevelIsFullAtLoadFactorOne) {
  const auto m = CompressedWeightMap::build(make_entries(2000, 1), {.epsilon = 1.0});
  const auto& lv = m.mphf().levels().back();
  const auto& bits = m.mphf().bits();
  EXPECT_EQ(bits.rank(lv.offset + lv.size_bits) - bits.rank(lv.offset), lv.size_bits);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(m.lookup(synthetic_probe(i, 2)).present());
}

TEST(CompressedWeightMap, MembersExactWithinHalfStep) {
  const auto entries = make_entries(20000, 2);
  for (double eps : {1.0, 0.5, 1e-4}) {
    const auto m = CompressedWeightMap::build(entries, {.k = 256, .epsilon = eps});
    const double half = m.table().step() / 2;
    for (const auto& [k, w] : entries) {
      const auto r = m.lookup(k);
      ASSERT_TRUE(r.present()) << k;
      ASSERT_LE(std::abs(r.weight - w), half);
    }
  }
}

TEST(CompressedWeightMap, ZeroWeightsDropped) {
  const Entries e{{"a", 0.5}, {"b", 0.0}, {"c", -0.25}};
  const auto m = CompressedWeightMap::build(e, {.k = 16});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.lookup("a").present());
  EXPECT_THROW(CompressedWeightMap::build(Entries{{"z", 0.0}}), Error);
}

TEST(CompressedWeightMap, BuildErrors) {
  const Entries ok{{"a", 1.0}};
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io_error;
  };
  EXPECT_EQ(code_of([] { CompressedWeightMap::build(Entries{}); }), Errc::empty_input);
  EXPECT_EQ(code_of([&] { CompressedWeightMap::build(ok, {.epsilon = 0.0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { CompressedWeightMap::build(ok, {.epsilon = 2.0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { CompressedWeightMap::build(ok, {.k = 0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { CompressedWeightMap::build(Entries{{"d", 1.0}, {"d", 2.0}}); }), Errc::duplicate_key);
}

TEST(CompressedWeightMap, FalsePositiveRateTracksFingerprintWidth) {
  const auto entries = make_entries(100000, 3);
  for (double eps : {1.0 / 16, 1.0 / 256}) {
    const auto m = CompressedWeightMap::build(entries, {.epsilon = eps});
    const double rate = false_positive_rate(m, 1000000, 4);
    const double target = m.effective_epsilon();
    EXPECT_GE(rate, 0.5 * target) << "b=" << m.fingerprint_bits();
    EXPECT_LE(rate, 2.0 * target) << "b=" << m.fingerprint_bits();
  }
}

TEST(CompressedWeightMap, FalsePositivesReturnStoredWeights) {
  const auto entries = make_entries(5000, 5);
  const auto m = CompressedWeightMap::build(entries, {.k = 256, .epsilon = 1.0});
  std::set<double> stored;
  for (const auto& [k, w] : entries) stored.insert(m.lookup(k).weight);
  for (int i = 0; i < 20000; ++i) {
    const auto r = m.lookup(synthetic_probe(i, 6));
    if (r.present()) ASSERT_TRUE(stored.count(r.weight));
    else ASSERT_EQ(r.weight, 0.0);
  }
}

TEST(CompressedWeightMap, SpillKeysBehaveLikeMembers) {
  const auto entries = make_entries(3000, 7);
  const auto m = CompressedWeightMap::build(entries, {.k = 64, .epsilon = 1.0 / 256, .mphf = {.max_levels = 2}});
  ASSERT_GT(m.mphf().spill().size(), 0u);
  for (const auto& [k, w] : entries) ASSERT_LE(std::abs(m.lookup(k).weight - w), m.table().step() / 2);
  const auto back = CompressedWeightMap::from_bytes(m.to_bytes());
  for (const auto& [k, w] : entries) ASSERT_EQ(back.lookup(k), m.lookup(k));
}

TEST(CompressedWeightMap, SaveLoadRoundTrip) {
  const auto entries = make_entries(10000, 8);
  const auto m = CompressedWeightMap::build(entries, {.k = 256, .epsilon = 1.0 / 64});
  std::stringstream ss;
  const auto written = m.save(ss);
  const auto back = CompressedWeightMap::load(ss);
  EXPECT_EQ(written, m.to_bytes().size());
  for (const auto& [k, w] : entries) ASSERT_EQ(back.lookup(k), m.lookup(k));
  for (int i = 0; i < 100000; ++i) {
    const auto p = synthetic_probe(i, 1);
    ASSERT_EQ(back.lookup(p), m.lookup(p));
  }
  EXPECT_EQ(back.to_bytes(), m.to_bytes());
}

TEST(CompressedWeightMap, FileSizeMatchesStats) {
  for (double eps : {1.0, 1e-4}) {
    const auto m = CompressedWeightMap::build(make_entries(10000, 9), {.epsilon = eps});
    const auto s = m.stats();
    EXPECT_EQ(8 * m.to_bytes().size(), s.file_bits);
    // In-memory total adds the rank directory and drops word padding.
    EXPECT_NEAR(static_cast<double>(s.file_bits), static_cast<double>(s.total_bits() - s.rank_directory_bits),
                0.01 * static_cast<double>(s.file_bits));
  }
}

TEST(CompressedWeightMap, HeaderCorruptionDetected) {
  const auto bytes = CompressedWeightMap::build(make_entries(1000, 10), {}).to_bytes();
  for (std::size_t pos = 0; pos < kContainerHeaderBytes; ++pos) {
    for (unsigned char flip : {0x01, 0x80, 0xFF}) {
      auto bad = bytes;
      bad[pos] ^= flip;
      const Errc expected = pos < 4 ? Errc::bad_magic : Errc::checksum_mismatch;
      EXPECT_EQ(load_error(bad), expected) << "byte " << pos;
    }
  }
}

TEST(CompressedWeightMap, PayloadCorruptionDetected) {
  const auto bytes = CompressedWeightMap::build(make_entries(1000, 11), {}).to_bytes();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto bad = bytes;
    bad[rng() % bad.size()] ^= static_cast<unsigned char>(1 + rng() % 255);
    const Errc e = load_error(bad);
    EXPECT_TRUE(e == Errc::checksum_mismatch || e == Errc::bad_magic);
  }
}

TEST(CompressedWeightMap, DistinctLoadErrors) {
  const auto bytes = CompressedWeightMap::build(make_entries(500, 12), {}).to_bytes();

  EXPECT_EQ(load_error({'X', 'Y', 'Z', 'W', 0, 0, 0, 0}), Errc::bad_magic);
  EXPECT_EQ(load_error({'C', 'W', 'M', '1', 1, 0}), Errc::truncated);

  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_NE(load_error(truncated), Errc::bad_magic);

  auto version = bytes;
  version[4] = 2;
  rewrite_crc(version);
  EXPECT_EQ(load_error(version), Errc::unsupported_version);

  auto alg = bytes;
  alg[6] = 9;
  rewrite_crc(alg);
  EXPECT_EQ(load_error(alg), Errc::unknown_hash_algorithm);

  // Cut the spill section but keep a valid checksum.
  auto short_payload = std::vector<unsigned char>(bytes.begin(), bytes.end() - 12);
  short_payload.insert(short_payload.end(), {0, 0, 0, 0});
  rewrite_crc(short_payload);
  EXPECT_EQ(load_error(short_payload), Errc::truncated);

  auto trailing = bytes;
  trailing.insert(trailing.end() - 4, {0xAB});
  rewrite_crc(trailing);
  EXPECT_EQ(load_error(trailing), Errc::truncated);
}

TEST(CompressedWeightMap, HeaderLayout) {
  const auto m = CompressedWeightMap::build(Entries{{"a", 1.0}, {"b", 2.0}}, {.k = 300, .epsilon = 1e-4});
  const auto b = m.to_bytes();
  ASSERT_GE(b.size(), kContainerHeaderBytes);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "CWM1");
  EXPECT_EQ(b[4] | b[5] << 8, 1);
  EXPECT_EQ(b[6], 1);  // murmur64a
  EXPECT_EQ(b[7], 1);  // modulo reduction
  EXPECT_EQ(b[8] | b[9] << 8 | b[10] << 16 | b[11] << 24, 300);
  EXPECT_EQ(b[12], 14);
  ByteReader r(std::span<const unsigned char>(b).subspan(13));
  EXPECT_EQ(r.f64(), 1.0);
  EXPECT_EQ(r.u64(), 2u);
}

TEST(CompressedWeightMap, StatsSections) {
  const auto entries = make_entries(50000, 13);
  const auto m = CompressedWeightMap::build(entries, {.k = 256, .epsilon = 1e-4});
  const auto s = m.stats(20.0);
  EXPECT_EQ(s.index_section_bits, 8 * s.n_keys);
  EXPECT_EQ(s.fingerprint_section_bits, 14 * s.n_keys);
  EXPECT_EQ(s.baseline_bits(), 50000.0 * 224);
  EXPECT_LE(s.mphf_bits_per_entry(), 3.8);

  std::uint64_t prev = 0;
  for (double eps : {1.0, 0.5, 1.0 / 16, 1.0 / 256, 1e-4}) {
    const auto t = CompressedWeightMap::build(entries, {.k = 256, .epsilon = eps}).stats().total_bits();
    EXPECT_GT(t, prev);
    prev = t;
  }
}

}  // namespace
}  // namespace nluc
