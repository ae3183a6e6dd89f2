#include "nluc/quantizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace nluc {
namespace {

// Exhaustive nearest-center search; ties go to the larger index.
std::uint32_t nearest_center(const QuantizerTable& t, double w) {
  std::uint32_t best = 0;
  for (std::uint32_t i = 1; i < t.k(); ++i)
    if (std::abs(w - t.centers()[i]) <= std::abs(w - t.centers()[best])) best = i;
  return best;
}

TEST(Quantizer, FiveCentersOverSymmetricRange) {
  const std::vector<double> w{-2.0, -0.3, 0.1, 1.7, 2.0};
  const auto t = QuantizerTable::fit_linear(w, 5);
  EXPECT_EQ(t.centers(), (std::vector<double>{-2, -1, 0, 1, 2}));
  EXPECT_DOUBLE_EQ(t.step(), 1.0);
  EXPECT_EQ(t.quantize(0.4), 2u);
  EXPECT_EQ(t.quantize(0.4), nearest_center(t, 0.4));
  EXPECT_EQ(t.quantize(2.0), 4u);
  // Midpoint between centers 1 (-1) and 2 (0) rounds half-up.
  EXPECT_EQ(t.quantize(-0.5), 2u);
  EXPECT_EQ(t.dequantize(0), -2.0);
  EXPECT_THROW(t.dequantize(5), Error);
}

TEST(Quantizer, ConstantWeightsCollapse) {
  const std::vector<double> w(10, 0.7);
  for (std::uint32_t k : {1u, 2u, 16u, 256u}) {
    const auto t = QuantizerTable::fit_linear(w, k);
    EXPECT_EQ(t.dequantize(t.quantize(0.7)), 0.7) << "k=" << k;
    EXPECT_EQ(t.step(), 0.0);
  }
  const auto one = QuantizerTable::fit_linear(std::vector<double>{0.7}, 1);
  EXPECT_EQ(one.dequantize(0), 0.7);
}

TEST(Quantizer, SingleCenterIsRangeMidpoint) {
  const auto t = QuantizerTable::fit_linear(std::vector<double>{-1.0, 3.0}, 1);
  EXPECT_EQ(t.centers(), std::vector<double>{1.0});
  EXPECT_EQ(t.quantize(-1.0), 0u);
  EXPECT_EQ(t.index_bits(), 1u);
}

TEST(Quantizer, IndexBits) {
  EXPECT_EQ(QuantizerTable::index_bits_for(256), 8u);
  EXPECT_EQ(QuantizerTable::index_bits_for(255), 8u);
  EXPECT_EQ(QuantizerTable::index_bits_for(257), 9u);
  EXPECT_EQ(QuantizerTable::index_bits_for(2), 1u);
  EXPECT_EQ(QuantizerTable::index_bits_for(5), 3u);
  EXPECT_EQ(QuantizerTable::index_bits_for(1u << 20), 20u);
}

TEST(Quantizer, Errors) {
  EXPECT_THROW(QuantizerTable::fit_linear(std::vector<double>{}, 4), Error);
  try {
    QuantizerTable::fit_linear(std::vector<double>{}, 4);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_input);
  }
  try {
    QuantizerTable::fit_linear(std::vector<double>{1.0}, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(Quantizer, ClampsOutOfRange) {
  const auto t = QuantizerTable::fit_linear(std::vector<double>{-1.0, 1.0}, 3);
  EXPECT_EQ(t.quantize(-50.0), 0u);
  EXPECT_EQ(t.quantize(50.0), 2u);
}

TEST(Quantizer, RandomWeightsErrorWithinHalfStepAndNearest) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(0.0, 0.8);
  for (std::uint32_t k : {2u, 3u, 16u, 255u, 256u, 1000u}) {
    std::vector<double> w(100000);
    for (auto& x : w) x = d(rng);
    const auto t = QuantizerTable::fit_linear(w, k);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto idx = t.quantize(w[i]);
      ASSERT_LE(std::abs(t.dequantize(idx) - w[i]), t.step() / 2) << "k=" << k << " w=" << w[i];
      if (i < 2000) ASSERT_EQ(idx, nearest_center(t, w[i]));
    }
  }
}

TEST(Quantizer, MonotoneInWeight) {
  const auto t = QuantizerTable::fit_linear(std::vector<double>{-3.0, 5.0}, 37);
  std::uint32_t prev = 0;
  for (double w = -4.0; w <= 6.0; w += 0.001) {
    const auto idx = t.quantize(w);
    ASSERT_GE(idx, prev);
    prev = idx;
  }
}

TEST(Quantizer, SmallWeightsRoundToZeroCenter) {
  // Symmetric range with odd k puts a center at 0.
  const auto t = QuantizerTable::fit_linear(std::vector<double>{-2.0, 2.0}, 257);
  const auto zero = t.quantize(0.0);
  ASSERT_LT(std::abs(t.centers()[zero]), 1e-12);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> small(-t.step() / 2 * 0.999, t.step() / 2 * 0.999);
  for (int i = 0; i < 10000; ++i) EXPECT_EQ(t.dequantize(t.quantize(small(rng))), t.centers()[zero]);
}

TEST(Quantizer, FromCentersRebuildsTable) {
  const auto t = QuantizerTable::fit_linear(std::vector<double>{-0.37, 1.91}, 256);
  const auto u = QuantizerTable::from_centers(t.centers());
  EXPECT_EQ(u.centers(), t.centers());
  EXPECT_EQ(u.step(), t.step());
  for (double w = -0.5; w < 2.0; w += 0.0137) EXPECT_EQ(u.quantize(w), t.quantize(w));
}

}  // namespace
}  // namespace nluc
