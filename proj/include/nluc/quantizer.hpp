#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ranges>
#include <string>
#include <vector>

#include "nluc/error.hpp"

namespace nluc {

// Linear quantizer: k centers evenly spaced over [min_w, max_w], endpoints
// included. Weights map to the nearest center, ties go to the larger index.
class QuantizerTable {
 public:
  QuantizerTable() = default;

  template <std::ranges::input_range R>
    requires std::convertible_to<std::ranges::range_reference_t<R>, double>
  static QuantizerTable fit_linear(const R& weights, std::uint32_t k) {
    if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    bool any = false;
    for (double w : weights) {
      if (!std::isfinite(w)) throw Error(Errc::invalid_argument, "non-finite weight");
      lo = std::min(lo, w);
      hi = std::max(hi, w);
      any = true;
    }
    if (!any) throw Error(Errc::empty_input, "cannot fit a quantizer on no weights");
    return from_range(lo, hi, k);
  }

  static QuantizerTable from_range(double min_w, double max_w, std::uint32_t k) {
    if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
    if (!(min_w <= max_w)) throw Error(Errc::invalid_argument, "min weight exceeds max weight");
    QuantizerTable t;
    t.min_w_ = min_w;
    t.max_w_ = max_w;
    t.centers_.resize(k);
    if (k == 1) {
      t.step_ = max_w - min_w;
      t.centers_[0] = min_w + (max_w - min_w) / 2;
    } else {
      t.step_ = (max_w - min_w) / (k - 1);
      for (std::uint32_t i = 0; i < k; ++i) t.centers_[i] = min_w + i * t.step_;
      t.centers_[k - 1] = max_w;
    }
    return t;
  }

  // Rebuilds a table from serialized centers.
  static QuantizerTable from_centers(std::vector<double> centers) {
    if (centers.empty()) throw Error(Errc::invalid_argument, "quantizer needs at least one center");
    for (double c : centers)
      if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "non-finite quantizer center");
    const auto k = static_cast<std::uint32_t>(centers.size());
    if (k == 1) {
      QuantizerTable t = from_range(centers[0], centers[0], 1);
      return t;
    }
    QuantizerTable t = from_range(centers.front(), centers.back(), k);
    t.centers_ = std::move(centers);
    return t;
  }

  std::uint32_t quantize(double w) const noexcept {
    const auto k = static_cast<std::uint32_t>(centers_.size());
    if (k == 1 || step_ == 0.0) return 0;
    if (!(w > min_w_)) return 0;
    if (w >= max_w_) return k - 1;
    auto i = static_cast<std::uint32_t>(std::floor((w - min_w_) / step_ + 0.5));
    i = std::min(i, k - 1);
    // Settle floating-point rounding against the stored centers.
    if (i > 0 && std::abs(w - centers_[i - 1]) < std::abs(w - centers_[i])) --i;
    else if (i + 1 < k && std::abs(w - centers_[i + 1]) <= std::abs(w - centers_[i])) ++i;
    return i;
  }

  double dequantize(std::uint64_t index) const {
    if (index >= centers_.size())
      throw Error(Errc::out_of_range, "quantizer index " + std::to_string(index));
    return centers_[index];
  }

  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(centers_.size()); }
  unsigned index_bits() const noexcept { return index_bits_for(k()); }
  double min_weight() const noexcept { return min_w_; }
  double max_weight() const noexcept { return max_w_; }
  double step() const noexcept { return step_; }
  const std::vector<double>& centers() const noexcept { return centers_; }

  static unsigned index_bits_for(std::uint32_t k) noexcept {
    return static_cast<unsigned>(std::bit_width(std::max<std::uint32_t>(k, 2) - 1));
  }

 private:
  std::vector<double> centers_;
  double min_w_ = 0.0;
  double max_w_ = 0.0;
  double step_ = 0.0;
};

}  // namespace nluc
