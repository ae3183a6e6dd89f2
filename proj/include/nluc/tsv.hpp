#pragma once

// Text formats.
//
//   model TSV:    class <TAB> feature <TAB> weight   (feature "__BIAS__" = bias)
//   dataset TSV:  class <TAB> utterance
//
// UTF-8, one record per line; blank lines and lines starting with '#' are
// skipped. Errors carry the 1-based line number.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nluc/error.hpp"
#include "nluc/features.hpp"
#include "nluc/linear_model.hpp"

namespace nluc {

inline constexpr std::string_view kBiasFeature = "__BIAS__";

namespace detail {

inline Error line_error(std::size_t line, const std::string& msg) {
  return Error(Errc::parse_error, "line " + std::to_string(line) + ": " + msg);
}

inline std::vector<std::string_view> split_tabs(std::string_view s, std::size_t max_fields) {
  std::vector<std::string_view> out;
  while (out.size() + 1 < max_fields) {
    const auto tab = s.find('\t');
    if (tab == std::string_view::npos) break;
    out.push_back(s.substr(0, tab));
    s.remove_prefix(tab + 1);
  }
  out.push_back(s);
  return out;
}

template <class Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(std::string_view(line), lineno);
  }
  if (in.bad()) throw Error(Errc::io_error, "read failure");
}

inline void check_label(std::string_view label, std::size_t lineno) {
  if (label.empty()) throw line_error(lineno, "empty class label");
  if (label.find(kKeySeparator) != std::string_view::npos)
    throw line_error(lineno, "class label contains the 0x1F separator");
}

}  // namespace detail

inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline SourceModel read_model_tsv(std::istream& in) {
  SourceModel m;
  detail::for_each_record(in, [&](std::string_view line, std::size_t lineno) {
    const auto f = detail::split_tabs(line, 3);
    if (f.size() != 3) throw detail::line_error(lineno, "expected class<TAB>feature<TAB>weight");
    detail::check_label(f[0], lineno);
    if (f[1].find(kKeySeparator) != std::string_view::npos)
      throw detail::line_error(lineno, "feature contains the 0x1F separator");
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), w);
    if (ec != std::errc{} || ptr != f[2].data() + f[2].size() || !std::isfinite(w))
      throw detail::line_error(lineno, "bad weight \"" + std::string(f[2]) + "\"");

    const std::size_t c = m.add_class(f[0]);
    if (f[1] == kBiasFeature) {
      m.biases[c] = w;
      return;
    }
    if (w == 0.0) return;
    if (!m.weights.emplace(composite_key(f[0], f[1]), w).second)
      throw detail::line_error(lineno, "duplicate entry for (" + std::string(f[0]) + ", " + std::string(f[1]) + ")");
  });
  return m;
}

// Bias rows first (in class order, so the class order survives a round trip),
// then weights sorted by key.
inline void write_model_tsv(std::ostream& out, const SourceModel& m, bool biases_only = false) {
  for (std::size_t c = 0; c < m.classes.size(); ++c)
    out << m.classes[c] << '\t' << kBiasFeature << '\t' << format_double(m.biases[c]) << '\n';
  if (biases_only) return;
  std::vector<std::pair<std::string_view, double>> rows(m.weights.begin(), m.weights.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [key, w] : rows) {
    const auto sep = key.find(kKeySeparator);
    out << key.substr(0, sep) << '\t' << key.substr(sep + 1) << '\t' << format_double(w) << '\n';
  }
  if (!out) throw Error(Errc::io_error, "write failure");
}

inline std::vector<LabeledUtterance> read_dataset_tsv(std::istream& in) {
  std::vector<LabeledUtterance> out;
  detail::for_each_record(in, [&](std::string_view line, std::size_t lineno) {
    const auto f = detail::split_tabs(line, 2);
    if (f.size() != 2) throw detail::line_error(lineno, "expected class<TAB>utterance");
    detail::check_label(f[0], lineno);
    out.push_back({std::string(f[0]), std::string(f[1])});
  });
  return out;
}

inline void write_dataset_tsv(std::ostream& out, std::span<const LabeledUtterance> data) {
  for (const auto& u : data) out << u.label << '\t' << u.text << '\n';
  if (!out) throw Error(Errc::io_error, "write failure");
}

}  // namespace nluc
