#pragma once

// Report rendering. The machine-readable form is a key-value document: one
// "key=value" pair per line, keys in a fixed order, doubles printed in
// shortest round-trip form.

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nluc/compressed_map.hpp"
#include "nluc/error.hpp"
#include "nluc/linear_model.hpp"
#include "nluc/tsv.hpp"

namespace nluc {

using KvDocument = std::vector<std::pair<std::string, std::string>>;

inline std::string format_kv(const KvDocument& doc) {
  std::string out;
  for (const auto& [k, v] : doc) out += k + "=" + v + "\n";
  return out;
}

inline KvDocument parse_kv(std::string_view text) {
  KvDocument doc;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected key=value");
    doc.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return doc;
}

inline const std::string* kv_find(const KvDocument& doc, std::string_view key) {
  for (const auto& [k, v] : doc)
    if (k == key) return &v;
  return nullptr;
}

inline KvDocument to_kv(const MapStats& s) {
  auto u = [](std::uint64_t v) { return std::to_string(v); };
  return {
      {"n_keys", u(s.n_keys)},
      {"k", u(s.k)},
      {"index_bits", u(s.index_bits)},
      {"fingerprint_bits", u(s.fingerprint_bits)},
      {"effective_epsilon", format_double(s.effective_epsilon)},
      {"levels", u(s.level_count)},
      {"spill_keys", u(s.spill_keys)},
      {"mphf_level_bits", u(s.mphf_level_bits)},
      {"rank_directory_bits", u(s.rank_directory_bits)},
      {"mphf_metadata_bits", u(s.mphf_metadata_bits)},
      {"spill_bits", u(s.spill_bits)},
      {"mphf_bits", u(s.mphf_bits())},
      {"fingerprint_bits_total", u(s.fingerprint_section_bits)},
      {"index_bits_total", u(s.index_section_bits)},
      {"table_bits", u(s.table_bits)},
      {"header_bits", u(s.header_bits)},
      {"total_bits", u(s.total_bits())},
      {"file_bits", u(s.file_bits)},
      {"bits_per_entry", format_double(s.bits_per_entry())},
      {"mphf_bits_per_entry", format_double(s.mphf_bits_per_entry())},
      {"avg_key_bytes", format_double(s.avg_key_bytes)},
      {"baseline_bits", format_double(s.baseline_bits())},
      {"fold_reduction", format_double(s.fold_reduction())},
  };
}

inline KvDocument to_kv(const AgreementReport& r) {
  return {
      {"n_utterances", std::to_string(r.n_utterances)},
      {"agreement_rate", format_double(r.agreement_rate)},
      {"src_accuracy", format_double(r.src_accuracy)},
      {"comp_accuracy", format_double(r.comp_accuracy)},
      {"relative_error_increase", format_double(r.relative_error_increase)},
  };
}

inline std::string format_text(const MapStats& s) {
  const double n = s.n_keys ? static_cast<double>(s.n_keys) : 1.0;
  char buf[2048];
  std::snprintf(buf, sizeof buf,
                "entries            %llu\n"
                "quantizer          k=%u (%u bits/entry)\n"
                "fingerprints       %u bits/entry (epsilon %.3g)\n"
                "perfect hash       %llu levels, %llu spilled keys\n"
                "  level bits       %12llu  (%.3f bits/entry)\n"
                "  rank directory   %12llu  (%.3f bits/entry)\n"
                "  level metadata   %12llu\n"
                "  spill            %12llu\n"
                "fingerprints       %12llu  (%.3f bits/entry)\n"
                "indices            %12llu  (%.3f bits/entry)\n"
                "table + header     %12llu\n"
                "total              %12llu  (%.3f bits/entry, %.3f MB)\n"
                "file               %12llu  bits\n"
                "baseline n(s+w)    %12.0f  (%.1f key bytes + 64-bit weight)\n"
                "fold reduction     %.2fx\n",
                static_cast<unsigned long long>(s.n_keys), s.k, s.index_bits, s.fingerprint_bits,
                s.effective_epsilon, static_cast<unsigned long long>(s.level_count),
                static_cast<unsigned long long>(s.spill_keys), static_cast<unsigned long long>(s.mphf_level_bits),
                s.mphf_level_bits / n, static_cast<unsigned long long>(s.rank_directory_bits),
                s.rank_directory_bits / n, static_cast<unsigned long long>(s.mphf_metadata_bits),
                static_cast<unsigned long long>(s.spill_bits),
                static_cast<unsigned long long>(s.fingerprint_section_bits), s.fingerprint_section_bits / n,
                static_cast<unsigned long long>(s.index_section_bits), s.index_section_bits / n,
                static_cast<unsigned long long>(s.table_bits + s.header_bits),
                static_cast<unsigned long long>(s.total_bits()), s.bits_per_entry(), s.total_bits() / 8e6,
                static_cast<unsigned long long>(s.file_bits), s.baseline_bits(), s.avg_key_bytes,
                s.fold_reduction());
  return buf;
}

inline std::string format_text(const AgreementReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "utterances               %llu\n"
                "agreement                %.4f%%\n"
                "source accuracy          %.4f%%\n"
                "compressed accuracy      %.4f%%\n"
                "relative error increase  %+.4f%%\n",
                static_cast<unsigned long long>(r.n_utterances), 100 * r.agreement_rate, 100 * r.src_accuracy,
                100 * r.comp_accuracy, 100 * r.relative_error_increase);
  return buf;
}

}  // namespace nluc
