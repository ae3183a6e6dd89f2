#pragma once

#include <stdexcept>
#include <string>

namespace nluc {

enum class Errc {
  invalid_argument,
  out_of_range,
  empty_input,
  duplicate_key,
  parse_error,
  class_mismatch,
  io_error,
  // container loading
  bad_magic,
  unsupported_version,
  unknown_hash_algorithm,
  truncated,
  checksum_mismatch,
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::out_of_range: return "out of range";
    case Errc::empty_input: return "empty input";
    case Errc::duplicate_key: return "duplicate key";
    case Errc::parse_error: return "parse error";
    case Errc::class_mismatch: return "class list mismatch";
    case Errc::io_error: return "i/o error";
    case Errc::bad_magic: return "bad magic";
    case Errc::unsupported_version: return "unsupported version";
    case Errc::unknown_hash_algorithm: return "unknown hash algorithm";
    case Errc::truncated: return "truncated payload";
    case Errc::checksum_mismatch: return "checksum mismatch";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nluc
