#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace nluc {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

// unordered_map keyed by std::string that accepts string_view lookups.
template <class V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

}  // namespace nluc
