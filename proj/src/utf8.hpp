#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace wordmap::utf8 {

/// Offset of the first byte that does not start a well-formed UTF-8
/// sequence, or nullopt if `s` is valid. Overlong forms and surrogates are
/// rejected.
std::optional<std::size_t> first_invalid(std::string_view s);

inline bool is_valid(std::string_view s) { return !first_invalid(s).has_value(); }

struct Decoded {
  char32_t code_point;
  std::size_t length;  // bytes consumed, >= 1
  bool valid;
};

/// Decodes the sequence starting at `s[pos]`. An invalid sequence yields
/// the single byte as a code point with `valid == false`.
Decoded decode(std::string_view s, std::size_t pos);

/// Number of code points, counting each invalid byte as one.
std::size_t length(std::string_view s);

}  // namespace wordmap::utf8
