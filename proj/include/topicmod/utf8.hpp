#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace topicmod::utf8 {

inline constexpr char32_t invalid = 0xFFFFFFFF;

struct Decoded {
  char32_t cp;
  std::size_t length;
};

/// Decodes one code point at `pos`. Malformed sequences yield `invalid`
/// with length 1 so callers can pass the raw byte through or drop it.
inline Decoded decode(std::string_view s, std::size_t pos) noexcept {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80)
    return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return {invalid, 1};
  }
  if (pos + len > s.size())
    return {invalid, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80)
      return {invalid, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    return {invalid, 1};
  return {cp, len};
}

inline void append(std::string &out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

/// Calls `fn(cp, raw)` for every code point; `raw` is the source bytes.
template <typename Fn> void for_each(std::string_view s, Fn &&fn) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const Decoded d = decode(s, pos);
    fn(d.cp, s.substr(pos, d.length));
    pos += d.length;
  }
}

} // namespace topicmod::utf8
