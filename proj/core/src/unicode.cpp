#include "bpekit/unicode.hpp"

#include <algorithm>
#include <stdexcept>

namespace bpekit {

namespace {

struct CodepointRange {
  char32_t lo;
  char32_t hi;
};

#include "punctuation_ranges.inc"

// Decodes one code point starting at text[i]. Returns false on malformed
// input (bad lead byte, truncated sequence, overlong form, surrogate, or
// out-of-range value).
bool decode_one(std::string_view text, std::size_t& i, char32_t& cp) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  const unsigned char b0 = s[i];
  if (b0 < 0x80) {
    cp = b0;
    i += 1;
    return true;
  }
  int len = 0;
  char32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    return false;
  }
  if (i + len > n) return false;
  for (int k = 1; k < len; ++k) {
    const unsigned char b = s[i + k];
    if ((b & 0xC0) != 0x80) return false;
    value = (value << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (value < kMinByLen[len]) return false;                 // overlong
  if (value >= 0xD800 && value <= 0xDFFF) return false;     // surrogate
  if (value > 0x10FFFF) return false;
  cp = value;
  i += len;
  return true;
}

}  // namespace

bool decode_utf8_prefix(std::string_view text, std::size_t& pos,
                        char32_t& cp) {
  if (pos >= text.size()) return false;
  return decode_one(text, pos, cp);
}

bool utf8_valid(std::string_view text) {
  std::size_t i = 0;
  char32_t cp;
  while (i < text.size()) {
    if (!decode_one(text, i, cp)) return false;
  }
  return true;
}

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  char32_t cp;
  while (i < text.size()) {
    if (!decode_one(text, i, cp)) {
      throw std::invalid_argument("malformed UTF-8 at byte offset " +
                                  std::to_string(i));
    }
    out.push_back(cp);
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

std::string encode_utf8(char32_t cp) {
  std::string s;
  append_utf8(s, cp);
  return s;
}

std::size_t codepoint_count(std::string_view text) {
  std::size_t count = 0;
  for (unsigned char b : text) {
    if ((b & 0xC0) != 0x80) ++count;
  }
  return count;
}

bool is_decimal_digit(char32_t cp) {
  return (cp >= 0x30 && cp <= 0x39) || (cp >= 0xFF10 && cp <= 0xFF19);
}

bool is_punctuation(char32_t cp) {
  const auto* begin = std::begin(kPunctuationRanges);
  const auto* end = std::end(kPunctuationRanges);
  const auto* it = std::upper_bound(
      begin, end, cp,
      [](char32_t value, const CodepointRange& r) { return value < r.lo; });
  if (it == begin) return false;
  --it;
  return cp >= it->lo && cp <= it->hi;
}

bool is_control(char32_t cp) {
  return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F);
}

}  // namespace bpekit
