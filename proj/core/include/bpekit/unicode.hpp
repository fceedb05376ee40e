#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bpekit {

// Whitespace marker used in piece surfaces (U+2581, LOWER ONE EIGHTH BLOCK).
inline constexpr char32_t kMarkerChar = U'▁';
inline constexpr std::string_view kMarkerUtf8 = "\xE2\x96\x81";

bool utf8_valid(std::string_view text);

// Decodes UTF-8 into code points. Throws std::invalid_argument on malformed
// input.
std::vector<char32_t> decode_utf8(std::string_view text);

// Decodes the single code point starting at byte `pos`, advancing `pos`
// past it. Returns false and leaves `pos` unchanged on malformed input.
bool decode_utf8_prefix(std::string_view text, std::size_t& pos, char32_t& cp);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(char32_t cp);

// Number of code points in a valid UTF-8 string.
std::size_t codepoint_count(std::string_view text);

// Decimal digits subject to digit splitting: ASCII 0-9 and fullwidth 0-9.
bool is_decimal_digit(char32_t cp);

// Unicode general category P* (range table in punctuation_ranges.inc).
bool is_punctuation(char32_t cp);

// C0/C1 control characters plus DEL. These never enter a trained alphabet
// and always take the byte fallback route.
bool is_control(char32_t cp);

}  // namespace bpekit
