#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 handling for the four supported Latin-script languages.
// Classification covers ASCII, Latin-1 Supplement and Latin Extended-A;
// anything beyond is treated as a generic non-letter.

namespace veridict::utf8 {

/// Decodes the code point starting at byte offset `i` and advances `i`.
/// Invalid sequences decode as U+FFFD and advance one byte.
char32_t decode(std::string_view s, std::size_t& i);

void encode(char32_t cp, std::string& out);

std::u32string decode_all(std::string_view s);
std::string encode_all(const std::u32string& cps);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_whitespace(char32_t cp);

char32_t to_lower(char32_t cp);

/// Lowercases letters; leaves everything else as-is.
std::string fold_case(std::string_view s);

/// fold_case plus accent stripping (é -> e, ñ -> n, ß -> ss).
std::string fold_accents(std::string_view s);

std::size_t count_codepoints(std::string_view s);

}  // namespace veridict::utf8
