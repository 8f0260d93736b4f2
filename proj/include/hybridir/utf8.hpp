#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Case folding and letter classification cover Latin
// (including the Polish diacritics), Greek and Cyrillic; everything else is
// treated as a non-letter symbol.
namespace hybridir::utf8 {

/// Decodes `text`; invalid sequences become U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
bool is_upper(char32_t cp);
char32_t to_lower(char32_t cp);

std::u32string to_lower(std::u32string_view text);
std::string to_lower(std::string_view text);

/// Maximal runs of letters and digits, in order of appearance.
std::vector<std::u32string> words(std::u32string_view text);

/// Number of code points.
std::size_t length(std::string_view text);

}  // namespace hybridir::utf8
