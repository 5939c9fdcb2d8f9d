#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medforge::text {

// UTF-8 decode helper: appends codepoints; invalid bytes decode as U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);

// Default threshold tokenizer: each maximal alphanumeric run is one token and
// each punctuation character is one token; whitespace only separates.
// Non-ASCII letters are treated as word characters.
std::vector<std::string> tokenize(std::string_view s);

std::size_t count_tokens(std::string_view s);

// Lowercase, punctuation stripped, whitespace collapsed to single spaces, trimmed.
std::string normalize(std::string_view s);

// 64-bit FNV-1a, the key function for normalized-text matching.
std::uint64_t fnv1a64(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

// w-word shingles of the whitespace-tokenized text. Texts shorter than w words
// yield a single shingle equal to the whole (space-joined) text.
std::vector<std::string> word_shingles(std::string_view s, std::size_t w);

}  // namespace medforge::text
