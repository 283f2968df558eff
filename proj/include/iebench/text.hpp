#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iebench {

// UTF-8 helpers. Invalid byte sequences are replaced by U+FFFD and counted.

struct SanitizedText {
  std::string text;
  std::size_t replacements = 0;
};

SanitizedText sanitize_utf8(std::string_view bytes);

/// Decodes to code points; invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

/// Splits on runs of Unicode whitespace, dropping empty segments.
std::vector<std::string> tokenize(std::string_view text);

bool contains_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view separator = " ");

std::string normalize_nfc(std::string_view text);
std::u32string fold_case(std::u32string_view text);

/// Fixed-point formatting with round-half-even on the exact binary value.
std::string format_fixed(double value, int decimals);

/// Rounds to `decimals` places using the same rule as format_fixed.
double round_half_even(double value, int decimals);

std::string csv_escape(std::string_view field);
std::string json_escape(std::string_view text);

std::string read_file(const std::string& path);

/// 64-bit FNV-1a, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a_hex(std::string_view bytes);

}  // namespace iebench
