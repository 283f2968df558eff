#include "iebench/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "iebench/error.hpp"

namespace iebench {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

template <typename Fn>
std::size_t for_each_code_point(std::string_view bytes, Fn&& fn) {
  std::size_t replaced = 0;
  const auto* data = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t offset = 0;
  while (offset < length) {
    const int32_t start = offset;
    UChar32 c;
    U8_NEXT(data, offset, length, c);
    if (c < 0) {
      ++replaced;
      fn(kReplacement, start, offset, false);
    } else {
      fn(static_cast<char32_t>(c), start, offset, true);
    }
  }
  return replaced;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

}  // namespace

SanitizedText sanitize_utf8(std::string_view bytes) {
  SanitizedText out;
  out.text.reserve(bytes.size());
  out.replacements = for_each_code_point(bytes, [&](char32_t c, int32_t begin, int32_t end, bool valid) {
    if (valid) {
      out.text.append(bytes.substr(begin, end - begin));
    } else {
      out.text.append(encode_utf8(std::u32string_view(&c, 1)));
    }
  });
  return out;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for_each_code_point(text, [&](char32_t c, int32_t, int32_t, bool) { out.push_back(c); });
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[4];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, 4, static_cast<UChar32>(c), error);
    if (error) {
      len = 0;
      U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(kReplacement));
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for_each_code_point(text, [&](char32_t c, int32_t begin, int32_t end, bool valid) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (valid) {
      current.append(text.substr(begin, end - begin));
    } else {
      current.append(encode_utf8(std::u32string_view(&c, 1)));
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool contains_whitespace(std::string_view text) {
  bool found = false;
  for_each_code_point(text, [&](char32_t c, int32_t, int32_t, bool) { found = found || is_space(c); });
  return found;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = text.size();
  std::size_t end = 0;
  for_each_code_point(text, [&](char32_t c, int32_t b, int32_t e, bool) {
    if (!is_space(c)) {
      begin = std::min<std::size_t>(begin, b);
      end = static_cast<std::size_t>(e);
    }
  });
  if (begin >= end) return {};
  return text.substr(begin, end - begin);
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(separator);
    out.append(parts[i]);
  }
  return out;
}

std::string normalize_nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(input, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::u32string fold_case(std::u32string_view text) {
  std::u32string out(text);
  for (char32_t& c : out) c = static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
  return out;
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) throw Error("cannot format non-finite value");
  // glibc printf converts the exact binary value and rounds ties to even.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

double round_half_even(double value, int decimals) { return std::stod(format_fixed(value, decimals)); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string json_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<unsigned>(c));
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path);
  return buffer.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", hash);
}

}  // namespace iebench
