#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iebench::detail {

// Bit-parallel LCS over code points (Allison-Dix / Hyyro). The pattern's
// match masks are built once and reused against many texts.
class LcsPattern {
 public:
  explicit LcsPattern(std::u32string_view pattern);

  /// `state` is scratch space for patterns longer than 64 code points.
  std::size_t lcs(std::u32string_view text, std::vector<uint64_t>& state) const;
  std::size_t lcs(std::u32string_view text) const {
    std::vector<uint64_t> state;
    return lcs(text, state);
  }

 private:
  static constexpr char32_t kAsciiSize = 128;

  const uint64_t* masks(char32_t c) const;

  std::size_t length_;
  std::size_t words_;
  std::vector<uint64_t> ascii_;
  std::unordered_map<char32_t, std::vector<uint64_t>> other_;
};

/// Unit-cost Levenshtein distance, two-row dynamic program.
std::size_t levenshtein_unit(std::u32string_view a, std::u32string_view b);

void strip_common_affixes(std::u32string_view& a, std::u32string_view& b);

}  // namespace iebench::detail
