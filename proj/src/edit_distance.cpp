#include "edit_distance_impl.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace iebench::detail {

LcsPattern::LcsPattern(std::u32string_view pattern) : length_(pattern.size()), words_((pattern.size() + 63) / 64) {
  ascii_.assign(kAsciiSize * words_, 0);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const uint64_t bit = uint64_t{1} << (i % 64);
    const std::size_t word = i / 64;
    const char32_t c = pattern[i];
    if (c < kAsciiSize) {
      ascii_[c * words_ + word] |= bit;
    } else {
      auto& masks = other_[c];
      if (masks.empty()) masks.assign(words_, 0);
      masks[word] |= bit;
    }
  }
}

const uint64_t* LcsPattern::masks(char32_t c) const {
  if (c < kAsciiSize) return &ascii_[c * words_];
  auto it = other_.find(c);
  return it == other_.end() ? nullptr : it->second.data();
}

std::size_t LcsPattern::lcs(std::u32string_view text, std::vector<uint64_t>& state) const {
  if (length_ == 0 || text.empty()) return 0;
  if (words_ == 1) {
    uint64_t s = ~uint64_t{0};
    for (char32_t c : text) {
      const uint64_t* m = masks(c);
      if (!m) continue;
      const uint64_t u = s & m[0];
      s = (s + u) | (s - u);
    }
    const uint64_t used = length_ == 64 ? ~uint64_t{0} : (uint64_t{1} << length_) - 1;
    return static_cast<std::size_t>(std::popcount(~s & used));
  }

  state.assign(words_, ~uint64_t{0});
  for (char32_t c : text) {
    const uint64_t* m = masks(c);
    if (!m) continue;
    uint64_t carry = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      const uint64_t s = state[w];
      const uint64_t u = s & m[w];
      const uint64_t sum = s + u;
      const uint64_t total = sum + carry;
      carry = (sum < s) | (total < sum);
      state[w] = total | (s - u);
    }
  }
  std::size_t count = 0;
  for (std::size_t w = 0; w < words_; ++w) {
    uint64_t used = ~uint64_t{0};
    const std::size_t bits = std::min<std::size_t>(64, length_ - w * 64);
    if (bits < 64) used = (uint64_t{1} << bits) - 1;
    count += static_cast<std::size_t>(std::popcount(~state[w] & used));
  }
  return count;
}

std::size_t levenshtein_unit(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
      diagonal = above;
    }
  }
  return row[b.size()];
}

void strip_common_affixes(std::u32string_view& a, std::u32string_view& b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  a.remove_prefix(prefix);
  b.remove_prefix(prefix);
  std::size_t suffix = 0;
  while (suffix < a.size() && suffix < b.size() && a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) ++suffix;
  a.remove_suffix(suffix);
  b.remove_suffix(suffix);
}

}  // namespace iebench::detail
