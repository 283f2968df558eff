#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "iebench/corpus.hpp"

namespace iebench {

/// One tool's normalized output for one label on one page, or on a whole
/// document when `page` is empty.
struct ExtractionRecord {
  std::string tool;
  std::string document_id;
  std::optional<int> page;
  ContentLabel label{"paragraph"};
  /// Whitespace-free tokens in the tool's emission order.
  std::vector<std::string> tokens;
  /// Token counts of the collation units (matched elements, strings, rows,
  /// lines) that make up `tokens`, in order. Sums to tokens.size().
  std::vector<std::size_t> unit_sizes;
  std::string source_path;
  /// The selector matched nothing in an otherwise readable file.
  bool selector_miss = false;
  std::size_t replaced_bytes = 0;

  /// Appends one collation unit; empty units are dropped.
  void add_unit(std::vector<std::string> unit_tokens);
  std::vector<std::vector<std::string>> units() const;

  friend bool operator==(const ExtractionRecord&, const ExtractionRecord&) = default;
};

}  // namespace iebench
