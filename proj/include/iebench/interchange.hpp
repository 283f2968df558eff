#pragma once

// Adapters that turn stored tool outputs (XML, JSON, CSV, plain text, or the
// canonical JSON-lines dump) into labeled ExtractionRecords.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iebench/corpus.hpp"
#include "iebench/metrics.hpp"
#include "iebench/record.hpp"

namespace iebench {

enum class AdapterFormat { xml, json, csv, text, records };
enum class OutputScope { page, document };

const char* to_string(AdapterFormat format);
const char* to_string(OutputScope scope);

/// Selector semantics depend on the adapter format:
///   xml      element path, e.g. `//listBibl/biblStruct` or `/TEI/teiHeader//title`
///   json     dotted path; arrays are mapped over. `text_field` picks a member
///            of each object reached, e.g. path `authors`, text_field `name`
///   csv      `*` (whole table)
///   text     `all`, `lines:A-B`, or `lines:A-` (1-based, inclusive)
///   records  ignored; records are filtered by document, page and label
struct Selector {
  std::string path;
  std::string text_field;

  friend bool operator==(const Selector&, const Selector&) = default;
};

constexpr int kAdapterFormatVersion = 1;

struct AdapterConfig {
  int format_version = kAdapterFormatVersion;
  std::string tool;
  AdapterFormat format = AdapterFormat::json;
  OutputScope scope = OutputScope::page;
  /// Relative to the tool-output root; `{doc}` and `{page}` are substituted.
  /// A `*` in the final component matches several files, read in name order.
  std::string path_template;
  std::map<ContentLabel, Selector> selectors;

  const Selector& selector_for(const ContentLabel& label) const;
  /// Canonical JSON text; stable across runs and used for the config hash.
  std::string canonical_json() const;
};

/// Parses an adapter config document. Throws ConfigError (or JsonParseError
/// for invalid JSON) on the first problem found.
AdapterConfig parse_adapter_config(std::string_view json_text, const LabelVocabulary& vocabulary);
AdapterConfig load_adapter_config(const std::filesystem::path& path, const LabelVocabulary& vocabulary);

/// Lists every problem in an adapter config document, including duplicate
/// label keys and selectors shared between labels.
std::vector<std::string> lint_adapter_config(std::string_view json_text, const LabelVocabulary& vocabulary);

/// Source text plus identity for one adapter invocation.
struct AdapterInput {
  std::string content;
  std::string source_path;
  std::string document_id;
  std::optional<int> page;
  std::size_t replacements = 0;
};

AdapterInput read_adapter_input(const std::filesystem::path& path, std::string document_id, std::optional<int> page);

// Text-level adapters. Each returns a record whose selector_miss flag is set
// when nothing matched.

ExtractionRecord extract_xml(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                             std::string_view tool);
ExtractionRecord extract_json(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                              std::string_view tool);
ExtractionRecord extract_table_csv(const AdapterInput& input, std::string_view tool);
ExtractionRecord extract_plaintext(const AdapterInput& input, const Selector& selector, const ContentLabel& label,
                                   std::string_view tool);
ExtractionRecord extract_records(const AdapterInput& input, const ContentLabel& label, std::string_view tool);

// File-level adapters over an AdapterConfig.

ExtractionRecord parse_xml_extraction(const std::filesystem::path& file, const AdapterConfig& config,
                                      const ContentLabel& label, const std::string& document_id,
                                      std::optional<int> page = std::nullopt);
ExtractionRecord parse_json_extraction(const std::filesystem::path& file, const AdapterConfig& config,
                                       const ContentLabel& label, const std::string& document_id,
                                       std::optional<int> page = std::nullopt);
ExtractionRecord parse_table_csv(const std::filesystem::path& file, const std::string& tool = {},
                                 const std::string& document_id = {}, std::optional<int> page = std::nullopt);
ExtractionRecord parse_plaintext(const std::filesystem::path& file, const AdapterConfig& config,
                                 const ContentLabel& label, const std::string& document_id,
                                 std::optional<int> page = std::nullopt);

/// Dispatches on config.format.
ExtractionRecord run_adapter(const AdapterInput& input, const AdapterConfig& config, const ContentLabel& label);

std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Keeps the collation units of `record` whose best ratio against any
/// same-length window of the collated ground truth reaches the threshold.
ExtractionRecord restrict_to_ground_truth(const ExtractionRecord& record, const TokenSequence& gt_tokens,
                                          const MatchConfig& config = {});

/// Canonical interchange dump: one JSON object per line with fields
/// tool, doc, page (null for document scope), label, tokens.
std::string to_jsonl(const ExtractionRecord& record);
void write_records_jsonl(const std::vector<ExtractionRecord>& records, const std::filesystem::path& path);

}  // namespace iebench
