#pragma once

// Corpus-scale evaluation: every (page, label) unit present in the ground
// truth is paired with the tool's stored output and scored. Results are
// appended to a JSON-lines journal so interrupted runs can resume.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iebench/corpus.hpp"
#include "iebench/interchange.hpp"
#include "iebench/metrics.hpp"
#include "iebench/record.hpp"

namespace iebench {

inline constexpr const char* kHarnessVersion = "0.1.0";
constexpr int kJournalVersion = 1;

struct RunConfig {
  LabelVocabulary vocabulary = LabelVocabulary::defaults();
  std::set<ContentLabel> labels = vocabulary.labels();
  MatchConfig match;
  std::filesystem::path gt_root;
  std::filesystem::path output_root;
  AdapterConfig adapter;
  std::optional<MonthRange> sample;
  /// Pre-pass sample for zero-output pruning; unset disables pruning.
  std::optional<MonthRange> prune_sample;
  std::size_t parallelism = 1;
  PageKeyPattern pattern;

  /// Throws ConfigError.
  void validate() const;
  /// Requested labels the adapter has a selector for, in label order.
  std::vector<ContentLabel> effective_labels() const;
};

/// Hash over everything that affects scores: adapter, labels, match
/// settings, samples and file-name pattern. Roots and worker count are excluded.
std::string config_hash(const RunConfig& config);

struct EvaluationUnit {
  PageKey key;
  ContentLabel label{"paragraph"};
  TokenSequence gt_tokens;
  std::optional<ExtractionRecord> extracted;
};

enum class UnitStatus { scored, tool_output_missing, tool_error_artifact };

const char* to_string(UnitStatus status);
UnitStatus unit_status_from(std::string_view name);

struct UnitResult {
  std::string tool;
  PageKey key;
  ContentLabel label{"paragraph"};
  DocumentScores scores;
  UnitStatus status = UnitStatus::scored;
  /// Diagnostic for failed units; not journaled.
  std::string detail;

  friend bool operator==(const UnitResult& a, const UnitResult& b);
};

/// One unit per (page, label) present in the parsed ground truth, restricted
/// to the month sample and the effective labels. Sorted by key, then label.
std::vector<EvaluationUnit> plan_units(const CorpusIndex& index, const RunConfig& config);

struct ResolvedOutput {
  UnitStatus status = UnitStatus::tool_output_missing;
  std::optional<ExtractionRecord> record;
  std::string detail;
};

/// Output files for a unit: the path template expanded under output_root,
/// with a `*` in the final component globbed and sorted by name.
std::vector<std::filesystem::path> output_files(const PageKey& key, const RunConfig& config);

/// Locates and parses the tool output for `unit`. Document-scope output is
/// restricted to the units that match this page's ground truth.
ResolvedOutput resolve_output(const EvaluationUnit& unit, const RunConfig& config);

/// Resolves and scores one unit. Missing or unreadable output scores zero.
UnitResult evaluate_unit(const EvaluationUnit& unit, const RunConfig& config);

struct PrunedLabel {
  ContentLabel label{"paragraph"};
  std::size_t sample_units = 0;
};

struct JournalHeader {
  int journal_version = kJournalVersion;
  std::string tool;
  std::string config_hash;
  std::string harness_version = kHarnessVersion;
  std::vector<PrunedLabel> pruned;
};

std::string format_journal_header(const JournalHeader& header);
JournalHeader parse_journal_header(std::string_view line);
/// Fields doc, page, label, status, p, r, f1, acc, m, n; 6 decimals, half-even.
std::string format_journal_line(const UnitResult& result);
UnitResult parse_journal_line(std::string_view line, const std::string& tool);

struct Journal {
  JournalHeader header;
  std::vector<UnitResult> results;
  /// A trailing partial line (interrupted write) was ignored.
  bool truncated_tail = false;
};

/// Throws IoError if unreadable, JsonParseError on a corrupt line other than the last.
Journal read_journal(const std::filesystem::path& path);

struct RunOptions {
  /// Results are appended here; an existing journal is resumed.
  std::optional<std::filesystem::path> journal;
  /// Stop after scoring this many new units (the journal stays resumable).
  std::optional<std::size_t> limit;
  /// Pages evaluated together between journal flushes.
  std::size_t batch_pages = 64;
  std::function<void(const UnitResult&)> on_result;
};

struct RunSummary {
  std::vector<UnitResult> results;
  std::size_t resumed = 0;
  std::size_t evaluated = 0;
  bool complete = true;
  std::string config_hash;
  std::vector<PrunedLabel> pruned;
  std::vector<std::string> warnings;
};

/// Evaluates every planned unit in deterministic order. Throws IoError when
/// the ground-truth root is unreadable and ConfigError on an invalid config or
/// a journal written under a different config.
RunSummary evaluate_run(const RunConfig& config, const RunOptions& options = {});
RunSummary evaluate_run(const CorpusIndex& index, const RunConfig& config, const RunOptions& options = {});

}  // namespace iebench
