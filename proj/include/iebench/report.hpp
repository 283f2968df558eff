#pragma once

// Per-(tool, label) aggregates, cumulative F1 task summaries, and their CSV,
// JSON, text-table and SVG renderings. All output is byte-deterministic.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "iebench/corpus.hpp"
#include "iebench/pipeline.hpp"

namespace iebench {

/// Which units a mean is taken over: units with non-zero F1, or all detected units.
enum class MeanVariant { processed, detected };

const char* to_string(MeanVariant variant);
MeanVariant mean_variant_from(std::string_view name);

struct Means {
  double acc = 0.0;
  double f1 = 0.0;
  double p = 0.0;
  double r = 0.0;
};

struct AggregateRow {
  std::string tool;
  ContentLabel label{"paragraph"};
  std::size_t detected = 0;
  /// Units with f1 > 0.
  std::size_t processed = 0;
  Means over_processed;
  Means over_detected;

  const Means& means(MeanVariant variant) const {
    return variant == MeanVariant::processed ? over_processed : over_detected;
  }
};

/// Groups by (tool, label); rows sorted by tool, then label. Order of
/// `results` does not matter.
std::vector<AggregateRow> aggregate(const std::vector<UnitResult>& results);

enum class Task { metadata, reference, table, general };

const char* to_string(Task task);
Task task_from(std::string_view name);
const std::vector<ContentLabel>& task_labels(Task task);
const std::vector<Task>& all_tasks();

struct TaskSummary {
  std::string tool;
  Task task = Task::metadata;
  std::vector<ContentLabel> labels;
  /// Sum of per-label mean F1, each rounded to 2 decimals first.
  double cumulative_f1 = 0.0;
  double cumulative_f1_unrounded = 0.0;
  double max_possible = 0.0;
  MeanVariant variant = MeanVariant::processed;
};

struct SummaryOptions {
  /// Empty selects the only tool present in `rows`.
  std::string tool;
  MeanVariant variant = MeanVariant::processed;
};

/// Labels without a row contribute 0. Throws ConfigError when `tool` is empty
/// and `rows` hold more than one tool.
TaskSummary cumulative_f1(const std::vector<AggregateRow>& rows, Task task, const SummaryOptions& options = {});

/// Every task for every tool in `rows`, ordered by tool, then task.
std::vector<TaskSummary> summarize_tasks(const std::vector<AggregateRow>& rows,
                                         MeanVariant variant = MeanVariant::processed);

/// Provenance for one journal feeding a report.
struct ReportSource {
  std::string tool;
  std::string config_hash;
  std::vector<PrunedLabel> pruned;
};

enum class ReportFormat { csv, json, table };

const char* to_string(ReportFormat format);
ReportFormat report_format_from(std::string_view name);

struct ReportOptions {
  /// Means written to the acc, f1, p, r columns of CSV and table output.
  MeanVariant variant = MeanVariant::processed;
};

/// CSV columns: tool,label,detected,processed,acc,f1,p,r (6 decimals).
/// Provenance and task summaries follow as `#` comment lines when rows exist.
std::string render_report(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                          ReportFormat format, const std::vector<ReportSource>& sources = {},
                          const ReportOptions& options = {});

void emit_report(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                 ReportFormat format, const std::filesystem::path& path, const std::vector<ReportSource>& sources = {},
                 const ReportOptions& options = {});

enum class ChartMetric { f1, acc, p, r, cumulative_f1 };

const char* to_string(ChartMetric metric);
/// Throws ConfigError for anything but f1, acc, p, r, cumulative_f1.
ChartMetric chart_metric_from(std::string_view name);

namespace chart {
inline constexpr double kPlotHeight = 300.0;
/// Bar colors by tool position (tools sorted by name).
inline constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                           "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
}  // namespace chart

/// Grouped bars: one group per label (per task for cumulative_f1), one bar
/// per tool. Each bar is a `<rect class="bar">` carrying data-tool and
/// data-label attributes; height is value / axis maximum * plot height.
std::string render_bar_chart(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                             ChartMetric metric, const std::vector<ReportSource>& sources = {},
                             MeanVariant variant = MeanVariant::processed);

void emit_bar_chart(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                    ChartMetric metric, const std::filesystem::path& path,
                    const std::vector<ReportSource>& sources = {}, MeanVariant variant = MeanVariant::processed);

}  // namespace iebench
