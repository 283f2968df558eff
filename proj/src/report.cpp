#include "iebench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "iebench/error.hpp"
#include "iebench/text.hpp"

namespace fs = std::filesystem;

namespace iebench {

const char* to_string(MeanVariant variant) { return variant == MeanVariant::processed ? "processed" : "detected"; }

MeanVariant mean_variant_from(std::string_view name) {
  if (name == "processed") return MeanVariant::processed;
  if (name == "detected") return MeanVariant::detected;
  throw ConfigError("mean variant must be 'processed' or 'detected', got '" + std::string(name) + "'");
}

std::vector<AggregateRow> aggregate(const std::vector<UnitResult>& results) {
  std::map<std::pair<std::string, ContentLabel>, std::vector<const UnitResult*>> groups;
  for (const auto& r : results) groups[{r.tool, r.label}].push_back(&r);

  std::vector<AggregateRow> rows;
  for (auto& [id, members] : groups) {
    // Fixed summation order keeps the means independent of input order.
    std::sort(members.begin(), members.end(), [](const UnitResult* a, const UnitResult* b) {
      return std::tie(a->key, a->scores.f1, a->scores.accuracy, a->scores.precision, a->scores.recall) <
             std::tie(b->key, b->scores.f1, b->scores.accuracy, b->scores.precision, b->scores.recall);
    });
    AggregateRow row;
    row.tool = id.first;
    row.label = id.second;
    Means all;
    Means processed;
    for (const UnitResult* r : members) {
      const auto& s = r->scores;
      ++row.detected;
      all.acc += s.accuracy;
      all.f1 += s.f1;
      all.p += s.precision;
      all.r += s.recall;
      if (s.f1 > 0.0) {
        ++row.processed;
        processed.acc += s.accuracy;
        processed.f1 += s.f1;
        processed.p += s.precision;
        processed.r += s.recall;
      }
    }
    auto divide = [](Means m, std::size_t count) {
      if (count == 0) return Means{};
      const double c = static_cast<double>(count);
      return Means{m.acc / c, m.f1 / c, m.p / c, m.r / c};
    };
    row.over_detected = divide(all, row.detected);
    row.over_processed = divide(processed, row.processed);
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* to_string(Task task) {
  switch (task) {
    case Task::metadata: return "metadata";
    case Task::reference: return "reference";
    case Task::table: return "table";
    case Task::general: return "general";
  }
  return "unknown";
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks{Task::metadata, Task::reference, Task::table, Task::general};
  return tasks;
}

Task task_from(std::string_view name) {
  for (Task t : all_tasks()) {
    if (name == to_string(t)) return t;
  }
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

const std::vector<ContentLabel>& task_labels(Task task) {
  auto make = [](std::initializer_list<const char*> names) {
    std::vector<ContentLabel> out;
    for (const char* n : names) out.emplace_back(n);
    return out;
  };
  static const std::vector<ContentLabel> metadata = make({"title", "abstract", "author"});
  static const std::vector<ContentLabel> reference = make({"reference"});
  static const std::vector<ContentLabel> table = make({"table"});
  static const std::vector<ContentLabel> general =
      make({"paragraph", "section", "caption", "equation", "footer", "list", "figure"});
  switch (task) {
    case Task::metadata: return metadata;
    case Task::reference: return reference;
    case Task::table: return table;
    case Task::general: return general;
  }
  return general;
}

TaskSummary cumulative_f1(const std::vector<AggregateRow>& rows, Task task, const SummaryOptions& options) {
  std::string tool = options.tool;
  if (tool.empty()) {
    std::set<std::string> tools;
    for (const auto& row : rows) tools.insert(row.tool);
    if (tools.size() > 1) throw ConfigError("rows hold several tools; choose one for the task summary");
    if (!tools.empty()) tool = *tools.begin();
  }
  TaskSummary summary;
  summary.tool = tool;
  summary.task = task;
  summary.labels = task_labels(task);
  summary.max_possible = static_cast<double>(summary.labels.size());
  summary.variant = options.variant;
  long long cents = 0;
  for (const auto& label : summary.labels) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) { return r.tool == tool && r.label == label; });
    if (it == rows.end()) continue;
    const double value = it->means(options.variant).f1;
    summary.cumulative_f1_unrounded += value;
    cents += std::llround(round_half_even(value, 2) * 100.0);
  }
  summary.cumulative_f1 = static_cast<double>(cents) / 100.0;
  return summary;
}

std::vector<TaskSummary> summarize_tasks(const std::vector<AggregateRow>& rows, MeanVariant variant) {
  std::set<std::string> tools;
  for (const auto& row : rows) tools.insert(row.tool);
  std::vector<TaskSummary> out;
  for (const auto& tool : tools) {
    for (Task task : all_tasks()) out.push_back(cumulative_f1(rows, task, SummaryOptions{tool, variant}));
  }
  return out;
}

const char* to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::table: return "table";
  }
  return "unknown";
}

ReportFormat report_format_from(std::string_view name) {
  for (auto f : {ReportFormat::csv, ReportFormat::json, ReportFormat::table}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("report format must be csv, json or table, got '" + std::string(name) + "'");
}

namespace {

std::string fixed6(double v) { return format_fixed(v, 6); }

std::string render_csv(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                       const std::vector<ReportSource>& sources, const ReportOptions& options) {
  std::string out = "tool,label,detected,processed,acc,f1,p,r\n";
  for (const auto& row : rows) {
    const Means& m = row.means(options.variant);
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_escape(row.tool), row.label.name(), row.detected,
                       row.processed, fixed6(m.acc), fixed6(m.f1), fixed6(m.p), fixed6(m.r));
  }
  if (rows.empty()) return out;
  out += fmt::format("# harness_version={} mean={}\n", kHarnessVersion, to_string(options.variant));
  for (const auto& source : sources) {
    out += fmt::format("# source tool={} config_hash={}\n", source.tool, source.config_hash);
    for (const auto& p : source.pruned) {
      out += fmt::format("# pruned tool={} label={} sample_units={}\n", source.tool, p.label.name(), p.sample_units);
    }
  }
  for (const auto& s : summaries) {
    out += fmt::format("# cumulative_f1 tool={} task={} value={} unrounded={} max={}\n", s.tool, to_string(s.task),
                       format_fixed(s.cumulative_f1, 2), fixed6(s.cumulative_f1_unrounded),
                       static_cast<int>(s.max_possible));
  }
  return out;
}

std::string json_means(const Means& m) {
  return fmt::format(R"({{"acc":{},"f1":{},"p":{},"r":{}}})", fixed6(m.acc), fixed6(m.f1), fixed6(m.p), fixed6(m.r));
}

std::string render_json(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                        const std::vector<ReportSource>& sources) {
  std::string out = fmt::format("{{\n  \"harness_version\": \"{}\",\n  \"sources\": [", kHarnessVersion);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    std::string pruned;
    for (std::size_t k = 0; k < s.pruned.size(); ++k) {
      if (k) pruned += ",";
      pruned += fmt::format(R"({{"label":"{}","sample_units":{}}})", s.pruned[k].label.name(), s.pruned[k].sample_units);
    }
    out += fmt::format(R"({}{}    {{"tool":"{}","config_hash":"{}","pruned":[{}]}})", i ? "," : "", "\n",
                       json_escape(s.tool), json_escape(s.config_hash), pruned);
  }
  out += sources.empty() ? "],\n" : "\n  ],\n";
  out += "  \"rows\": [";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += fmt::format(
        R"({}{}    {{"tool":"{}","label":"{}","detected":{},"processed":{},"mean_over_processed":{},"mean_over_detected":{}}})",
        i ? "," : "", "\n", json_escape(r.tool), r.label.name(), r.detected, r.processed, json_means(r.over_processed),
        json_means(r.over_detected));
  }
  out += rows.empty() ? "],\n" : "\n  ],\n";
  out += "  \"task_summaries\": [";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    std::string labels;
    for (std::size_t k = 0; k < s.labels.size(); ++k) labels += fmt::format(R"({}"{}")", k ? "," : "", s.labels[k].name());
    out += fmt::format(
        R"({}{}    {{"tool":"{}","task":"{}","labels":[{}],"variant":"{}","cumulative_f1":{},"cumulative_f1_unrounded":{},"max_possible":{}}})",
        i ? "," : "", "\n", json_escape(s.tool), to_string(s.task), labels, to_string(s.variant),
        format_fixed(s.cumulative_f1, 2), fixed6(s.cumulative_f1_unrounded), static_cast<int>(s.max_possible));
  }
  out += summaries.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::string render_table(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                         const ReportOptions& options) {
  std::size_t tool_width = 4;
  for (const auto& r : rows) tool_width = std::max(tool_width, r.tool.size());
  std::string out = fmt::format("{:<{}}  {:<9}  {:>8}  {:>9}  {:>5}  {:>5}  {:>5}  {:>5}\n", "tool", tool_width,
                                "label", "detected", "processed", "acc", "f1", "p", "r");
  for (const auto& r : rows) {
    const Means& m = r.means(options.variant);
    out += fmt::format("{:<{}}  {:<9}  {:>8}  {:>9}  {:>5}  {:>5}  {:>5}  {:>5}\n", r.tool, tool_width, r.label.name(),
                       r.detected, r.processed, format_fixed(m.acc, 2), format_fixed(m.f1, 2), format_fixed(m.p, 2),
                       format_fixed(m.r, 2));
  }
  if (!summaries.empty()) out += "\n";
  for (const auto& s : summaries) {
    out += fmt::format("{:<{}}  {:<9}  cumulative F1 {} / {}\n", s.tool, tool_width, to_string(s.task),
                       format_fixed(s.cumulative_f1, 2), static_cast<int>(s.max_possible));
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string render_report(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                          ReportFormat format, const std::vector<ReportSource>& sources, const ReportOptions& options) {
  switch (format) {
    case ReportFormat::csv: return render_csv(rows, summaries, sources, options);
    case ReportFormat::json: return render_json(rows, summaries, sources);
    case ReportFormat::table: return render_table(rows, summaries, options);
  }
  return {};
}

void emit_report(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                 ReportFormat format, const fs::path& path, const std::vector<ReportSource>& sources,
                 const ReportOptions& options) {
  write_text(path, render_report(rows, summaries, format, sources, options));
}

// ---------------------------------------------------------------------------
// SVG

const char* to_string(ChartMetric metric) {
  switch (metric) {
    case ChartMetric::f1: return "f1";
    case ChartMetric::acc: return "acc";
    case ChartMetric::p: return "p";
    case ChartMetric::r: return "r";
    case ChartMetric::cumulative_f1: return "cumulative_f1";
  }
  return "unknown";
}

ChartMetric chart_metric_from(std::string_view name) {
  for (auto m : {ChartMetric::f1, ChartMetric::acc, ChartMetric::p, ChartMetric::r, ChartMetric::cumulative_f1}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("chart metric must be f1, acc, p, r or cumulative_f1, got '" + std::string(name) + "'");
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Bar {
  std::string tool;
  double value = 0.0;
};

struct Group {
  std::string name;
  std::vector<Bar> bars;
};

constexpr double kLeft = 60.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;
constexpr double kRight = 140.0;
constexpr double kBarWidth = 16.0;
constexpr double kGroupGap = 24.0;

}  // namespace

std::string render_bar_chart(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                             ChartMetric metric, const std::vector<ReportSource>& sources, MeanVariant variant) {
  std::set<std::string> tool_set;
  std::vector<Group> groups;
  double axis_max = 1.0;

  if (metric == ChartMetric::cumulative_f1) {
    std::map<Task, Group> by_task;
    for (const auto& s : summaries) {
      tool_set.insert(s.tool);
      auto& g = by_task[s.task];
      g.name = to_string(s.task);
      g.bars.push_back(Bar{s.tool, s.cumulative_f1});
      axis_max = std::max(axis_max, s.max_possible);
    }
    for (auto& [task, g] : by_task) groups.push_back(std::move(g));
  } else {
    std::map<ContentLabel, Group> by_label;
    for (const auto& r : rows) {
      tool_set.insert(r.tool);
      const Means& m = r.means(variant);
      const double value = metric == ChartMetric::f1 ? m.f1 : metric == ChartMetric::acc ? m.acc
                           : metric == ChartMetric::p ? m.p : m.r;
      auto& g = by_label[r.label];
      g.name = r.label.name();
      g.bars.push_back(Bar{r.tool, value});
    }
    for (auto& [label, g] : by_label) groups.push_back(std::move(g));
  }
  const std::vector<std::string> tools(tool_set.begin(), tool_set.end());
  auto tool_index = [&](const std::string& tool) {
    return static_cast<std::size_t>(std::lower_bound(tools.begin(), tools.end(), tool) - tools.begin());
  };

  const double group_width = std::max<double>(1.0, static_cast<double>(tools.size())) * kBarWidth + kGroupGap;
  const double plot_width = std::max(240.0, static_cast<double>(groups.size()) * group_width);
  const double width = kLeft + plot_width + kRight;
  const double height = kTop + chart::kPlotHeight + kBottom;
  const double baseline = kTop + chart::kPlotHeight;
  auto num = [](double v) { return format_fixed(v, 2); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      num(width), num(height), num(width), num(height));
  out += "<metadata>";
  out += fmt::format("harness_version={} metric={} mean={}", kHarnessVersion, to_string(metric), to_string(variant));
  for (const auto& s : sources) out += fmt::format("; tool={} config_hash={}", xml_escape(s.tool), s.config_hash);
  out += "</metadata>\n";
  out += "<style>text{font-family:sans-serif;font-size:11px}.axis{stroke:#333;stroke-width:1}"
         ".grid{stroke:#ddd;stroke-width:1}</style>\n";
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(kLeft + plot_width / 2),
                     num(kTop / 2), to_string(metric));

  for (int tick = 0; tick <= 4; ++tick) {
    const double fraction = tick / 4.0;
    const double y = baseline - fraction * chart::kPlotHeight;
    out += fmt::format("<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(kLeft), num(y),
                       num(kLeft + plot_width), num(y));
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kLeft - 6), num(y + 4),
                       num(fraction * axis_max));
  }
  out += fmt::format("<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(kLeft), num(kTop),
                     num(kLeft), num(baseline));
  out += fmt::format("<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(kLeft), num(baseline),
                     num(kLeft + plot_width), num(baseline));

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double group_x = kLeft + kGroupGap / 2 + static_cast<double>(g) * group_width;
    out += fmt::format("<g class=\"group\" data-label=\"{}\">\n", xml_escape(groups[g].name));
    for (const auto& bar : groups[g].bars) {
      const std::size_t t = tool_index(bar.tool);
      const double value = std::clamp(bar.value, 0.0, axis_max);
      const double h = value / axis_max * chart::kPlotHeight;
      out += fmt::format(
          "<rect class=\"bar\" data-tool=\"{}\" data-label=\"{}\" data-value=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" "
          "height=\"{}\" fill=\"{}\"/>\n",
          xml_escape(bar.tool), xml_escape(groups[g].name), format_fixed(bar.value, 6),
          num(group_x + static_cast<double>(t) * kBarWidth), num(baseline - h), num(kBarWidth), num(h),
          chart::kPalette[t % std::size(chart::kPalette)]);
    }
    const double label_x = group_x + static_cast<double>(std::max<std::size_t>(1, tools.size())) * kBarWidth / 2;
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(label_x), num(baseline + 16),
                       xml_escape(groups[g].name));
    out += "</g>\n";
  }

  for (std::size_t t = 0; t < tools.size(); ++t) {
    const double y = kTop + static_cast<double>(t) * 18.0;
    const double x = kLeft + plot_width + 16;
    out += fmt::format("<rect class=\"legend\" x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", num(x),
                       num(y), chart::kPalette[t % std::size(chart::kPalette)]);
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(x + 14), num(y + 9), xml_escape(tools[t]));
  }
  out += "</svg>\n";
  return out;
}

void emit_bar_chart(const std::vector<AggregateRow>& rows, const std::vector<TaskSummary>& summaries,
                    ChartMetric metric, const fs::path& path, const std::vector<ReportSource>& sources,
                    MeanVariant variant) {
  write_text(path, render_bar_chart(rows, summaries, metric, sources, variant));
}

}  // namespace iebench
