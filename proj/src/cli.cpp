#include "iebench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "iebench/corpus.hpp"
#include "iebench/error.hpp"
#include "iebench/interchange.hpp"
#include "iebench/pipeline.hpp"
#include "iebench/report.hpp"
#include "iebench/text.hpp"

namespace fs = std::filesystem;

namespace iebench {
namespace {

struct IndexArgs {
  std::string gt_root;
  std::string pattern{PageKeyPattern::kDefault};
  std::string out;
  std::size_t jobs = 1;
};

struct EvalArgs {
  std::string index;
  std::string gt_root;
  std::string tool_output;
  std::string adapter_config;
  std::string tool;
  std::vector<std::string> labels;
  double threshold = 0.7;
  int sub_cost = 2;
  bool case_insensitive = false;
  bool nfc = false;
  std::string sample;
  std::string prune_sample;
  std::string pattern{PageKeyPattern::kDefault};
  std::size_t jobs = 1;
  std::string journal;
  std::optional<std::size_t> limit;
};

struct ReportArgs {
  std::vector<std::string> journals;
  std::string format = "csv";
  std::string metric = "f1";
  std::string mean = "processed";
  std::string out;
};

struct ValidateArgs {
  std::string gt_root;
  std::string adapter_config;
  std::string tool_output;
  std::string pattern{PageKeyPattern::kDefault};
};

AdapterConfig load_adapter(const std::string& path, const LabelVocabulary& vocabulary) {
  try {
    return load_adapter_config(path, vocabulary);
  } catch (const JsonParseError& e) {
    throw ConfigError(e.what());
  }
}

int cmd_index(const IndexArgs& args, std::ostream& out, std::ostream& err) {
  const auto vocabulary = LabelVocabulary::defaults();
  const PageKeyPattern pattern(args.pattern);
  IndexOptions options;
  options.pattern = pattern;
  options.parallelism = std::max<std::size_t>(1, args.jobs);
  const CorpusIndex index = index_corpus(args.gt_root, vocabulary, options);
  for (const auto& w : index.warnings) err << "warning: " << w << '\n';
  out << "pages " << index.page_count() << '\n';
  for (const auto& label : vocabulary.labels()) {
    auto it = index.label_presence.find(label);
    out << label.name() << ' ' << (it == index.label_presence.end() ? 0 : it->second.size()) << '\n';
  }
  if (!args.out.empty()) {
    save_index(index, pattern, args.out);
    out << "index written to " << args.out << '\n';
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (!args.labels.empty() && !(args.labels.size() == 1 && args.labels.front() == "all")) {
    config.labels.clear();
    for (const auto& name : args.labels) {
      ContentLabel label(name);
      if (!config.vocabulary.contains(label)) throw ConfigError("unknown label '" + name + "'");
      config.labels.insert(label);
    }
  }
  config.match.threshold = args.threshold;
  config.match.substitution_cost = args.sub_cost;
  config.match.case_sensitive = !args.case_insensitive;
  config.match.normalize_nfc = args.nfc;
  config.match.validate();
  if (!args.sample.empty()) config.sample = MonthRange::parse(args.sample);
  if (!args.prune_sample.empty()) config.prune_sample = MonthRange::parse(args.prune_sample);
  config.pattern = PageKeyPattern(args.pattern);
  config.parallelism = std::max<std::size_t>(1, args.jobs);
  config.adapter = load_adapter(args.adapter_config, config.vocabulary);
  if (!args.tool.empty()) config.adapter.tool = args.tool;
  config.output_root = args.tool_output;
  config.validate();

  std::error_code ec;
  if (!fs::is_directory(config.output_root, ec)) {
    throw IoError("tool-output root is not a readable directory: " + config.output_root.string());
  }

  CorpusIndex index;
  if (!args.index.empty()) {
    index = load_index(args.index);
    config.gt_root = index.root;
  } else {
    if (args.gt_root.empty()) throw ConfigError("eval needs --index or --gt-root");
    config.gt_root = args.gt_root;
    IndexOptions options;
    options.pattern = config.pattern;
    options.parallelism = config.parallelism;
    index = index_corpus(config.gt_root, config.vocabulary, options);
  }

  RunOptions options;
  options.journal = fs::path(args.journal);
  options.limit = args.limit;
  const RunSummary summary = evaluate_run(index, config, options);

  for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
  std::map<UnitStatus, std::size_t> statuses;
  for (const auto& r : summary.results) {
    ++statuses[r.status];
    if (!r.detail.empty() && r.status == UnitStatus::tool_error_artifact) {
      err << "unit " << to_string(r.key) << ' ' << r.label.name() << ": " << r.detail << '\n';
    }
  }
  out << "config_hash " << summary.config_hash << '\n';
  out << "tool " << config.adapter.tool << '\n';
  out << fmt::format("units {} evaluated {} resumed {}{}\n", summary.results.size(), summary.evaluated,
                     summary.resumed, summary.complete ? "" : " (stopped early)");
  out << fmt::format("scored {} tool_output_missing {} tool_error_artifact {}\n", statuses[UnitStatus::scored],
                     statuses[UnitStatus::tool_output_missing], statuses[UnitStatus::tool_error_artifact]);
  for (const auto& p : summary.pruned) {
    out << fmt::format("pruned {} (F1 = 0 on all {} sample units)\n", p.label.name(), p.sample_units);
  }
  return kExitOk;
}

struct LoadedJournals {
  std::vector<UnitResult> results;
  std::vector<ReportSource> sources;
};

LoadedJournals load_journals(const std::vector<std::string>& paths, std::ostream& err) {
  LoadedJournals loaded;
  for (const auto& path : paths) {
    Journal journal;
    try {
      journal = read_journal(path);
    } catch (const JsonParseError& e) {
      throw IoError(e.what());
    }
    if (journal.truncated_tail) err << "warning: " << path << ": ignored a partial trailing line\n";
    if (!journal.header.tool.empty()) {
      loaded.sources.push_back(ReportSource{journal.header.tool, journal.header.config_hash, journal.header.pruned});
    }
    for (auto& r : journal.results) loaded.results.push_back(std::move(r));
  }
  return loaded;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path);
  file << text;
  if (!file) throw IoError("write failed for " + path);
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  const ReportFormat format = report_format_from(args.format);
  const MeanVariant variant = mean_variant_from(args.mean);
  const LoadedJournals loaded = load_journals(args.journals, err);
  const auto rows = aggregate(loaded.results);
  const auto summaries = summarize_tasks(rows, variant);
  write_output(args.out, render_report(rows, summaries, format, loaded.sources, ReportOptions{variant}), out);
  return kExitOk;
}

int cmd_chart(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  const ChartMetric metric = chart_metric_from(args.metric);
  const MeanVariant variant = mean_variant_from(args.mean);
  const LoadedJournals loaded = load_journals(args.journals, err);
  const auto rows = aggregate(loaded.results);
  write_output(args.out, render_bar_chart(rows, summarize_tasks(rows, variant), metric, loaded.sources, variant), out);
  return kExitOk;
}

std::vector<fs::path> gt_files(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("ground-truth root is not a readable directory: " + root.string());
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".txt") files.push_back(it->path());
  }
  if (ec) throw IoError("cannot traverse " + root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.gt_root.empty() && args.adapter_config.empty() && args.tool_output.empty()) {
    throw ConfigError("validate needs --gt-root, --adapter-config or --tool-output");
  }
  const auto vocabulary = LabelVocabulary::defaults();
  const PageKeyPattern pattern(args.pattern);
  std::size_t findings = 0;
  auto report = [&](const std::string& line) {
    ++findings;
    out << line << '\n';
  };

  if (!args.adapter_config.empty()) {
    const std::string text = read_file(args.adapter_config);
    for (const auto& problem : lint_adapter_config(text, vocabulary)) report(args.adapter_config + ": " + problem);
  }

  if (!args.tool_output.empty()) {
    if (args.adapter_config.empty() || args.gt_root.empty()) {
      throw ConfigError("validating --tool-output needs --adapter-config and --gt-root");
    }
    RunConfig config;
    config.adapter = load_adapter(args.adapter_config, vocabulary);
    config.gt_root = args.gt_root;
    config.output_root = args.tool_output;
    config.pattern = pattern;
    IndexOptions options;
    options.pattern = pattern;
    const CorpusIndex index = index_corpus(config.gt_root, vocabulary, options);
    std::size_t missing = 0;
    for (const auto& unit : plan_units(index, config)) {
      const ResolvedOutput resolved = resolve_output(unit, config);
      const std::string where = to_string(unit.key) + " " + unit.label.name();
      if (resolved.status == UnitStatus::tool_output_missing) {
        ++missing;
      } else if (resolved.status == UnitStatus::tool_error_artifact) {
        report(where + ": unreadable output: " + resolved.detail);
      } else if (resolved.record && resolved.record->selector_miss) {
        report(where + ": selector " + config.adapter.selector_for(unit.label).path + " matched nothing in " +
               resolved.record->source_path);
      }
    }
    if (missing) err << "note: " << missing << " units have no tool output\n";
  }

  if (!args.gt_root.empty()) {
    for (const auto& file : gt_files(args.gt_root)) {
      for (const auto& issue : validate_gt_file(file, vocabulary, pattern)) {
        std::string location = file.string();
        if (issue.line) location += ":" + std::to_string(issue.line);
        report(location + ": " + to_string(issue.kind) + ": " + issue.message);
      }
    }
  }

  out << findings << (findings == 1 ? " finding\n" : " findings\n");
  return findings ? kExitFindings : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-level evaluation of PDF information-extraction tools against DocBank-style ground truth",
               "iebench"};
  app.set_version_flag("--version", kHarnessVersion);
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  IndexArgs index_args;
  auto* index = app.add_subcommand("index", "Index a ground-truth corpus and print label counts");
  index->add_option("--gt-root", index_args.gt_root, "Ground-truth directory")->required()->envname("IEBENCH_GT_ROOT");
  index->add_option("--pattern", index_args.pattern, "Regex with (?<doc>) and (?<page>) captures for file names");
  index->add_option("--out", index_args.out, "Write the index as JSON");
  index->add_option("--jobs", index_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score a tool's stored outputs against ground truth");
  auto* eval_index = eval->add_option("--index", eval_args.index, "Index file from `iebench index`");
  eval->add_option("--gt-root", eval_args.gt_root, "Ground-truth directory (instead of --index)")
      ->envname("IEBENCH_GT_ROOT")
      ->excludes(eval_index);
  eval->add_option("--tool-output", eval_args.tool_output, "Directory holding the tool's output files")
      ->required()
      ->envname("IEBENCH_TOOL_OUTPUT");
  eval->add_option("--adapter-config", eval_args.adapter_config, "Adapter config JSON")->required();
  eval->add_option("--tool", eval_args.tool, "Override the tool name from the adapter config");
  eval->add_option("--labels", eval_args.labels, "Comma-separated labels, or `all`")->delimiter(',')->default_str("all");
  eval->add_option("--threshold", eval_args.threshold, "Ratio a token needs to count as matched (inclusive)");
  eval->add_option("--sub-cost", eval_args.sub_cost, "Levenshtein substitution cost (1 or 2)");
  eval->add_flag("--case-insensitive", eval_args.case_insensitive, "Compare case-folded tokens");
  eval->add_flag("--nfc", eval_args.nfc, "NFC-normalize tokens before comparing");
  eval->add_option("--sample", eval_args.sample, "Only evaluate documents from months YYMM:YYMM");
  eval->add_option("--prune-sample", eval_args.prune_sample,
                   "Skip labels scoring F1 = 0 on every unit from months YYMM:YYMM");
  eval->add_option("--pattern", eval_args.pattern, "File-name regex used when indexing --gt-root");
  eval->add_option("--jobs", eval_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--journal", eval_args.journal, "JSON-lines journal; an existing one is resumed")->required();
  eval->add_option("--limit", eval_args.limit, "Stop after scoring this many new units");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Aggregate journals into a per-(tool, label) report");
  report->add_option("--journal", report_args.journals, "Journal files")->required()->always_capture_default(false)->default_str("");
  report->add_option("--format", report_args.format, "csv, json or table");
  report->add_option("--mean", report_args.mean, "Average over `processed` or `detected` units");
  report->add_option("--out", report_args.out, "Output file (default stdout)");

  ReportArgs chart_args;
  chart_args.metric = "f1";
  auto* chart = app.add_subcommand("chart", "Render a grouped SVG bar chart from journals");
  chart->add_option("--journal", chart_args.journals, "Journal files")->required()->always_capture_default(false)->default_str("");
  chart->add_option("--metric", chart_args.metric, "f1, acc, p, r or cumulative_f1");
  chart->add_option("--mean", chart_args.mean, "Average over `processed` or `detected` units");
  chart->add_option("--out", chart_args.out, "SVG output file (default stdout)");

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Strict checks of ground truth, adapter configs or tool outputs");
  validate->add_option("--gt-root", validate_args.gt_root, "Ground-truth directory")->envname("IEBENCH_GT_ROOT");
  validate->add_option("--adapter-config", validate_args.adapter_config, "Adapter config JSON");
  validate->add_option("--tool-output", validate_args.tool_output, "Tool output directory")
      ->envname("IEBENCH_TOOL_OUTPUT");
  validate->add_option("--pattern", validate_args.pattern, "File-name regex for ground-truth pages");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    const int code = app.exit(e, help_out, err);
    out << help_out.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*index) return cmd_index(index_args, out, err);
    if (*eval) return cmd_eval(eval_args, out, err);
    if (*report) return cmd_report(report_args, out, err);
    if (*chart) return cmd_chart(chart_args, out, err);
    if (*validate) return cmd_validate(validate_args, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}

}  // namespace iebench
