#include "iebench/pipeline.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iebench/error.hpp"
#include "iebench/parallel.hpp"
#include "iebench/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace iebench {

void RunConfig::validate() const {
  if (labels.empty()) throw ConfigError("at least one label is required");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  for (const auto& label : labels) {
    if (!vocabulary.contains(label)) throw ConfigError("label '" + label.name() + "' is not in the label vocabulary");
  }
  match.validate();
  if (adapter.tool.empty()) throw ConfigError("adapter config has no tool name");
  if (effective_labels().empty()) throw ConfigError("adapter '" + adapter.tool + "' maps none of the requested labels");
}

std::vector<ContentLabel> RunConfig::effective_labels() const {
  std::vector<ContentLabel> out;
  for (const auto& label : labels) {
    if (adapter.selectors.contains(label)) out.push_back(label);
  }
  return out;
}

namespace {

std::string month_range_text(const std::optional<MonthRange>& range) {
  if (!range) return "";
  return fmt::format("{:04d}:{:04d}", range->from, range->to);
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  ordered_json doc;
  doc["adapter"] = ordered_json::parse(config.adapter.canonical_json());
  ordered_json labels = ordered_json::array();
  for (const auto& label : config.labels) labels.push_back(label.name());
  doc["labels"] = std::move(labels);
  doc["match"] = {{"threshold", fmt::format("{:.17g}", config.match.threshold)},
                  {"substitution_cost", config.match.substitution_cost},
                  {"case_sensitive", config.match.case_sensitive},
                  {"normalize_nfc", config.match.normalize_nfc}};
  doc["sample"] = month_range_text(config.sample);
  doc["prune_sample"] = month_range_text(config.prune_sample);
  doc["pattern"] = config.pattern.expression();
  return fnv1a_hex(doc.dump());
}

const char* to_string(UnitStatus status) {
  switch (status) {
    case UnitStatus::scored: return "scored";
    case UnitStatus::tool_output_missing: return "tool_output_missing";
    case UnitStatus::tool_error_artifact: return "tool_error_artifact";
  }
  return "unknown";
}

UnitStatus unit_status_from(std::string_view name) {
  for (auto s : {UnitStatus::scored, UnitStatus::tool_output_missing, UnitStatus::tool_error_artifact}) {
    if (name == to_string(s)) return s;
  }
  throw JsonParseError("unknown unit status '" + std::string(name) + "'");
}

bool operator==(const UnitResult& a, const UnitResult& b) {
  const auto& x = a.scores;
  const auto& y = b.scores;
  return a.tool == b.tool && a.key == b.key && a.label == b.label && a.status == b.status &&
         x.precision == y.precision && x.recall == y.recall && x.f1 == y.f1 && x.accuracy == y.accuracy &&
         x.m == y.m && x.n == y.n;
}

// ---------------------------------------------------------------------------
// Planning

namespace {

std::vector<PageKey> pages_in(const CorpusIndex& index, const std::optional<MonthRange>& sample,
                              std::vector<std::string>* warnings) {
  std::vector<PageKey> pages;
  if (sample) {
    for (const auto& key : sample_by_month(index, *sample, warnings)) pages.push_back(key);
  } else {
    for (const auto& [key, path] : index.entries) pages.push_back(key);
  }
  return pages;
}

TokenSequence gt_tokens_of(const GroundTruthPage& page, const ContentLabel& label) {
  std::vector<std::string> tokens;
  for (const auto& text : page.texts(label)) {
    for (auto& t : tokenize(text)) tokens.push_back(std::move(t));
  }
  return TokenSequence(std::move(tokens));
}

// Units of one page for the given labels, in label order.
std::vector<EvaluationUnit> page_units(const CorpusIndex& index, const PageKey& key,
                                       const std::vector<ContentLabel>& labels, const RunConfig& config) {
  const auto present = index.labels_of(key);
  if (std::none_of(labels.begin(), labels.end(), [&](const auto& l) { return present.contains(l); })) return {};
  PageParseOptions options;
  options.pattern = config.pattern;
  const GroundTruthPage page = parse_gt_page(index.entries.at(key), config.vocabulary, options);
  std::vector<EvaluationUnit> units;
  for (const auto& label : labels) {
    TokenSequence tokens = gt_tokens_of(page, label);
    if (tokens.empty()) continue;
    units.push_back(EvaluationUnit{key, label, std::move(tokens), std::nullopt});
  }
  return units;
}

}  // namespace

std::vector<EvaluationUnit> plan_units(const CorpusIndex& index, const RunConfig& config) {
  config.validate();
  const auto labels = config.effective_labels();
  std::vector<EvaluationUnit> units;
  for (const auto& key : pages_in(index, config.sample, nullptr)) {
    for (auto& unit : page_units(index, key, labels, config)) units.push_back(std::move(unit));
  }
  return units;
}

// ---------------------------------------------------------------------------
// Output resolution

namespace {

std::string expand_template(std::string text, const PageKey& key) {
  auto replace_all = [&](std::string_view from, const std::string& to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
      text.replace(pos, from.size(), to);
    }
  };
  replace_all("{doc}", key.document_id);
  replace_all("{page}", std::to_string(key.page_index));
  return text;
}

void merge_into(ExtractionRecord& target, ExtractionRecord&& part, bool first) {
  if (first) {
    target = std::move(part);
    return;
  }
  for (const auto& unit : part.units()) target.add_unit(unit);
  target.selector_miss = target.selector_miss && part.selector_miss;
  target.replaced_bytes += part.replaced_bytes;
  target.source_path += ";" + part.source_path;
}

}  // namespace

std::vector<fs::path> output_files(const PageKey& key, const RunConfig& config) {
  const fs::path relative = expand_template(config.adapter.path_template, key);
  const fs::path full = config.output_root / relative;
  const std::string name = full.filename().string();
  std::error_code ec;
  if (name.find_first_of("*?[") == std::string::npos) {
    if (fs::is_regular_file(full, ec)) return {full};
    return {};
  }
  std::vector<fs::path> matches;
  const fs::path parent = full.parent_path();
  if (!fs::is_directory(parent, ec)) return {};
  for (auto it = fs::directory_iterator(parent, ec); !ec && it != fs::directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file(ec)) continue;
    if (::fnmatch(name.c_str(), it->path().filename().c_str(), 0) == 0) matches.push_back(it->path());
  }
  if (ec) throw IoError("cannot list " + parent.string() + ": " + ec.message());
  std::sort(matches.begin(), matches.end());
  return matches;
}

ResolvedOutput resolve_output(const EvaluationUnit& unit, const RunConfig& config) {
  ResolvedOutput out;
  try {
    const auto files = output_files(unit.key, config);
    if (files.empty()) {
      out.status = UnitStatus::tool_output_missing;
      out.detail = "no output at " + expand_template(config.adapter.path_template, unit.key);
      return out;
    }
    const bool document_scope = config.adapter.scope == OutputScope::document;
    const std::optional<int> page = document_scope ? std::nullopt : std::optional<int>(unit.key.page_index);
    ExtractionRecord record;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const AdapterInput input = read_adapter_input(files[i], unit.key.document_id, page);
      merge_into(record, run_adapter(input, config.adapter, unit.label), i == 0);
    }
    if (document_scope) {
      record = restrict_to_ground_truth(record, unit.gt_tokens, config.match);
      record.page = unit.key.page_index;
    }
    out.status = UnitStatus::scored;
    out.record = std::move(record);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.status = UnitStatus::tool_error_artifact;
    out.detail = e.what();
  } catch (const std::invalid_argument& e) {
    out.status = UnitStatus::tool_error_artifact;
    out.detail = e.what();
  }
  return out;
}

UnitResult evaluate_unit(const EvaluationUnit& unit, const RunConfig& config) {
  UnitResult result;
  result.tool = config.adapter.tool;
  result.key = unit.key;
  result.label = unit.label;

  std::optional<ExtractionRecord> record = unit.extracted;
  if (!record) {
    ResolvedOutput resolved = resolve_output(unit, config);
    result.status = resolved.status;
    result.detail = std::move(resolved.detail);
    record = std::move(resolved.record);
  }
  if (result.status == UnitStatus::scored && record) {
    result.scores = score_tokens(TokenSequence(record->tokens), unit.gt_tokens, config.match);
  } else {
    result.scores.n = unit.gt_tokens.size();
    result.scores.empty_extraction = true;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Journal

std::string format_journal_header(const JournalHeader& header) {
  ordered_json doc;
  doc["journal_version"] = header.journal_version;
  doc["tool"] = header.tool;
  doc["config_hash"] = header.config_hash;
  doc["harness_version"] = header.harness_version;
  ordered_json pruned = ordered_json::array();
  for (const auto& p : header.pruned) pruned.push_back({{"label", p.label.name()}, {"sample_units", p.sample_units}});
  doc["pruned"] = std::move(pruned);
  return doc.dump();
}

JournalHeader parse_journal_header(std::string_view line) {
  try {
    const json doc = json::parse(line);
    JournalHeader header;
    header.journal_version = doc.at("journal_version").get<int>();
    if (header.journal_version != kJournalVersion) {
      throw JsonParseError(fmt::format("unsupported journal_version {}", header.journal_version));
    }
    header.tool = doc.at("tool").get<std::string>();
    header.config_hash = doc.at("config_hash").get<std::string>();
    header.harness_version = doc.value("harness_version", "");
    for (const auto& p : doc.value("pruned", json::array())) {
      header.pruned.push_back(PrunedLabel{ContentLabel(p.at("label").get<std::string>()), p.at("sample_units").get<std::size_t>()});
    }
    return header;
  } catch (const json::exception& e) {
    throw JsonParseError(std::string("bad journal header: ") + e.what());
  }
}

std::string format_journal_line(const UnitResult& r) {
  const auto& s = r.scores;
  return fmt::format(R"({{"doc":"{}","page":{},"label":"{}","status":"{}","p":{},"r":{},"f1":{},"acc":{},"m":{},"n":{}}})",
                     json_escape(r.key.document_id), r.key.page_index, r.label.name(), to_string(r.status),
                     format_fixed(s.precision, 6), format_fixed(s.recall, 6), format_fixed(s.f1, 6),
                     format_fixed(s.accuracy, 6), s.m, s.n);
}

UnitResult parse_journal_line(std::string_view line, const std::string& tool) {
  try {
    const json doc = json::parse(line);
    UnitResult r;
    r.tool = tool;
    r.key = PageKey{doc.at("doc").get<std::string>(), doc.at("page").get<int>()};
    r.label = ContentLabel(doc.at("label").get<std::string>());
    r.status = unit_status_from(doc.at("status").get<std::string>());
    r.scores.precision = doc.at("p").get<double>();
    r.scores.recall = doc.at("r").get<double>();
    r.scores.f1 = doc.at("f1").get<double>();
    r.scores.accuracy = doc.at("acc").get<double>();
    r.scores.m = doc.at("m").get<std::size_t>();
    r.scores.n = doc.at("n").get<std::size_t>();
    r.scores.empty_extraction = r.scores.m == 0;
    r.scores.empty_ground_truth = r.scores.n == 0;
    return r;
  } catch (const json::exception& e) {
    throw JsonParseError(std::string("bad journal line: ") + e.what());
  } catch (const ConfigError& e) {
    throw JsonParseError(std::string("bad journal line: ") + e.what());
  }
}

namespace {

struct JournalScan {
  Journal journal;
  bool has_header = false;
  std::uintmax_t complete_bytes = 0;
};

JournalScan scan_journal(const fs::path& path) {
  const std::string content = read_file(path.string());
  JournalScan scan;
  std::size_t start = 0;
  std::size_t number = 0;
  while (start < content.size()) {
    const auto end = content.find('\n', start);
    if (end == std::string::npos) {
      scan.journal.truncated_tail = true;
      break;
    }
    ++number;
    const std::string_view line(content.data() + start, end - start);
    start = end + 1;
    if (trim(line).empty()) {
      scan.complete_bytes = start;
      continue;
    }
    try {
      if (!scan.has_header) {
        scan.journal.header = parse_journal_header(line);
        scan.has_header = true;
      } else {
        scan.journal.results.push_back(parse_journal_line(line, scan.journal.header.tool));
      }
    } catch (const JsonParseError& e) {
      throw JsonParseError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
    scan.complete_bytes = start;
  }
  return scan;
}

}  // namespace

Journal read_journal(const fs::path& path) {
  JournalScan scan = scan_journal(path);
  if (!scan.has_header && scan.complete_bytes > 0) throw JsonParseError(path.string() + ": journal has no header");
  return std::move(scan.journal);
}

// ---------------------------------------------------------------------------
// Runs

namespace {

using UnitId = std::pair<PageKey, ContentLabel>;

// Evaluates all units on `pages`, in page order then label order.
std::vector<UnitResult> evaluate_pages(const CorpusIndex& index, const std::vector<PageKey>& pages,
                                       const std::vector<ContentLabel>& labels, const RunConfig& config,
                                       const std::map<UnitId, UnitResult>& done, std::vector<std::string>& warnings) {
  std::vector<std::vector<UnitResult>> per_page(pages.size());
  std::vector<std::string> page_warnings(pages.size());
  parallel_for(pages.size(), config.parallelism, [&](std::size_t i) {
    const PageKey& key = pages[i];
    // Skip parsing when the index shows every unit of the page is journaled.
    const auto present = index.labels_of(key);
    const bool all_done = std::all_of(labels.begin(), labels.end(), [&](const ContentLabel& label) {
      return !present.contains(label) || done.contains({key, label});
    });
    if (all_done) {
      for (const auto& label : labels) {
        if (auto it = done.find({key, label}); it != done.end()) per_page[i].push_back(it->second);
      }
      return;
    }
    std::vector<EvaluationUnit> units;
    try {
      units = page_units(index, key, labels, config);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      page_warnings[i] = "skipping ground-truth page " + to_string(key) + ": " + e.what();
      return;
    }
    for (const auto& unit : units) {
      if (auto it = done.find({unit.key, unit.label}); it != done.end()) {
        per_page[i].push_back(it->second);
      } else {
        per_page[i].push_back(evaluate_unit(unit, config));
      }
    }
  });
  std::vector<UnitResult> out;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (!page_warnings[i].empty()) warnings.push_back(std::move(page_warnings[i]));
    for (auto& r : per_page[i]) out.push_back(std::move(r));
  }
  return out;
}

std::vector<PrunedLabel> prune_labels(const CorpusIndex& index, const RunConfig& config,
                                      std::vector<std::string>& warnings) {
  const auto labels = config.effective_labels();
  const auto pages = pages_in(index, config.prune_sample, &warnings);
  const auto results = evaluate_pages(index, pages, labels, config, {}, warnings);
  std::map<ContentLabel, std::pair<std::size_t, bool>> stats;  // units, any nonzero F1
  for (const auto& r : results) {
    auto& s = stats[r.label];
    ++s.first;
    s.second = s.second || r.scores.f1 > 0.0;
  }
  std::vector<PrunedLabel> pruned;
  for (const auto& [label, s] : stats) {
    if (s.first > 0 && !s.second) pruned.push_back(PrunedLabel{label, s.first});
  }
  return pruned;
}

class JournalWriter {
 public:
  JournalWriter(const fs::path& path, std::uintmax_t keep_bytes) {
    std::error_code ec;
    if (fs::exists(path, ec) && fs::file_size(path, ec) != keep_bytes) fs::resize_file(path, keep_bytes, ec);
    if (ec) throw IoError("cannot truncate journal " + path.string() + ": " + ec.message());
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot open journal " + path.string());
    path_ = path.string();
  }

  void write_line(const std::string& line) { out_ << line << '\n'; }

  void flush() {
    out_.flush();
    if (!out_) throw IoError("write failed for journal " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace

RunSummary evaluate_run(const RunConfig& config, const RunOptions& options) {
  config.validate();
  IndexOptions index_options;
  index_options.pattern = config.pattern;
  index_options.parallelism = config.parallelism;
  return evaluate_run(index_corpus(config.gt_root, config.vocabulary, index_options), config, options);
}

RunSummary evaluate_run(const CorpusIndex& index, const RunConfig& config, const RunOptions& options) {
  config.validate();
  RunSummary summary;
  summary.config_hash = config_hash(config);
  summary.warnings = index.warnings;

  JournalHeader header;
  header.tool = config.adapter.tool;
  header.config_hash = summary.config_hash;
  std::map<UnitId, UnitResult> done;
  bool header_written = false;
  std::uintmax_t keep_bytes = 0;

  if (options.journal && fs::exists(*options.journal)) {
    JournalScan scan = scan_journal(*options.journal);
    if (scan.has_header) {
      if (scan.journal.header.config_hash != summary.config_hash) {
        throw ConfigError(fmt::format("journal {} was written with config {}, current config is {}",
                                      options.journal->string(), scan.journal.header.config_hash,
                                      summary.config_hash));
      }
      header = scan.journal.header;
      header_written = true;
      keep_bytes = scan.complete_bytes;
      for (auto& r : scan.journal.results) done.emplace(UnitId{r.key, r.label}, std::move(r));
    }
    if (scan.journal.truncated_tail) summary.warnings.push_back("dropped a partial trailing journal line");
  }

  if (!header_written && config.prune_sample) header.pruned = prune_labels(index, config, summary.warnings);
  summary.pruned = header.pruned;

  std::vector<ContentLabel> labels;
  for (const auto& label : config.effective_labels()) {
    const bool pruned = std::any_of(header.pruned.begin(), header.pruned.end(),
                                    [&](const PrunedLabel& p) { return p.label == label; });
    if (!pruned) labels.push_back(label);
  }

  std::optional<JournalWriter> writer;
  if (options.journal) {
    writer.emplace(*options.journal, keep_bytes);
    if (!header_written) {
      writer->write_line(format_journal_header(header));
      writer->flush();
    }
  }

  const auto pages = pages_in(index, config.sample, &summary.warnings);
  const std::size_t batch = std::max<std::size_t>(1, options.batch_pages);
  for (std::size_t start = 0; start < pages.size() && summary.complete; start += batch) {
    const std::vector<PageKey> chunk(pages.begin() + static_cast<std::ptrdiff_t>(start),
                                     pages.begin() + static_cast<std::ptrdiff_t>(std::min(pages.size(), start + batch)));
    for (auto& result : evaluate_pages(index, chunk, labels, config, done, summary.warnings)) {
      const bool resumed = done.contains({result.key, result.label});
      if (!resumed) {
        if (options.limit && summary.evaluated >= *options.limit) {
          summary.complete = false;
          break;
        }
        ++summary.evaluated;
        if (writer) writer->write_line(format_journal_line(result));
      } else {
        ++summary.resumed;
      }
      if (options.on_result) options.on_result(result);
      summary.results.push_back(std::move(result));
    }
    if (writer) writer->flush();
  }
  return summary;
}

}  // namespace iebench
