#include "iebench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iebench/error.hpp"
#include "iebench/parallel.hpp"
#include "iebench/text.hpp"

namespace fs = std::filesystem;

namespace iebench {

ContentLabel::ContentLabel(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw ConfigError("content label must not be empty");
  for (unsigned char c : name_) {
    if (std::isspace(c) || std::isupper(c)) throw ConfigError("content label must be lowercase without whitespace: " + name_);
  }
}

LabelVocabulary LabelVocabulary::defaults() {
  std::set<ContentLabel> labels;
  for (const char* name : {"abstract", "author", "caption", "equation", "figure", "footer", "list", "paragraph",
                           "reference", "section", "table", "title"}) {
    labels.emplace(name);
  }
  return LabelVocabulary(std::move(labels));
}

bool LabelVocabulary::contains(std::string_view name) const {
  return std::any_of(labels_.begin(), labels_.end(), [&](const ContentLabel& l) { return l.name() == name; });
}

std::string to_string(const PageKey& key) { return fmt::format("{}#{}", key.document_id, key.page_index); }

const char* to_string(ParseIssue::Kind kind) {
  switch (kind) {
    case ParseIssue::Kind::malformed_record: return "malformed_record";
    case ParseIssue::Kind::unknown_label: return "unknown_label";
    case ParseIssue::Kind::fractional_coordinate: return "fractional_coordinate";
    case ParseIssue::Kind::bad_filename: return "bad_filename";
    case ParseIssue::Kind::io: return "io";
  }
  return "unknown";
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::string_view strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

int parse_coordinate(std::string_view field, const char* name, std::size_t line, bool& truncated) {
  if (auto v = parse_int(field)) return *v;
  double value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value) || std::abs(value) > 1e9) {
    throw MalformedRecord(fmt::format("non-numeric {} '{}'", name, field), line);
  }
  truncated = true;
  return static_cast<int>(std::trunc(value));
}

int parse_channel(std::string_view field, const char* name, std::size_t line) {
  auto v = parse_int(field);
  if (!v) throw MalformedRecord(fmt::format("non-integer {} '{}'", name, field), line);
  if (*v < 0 || *v > 255) throw MalformedRecord(fmt::format("{} out of range: {}", name, *v), line);
  return *v;
}

}  // namespace

GroundTruthToken parse_gt_record(std::string_view line, const LabelVocabulary& vocabulary, std::size_t line_number,
                                 std::vector<ParseIssue>* warnings) {
  const auto fields = split_tabs(strip_eol(line));
  if (fields.size() < 10) {
    throw MalformedRecord(fmt::format("expected at least 10 tab-separated fields, found {}", fields.size()),
                          line_number);
  }
  const std::string_view token = trim(fields[0]);
  if (token.empty()) throw MalformedRecord("empty token", line_number);

  bool truncated = false;
  BoundingBox box{parse_coordinate(fields[1], "x0", line_number, truncated),
                  parse_coordinate(fields[2], "y0", line_number, truncated),
                  parse_coordinate(fields[3], "x1", line_number, truncated),
                  parse_coordinate(fields[4], "y1", line_number, truncated)};
  if (box.x0 < 0 || box.y0 < 0) throw MalformedRecord("negative coordinate", line_number);
  if (box.x0 > box.x1 || box.y0 > box.y1) {
    throw MalformedRecord(fmt::format("inverted bounding box ({},{},{},{})", box.x0, box.y0, box.x1, box.y1),
                          line_number);
  }
  Rgb color{parse_channel(fields[5], "R", line_number), parse_channel(fields[6], "G", line_number),
            parse_channel(fields[7], "B", line_number)};

  const std::string_view label = trim(fields[9]);
  if (!vocabulary.contains(label)) {
    throw UnknownLabel(fmt::format("label '{}' not in vocabulary", label), line_number);
  }
  if (truncated && warnings) {
    warnings->push_back({line_number, ParseIssue::Kind::fractional_coordinate, "fractional coordinates truncated"});
  }
  return GroundTruthToken{std::string(token), box, color, std::string(fields[8]), ContentLabel(std::string(label))};
}

std::string serialize_gt_record(const GroundTruthToken& t) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", t.token, t.box.x0, t.box.y0, t.box.x1, t.box.y1,
                     t.color.r, t.color.g, t.color.b, t.font_name, t.label.name());
}

PageKeyPattern::PageKeyPattern(std::string_view expression) : expression_(expression) {
  try {
    regex_.assign(expression_, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("invalid page key pattern: " + std::string(e.what()));
  }
  if (expression_.find("(?<doc>") == std::string::npos || expression_.find("(?<page>") == std::string::npos) {
    throw ConfigError("page key pattern needs named captures 'doc' and 'page'");
  }
}

PageKey parse_page_key(std::string_view filename, const PageKeyPattern& pattern) {
  const std::string name(filename);
  boost::smatch match;
  if (!boost::regex_search(name, match, pattern.regex())) {
    throw KeyParseError("file name does not match page key pattern: " + name);
  }
  const std::string doc = match["doc"].str();
  const std::string page = match["page"].str();
  auto index = parse_int(page);
  if (doc.empty() || !index || *index < 0) throw KeyParseError("bad document id or page in file name: " + name);
  return PageKey{doc, *index};
}

GroundTruthPage::GroundTruthPage(PageKey key, std::vector<GroundTruthToken> tokens, fs::path source_path,
                                 std::vector<ParseIssue> issues)
    : key_(std::move(key)), tokens_(std::move(tokens)), source_path_(std::move(source_path)), issues_(std::move(issues)) {}

std::set<ContentLabel> GroundTruthPage::labels() const {
  std::set<ContentLabel> out;
  for (const auto& t : tokens_) out.insert(t.label);
  return out;
}

std::vector<std::string> GroundTruthPage::texts(const ContentLabel& label) const {
  std::vector<std::string> out;
  for (const auto& t : tokens_) {
    if (t.label == label) out.push_back(t.token);
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    fn(number, std::string_view(line));
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
}

ParseIssue::Kind kind_of(const RecordError& e) {
  return dynamic_cast<const UnknownLabel*>(&e) ? ParseIssue::Kind::unknown_label
                                               : ParseIssue::Kind::malformed_record;
}

bool is_blank(std::string_view line) { return trim(strip_eol(line)).empty() && line.find('\t') == std::string_view::npos; }

}  // namespace

GroundTruthPage parse_gt_page(const fs::path& path, const LabelVocabulary& vocabulary, const PageParseOptions& options) {
  PageKey key = parse_page_key(path.filename().string(), options.pattern);
  std::vector<GroundTruthToken> tokens;
  std::vector<ParseIssue> issues;
  for_each_line(path, [&](std::size_t number, std::string_view raw) {
    if (is_blank(raw)) return;
    const SanitizedText line = sanitize_utf8(raw);
    try {
      tokens.push_back(parse_gt_record(line.text, vocabulary, number, &issues));
    } catch (const RecordError& e) {
      if (options.mode == ParseMode::strict) throw;
      issues.push_back({number, kind_of(e), e.what()});
    }
  });
  return GroundTruthPage(std::move(key), std::move(tokens), path, std::move(issues));
}

std::vector<ParseIssue> validate_gt_file(const fs::path& path, const LabelVocabulary& vocabulary,
                                         const PageKeyPattern& pattern) {
  std::vector<ParseIssue> issues;
  try {
    parse_page_key(path.filename().string(), pattern);
  } catch (const KeyParseError& e) {
    issues.push_back({0, ParseIssue::Kind::bad_filename, e.what()});
  }
  try {
    for_each_line(path, [&](std::size_t number, std::string_view raw) {
      if (is_blank(raw)) return;
      const SanitizedText line = sanitize_utf8(raw);
      if (line.replacements) {
        issues.push_back({number, ParseIssue::Kind::malformed_record, "invalid UTF-8"});
        return;
      }
      try {
        std::vector<ParseIssue> warnings;
        parse_gt_record(line.text, vocabulary, number, &warnings);
      } catch (const RecordError& e) {
        issues.push_back({number, kind_of(e), e.what()});
      }
    });
  } catch (const IoError& e) {
    issues.push_back({0, ParseIssue::Kind::io, e.what()});
  }
  return issues;
}

std::set<ContentLabel> CorpusIndex::labels_of(const PageKey& key) const {
  std::set<ContentLabel> out;
  for (const auto& [label, keys] : label_presence) {
    if (keys.contains(key)) out.insert(label);
  }
  return out;
}

namespace {

std::set<std::string> scan_labels(const fs::path& path, const LabelVocabulary& vocabulary) {
  std::set<std::string> found;
  for_each_line(path, [&](std::size_t, std::string_view raw) {
    std::string_view line = strip_eol(raw);
    std::size_t pos = 0;
    for (int i = 0; i < 9 && pos != std::string_view::npos; ++i) {
      pos = line.find('\t', pos);
      if (pos != std::string_view::npos) ++pos;
    }
    if (pos == std::string_view::npos) return;
    std::string_view field = line.substr(pos, line.find('\t', pos) - pos);
    field = trim(field);
    if (!found.contains(std::string(field)) && vocabulary.contains(field)) found.emplace(field);
  });
  return found;
}

}  // namespace

CorpusIndex index_corpus(const fs::path& root, const LabelVocabulary& vocabulary, const IndexOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("ground-truth root is not a readable directory: " + root.string());

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".txt") files.push_back(it->path());
  }
  if (ec) throw IoError("cannot traverse " + root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  struct Scan {
    std::optional<PageKey> key;
    std::set<std::string> labels;
    std::string warning;
  };
  std::vector<Scan> scans(files.size());
  parallel_for(files.size(), options.parallelism, [&](std::size_t i) {
    try {
      scans[i].key = parse_page_key(files[i].filename().string(), options.pattern);
      scans[i].labels = scan_labels(files[i], vocabulary);
    } catch (const Error& e) {
      scans[i].key.reset();
      scans[i].warning = e.what();
    }
  });

  CorpusIndex index;
  index.root = root;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!scans[i].key) {
      index.warnings.push_back(scans[i].warning);
      continue;
    }
    auto [it, inserted] = index.entries.emplace(*scans[i].key, files[i]);
    if (!inserted) {
      index.warnings.push_back(fmt::format("duplicate page {}: keeping {}, ignoring {}", to_string(*scans[i].key),
                                           it->second.string(), files[i].string()));
      continue;
    }
    for (const auto& name : scans[i].labels) index.label_presence[ContentLabel(name)].insert(*scans[i].key);
  }
  return index;
}

std::set<PageKey> filter_by_label(const CorpusIndex& index, const ContentLabel& label,
                                  const LabelVocabulary& vocabulary) {
  if (!vocabulary.contains(label)) throw UnknownLabel("label '" + label.name() + "' not in vocabulary", 0);
  auto it = index.label_presence.find(label);
  return it == index.label_presence.end() ? std::set<PageKey>{} : it->second;
}

MonthRange MonthRange::parse(std::string_view text) {
  const auto colon = text.find(':');
  auto bad = [&] { return ConfigError("month range must look like YYMM:YYMM, got '" + std::string(text) + "'"); };
  if (colon == std::string_view::npos) throw bad();
  auto from = parse_int(text.substr(0, colon));
  auto to = parse_int(text.substr(colon + 1));
  if (colon != 4 || text.size() != 9 || !from || !to) throw bad();
  auto valid = [](int yymm) { return yymm % 100 >= 1 && yymm % 100 <= 12; };
  if (!valid(*from) || !valid(*to)) throw bad();
  if (*from > *to) throw ConfigError("month range start is after its end: " + std::string(text));
  return MonthRange{*from, *to};
}

std::optional<int> arxiv_month(std::string_view id) {
  if (id.size() < 5 || id[4] != '.') return std::nullopt;
  auto yymm = parse_int(id.substr(0, 4));
  if (!yymm || *yymm % 100 < 1 || *yymm % 100 > 12) return std::nullopt;
  return yymm;
}

std::set<PageKey> sample_by_month(const CorpusIndex& index, const MonthRange& range, std::vector<std::string>* warnings) {
  std::set<PageKey> out;
  for (const auto& [key, path] : index.entries) {
    auto month = arxiv_month(key.document_id);
    if (!month) {
      if (warnings) warnings->push_back("document id without YYMM prefix excluded from sample: " + key.document_id);
      continue;
    }
    if (range.contains(*month)) out.insert(key);
  }
  return out;
}

void save_index(const CorpusIndex& index, const PageKeyPattern& pattern, const fs::path& path) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kIndexFormatVersion;
  doc["root"] = fs::absolute(index.root).lexically_normal().string();
  doc["pattern"] = pattern.expression();
  auto& pages = doc["pages"] = nlohmann::ordered_json::array();
  for (const auto& [key, file] : index.entries) {
    nlohmann::ordered_json entry;
    entry["doc"] = key.document_id;
    entry["page"] = key.page_index;
    entry["path"] = file.lexically_relative(index.root).generic_string();
    auto labels = nlohmann::ordered_json::array();
    for (const auto& label : index.labels_of(key)) labels.push_back(label.name());
    entry["labels"] = std::move(labels);
    pages.push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

CorpusIndex load_index(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("index file " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kIndexFormatVersion) {
      throw ConfigError("unsupported index format_version in " + path.string());
    }
    CorpusIndex index;
    index.root = doc.at("root").get<std::string>();
    for (const auto& entry : doc.at("pages")) {
      PageKey key{entry.at("doc").get<std::string>(), entry.at("page").get<int>()};
      index.entries.emplace(key, index.root / entry.at("path").get<std::string>());
      for (const auto& label : entry.at("labels")) index.label_presence[ContentLabel(label.get<std::string>())].insert(key);
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed index file " + path.string() + ": " + e.what());
  }
}

}  // namespace iebench
