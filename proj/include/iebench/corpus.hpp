#pragma once

// DocBank-style ground truth: one tab-separated file per page, one token per
// line, fields in the order token, x0, y0, x1, y1, R, G, B, font, label.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <boost/regex.hpp>

namespace iebench {

class ContentLabel {
 public:
  /// Throws ConfigError unless `name` is non-empty, lowercase and whitespace-free.
  explicit ContentLabel(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend auto operator<=>(const ContentLabel&, const ContentLabel&) = default;

 private:
  std::string name_;
};

class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  explicit LabelVocabulary(std::set<ContentLabel> labels) : labels_(std::move(labels)) {}

  /// abstract, author, caption, equation, figure, footer, list, paragraph,
  /// reference, section, table, title.
  static LabelVocabulary defaults();

  bool contains(const ContentLabel& label) const { return labels_.contains(label); }
  bool contains(std::string_view name) const;
  void add(ContentLabel label) { labels_.insert(std::move(label)); }

  const std::set<ContentLabel>& labels() const noexcept { return labels_; }

 private:
  std::set<ContentLabel> labels_;
};

struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct GroundTruthToken {
  std::string token;
  BoundingBox box;
  Rgb color;
  std::string font_name;
  ContentLabel label;

  friend bool operator==(const GroundTruthToken&, const GroundTruthToken&) = default;
};

struct PageKey {
  std::string document_id;
  int page_index = 0;

  friend auto operator<=>(const PageKey&, const PageKey&) = default;
};

std::string to_string(const PageKey& key);

enum class ParseMode { lenient, strict };

struct ParseIssue {
  enum class Kind { malformed_record, unknown_label, fractional_coordinate, bad_filename, io };
  std::size_t line = 0;
  Kind kind = Kind::malformed_record;
  std::string message;
};

const char* to_string(ParseIssue::Kind kind);

/// Parses one ground-truth line. Fields beyond the tenth are ignored.
/// Fractional coordinates are truncated and reported through `warnings`.
/// Throws MalformedRecord or UnknownLabel tagged with `line_number`.
GroundTruthToken parse_gt_record(std::string_view line, const LabelVocabulary& vocabulary,
                                 std::size_t line_number = 0, std::vector<ParseIssue>* warnings = nullptr);

std::string serialize_gt_record(const GroundTruthToken& token);

class PageKeyPattern {
 public:
  /// Matches DocBank file names such as `12.tar_1401.0001.gz_main_3.txt`.
  static constexpr std::string_view kDefault =
      R"(^(?:\d+\.tar_)?(?<doc>\d{4}\.\d{4,5}(?:v\d+)?)(?:\.gz)?_.*_(?<page>\d+)(?:\.txt)?$)";

  PageKeyPattern() : PageKeyPattern(kDefault) {}
  /// Throws ConfigError if the expression is invalid or lacks `doc`/`page` captures.
  explicit PageKeyPattern(std::string_view expression);

  const std::string& expression() const noexcept { return expression_; }
  const boost::regex& regex() const noexcept { return regex_; }

 private:
  std::string expression_;
  boost::regex regex_;
};

/// Throws KeyParseError when `filename` (no directory part) does not match.
PageKey parse_page_key(std::string_view filename, const PageKeyPattern& pattern = PageKeyPattern());

class GroundTruthPage {
 public:
  GroundTruthPage(PageKey key, std::vector<GroundTruthToken> tokens, std::filesystem::path source_path,
                  std::vector<ParseIssue> issues = {});

  const PageKey& key() const noexcept { return key_; }
  const std::vector<GroundTruthToken>& tokens() const noexcept { return tokens_; }
  const std::filesystem::path& source_path() const noexcept { return source_path_; }
  /// Skipped lines and warnings collected in lenient mode.
  const std::vector<ParseIssue>& issues() const noexcept { return issues_; }

  std::set<ContentLabel> labels() const;
  /// Token texts of one label in file order.
  std::vector<std::string> texts(const ContentLabel& label) const;

 private:
  PageKey key_;
  std::vector<GroundTruthToken> tokens_;
  std::filesystem::path source_path_;
  std::vector<ParseIssue> issues_;
};

struct PageParseOptions {
  ParseMode mode = ParseMode::lenient;
  PageKeyPattern pattern;
};

/// Throws IoError, KeyParseError, or (strict mode) the first record error.
GroundTruthPage parse_gt_page(const std::filesystem::path& path, const LabelVocabulary& vocabulary,
                              const PageParseOptions& options = {});

/// Strict-mode sweep that reports every bad line instead of stopping at the first.
std::vector<ParseIssue> validate_gt_file(const std::filesystem::path& path, const LabelVocabulary& vocabulary,
                                         const PageKeyPattern& pattern = PageKeyPattern());

struct CorpusIndex {
  std::filesystem::path root;
  std::map<PageKey, std::filesystem::path> entries;
  std::map<ContentLabel, std::set<PageKey>> label_presence;
  std::vector<std::string> warnings;

  std::size_t page_count() const noexcept { return entries.size(); }
  std::set<ContentLabel> labels_of(const PageKey& key) const;
};

struct IndexOptions {
  PageKeyPattern pattern;
  std::size_t parallelism = 1;
};

/// Indexes every `.txt` file under `root`. Label presence comes from a fast
/// scan of the label field only; records are not validated.
CorpusIndex index_corpus(const std::filesystem::path& root, const LabelVocabulary& vocabulary,
                         const IndexOptions& options = {});

std::set<PageKey> filter_by_label(const CorpusIndex& index, const ContentLabel& label,
                                  const LabelVocabulary& vocabulary);

struct MonthRange {
  int from = 0;  // YYMM
  int to = 0;

  /// Parses "YYMM:YYMM". Throws ConfigError.
  static MonthRange parse(std::string_view text);
  bool contains(int yymm) const noexcept { return from <= yymm && yymm <= to; }
};

/// YYMM prefix of a new-style arXiv id, if it has one.
std::optional<int> arxiv_month(std::string_view document_id);

std::set<PageKey> sample_by_month(const CorpusIndex& index, const MonthRange& range,
                                  std::vector<std::string>* warnings = nullptr);

constexpr int kIndexFormatVersion = 1;

void save_index(const CorpusIndex& index, const PageKeyPattern& pattern, const std::filesystem::path& path);
CorpusIndex load_index(const std::filesystem::path& path);

}  // namespace iebench
