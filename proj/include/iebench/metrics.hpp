#pragma once

// Token-level string similarity and extraction scores.
//
// Two comparison formats are scored for every (page, label) unit:
//   separate tokens  -> m x n Levenshtein-ratio matrix -> precision, recall, F1
//   collated tokens  -> one ratio over the space-joined strings -> accuracy
//
// The ratio is 1 - d(a, b) / (|a| + |b|), lengths in code points. With the
// default substitution cost of 2, d(a, b) = |a| + |b| - 2 LCS(a, b), so
// ratio("Gary", "Yuta") = 0.25.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "iebench/record.hpp"

namespace iebench {

struct MatchConfig {
  double threshold = 0.7;
  int substitution_cost = 2;
  bool case_sensitive = true;
  bool normalize_nfc = false;

  /// Throws ConfigError on a threshold outside [0, 1] or a cost other than 1 or 2.
  void validate() const;
};

/// Ordered, whitespace-free, non-empty tokens.
class TokenSequence {
 public:
  TokenSequence() = default;
  /// Throws std::invalid_argument if a token is empty or contains whitespace.
  explicit TokenSequence(std::vector<std::string> tokens);

  static TokenSequence from_text(std::string_view text);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<std::string> tokens_;
};

/// Tokens joined by single spaces.
class CollatedText {
 public:
  CollatedText() = default;
  explicit CollatedText(const TokenSequence& tokens);
  /// Throws std::invalid_argument on leading, trailing or repeated spaces.
  static CollatedText from_string(std::string text);

  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

std::size_t edit_distance(std::u32string_view a, std::u32string_view b, int substitution_cost = 2);
std::size_t edit_distance(std::string_view a, std::string_view b, int substitution_cost = 2);

/// Longest common subsequence length (bit-parallel).
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

double lev_ratio(std::u32string_view a, std::u32string_view b, int substitution_cost = 2);
double lev_ratio(std::string_view a, std::string_view b, const MatchConfig& config = {});

class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// values[i][j] = lev_ratio(extracted[i], gt[j]); rows may be filled in parallel.
SimilarityMatrix similarity_matrix(const TokenSequence& extracted, const TokenSequence& gt,
                                   const MatchConfig& config = {}, std::size_t parallelism = 1);

struct Rate {
  double value = 0.0;
  std::size_t matched = 0;
  /// Denominator was zero; value is reported as 0.
  bool empty = false;
};

/// Share of rows whose best ratio reaches the threshold (inclusive).
Rate precision(const SimilarityMatrix& matrix, double threshold);
/// Share of columns whose best ratio reaches the threshold (inclusive).
Rate recall(const SimilarityMatrix& matrix, double threshold);

double f1(double precision, double recall);

double accuracy(const CollatedText& extracted, const CollatedText& gt, const MatchConfig& config = {});

struct DocumentScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t matched_extracted = 0;
  std::size_t matched_gt = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  bool empty_extraction = false;
  bool empty_ground_truth = false;
};

/// Scores one unit without materialising the matrix: cells that cannot reach
/// the threshold by length alone, or whose row and column already qualify,
/// are skipped. Results equal the matrix route exactly.
DocumentScores score_tokens(const TokenSequence& extracted, const TokenSequence& gt, const MatchConfig& config = {});

/// Scores a record against the ground-truth tokens of the same label.
/// Throws std::invalid_argument if the record has a different label.
DocumentScores score_document(const ExtractionRecord& extracted, const ContentLabel& gt_label,
                              const TokenSequence& gt_tokens, const MatchConfig& config = {});

}  // namespace iebench
