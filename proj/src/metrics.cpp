#include "iebench/metrics.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "edit_distance_impl.hpp"
#include "iebench/error.hpp"
#include "iebench/parallel.hpp"
#include "iebench/text.hpp"

namespace iebench {

void MatchConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  if (substitution_cost != 1 && substitution_cost != 2) throw ConfigError("substitution cost must be 1 or 2");
}

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty() || contains_whitespace(t)) throw std::invalid_argument("token must be non-empty and whitespace-free: '" + t + "'");
  }
}

TokenSequence TokenSequence::from_text(std::string_view text) { return TokenSequence(tokenize(text)); }

CollatedText::CollatedText(const TokenSequence& tokens) : text_(join(tokens.tokens(), " ")) {}

CollatedText CollatedText::from_string(std::string text) {
  if (!text.empty() && (text.front() == ' ' || text.back() == ' ' || text.find("  ") != std::string::npos)) {
    throw std::invalid_argument("collated text must be single-space delimited");
  }
  CollatedText out;
  out.text_ = std::move(text);
  return out;
}

namespace {

double ratio_from_distance(std::size_t distance, std::size_t total_length) {
  if (total_length == 0) return 1.0;
  return 1.0 - static_cast<double>(distance) / static_cast<double>(total_length);
}

std::u32string prepare(std::string_view text, const MatchConfig& config) {
  std::u32string out = config.normalize_nfc ? decode_utf8(normalize_nfc(text)) : decode_utf8(text);
  if (!config.case_sensitive) out = fold_case(out);
  return out;
}

std::vector<std::u32string> prepare_all(const TokenSequence& tokens, const MatchConfig& config) {
  std::vector<std::u32string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens.tokens()) out.push_back(prepare(t, config));
  return out;
}

// Ratio of one extracted token (held as a reusable pattern) against one
// ground-truth token.
class RowScorer {
 public:
  RowScorer(const std::u32string& row, int substitution_cost) : row_(row), cost_(substitution_cost) {
    if (cost_ == 2) pattern_.emplace(row);
  }

  double ratio(const std::u32string& col) {
    if (row_ == col) return 1.0;
    return ratio_from_distance(distance(col), row_.size() + col.size());
  }

  std::size_t distance(const std::u32string& col) {
    if (cost_ == 2) return row_.size() + col.size() - 2 * pattern_->lcs(col, scratch_);
    return detail::levenshtein_unit(row_, col);
  }

 private:
  const std::u32string& row_;
  int cost_;
  std::optional<detail::LcsPattern> pattern_;
  std::vector<uint64_t> scratch_;
};

}  // namespace

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  return detail::LcsPattern(a).lcs(b);
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b, int substitution_cost) {
  if (substitution_cost != 1 && substitution_cost != 2) throw ConfigError("substitution cost must be 1 or 2");
  detail::strip_common_affixes(a, b);
  if (a.empty() || b.empty()) return a.size() + b.size();
  if (substitution_cost == 2) return a.size() + b.size() - 2 * lcs_length(a, b);
  return detail::levenshtein_unit(a, b);
}

std::size_t edit_distance(std::string_view a, std::string_view b, int substitution_cost) {
  return edit_distance(decode_utf8(a), decode_utf8(b), substitution_cost);
}

double lev_ratio(std::u32string_view a, std::u32string_view b, int substitution_cost) {
  if (a == b) return 1.0;
  return ratio_from_distance(edit_distance(a, b, substitution_cost), a.size() + b.size());
}

double lev_ratio(std::string_view a, std::string_view b, const MatchConfig& config) {
  return lev_ratio(prepare(a, config), prepare(b, config), config.substitution_cost);
}

SimilarityMatrix similarity_matrix(const TokenSequence& extracted, const TokenSequence& gt, const MatchConfig& config,
                                   std::size_t parallelism) {
  config.validate();
  const auto rows = prepare_all(extracted, config);
  const auto cols = prepare_all(gt, config);
  SimilarityMatrix matrix(rows.size(), cols.size());
  parallel_for(rows.size(), parallelism, [&](std::size_t i) {
    RowScorer scorer(rows[i], config.substitution_cost);
    for (std::size_t j = 0; j < cols.size(); ++j) matrix.at(i, j) = scorer.ratio(cols[j]);
  });
  return matrix;
}

Rate precision(const SimilarityMatrix& matrix, double threshold) {
  Rate rate;
  rate.empty = matrix.rows() == 0;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (matrix.at(i, j) >= threshold) {
        ++rate.matched;
        break;
      }
    }
  }
  if (!rate.empty) rate.value = static_cast<double>(rate.matched) / static_cast<double>(matrix.rows());
  return rate;
}

Rate recall(const SimilarityMatrix& matrix, double threshold) {
  Rate rate;
  rate.empty = matrix.cols() == 0;
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
      if (matrix.at(i, j) >= threshold) {
        ++rate.matched;
        break;
      }
    }
  }
  if (!rate.empty) rate.value = static_cast<double>(rate.matched) / static_cast<double>(matrix.cols());
  return rate;
}

double f1(double p, double r) {
  if (p + r <= 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double accuracy(const CollatedText& extracted, const CollatedText& gt, const MatchConfig& config) {
  return lev_ratio(extracted.text(), gt.text(), config);
}

DocumentScores score_tokens(const TokenSequence& extracted, const TokenSequence& gt, const MatchConfig& config) {
  config.validate();
  const auto rows = prepare_all(extracted, config);
  const auto cols = prepare_all(gt, config);

  DocumentScores scores;
  scores.m = rows.size();
  scores.n = cols.size();
  scores.empty_extraction = scores.m == 0;
  scores.empty_ground_truth = scores.n == 0;

  std::vector<char> row_hit(rows.size(), 0);
  std::vector<char> col_hit(cols.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::optional<RowScorer> scorer;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (row_hit[i] && col_hit[j]) continue;
      const std::size_t la = rows[i].size();
      const std::size_t lb = cols[j].size();
      const std::size_t length_gap = la > lb ? la - lb : lb - la;
      // Every edit script needs at least |la - lb| insertions or deletions.
      if (ratio_from_distance(length_gap, la + lb) < config.threshold) continue;
      if (!scorer) scorer.emplace(rows[i], config.substitution_cost);
      if (scorer->ratio(cols[j]) >= config.threshold) {
        row_hit[i] = 1;
        col_hit[j] = 1;
      }
    }
  }
  scores.matched_extracted = static_cast<std::size_t>(std::count(row_hit.begin(), row_hit.end(), 1));
  scores.matched_gt = static_cast<std::size_t>(std::count(col_hit.begin(), col_hit.end(), 1));
  if (scores.m) scores.precision = static_cast<double>(scores.matched_extracted) / static_cast<double>(scores.m);
  if (scores.n) scores.recall = static_cast<double>(scores.matched_gt) / static_cast<double>(scores.n);
  scores.f1 = f1(scores.precision, scores.recall);
  scores.accuracy = accuracy(CollatedText(extracted), CollatedText(gt), config);
  return scores;
}

DocumentScores score_document(const ExtractionRecord& extracted, const ContentLabel& gt_label,
                              const TokenSequence& gt_tokens, const MatchConfig& config) {
  if (extracted.label != gt_label) {
    throw std::invalid_argument("record label '" + extracted.label.name() + "' does not match '" + gt_label.name() + "'");
  }
  return score_tokens(TokenSequence(extracted.tokens), gt_tokens, config);
}

}  // namespace iebench
