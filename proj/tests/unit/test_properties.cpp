#include <gtest/gtest.h>

#include "properties.hpp"

using namespace iebench::props;

namespace {

constexpr std::size_t kCases = 2000;

void expect_holds(const Outcome& outcome) {
  EXPECT_TRUE(outcome.ok()) << "case " << outcome.cases << ": " << outcome.counterexample.value_or("");
  if (outcome.ok()) EXPECT_EQ(outcome.cases, kCases);
}

}  // namespace

TEST(Property, Cost2DistanceEqualsLcsIdentity) { expect_holds(check_cost2_distance_vs_lcs(0x5eed0001, kCases)); }
TEST(Property, Cost1DistanceMatchesWagnerFischer) { expect_holds(check_cost1_distance(0x5eed0002, kCases)); }
TEST(Property, PrecisionRecallMatchBruteForce) { expect_holds(check_precision_recall_brute(0x5eed0003, kCases)); }
TEST(Property, ScoreTokensMatchesMatrixRoute) { expect_holds(check_score_tokens_vs_matrix(0x5eed0004, kCases)); }
TEST(Property, RatioSymmetryAndIdentity) { expect_holds(check_ratio_symmetry_and_identity(0x5eed0005, kCases)); }
TEST(Property, ScoreBoundsAndF1Range) { expect_holds(check_score_bounds_and_f1(0x5eed0006, kCases)); }
TEST(Property, ThresholdZeroIsPerfect) { expect_holds(check_threshold_zero_is_perfect(0x5eed0007, kCases)); }
TEST(Property, GroundTruthOrderDoesNotMatter) { expect_holds(check_gt_permutation_invariance(0x5eed0008, kCases)); }
TEST(Property, AggregateMeansMatchArithmetic) { expect_holds(check_aggregate_means_oracle(0x5eed0009, kCases)); }
TEST(Property, AggregateInvariants) { expect_holds(check_aggregate_invariants(0x5eed000a, kCases)); }
TEST(Property, GroundTruthRecordRoundTrip) { expect_holds(check_gt_record_round_trip(0x5eed000b, kCases)); }
TEST(Property, TokenizeCollationIdempotent) { expect_holds(check_tokenize_collation_idempotent(0x5eed000c, kCases)); }
TEST(Property, RestrictKeepsSubMultiset) { expect_holds(check_restrict_is_sub_multiset(0x5eed000d, kCases)); }
TEST(Property, JournalLineRoundTrip) { expect_holds(check_journal_line_round_trip(0x5eed000e, kCases)); }
