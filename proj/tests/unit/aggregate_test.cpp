// Copyright 2026 The evaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "evaudit/aggregate.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace evaudit {
namespace {

RunRecord labelled(const std::string& bench, const std::string& model, const std::string& case_id,
                   std::optional<EvidenceLabel> label, bool native_success,
                   RecordStatus status = RecordStatus::Completed, std::string bundle = "b") {
  RunRecord r = make_record(bench + ":" + case_id + ":" + model, CellKey{bench, model}, case_id, {case_id + "-ep"},
                            status, test::native(native_success), std::move(bundle));
  if (label) r.channel_labels[Channel::NativeAligned] = *label;
  return r;
}

CellCounts counts(std::int64_t p, std::int64_t f, std::int64_t u) {
  return CellCounts{CellKey{"b", "m"}, p, f, u, p + f + u, 0, 0};
}

TEST(AggregateTest, BoundsMatchExactFractions) {
  CellCounts g = counts(4, 17, 20);
  Bound b = performance_bounds(g);
  EXPECT_EQ(b.lower, Rational(4, 41));
  EXPECT_EQ(b.upper, Rational(24, 41));
  EXPECT_EQ(b.upper - b.lower, unknown_share(g));
  EXPECT_EQ(bound_display(b), "[9.8%, 58.5%]");
  EXPECT_EQ(counted_score(g), Rational(4, 21));
}

TEST(AggregateTest, DegenerateCells) {
  EXPECT_THROW(performance_bounds(counts(0, 0, 0)), Error);
  try {
    counted_score(counts(0, 0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoDecidableRecords);
  }
  Bound all_unknown = performance_bounds(counts(0, 0, 3));
  EXPECT_EQ(all_unknown.lower, Rational(0));
  EXPECT_EQ(all_unknown.upper, Rational(1));
}

// Brute force: the bound is the range of P'/N over every relabelling of the
// Unknown records.
TEST(AggregateTest, BoundsAgreeWithEnumeratedCompletions) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 12);
    std::int64_t u = static_cast<std::int64_t>(rng() % (n + 1));
    std::int64_t p = static_cast<std::int64_t>(rng() % (n - u + 1));
    CellCounts c = counts(p, n - u - p, u);
    Rational lo(1), hi(0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << u); ++mask) {
      Rational s(p + std::popcount(mask), n);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    Bound b = performance_bounds(c);
    ASSERT_EQ(b.lower, lo);
    ASSERT_EQ(b.upper, hi);
  }
}

TEST(AggregateTest, PairwiseResolutionIsStrict) {
  Bound a{Rational(1, 2), Rational(3, 4)};
  Bound b{Rational(1, 4), Rational(1, 2)};
  Bound c{Rational(1, 10), Rational(2, 5)};
  EXPECT_EQ(pairwise_resolution(a, b), PairDecision::Unresolved);  // touching endpoints
  EXPECT_EQ(pairwise_resolution(a, c), PairDecision::LeftWins);
  EXPECT_EQ(pairwise_resolution(c, a), PairDecision::RightWins);
}

TEST(AggregateTest, LeaderboardClaimTexts) {
  std::vector<ModelStanding> s = {{"G", {Rational(67, 100), Rational(67, 100)}, Rational(72, 100)},
                                  {"C", {Rational(84, 100), Rational(85, 100)}, Rational(91, 100)},
                                  {"D", {Rational(61, 100), Rational(61, 100)}, Rational(68, 100)}};
  LeaderboardClaim claim = leaderboard_claim("tau3_retail", s);
  EXPECT_EQ(claim.separated_text(), "3/3");
  EXPECT_EQ(claim.supported_text(), "C > G > D");
  EXPECT_EQ(claim.native_order_text(), "C > G > D");

  s[0].native = Rational(39, 100);
  s[2].native = Rational(39, 100);
  s[0].bound = {Rational(7, 10), Rational(9, 10)};
  LeaderboardClaim partial = leaderboard_claim("x", s);
  EXPECT_EQ(partial.separated_text(), "2/3");
  EXPECT_EQ(partial.supported_text(), "G > D; C > D");
  EXPECT_EQ(partial.native_order_text(), "C > G = D");

  for (auto& m : s) m.bound = {Rational(0), Rational(1)};
  EXPECT_EQ(leaderboard_claim("x", s).supported_text(), "none");
}

TEST(AggregateTest, CellsCountLabelsNativeAndConflicts) {
  std::vector<RunRecord> rs;
  rs.push_back(labelled("b", "m2", "c1", EvidenceLabel::EvidencePass, true));
  rs.push_back(labelled("b", "m1", "c1", EvidenceLabel::EvidenceFail, true));
  rs.push_back(labelled("b", "m1", "c2", EvidenceLabel::Unknown, false));
  rs.back().review = ReviewState{ConflictCode::C4, std::nullopt, {1}};
  rs.push_back(labelled("a", "m1", "c1", EvidenceLabel::EvidencePass, false));
  CellTable t = compute_cells(rs);
  ASSERT_EQ(t.cells.size(), 3u);
  EXPECT_EQ(t.benchmarks(), (std::vector<std::string>{"a", "b"}));
  auto b = t.benchmark_cells("b");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].cell.model_id, "m2");  // first appearance
  EXPECT_EQ(b[1].P + b[1].F + b[1].U, 2);
  EXPECT_EQ(b[1].native_successes, 1);
  EXPECT_EQ(b[1].conflict_records, 1);

  EXPECT_EQ(cells_from_json(cells_to_json(t)), t);
  for (const auto& c : t.cells) EXPECT_EQ(cell_from_json(cell_to_json(c)), c);
}

TEST(AggregateTest, AgentFaultRule) {
  RunRecord failed = labelled("b", "m", "c1", std::nullopt, false, RecordStatus::AgentFault, "");
  RunRecord success = labelled("b", "m", "c2", std::nullopt, true, RecordStatus::AgentFault, "");
  EXPECT_EQ(effective_label(failed), EvidenceLabel::EvidenceFail);
  EXPECT_EQ(effective_label(success), EvidenceLabel::Unknown);
  RunRecord completed = labelled("b", "m", "c3", std::nullopt, false);
  EXPECT_FALSE(effective_label(completed));
  try {
    compute_cells({completed});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLabel);
  }
}

TEST(AggregateTest, SumCells) {
  CellCounts s = sum_cells("b", {counts(1, 2, 3), counts(4, 5, 6)});
  EXPECT_EQ(s.P, 5);
  EXPECT_EQ(s.N, 21);
  EXPECT_EQ(s.cell.benchmark_id, "b");
}

}  // namespace
}  // namespace evaudit
