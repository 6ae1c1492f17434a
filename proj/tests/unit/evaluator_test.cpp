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


#include "evaudit/evaluator.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace evaudit {
namespace {

using test::lock_two;
using test::make_checklist;

constexpr TriBool kValues[] = {TriBool::False, TriBool::Undetermined, TriBool::True};

// Independent reference: Kleene connectives over {0, 1/2, 1}.
double as_number(TriBool v) { return v == TriBool::False ? 0.0 : v == TriBool::True ? 1.0 : 0.5; }

TEST(EvaluatorTest, KleeneTruthTable) {
  for (TriBool a : kValues) {
    EXPECT_EQ(as_number(kleene_not(a)), 1.0 - as_number(a));
    for (TriBool b : kValues) {
      EXPECT_EQ(as_number(kleene_and(a, b)), std::min(as_number(a), as_number(b)));
      EXPECT_EQ(as_number(kleene_or(a, b)), std::max(as_number(a), as_number(b)));
    }
  }
  EXPECT_EQ(kleene_and(TriBool::False, TriBool::Undetermined), TriBool::False);
  EXPECT_EQ(kleene_or(TriBool::True, TriBool::Undetermined), TriBool::True);
}

EvidenceView view_of(std::initializer_list<LoadedArtifact> artifacts) {
  EvidenceView v;
  for (const auto& a : artifacts) v.add(a);
  return v;
}

LoadedArtifact structured(const std::string& role, const std::string& text) {
  return load_artifact(role, MediaKind::Structured, text);
}

TriBool eval(const std::string& predicate, const EvidenceView& view) {
  return eval_predicate(parse_predicate(predicate), view);
}

TEST(EvaluatorTest, AtomSemantics) {
  EvidenceView v = view_of({structured("state", R"({"ok": true, "n": 3, "amount": 5.00, "items": [1, 2], "x": null})"),
                            load_artifact("log", MediaKind::Text, "task done\n"),
                            structured("trace", R"({"calls": [{"name": "send_money", "arguments": {"amount": 5.00}}]})"),
                            structured("broken", "{not json")});
  EXPECT_EQ(eval(R"(value_eq(state, "/ok", true))", v), TriBool::True);
  EXPECT_EQ(eval(R"(value_eq(state, "/n", 3))", v), TriBool::True);
  EXPECT_EQ(eval(R"(value_eq(state, "/amount", 5.00))", v), TriBool::True);
  EXPECT_EQ(eval(R"(value_eq(state, "/amount", 5.0))", v), TriBool::False);
  EXPECT_EQ(eval(R"(value_eq(state, "/missing", true))", v), TriBool::False);
  EXPECT_EQ(eval(R"(value_has(state, "/x"))", v), TriBool::False);
  EXPECT_EQ(eval(R"(value_has(state, "/n"))", v), TriBool::True);
  EXPECT_EQ(eval(R"(count_ge(state, "/items", 2))", v), TriBool::True);
  EXPECT_EQ(eval(R"(count_ge(state, "/items", 3))", v), TriBool::False);
  EXPECT_EQ(eval(R"(text_matches(log, "^task done\\s*$"))", v), TriBool::True);
  EXPECT_EQ(eval(R"(tool_called(trace, "send_money"))", v), TriBool::True);
  EXPECT_EQ(eval(R"(tool_called(trace, "send_money", "/arguments/amount", 5.00))", v), TriBool::True);
  EXPECT_EQ(eval(R"(tool_called(trace, "send_money", "/arguments/amount", 6))", v), TriBool::False);
  EXPECT_EQ(eval(R"(tool_called(trace, "transfer"))", v), TriBool::False);
  EXPECT_EQ(eval("exists(absent)", v), TriBool::Undetermined);
  EXPECT_EQ(eval(R"(value_eq(absent, "/ok", true))", v), TriBool::Undetermined);
  EXPECT_EQ(eval(R"(value_eq(log, "/ok", true))", v), TriBool::Undetermined);

  std::vector<std::string> findings;
  EXPECT_EQ(eval_predicate(parse_predicate(R"(value_eq(broken, "/ok", true))"), v, &findings), TriBool::Undetermined);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_NE(findings[0].find("MalformedArtifact"), std::string::npos);
}

TEST(EvaluatorTest, DecideLabel) {
  EXPECT_EQ(decide_label(TriBool::True, TriBool::False, "x"), EvidenceLabel::EvidenceFail);
  EXPECT_EQ(decide_label(TriBool::True, TriBool::Undetermined, "x"), EvidenceLabel::EvidenceFail);
  EXPECT_EQ(decide_label(TriBool::False, TriBool::True, "x"), EvidenceLabel::EvidencePass);
  EXPECT_EQ(decide_label(TriBool::Undetermined, TriBool::True, "x"), EvidenceLabel::EvidencePass);
  EXPECT_EQ(decide_label(TriBool::Undetermined, TriBool::Undetermined, "x"), EvidenceLabel::Unknown);
  EXPECT_EQ(decide_label(TriBool::False, TriBool::False, "x"), EvidenceLabel::Unknown);
  EXPECT_THROW(decide_label(TriBool::True, TriBool::True, "x"), Error);
}

TEST(EvaluatorTest, AssignsLabelsAndReasons) {
  CaseChecklist c = make_checklist("appworld", "A1", R"(value_eq(tests, "/all_passed", true) and exists(db))",
                                   R"(value_eq(tests, "/all_passed", false))",
                                   {{"tests", ReasonCode::R1}, {"db", ReasonCode::R3}});
  LockedChecklist l = lock_two(c);

  EvidenceAssignment pass = assign_evidence_label(l, view_of({structured("tests", R"({"all_passed": true})"),
                                                             structured("db", "{}")}));
  EXPECT_EQ(pass.label, EvidenceLabel::EvidencePass);
  EXPECT_EQ(pass.fired_clause, FiredClause::PassClause);
  EXPECT_FALSE(pass.reason);
  EXPECT_EQ(pass.checklist_hash, l.lock_hash);
  EXPECT_EQ(pass.atom_outcomes.size(), 3u);

  EvidenceAssignment fail = assign_evidence_label(l, view_of({structured("tests", R"({"all_passed": false})")}));
  EXPECT_EQ(fail.label, EvidenceLabel::EvidenceFail);

  // Only the db artifact is missing: it blocks.
  EvidenceAssignment unknown = assign_evidence_label(l, view_of({structured("tests", R"({"all_passed": true})")}));
  EXPECT_EQ(unknown.label, EvidenceLabel::Unknown);
  ASSERT_TRUE(unknown.reason);
  EXPECT_EQ(unknown.reason->code, ReasonCode::R3);
  EXPECT_EQ(unknown.reason->blocking_role, "db");

  // Both missing: only tests can settle the label by itself.
  EvidenceAssignment none = assign_evidence_label(l, view_of({}));
  ASSERT_TRUE(none.reason);
  EXPECT_EQ(none.reason->blocking_role, "tests");
  EXPECT_EQ(none.blocking_candidates.size(), 1u);

  LockedChecklist tampered = l;
  tampered.checklist.notes = "edited";
  EXPECT_THROW(assign_evidence_label(tampered, view_of({})), Error);
}

TEST(EvaluatorTest, StrongerChannelNeverRaisesLabel) {
  Json doc = checklist_to_json(make_checklist("miniwob", "m1", R"(value_eq(dom, "/done", true))",
                                              R"(value_eq(dom, "/done", false))", {{"dom", ReasonCode::R1},
                                                                                    {"actions", ReasonCode::R3}}));
  doc["stronger_items"] = Json::array({Json{{"name", "no_direct_fill"},
                                            {"pass_when", R"(not tool_called(actions, "fill"))"},
                                            {"fail_when", R"(tool_called(actions, "fill"))"},
                                            {"justification", "filling the field directly skips the widget"}}});
  LockedChecklist l = lock_two(checklist_from_json(doc).checklist);
  auto with_actions = [&](const std::string& done, const std::string& actions) {
    return assign_evidence_label(l, view_of({structured("dom", R"({"done": )" + done + "}"),
                                             structured("actions", actions)}));
  };
  EvidenceAssignment clean = with_actions("true", R"([{"name": "click"}])");
  EXPECT_EQ(clean.label, EvidenceLabel::EvidencePass);
  EXPECT_EQ(clean.stronger_label, EvidenceLabel::EvidencePass);
  EvidenceAssignment filled = with_actions("true", R"([{"name": "fill"}])");
  EXPECT_EQ(filled.label, EvidenceLabel::EvidencePass);
  EXPECT_EQ(filled.stronger_label, EvidenceLabel::EvidenceFail);
  EvidenceAssignment failed = with_actions("false", R"([{"name": "click"}])");
  EXPECT_EQ(failed.stronger_label, EvidenceLabel::EvidenceFail);
}

TEST(EvaluatorTest, PickUnknownReasonDropsR2WhenOthersPresent) {
  UnknownReason r2{ReasonCode::R2, "final"};
  UnknownReason r4{ReasonCode::R4, "protected"};
  EXPECT_EQ(pick_unknown_reason({r2, r4}), r4);
  EXPECT_EQ(pick_unknown_reason({r2}), r2);
  EXPECT_FALSE(pick_unknown_reason({}));
}

TEST(EvaluatorTest, MergesPairedArms) {
  EvidenceAssignment benign;
  benign.label = EvidenceLabel::Unknown;
  benign.checklist_hash = "b";
  benign.blocking_candidates = {{ReasonCode::R2, "benign.final_state"}};
  benign.reason = benign.blocking_candidates[0];
  benign.atom_outcomes = {AtomOutcome{"pass", 0, TriBool::Undetermined, "benign.final_state"}};
  EvidenceAssignment injected;
  injected.label = EvidenceLabel::Unknown;
  injected.checklist_hash = "i";
  injected.blocking_candidates = {{ReasonCode::R4, "injected.protected_state"}};
  injected.reason = injected.blocking_candidates[0];

  EvidenceAssignment m = merge_paired_arms(benign, injected);
  EXPECT_EQ(m.label, EvidenceLabel::Unknown);
  EXPECT_EQ(m.checklist_hash, "b+i");
  EXPECT_EQ(m.reason->code, ReasonCode::R4);
  EXPECT_EQ(m.atom_outcomes[0].clause, "benign:pass");

  // A failing arm decides the case; the other arm's blockers do not matter.
  injected.label = EvidenceLabel::EvidenceFail;
  injected.reason.reset();
  m = merge_paired_arms(benign, injected);
  EXPECT_EQ(m.label, EvidenceLabel::EvidenceFail);
  EXPECT_FALSE(m.reason);

  // Only the Unknown arm contributes candidates.
  injected.label = EvidenceLabel::EvidencePass;
  m = merge_paired_arms(benign, injected);
  EXPECT_EQ(m.label, EvidenceLabel::Unknown);
  EXPECT_EQ(m.reason->code, ReasonCode::R2);
}

TEST(EvaluatorTest, ProbeFlagsNativeInconsistencies) {
  RunRecord r = make_record("tau3_retail:T50:claude-4.7", CellKey{"tau3_retail", "claude-4.7"}, "T50", {"e"},
                            RecordStatus::Completed, test::native(true), "b");
  EXPECT_TRUE(probe_native_consistency(r).empty());
  r.native.subchecks = {{"transfer_to_human_agents", false}};
  auto c1 = probe_native_consistency(r);
  ASSERT_EQ(c1.size(), 1u);
  EXPECT_EQ(c1[0].suggested_code, ConflictCode::C1);
  EXPECT_EQ(c1[0].evidence_pointer, "native.subchecks/transfer_to_human_agents");

  r.native = test::native(false);
  r.native.subchecks = {{"action_0", true}};
  auto c3 = probe_native_consistency(r);
  ASSERT_EQ(c3.size(), 1u);
  EXPECT_EQ(c3[0].suggested_code, ConflictCode::C3);
  EXPECT_EQ(candidate_from_json(candidate_to_json(c3[0])), c3[0]);
}

}  // namespace
}  // namespace evaudit
