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


#include "evaudit/checklist.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"

namespace evaudit {
namespace {

using test::lock_two;
using test::make_checklist;
using test::TempDir;

Json base_doc() {
  return Json{{"case_id", "T1"},
              {"benchmark_id", "tau3_retail"},
              {"claim_text", "the order was cancelled"},
              {"claim_source", "evaluator_semantics"},
              {"required_roles", Json::array({Json{{"role", "state"}, {"reason_code", "r1"}}})},
              {"pass_when", R"(value_eq(state, "/ok", true))"},
              {"fail_when", R"(value_eq(state, "/ok", false))"}};
}

ErrorCode code_of(const Json& doc) {
  try {
    checklist_from_json(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << doc.dump();
  return ErrorCode::Io;
}

TEST(ChecklistTest, ParsesAndRoundTrips) {
  ParsedChecklist p = checklist_from_json(base_doc());
  EXPECT_TRUE(p.warnings.empty());
  EXPECT_EQ(p.checklist.key(), "T1");
  ParsedChecklist back = checklist_from_json(checklist_to_json(p.checklist));
  EXPECT_EQ(back.checklist, p.checklist);
  EXPECT_EQ(canonical_checklist_bytes(back.checklist), canonical_checklist_bytes(p.checklist));
}

TEST(ChecklistTest, RejectsInvalidDocuments) {
  Json undeclared = base_doc();
  undeclared["pass_when"] = "exists(trace)";
  EXPECT_EQ(code_of(undeclared), ErrorCode::UndeclaredRole);

  Json syntax = base_doc();
  syntax["fail_when"] = "exists(state) and";
  EXPECT_EQ(code_of(syntax), ErrorCode::SyntaxError);

  Json no_notes = base_doc();
  no_notes["claim_source"] = "task_text_policy";
  EXPECT_EQ(code_of(no_notes), ErrorCode::HierarchyViolation);
  no_notes["notes"] = "the evaluator does not check the hand-off";
  EXPECT_NO_THROW(checklist_from_json(no_notes));

  Json no_roles = base_doc();
  no_roles["required_roles"] = Json::array();
  EXPECT_EQ(code_of(no_roles), ErrorCode::InvalidChecklist);

  Json dup_roles = base_doc();
  dup_roles["required_roles"].push_back(Json{{"role", "state"}, {"reason_code", "r2"}});
  EXPECT_EQ(code_of(dup_roles), ErrorCode::InvalidChecklist);

  Json bad_arm = base_doc();
  bad_arm["arm"] = "control";
  EXPECT_EQ(code_of(bad_arm), ErrorCode::InvalidChecklist);

  Json stronger = base_doc();
  stronger["stronger_items"] = Json::array({Json{{"name", "x"},
                                                 {"pass_when", "exists(state)"},
                                                 {"fail_when", "not exists(state)"},
                                                 {"justification", " "}}});
  EXPECT_EQ(code_of(stronger), ErrorCode::InvalidChecklist);
}

TEST(ChecklistTest, LintFlagsStrongerItemRepeatingNativeClause) {
  Json doc = base_doc();
  doc["stronger_items"] = Json::array({Json{{"name", "same"},
                                            {"pass_when", R"(value_eq(state, "/ok", true))"},
                                            {"fail_when", R"(value_eq(state, "/ok", false))"},
                                            {"justification", "restates the native check"}}});
  ParsedChecklist p = checklist_from_json(doc);
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_NE(p.warnings[0].find("same"), std::string::npos);
}

TEST(ChecklistTest, LockNeedsTwoDistinctReviewers) {
  CaseChecklist c = checklist_from_json(base_doc()).checklist;
  EXPECT_THROW(lock_checklist(c, {"reviewer-a"}, "2026-03-01T12:00:00Z"), Error);
  EXPECT_THROW(lock_checklist(c, {"reviewer-a", "reviewer-a"}, "2026-03-01T12:00:00Z"), Error);
  LockedChecklist l = lock_two(c);
  EXPECT_TRUE(verify_lock(l));
  EXPECT_EQ(l.lock_hash.size(), 64u);
}

TEST(ChecklistTest, LockBytesRoundTripAndDetectTampering) {
  LockedChecklist l = lock_two(checklist_from_json(base_doc()).checklist);
  std::string bytes = lock_to_bytes(l);
  EXPECT_EQ(lock_from_bytes(bytes), l);
  EXPECT_TRUE(verify_lock_bytes(bytes));

  LockedChecklist edited = l;
  edited.checklist.claim_text = "the order was refunded";
  EXPECT_FALSE(verify_lock(edited));
  LockedChecklist reviewer_swap = l;
  reviewer_swap.reviewer_ids[1] = "reviewer-c";
  EXPECT_FALSE(verify_lock(reviewer_swap));
  LockedChecklist restamped = l;
  restamped.locked_at = "2026-03-02T12:00:00Z";
  EXPECT_FALSE(verify_lock(restamped));

  EXPECT_FALSE(verify_lock_bytes(bytes + " "));
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  EXPECT_FALSE(verify_lock_bytes(flipped));
}

TEST(ChecklistTest, StorePersistsAndRejectsConflicts) {
  TempDir dir;
  ChecklistStore store(dir / "checklists", dir / "locks");
  CaseChecklist c = checklist_from_json(base_doc()).checklist;
  LockedChecklist first = store.persist(lock_two(c));
  EXPECT_TRUE(store.has_lock("tau3_retail", "T1"));

  // Re-locking the same bytes later keeps the original lock.
  LockedChecklist again = store.persist(lock_checklist(c, {"reviewer-c", "reviewer-d"}, "2026-04-01T00:00:00Z"));
  EXPECT_EQ(again, first);

  CaseChecklist changed = c;
  changed.claim_text = "something else";
  try {
    store.persist(lock_two(changed));
    FAIL() << "conflicting lock accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LockConflict);
  }
  EXPECT_EQ(store.load_verified("tau3_retail", "T1"), first);
  auto locks = store.list_locks();
  ASSERT_EQ(locks.size(), 1u);
  EXPECT_EQ(locks[0].second, "T1");

  // A hand-edited lock file fails to load.
  {
    std::ofstream out(store.lock_path("tau3_retail", "T1"), std::ios::binary | std::ios::app);
    out << "\n";
  }
  try {
    store.load_verified("tau3_retail", "T1");
    FAIL() << "tampered lock loaded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LockInvalid);
  }
  EXPECT_THROW(store.load_verified("tau3_retail", "T2"), Error);
}

TEST(ChecklistTest, PairedArmKeys) {
  Json doc = base_doc();
  doc["case_id"] = "banking-u5-i5";
  doc["benchmark_id"] = "agentdojo";
  doc["arm"] = "injected";
  CaseChecklist c = checklist_from_json(doc).checklist;
  EXPECT_EQ(c.key(), "banking-u5-i5.injected");
  TempDir dir;
  ChecklistStore store(dir / "checklists", dir / "locks");
  EXPECT_EQ(store.lock_path("agentdojo", c.key()).filename(), "banking-u5-i5.injected.lock.json");
}

}  // namespace
}  // namespace evaudit
