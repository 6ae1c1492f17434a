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


#include "evaudit/ledger.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "evaudit/hash.hpp"
#include "test_support.hpp"

namespace evaudit {
namespace {

using test::TempDir;

LedgerEntry entry(const std::string& record_id, Decision d, EvidenceLabel before, EvidenceLabel after) {
  LedgerEntry e;
  e.record_id = record_id;
  e.trigger = Trigger::SampledCheck;
  e.decision = d;
  e.before_label = before;
  e.after_label = after;
  e.rationale = "checked the final state";
  e.source_pointers = {"state#/ok"};
  e.reviewer_id = "reviewer-a";
  return e;
}

ErrorCode code_of(const LedgerEntry& e) {
  try {
    validate_entry(e);
  } catch (const Error& err) {
    return err.code();
  }
  return ErrorCode::Io;
}

RunRecord scored(const std::string& case_id, EvidenceLabel label, bool native_success,
                 const std::string& bench = "appworld") {
  RunRecord r = make_record(bench + ":" + case_id + ":m", CellKey{bench, "m"}, case_id, {case_id + "-ep"},
                            RecordStatus::Completed, test::native(native_success), "b");
  EvidenceAssignment ev;
  ev.label = label;
  ev.fired_clause = label == EvidenceLabel::EvidencePass   ? FiredClause::PassClause
                    : label == EvidenceLabel::EvidenceFail ? FiredClause::FailClause
                                                           : FiredClause::Neither;
  if (label == EvidenceLabel::Unknown) ev.reason = UnknownReason{ReasonCode::R1, "state"};
  r.evidence = ev;
  r.channel_labels[Channel::NativeAligned] = label;
  return r;
}

constexpr auto P = EvidenceLabel::EvidencePass;
constexpr auto F = EvidenceLabel::EvidenceFail;
constexpr auto U = EvidenceLabel::Unknown;

TEST(LedgerTest, EntryInvariants) {
  EXPECT_NO_THROW(validate_entry(entry("r", Decision::Kept, P, P)));
  EXPECT_EQ(code_of(entry("r", Decision::Kept, P, F)), ErrorCode::InvalidEntry);
  EXPECT_EQ(code_of(entry("r", Decision::ScorerChecklistMismatch, P, P)), ErrorCode::InvalidEntry);
  EXPECT_NO_THROW(validate_entry(entry("r", Decision::ScorerChecklistMismatch, P, F)));
  EXPECT_EQ(code_of(entry("r", Decision::BenchmarkEvaluatorIssue, F, F)), ErrorCode::InvalidEntry);
  LedgerEntry bei = entry("r", Decision::BenchmarkEvaluatorIssue, F, F);
  bei.conflict_code = ConflictCode::C2;
  EXPECT_NO_THROW(validate_entry(bei));
  LedgerEntry gap = entry("r", Decision::EvidenceGap, U, U);
  EXPECT_EQ(code_of(gap), ErrorCode::InvalidEntry);
  gap.unknown_code = ReasonCode::R4;
  gap.unknown_role = "downloads";
  EXPECT_NO_THROW(validate_entry(gap));
  LedgerEntry sof = entry("r", Decision::StrongerOnlyFinding, P, P);
  EXPECT_EQ(code_of(sof), ErrorCode::InvalidEntry);
  sof.stronger_label = F;
  EXPECT_NO_THROW(validate_entry(sof));
  LedgerEntry no_pointer = entry("r", Decision::Kept, P, P);
  no_pointer.source_pointers.clear();
  EXPECT_EQ(code_of(no_pointer), ErrorCode::InvalidEntry);
  LedgerEntry no_rationale = entry("r", Decision::Kept, P, P);
  no_rationale.rationale = "  ";
  EXPECT_EQ(code_of(no_rationale), ErrorCode::InvalidEntry);
  EXPECT_EQ(entry_from_json(entry_to_json(sof), true), sof);
}

TEST(LedgerTest, AppendChainsAndDeduplicates) {
  TempDir dir;
  LedgerStore store(dir / "ledger.jsonl");
  EXPECT_TRUE(store.entries().empty());
  std::set<std::string> known = {"r1", "r2"};

  LedgerEntry first = entry("r1", Decision::Kept, P, P);
  first.timestamp = "2026-03-02T09:00:00Z";
  AppendReceipt a = store.append(first, known);
  EXPECT_EQ(a.entry_id, 1u);
  EXPECT_FALSE(a.duplicate);
  AppendReceipt b = store.append(entry("r2", Decision::ScorerChecklistMismatch, P, F), known);
  EXPECT_EQ(b.entry_id, 2u);
  AppendReceipt again = store.append(first, known);
  EXPECT_TRUE(again.duplicate);
  EXPECT_EQ(again.entry_id, 1u);

  auto entries = store.entries();
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].prev_hash, kGenesisHash);
  EXPECT_EQ(entries[1].prev_hash, entries[0].hash);
  EXPECT_EQ(entries[0].hash, entry_hash(entries[0]));
  EXPECT_FALSE(entries[1].timestamp.empty());

  try {
    store.append(entry("r9", Decision::Kept, P, P), known);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownRecord);
  }
}

TEST(LedgerTest, ParseDetectsEveryTamperedLine) {
  TempDir dir;
  LedgerStore store(dir / "ledger.jsonl");
  for (int i = 0; i < 4; ++i) {
    LedgerEntry e = entry("r" + std::to_string(i), Decision::Kept, P, P);
    e.timestamp = "2026-03-02T09:00:0" + std::to_string(i) + "Z";
    store.append(e, {"r0", "r1", "r2", "r3"});
  }
  std::ifstream in(store.path(), std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(parse_ledger(text).size(), 4u);

  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t nl; (nl = text.find('\n', start)) != std::string::npos; start = nl + 1) {
    lines.push_back(text.substr(start, nl - start));
  }
  ASSERT_EQ(lines.size(), 4u);
  auto join = [](const std::vector<std::string>& ls) {
    std::string out;
    for (const auto& l : ls) out += l + "\n";
    return out;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto edited = lines;
    auto pos = edited[i].find("checked");
    edited[i].replace(pos, 7, "CHECKED");
    EXPECT_THROW(parse_ledger(join(edited)), Error) << "line " << i;
    auto dropped = lines;
    dropped.erase(dropped.begin() + static_cast<long>(i));
    if (i + 1 < lines.size()) EXPECT_THROW(parse_ledger(join(dropped)), Error) << "dropped " << i;
  }
  auto swapped = lines;
  std::swap(swapped[1], swapped[2]);
  EXPECT_THROW(parse_ledger(join(swapped)), Error);
}

TEST(LedgerTest, ApplyCorrectionsUsesLatestDecision) {
  std::vector<RunRecord> records = {scored("c1", P, true), scored("c2", U, true), scored("c3", F, false),
                                    scored("c4", P, true)};
  std::vector<LedgerEntry> ledger;
  auto add = [&](LedgerEntry e, const std::string& ts) {
    e.entry_id = ledger.size() + 1;
    e.timestamp = ts;
    ledger.push_back(e);
  };
  add(entry(records[0].record_id, Decision::ScorerChecklistMismatch, P, F), "2026-03-02T09:00:00Z");
  add(entry(records[0].record_id, Decision::ScorerChecklistMismatch, P, U), "2026-03-02T08:00:00Z");
  ledger.back().unknown_code = ReasonCode::R3;
  LedgerEntry gap = entry(records[1].record_id, Decision::EvidenceGap, U, U);
  gap.unknown_code = ReasonCode::R4;
  gap.unknown_role = "downloads";
  add(gap, "2026-03-02T09:00:01Z");
  LedgerEntry bei = entry(records[2].record_id, Decision::BenchmarkEvaluatorIssue, F, F);
  bei.conflict_code = ConflictCode::C2;
  add(bei, "2026-03-02T09:00:02Z");
  LedgerEntry sof = entry(records[3].record_id, Decision::StrongerOnlyFinding, P, P);
  sof.stronger_label = F;
  add(sof, "2026-03-02T09:00:03Z");

  auto out = apply_corrections(records, ledger);
  EXPECT_EQ(out[0].channel_labels.at(Channel::NativeAligned), F);  // later timestamp wins
  EXPECT_FALSE(out[0].review->unknown_reason);
  EXPECT_EQ(out[0].review->applied_entries, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(out[1].review->unknown_reason, (UnknownReason{ReasonCode::R4, "downloads"}));
  EXPECT_EQ(out[2].review->conflict, ConflictCode::C2);
  EXPECT_EQ(out[2].channel_labels.at(Channel::NativeAligned), F);
  EXPECT_EQ(out[3].channel_labels.at(Channel::Stronger), F);
  EXPECT_EQ(out[3].channel_labels.at(Channel::NativeAligned), P);

  EXPECT_EQ(apply_corrections(out, ledger), out);

  auto summary = ledger_summary(ledger, records);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].reviewed, 4);
  EXPECT_EQ(summary[0].corrected, 1);
  EXPECT_EQ(summary[0].by_trigger.at(Trigger::SampledCheck), 5);
  EXPECT_EQ(summary_to_json(summary)["benchmarks"][0]["decisions"]["kept"], 0);

  // Same timestamp, different outcome.
  ledger[1].timestamp = ledger[0].timestamp;
  try {
    apply_corrections(records, ledger);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConflictingEntries);
  }
}

TEST(LedgerTest, ReviewQueueTriggersAndSampling) {
  std::vector<RunRecord> records;
  for (int i = 0; i < 200; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "c%03d", i);
    records.push_back(scored(id, P, true));
  }
  records[3] = scored("c003", F, true);
  records[4] = scored("c004", U, false);
  records[5].channel_labels[Channel::Stronger] = F;
  std::vector<ConflictCandidate> probes = {{records[6].record_id, ConflictCode::C1, "native.subchecks/a", "x"}};

  auto queue = build_review_queue(records, probes, Rational(1, 20), 20260301);
  std::map<std::string, std::vector<Trigger>> got;
  for (const auto& item : queue) got[item.record_id] = item.triggers;
  EXPECT_EQ(got[records[3].record_id], std::vector<Trigger>{Trigger::NativeEvidenceDisagreement});
  EXPECT_EQ(got[records[4].record_id], std::vector<Trigger>{Trigger::UnknownAssigned});
  EXPECT_EQ(got[records[5].record_id], std::vector<Trigger>{Trigger::StrongerDowngrade});
  EXPECT_EQ(got[records[6].record_id], std::vector<Trigger>{Trigger::NativeEvidenceDisagreement});
  EXPECT_TRUE(std::is_sorted(queue.begin(), queue.end(),
                             [](const auto& a, const auto& b) { return a.record_id < b.record_id; }));

  // Oracle: one draw per unflagged record in id order, kept below floor(2^64/20).
  std::mt19937_64 rng(20260301);
  std::set<std::string> expected;
  for (const auto& r : records) {
    if (r.case_id >= "c003" && r.case_id <= "c006") continue;
    if (rng() < 922337203685477580ULL) expected.insert(r.record_id);
  }
  std::set<std::string> sampled;
  for (const auto& item : queue) {
    if (item.triggers == std::vector<Trigger>{Trigger::SampledCheck}) sampled.insert(item.record_id);
  }
  EXPECT_EQ(sampled, expected);
  EXPECT_FALSE(sampled.empty());

  EXPECT_EQ(build_review_queue(records, probes, Rational(0), 1).size(), 4u);
  EXPECT_EQ(build_review_queue(records, probes, Rational(1), 1).size(), 200u);
  auto back = queue_from_json(queue_to_json(queue));
  ASSERT_EQ(back.size(), queue.size());
  EXPECT_EQ(back[0].snapshot, queue[0].snapshot);
}

}  // namespace
}  // namespace evaudit
