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

#include <algorithm>
#include <fstream>
#include <random>

#include "evaudit/aggregate.hpp"
#include "evaudit/hash.hpp"
#include "evaudit/ingest.hpp"
#include "json_fields.hpp"

namespace evaudit {

namespace fs = std::filesystem;
using detail::FieldReader;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::InvalidEntry, field, field + ": " + message);
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

template <typename E>
Json optional_token(const std::optional<E>& v) {
  return v ? Json(std::string(to_token(*v))) : Json(nullptr);
}

// Fields that identify what a reviewer decided, for duplicate detection.
Json decision_content(const LedgerEntry& e) {
  Json j = entry_to_json(e);
  for (const char* f : {"entry_id", "timestamp", "prev_hash", "hash"}) j.erase(f);
  return j;
}

}  // namespace

void validate_entry(const LedgerEntry& e) {
  if (e.record_id.empty()) invalid("record_id", "must be non-empty");
  if (blank(e.reviewer_id)) invalid("reviewer_id", "must be non-empty");
  if (blank(e.rationale)) invalid("rationale", "must be non-empty");
  if (e.source_pointers.empty()) invalid("source_pointers", "at least one source pointer is required");
  for (const auto& p : e.source_pointers) {
    if (blank(p)) invalid("source_pointers", "pointers must be non-empty");
  }
  if (e.decision == Decision::Kept && e.before_label != e.after_label) {
    invalid("after_label", "a kept decision leaves the label unchanged");
  }
  if (e.after_label != e.before_label && e.decision != Decision::ScorerChecklistMismatch) {
    invalid("decision", "only scorer_checklist_mismatch may change the label");
  }
  if (e.decision == Decision::ScorerChecklistMismatch && e.after_label == e.before_label) {
    invalid("after_label", "a scorer/checklist mismatch must change the label");
  }
  if (e.decision == Decision::BenchmarkEvaluatorIssue && !e.conflict_code) {
    invalid("conflict_code", "required for benchmark_evaluator_issue");
  }
  if (e.decision != Decision::BenchmarkEvaluatorIssue && e.conflict_code) {
    invalid("conflict_code", "only benchmark_evaluator_issue carries a conflict code");
  }
  if (e.decision == Decision::EvidenceGap && e.after_label != EvidenceLabel::Unknown) {
    invalid("after_label", "an evidence gap leaves the record unknown");
  }
  if (e.after_label == EvidenceLabel::Unknown &&
      (e.decision == Decision::EvidenceGap || e.decision == Decision::ScorerChecklistMismatch) && !e.unknown_code) {
    invalid("unknown_code", "required when the decision leaves the record unknown");
  }
  if (e.unknown_code && e.after_label != EvidenceLabel::Unknown) {
    invalid("unknown_code", "only unknown records carry an unknown code");
  }
  if (!e.unknown_code && !e.unknown_role.empty()) invalid("unknown_role", "given without unknown_code");
  if (e.decision == Decision::StrongerOnlyFinding && !e.stronger_label) {
    invalid("stronger_label", "required for stronger_only_finding");
  }
  if (e.decision != Decision::StrongerOnlyFinding && e.stronger_label) {
    invalid("stronger_label", "only stronger_only_finding carries a stronger label");
  }
}

Json entry_to_json(const LedgerEntry& e) {
  return Json{{"entry_id", e.entry_id},
              {"record_id", e.record_id},
              {"trigger", std::string(to_token(e.trigger))},
              {"decision", std::string(to_token(e.decision))},
              {"before_label", std::string(to_token(e.before_label))},
              {"after_label", std::string(to_token(e.after_label))},
              {"conflict_code", optional_token(e.conflict_code)},
              {"unknown_code", optional_token(e.unknown_code)},
              {"unknown_role", e.unknown_role},
              {"stronger_label", optional_token(e.stronger_label)},
              {"rationale", e.rationale},
              {"source_pointers", e.source_pointers},
              {"reviewer_id", e.reviewer_id},
              {"timestamp", e.timestamp},
              {"prev_hash", e.prev_hash},
              {"hash", e.hash}};
}

LedgerEntry entry_from_json(const Json& j, bool draft) {
  FieldReader r(j, ErrorCode::InvalidEntry);
  LedgerEntry e;
  if (!draft || r.has("entry_id")) {
    const Json& id = r.at("entry_id");
    if (!id.is_number_unsigned() && !(id.is_number_integer() && id.get<std::int64_t>() >= 0)) {
      r.fail("entry_id", "expected a non-negative integer");
    }
    e.entry_id = id.get<std::uint64_t>();
  }
  e.record_id = r.string("record_id");
  e.trigger = r.token<Trigger>("trigger");
  e.decision = r.token<Decision>("decision");
  e.before_label = r.token<EvidenceLabel>("before_label");
  e.after_label = r.token<EvidenceLabel>("after_label");
  if (r.has("conflict_code")) e.conflict_code = r.token<ConflictCode>("conflict_code");
  if (r.has("unknown_code")) e.unknown_code = r.token<ReasonCode>("unknown_code");
  e.unknown_role = r.string_or("unknown_role", "");
  if (r.has("stronger_label")) e.stronger_label = r.token<EvidenceLabel>("stronger_label");
  e.rationale = r.string_or("rationale", "");
  if (r.has("source_pointers")) {
    for (const auto& p : r.array("source_pointers")) {
      if (!p.is_string()) r.fail("source_pointers", "expected strings");
      e.source_pointers.push_back(p.get<std::string>());
    }
  }
  e.reviewer_id = r.string_or("reviewer_id", "");
  if (!draft || r.has("timestamp")) e.timestamp = r.string("timestamp");
  if (!draft) {
    e.prev_hash = r.string("prev_hash");
    e.hash = r.string("hash");
  }
  return e;
}

std::string entry_hash(const LedgerEntry& e) {
  Json j = entry_to_json(e);
  j.erase("hash");
  return sha256_hex(canonical_json(j));
}

std::vector<LedgerEntry> parse_ledger(std::string_view text) {
  std::vector<LedgerEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (blank(line)) continue;
    auto broken = [&](const std::string& why) {
      return PositionedError(ErrorCode::LedgerChainBroken, line_no, "line " + std::to_string(line_no),
                             "ledger line " + std::to_string(line_no) + ": " + why);
    };
    LedgerEntry e;
    try {
      e = entry_from_json(Json::parse(line));
    } catch (const Json::exception& ex) {
      throw broken(std::string("does not parse: ") + ex.what());
    } catch (const Error& ex) {
      throw broken(ex.what());
    }
    if (e.entry_id != out.size() + 1) throw broken("entry_id " + std::to_string(e.entry_id) + " out of sequence");
    const std::string& expected_prev = out.empty() ? kGenesisHash : out.back().hash;
    if (e.prev_hash != expected_prev) throw broken("prev_hash does not match the previous entry");
    if (entry_hash(e) != e.hash) throw broken("entry hash does not match its content");
    try {
      validate_entry(e);
    } catch (const Error& ex) {
      throw broken(ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LedgerEntry> LedgerStore::entries() const {
  std::lock_guard lock(mutex_);
  if (!fs::exists(path_)) return {};
  return parse_ledger(read_file(path_));
}

AppendReceipt LedgerStore::append(LedgerEntry draft, const std::set<std::string>& known_records) {
  validate_entry(draft);
  if (!known_records.contains(draft.record_id)) {
    throw Error(ErrorCode::UnknownRecord, draft.record_id, "no scored record '" + draft.record_id + "'");
  }
  std::lock_guard lock(mutex_);
  std::vector<LedgerEntry> existing = fs::exists(path_) ? parse_ledger(read_file(path_)) : std::vector<LedgerEntry>{};
  Json content = decision_content(draft);
  for (const auto& e : existing) {
    if (e.record_id == draft.record_id && e.reviewer_id == draft.reviewer_id && decision_content(e) == content) {
      return AppendReceipt{e.entry_id, e.hash, true};
    }
  }
  draft.entry_id = existing.size() + 1;
  if (draft.timestamp.empty()) draft.timestamp = utc_timestamp_now();
  draft.prev_hash = existing.empty() ? kGenesisHash : existing.back().hash;
  draft.hash = entry_hash(draft);
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << canonical_json(entry_to_json(draft)) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, path_.string(), "cannot append to " + path_.string());
  return AppendReceipt{draft.entry_id, draft.hash, false};
}

Json queue_to_json(const std::vector<ReviewQueueItem>& queue) {
  Json items = Json::array();
  for (const auto& item : queue) {
    Json triggers = Json::array();
    for (auto t : item.triggers) triggers.push_back(std::string(to_token(t)));
    items.push_back(Json{{"record_id", item.record_id},
                         {"triggers", std::move(triggers)},
                         {"snapshot", item.snapshot},
                         {"claimed", item.claimed ? Json(*item.claimed) : Json(nullptr)}});
  }
  return Json{{"items", std::move(items)}};
}

std::vector<ReviewQueueItem> queue_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord, "queue");
  std::vector<ReviewQueueItem> out;
  std::size_t i = 0;
  for (const auto& item : r.array("items")) {
    FieldReader e = r.element(item, "items", i++);
    ReviewQueueItem q;
    q.record_id = e.string("record_id");
    for (const auto& t : e.array("triggers")) {
      if (!t.is_string() || !parse_token<Trigger>(t.get<std::string>())) e.fail("triggers", "unknown trigger");
      q.triggers.push_back(*parse_token<Trigger>(t.get<std::string>()));
    }
    if (q.triggers.empty()) e.fail("triggers", "must be non-empty");
    q.snapshot = e.at("snapshot");
    if (e.has("claimed")) q.claimed = e.string("claimed");
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<ReviewQueueItem> build_review_queue(const std::vector<RunRecord>& records,
                                                const std::vector<ConflictCandidate>& probe_findings,
                                                const Rational& sample_rate, std::uint64_t seed) {
  std::map<std::string, std::vector<const ConflictCandidate*>> probes;
  for (const auto& c : probe_findings) probes[c.record_id].push_back(&c);

  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const RunRecord* a, const RunRecord* b) { return a->record_id < b->record_id; });

  std::vector<ReviewQueueItem> queue;
  std::vector<const RunRecord*> unflagged;
  auto push = [&](const RunRecord& r, std::vector<Trigger> triggers) {
    Json snapshot = record_to_json(r);
    Json candidates = Json::array();
    if (auto it = probes.find(r.record_id); it != probes.end()) {
      for (const auto* c : it->second) candidates.push_back(candidate_to_json(*c));
    }
    snapshot["probe_findings"] = std::move(candidates);
    queue.push_back(ReviewQueueItem{r.record_id, std::move(triggers), std::move(snapshot), std::nullopt});
  };

  for (const RunRecord* r : sorted) {
    std::vector<Trigger> triggers;
    auto label = effective_label(*r);
    bool disagree = probes.contains(r->record_id);
    if (label == EvidenceLabel::EvidenceFail && r->native.label == NativeLabel::Success) disagree = true;
    if (label == EvidenceLabel::EvidencePass && r->native.label == NativeLabel::Failure) disagree = true;
    if (disagree) triggers.push_back(Trigger::NativeEvidenceDisagreement);
    if (label == EvidenceLabel::Unknown) triggers.push_back(Trigger::UnknownAssigned);
    auto stronger = r->channel_labels.find(Channel::Stronger);
    if (label && stronger != r->channel_labels.end() && evidence_rank(stronger->second) < evidence_rank(*label)) {
      triggers.push_back(Trigger::StrongerDowngrade);
    }
    if (triggers.empty()) {
      unflagged.push_back(r);
    } else {
      push(*r, std::move(triggers));
    }
  }

  if (sample_rate > Rational(0)) {
    bool all = sample_rate >= Rational(1);
    // floor(rate * 2^64) computed without overflow: rate < 1 here.
    unsigned __int128 threshold = (static_cast<unsigned __int128>(sample_rate.num()) << 64) /
                                  static_cast<unsigned __int128>(sample_rate.den());
    std::mt19937_64 rng(seed);
    for (const RunRecord* r : unflagged) {
      std::uint64_t u = rng();
      if (all || static_cast<unsigned __int128>(u) < threshold) push(*r, {Trigger::SampledCheck});
    }
    std::sort(queue.begin(), queue.end(),
              [](const ReviewQueueItem& a, const ReviewQueueItem& b) { return a.record_id < b.record_id; });
  }
  return queue;
}

namespace {

bool earlier(const LedgerEntry* a, const LedgerEntry* b) {
  return std::tie(a->timestamp, a->entry_id) < std::tie(b->timestamp, b->entry_id);
}

// Latest entry of one decision kind; same-timestamp entries at the top that
// disagree on `content` are an error.
template <typename Content>
const LedgerEntry* latest_of(const std::vector<const LedgerEntry*>& entries, Decision decision, Content content) {
  const LedgerEntry* latest = nullptr;
  for (const LedgerEntry* e : entries) {
    if (e->decision == decision) latest = e;  // entries are ordered
  }
  if (latest == nullptr) return nullptr;
  for (const LedgerEntry* e : entries) {
    if (e->decision == decision && e->timestamp == latest->timestamp && content(*e) != content(*latest)) {
      throw Error(ErrorCode::ConflictingEntries, e->record_id,
                  "record " + e->record_id + ": entries " + std::to_string(e->entry_id) + " and " +
                      std::to_string(latest->entry_id) + " disagree at the same timestamp");
    }
  }
  return latest;
}

}  // namespace

std::vector<RunRecord> apply_corrections(const std::vector<RunRecord>& records, const std::vector<LedgerEntry>& ledger) {
  std::map<std::string, std::vector<const LedgerEntry*>> by_record;
  for (const auto& e : ledger) by_record[e.record_id].push_back(&e);
  for (auto& [id, entries] : by_record) std::sort(entries.begin(), entries.end(), earlier);

  std::vector<RunRecord> out = records;
  for (auto& r : out) {
    auto it = by_record.find(r.record_id);
    if (it == by_record.end()) continue;
    const auto& entries = it->second;

    // Start from the scorer's output so repeated application is idempotent.
    if (r.evidence) {
      r.channel_labels[Channel::NativeAligned] = r.evidence->label;
      if (r.evidence->stronger_label) {
        r.channel_labels[Channel::Stronger] = *r.evidence->stronger_label;
      } else {
        r.channel_labels.erase(Channel::Stronger);
      }
    }
    ReviewState state;
    for (const LedgerEntry* e : entries) state.applied_entries.push_back(e->entry_id);
    std::sort(state.applied_entries.begin(), state.applied_entries.end());

    auto reason_of = [](const LedgerEntry& e) {
      return std::make_pair(e.unknown_code, e.unknown_role);
    };
    if (const auto* e = latest_of(entries, Decision::ScorerChecklistMismatch,
                                  [](const LedgerEntry& x) { return std::make_tuple(x.after_label, x.unknown_code, x.unknown_role); })) {
      r.channel_labels[Channel::NativeAligned] = e->after_label;
      if (e->after_label == EvidenceLabel::Unknown) state.unknown_reason = UnknownReason{*e->unknown_code, e->unknown_role};
    }
    if (const auto* e = latest_of(entries, Decision::EvidenceGap, reason_of)) {
      if (effective_label(r) == EvidenceLabel::Unknown) state.unknown_reason = UnknownReason{*e->unknown_code, e->unknown_role};
    }
    if (const auto* e = latest_of(entries, Decision::BenchmarkEvaluatorIssue,
                                  [](const LedgerEntry& x) { return x.conflict_code; })) {
      state.conflict = e->conflict_code;
    }
    if (const auto* e = latest_of(entries, Decision::StrongerOnlyFinding,
                                  [](const LedgerEntry& x) { return x.stronger_label; })) {
      r.channel_labels[Channel::Stronger] = *e->stronger_label;
    }
    r.review = std::move(state);
  }
  return out;
}

std::vector<BenchmarkReview> ledger_summary(const std::vector<LedgerEntry>& ledger, const std::vector<RunRecord>& records) {
  std::map<std::string, const RunRecord*> by_id;
  std::map<std::string, BenchmarkReview> rows;
  for (const auto& r : records) {
    by_id[r.record_id] = &r;
    rows[r.cell.benchmark_id].benchmark_id = r.cell.benchmark_id;
  }
  std::map<std::string, const LedgerEntry*> final_entry;
  for (const auto& e : ledger) {
    auto rec = by_id.find(e.record_id);
    if (rec == by_id.end()) continue;
    ++rows[rec->second->cell.benchmark_id].by_trigger[e.trigger];
    auto& slot = final_entry[e.record_id];
    if (slot == nullptr || earlier(slot, &e)) slot = &e;
  }
  for (const auto& [id, e] : final_entry) {
    auto& row = rows[by_id[id]->cell.benchmark_id];
    ++row.reviewed;
    ++row.by_decision[e->decision];
    if (e->decision == Decision::ScorerChecklistMismatch) ++row.corrected;
  }
  std::vector<BenchmarkReview> out;
  for (auto& [id, row] : rows) out.push_back(std::move(row));
  return out;
}

Json summary_to_json(const std::vector<BenchmarkReview>& summary) {
  Json rows = Json::array();
  for (const auto& s : summary) {
    Json decisions = Json::object();
    for (const auto& [d, token] : EnumTokens<Decision>::table) {
      auto it = s.by_decision.find(d);
      decisions[std::string(token)] = it == s.by_decision.end() ? 0 : it->second;
    }
    Json triggers = Json::object();
    for (const auto& [t, token] : EnumTokens<Trigger>::table) {
      auto it = s.by_trigger.find(t);
      triggers[std::string(token)] = it == s.by_trigger.end() ? 0 : it->second;
    }
    rows.push_back(Json{{"benchmark_id", s.benchmark_id},
                        {"reviewed", s.reviewed},
                        {"corrected", s.corrected},
                        {"decisions", std::move(decisions)},
                        {"triggers", std::move(triggers)}});
  }
  return Json{{"benchmarks", std::move(rows)}};
}

}  // namespace evaudit
