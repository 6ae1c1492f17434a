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


#pragma once

// Human adjudication: the review queue, the append-only hash-chained ledger,
// and the application of its decisions to scored records.
//
// ledger.jsonl holds one canonical JSON entry per line. Each entry carries
// prev_hash (the previous entry's hash, 64 zeros for the first) and hash
// (SHA-256 of the canonical entry without the hash field).

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evaudit/evaluator.hpp"
#include "evaudit/model.hpp"
#include "evaudit/rational.hpp"

namespace evaudit {

enum class Trigger { NativeEvidenceDisagreement, UnknownAssigned, StrongerDowngrade, SampledCheck };
enum class Decision { Kept, ScorerChecklistMismatch, BenchmarkEvaluatorIssue, EvidenceGap, StrongerOnlyFinding };

template <>
struct EnumTokens<Trigger> {
  static constexpr auto table = std::to_array<std::pair<Trigger, std::string_view>>(
      {{Trigger::NativeEvidenceDisagreement, "native_evidence_disagreement"},
       {Trigger::UnknownAssigned, "unknown_assigned"},
       {Trigger::StrongerDowngrade, "stronger_downgrade"},
       {Trigger::SampledCheck, "sampled_check"}});
  static constexpr std::string_view name = "Trigger";
};

template <>
struct EnumTokens<Decision> {
  static constexpr auto table = std::to_array<std::pair<Decision, std::string_view>>(
      {{Decision::Kept, "kept"},
       {Decision::ScorerChecklistMismatch, "scorer_checklist_mismatch"},
       {Decision::BenchmarkEvaluatorIssue, "benchmark_evaluator_issue"},
       {Decision::EvidenceGap, "evidence_gap"},
       {Decision::StrongerOnlyFinding, "stronger_only_finding"}});
  static constexpr std::string_view name = "Decision";
};

inline const std::string kGenesisHash(64, '0');

struct LedgerEntry {
  std::uint64_t entry_id = 0;
  std::string record_id;
  Trigger trigger = Trigger::SampledCheck;
  Decision decision = Decision::Kept;
  EvidenceLabel before_label = EvidenceLabel::Unknown;
  EvidenceLabel after_label = EvidenceLabel::Unknown;
  std::optional<ConflictCode> conflict_code;
  std::optional<ReasonCode> unknown_code;
  std::string unknown_role;                    // blocking role for unknown_code, may be empty
  std::optional<EvidenceLabel> stronger_label;  // StrongerOnlyFinding: the stronger-channel label
  std::string rationale;
  std::vector<std::string> source_pointers;
  std::string reviewer_id;
  std::string timestamp;  // RFC 3339 UTC; orders corrections
  std::string prev_hash;
  std::string hash;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// Checks the content invariants. Throws InvalidEntry naming the field.
void validate_entry(const LedgerEntry& entry);

Json entry_to_json(const LedgerEntry& entry);

/// Parses an entry. With `draft` set, entry_id, timestamp, prev_hash and hash
/// may be absent (they are assigned on append). Throws InvalidEntry.
LedgerEntry entry_from_json(const Json& j, bool draft = false);

std::string entry_hash(const LedgerEntry& entry);

/// Parses ledger.jsonl text and verifies ids, the hash chain and each entry's
/// invariants. Throws LedgerChainBroken (line-positioned) or InvalidEntry.
std::vector<LedgerEntry> parse_ledger(std::string_view text);

struct AppendReceipt {
  std::uint64_t entry_id = 0;
  std::string hash;
  bool duplicate = false;
};

/// Single-writer store over one ledger file. Appends are serialized by an
/// internal mutex; readers get the verified entries at call time.
class LedgerStore {
 public:
  explicit LedgerStore(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Empty when the file does not exist.
  std::vector<LedgerEntry> entries() const;

  /// Validates, assigns entry_id, prev_hash, hash and (when empty) timestamp,
  /// then appends. A draft identical in content to an existing entry by the
  /// same reviewer for the same record is not appended again.
  /// Errors: InvalidEntry, UnknownRecord when `known_records` lacks the id.
  AppendReceipt append(LedgerEntry draft, const std::set<std::string>& known_records);

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

struct ReviewQueueItem {
  std::string record_id;
  std::vector<Trigger> triggers;  // declaration order, non-empty
  Json snapshot;                  // record with assignment and native outcome, plus probe candidates
  std::optional<std::string> claimed;
};

Json queue_to_json(const std::vector<ReviewQueueItem>& queue);
std::vector<ReviewQueueItem> queue_from_json(const Json& j);

/// Triggers computed from the records' current labels; sampled checks are
/// drawn from the non-flagged records (sorted by id) with a 64-bit Mersenne
/// Twister seeded by `seed`: a record is drawn when its variate is below
/// sample_rate * 2^64. Sorted by record_id.
std::vector<ReviewQueueItem> build_review_queue(const std::vector<RunRecord>& records,
                                                const std::vector<ConflictCandidate>& probe_findings,
                                                const Rational& sample_rate, std::uint64_t seed);

/// Recomputes each named record's review state from the full ledger; records
/// without entries are returned untouched. Throws ConflictingEntries.
std::vector<RunRecord> apply_corrections(const std::vector<RunRecord>& records, const std::vector<LedgerEntry>& ledger);

struct BenchmarkReview {
  std::string benchmark_id;
  std::int64_t reviewed = 0;
  std::int64_t corrected = 0;
  std::map<Decision, std::int64_t> by_decision;  // records by final decision
  std::map<Trigger, std::int64_t> by_trigger;    // entries by trigger
};

/// One row per benchmark present in `records`, sorted by id. Entries for
/// records outside `records` are ignored.
std::vector<BenchmarkReview> ledger_summary(const std::vector<LedgerEntry>& ledger, const std::vector<RunRecord>& records);

Json summary_to_json(const std::vector<BenchmarkReview>& summary);

}  // namespace evaudit
