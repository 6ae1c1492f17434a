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

// Shared vocabulary: labels, statuses, taxonomies, record identity and the
// cell key used for aggregation. Everything here is an immutable value after
// construction.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evaudit/error.hpp"
#include "evaudit/rational.hpp"

namespace evaudit {

using Json = nlohmann::json;

enum class EvidenceLabel { EvidencePass, EvidenceFail, Unknown };
enum class NativeLabel { Success, Failure };
enum class RecordStatus { Completed, AgentFault, InfrastructureFailure, PreRunFailure };
enum class ReasonCode { R1, R2, R3, R4 };
enum class ConflictCode { C1, C2, C3, C4, C5 };
enum class Channel { NativeAligned, Stronger };
enum class TriBool { False, Undetermined, True };
enum class FiredClause { FailClause, PassClause, Neither };
enum class ClaimSource { EvaluatorSemantics, TaskTextPolicy, Schema };
enum class MediaKind { Structured, Text, Binary };

// External token tables. Every enum serializes as a lower_snake_case token.
template <typename E>
struct EnumTokens;

#define EVAUDIT_ENUM_TOKENS(Type, ...)                                     \
  template <>                                                             \
  struct EnumTokens<Type> {                                               \
    static constexpr auto table = std::to_array<std::pair<Type, std::string_view>>({__VA_ARGS__}); \
    static constexpr std::string_view name = #Type;                       \
  }

EVAUDIT_ENUM_TOKENS(EvidenceLabel, {EvidenceLabel::EvidencePass, "evidence_pass"},
                    {EvidenceLabel::EvidenceFail, "evidence_fail"}, {EvidenceLabel::Unknown, "unknown"});
EVAUDIT_ENUM_TOKENS(NativeLabel, {NativeLabel::Success, "success"}, {NativeLabel::Failure, "failure"});
EVAUDIT_ENUM_TOKENS(RecordStatus, {RecordStatus::Completed, "completed"}, {RecordStatus::AgentFault, "agent_fault"},
                    {RecordStatus::InfrastructureFailure, "infrastructure_failure"},
                    {RecordStatus::PreRunFailure, "pre_run_failure"});
EVAUDIT_ENUM_TOKENS(ReasonCode, {ReasonCode::R1, "r1"}, {ReasonCode::R2, "r2"}, {ReasonCode::R3, "r3"},
                    {ReasonCode::R4, "r4"});
EVAUDIT_ENUM_TOKENS(ConflictCode, {ConflictCode::C1, "c1"}, {ConflictCode::C2, "c2"}, {ConflictCode::C3, "c3"},
                    {ConflictCode::C4, "c4"}, {ConflictCode::C5, "c5"});
EVAUDIT_ENUM_TOKENS(Channel, {Channel::NativeAligned, "native_aligned"}, {Channel::Stronger, "stronger"});
EVAUDIT_ENUM_TOKENS(TriBool, {TriBool::True, "true"}, {TriBool::False, "false"},
                    {TriBool::Undetermined, "undetermined"});
EVAUDIT_ENUM_TOKENS(FiredClause, {FiredClause::FailClause, "fail_clause"}, {FiredClause::PassClause, "pass_clause"},
                    {FiredClause::Neither, "neither"});
EVAUDIT_ENUM_TOKENS(ClaimSource, {ClaimSource::EvaluatorSemantics, "evaluator_semantics"},
                    {ClaimSource::TaskTextPolicy, "task_text_policy"}, {ClaimSource::Schema, "schema"});
EVAUDIT_ENUM_TOKENS(MediaKind, {MediaKind::Structured, "structured"}, {MediaKind::Text, "text"},
                    {MediaKind::Binary, "binary"});

#undef EVAUDIT_ENUM_TOKENS

template <typename E>
constexpr std::string_view to_token(E value) noexcept {
  for (const auto& [v, token] : EnumTokens<E>::table) {
    if (v == value) return token;
  }
  return {};
}

template <typename E>
std::optional<E> parse_token(std::string_view token) noexcept {
  for (const auto& [v, t] : EnumTokens<E>::table) {
    if (t == token) return v;
  }
  return std::nullopt;
}

// Throws InvalidRecord naming `field` when the token is not recognised.
template <typename E>
E require_token(std::string_view token, std::string_view field) {
  if (auto v = parse_token<E>(token)) return *v;
  throw Error(ErrorCode::InvalidRecord, std::string(field),
              std::string(field) + ": unknown " + std::string(EnumTokens<E>::name) + " token '" +
                  std::string(token) + "'");
}

/// Evidence labels ordered Fail < Unknown < Pass (used for paired-arm merging
/// and stronger-channel combination).
constexpr int evidence_rank(EvidenceLabel label) noexcept {
  switch (label) {
    case EvidenceLabel::EvidenceFail: return 0;
    case EvidenceLabel::Unknown: return 1;
    case EvidenceLabel::EvidencePass: return 2;
  }
  return 1;
}

struct CellKey {
  std::string benchmark_id;  // d
  std::string model_id;      // a

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct Subcheck {
  std::string name;
  bool passed = false;

  friend bool operator==(const Subcheck&, const Subcheck&) = default;
};

struct NativeOutcome {
  NativeLabel label = NativeLabel::Failure;
  std::optional<Rational> score_value;  // scalar reward in [0,1] when the benchmark emits one
  std::vector<Subcheck> subchecks;

  friend bool operator==(const NativeOutcome&, const NativeOutcome&) = default;
};

struct UnknownReason {
  ReasonCode code = ReasonCode::R1;
  std::string blocking_role;

  friend bool operator==(const UnknownReason&, const UnknownReason&) = default;
};

struct AtomOutcome {
  std::string clause;  // "fail", "pass", "stronger:<name>:fail", ...; prefixed "<arm>:" for merged arms
  std::size_t atom_index = 0;
  TriBool outcome = TriBool::Undetermined;
  std::string source_pointer;

  friend bool operator==(const AtomOutcome&, const AtomOutcome&) = default;
};

struct EvidenceAssignment {
  EvidenceLabel label = EvidenceLabel::Unknown;
  std::optional<UnknownReason> reason;
  FiredClause fired_clause = FiredClause::Neither;
  std::vector<AtomOutcome> atom_outcomes;
  std::string checklist_hash;
  // Roles that blocked the decision, in priority order (required_roles order,
  // arms concatenated benign-first). Kept so paired arms can be re-prioritised.
  std::vector<UnknownReason> blocking_candidates;
  std::optional<EvidenceLabel> stronger_label;
  std::vector<std::string> findings;

  friend bool operator==(const EvidenceAssignment&, const EvidenceAssignment&) = default;
};

/// Outcome of applying the adjudication ledger to one record.
struct ReviewState {
  std::optional<ConflictCode> conflict;
  std::optional<UnknownReason> unknown_reason;
  std::vector<std::uint64_t> applied_entries;

  friend bool operator==(const ReviewState&, const ReviewState&) = default;
};

struct RunRecord {
  std::string record_id;
  CellKey cell;
  std::string case_id;
  std::vector<std::string> episode_refs;
  RecordStatus status = RecordStatus::Completed;
  NativeOutcome native;
  std::string bundle_ref;  // empty only for records that retained no artifacts
  std::optional<EvidenceAssignment> evidence;
  std::map<Channel, EvidenceLabel> channel_labels;
  std::optional<ReviewState> review;
  Json extra = Json::object();  // unrecognised top-level fields, preserved verbatim

  bool paired() const noexcept { return episode_refs.size() == 2; }

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Builds a record with no evidence and no channel labels. Throws
/// InvalidRecord naming the offending field.
RunRecord make_record(std::string record_id, CellKey cell, std::string case_id,
                      std::vector<std::string> episode_refs, RecordStatus status, NativeOutcome native,
                      std::string bundle_ref);

/// Checks every per-record invariant, including those on evidence and channel
/// labels. Throws InvalidRecord.
void validate_record(const RunRecord& record);

}  // namespace evaudit
