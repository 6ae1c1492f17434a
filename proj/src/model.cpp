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


#include "evaudit/model.hpp"

#include <set>

namespace evaudit {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingBundle: return "DanglingBundle";
    case ErrorCode::BenchmarkMismatch: return "BenchmarkMismatch";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UndeclaredRole: return "UndeclaredRole";
    case ErrorCode::HierarchyViolation: return "HierarchyViolation";
    case ErrorCode::InvalidChecklist: return "InvalidChecklist";
    case ErrorCode::InsufficientReviewers: return "InsufficientReviewers";
    case ErrorCode::LockConflict: return "LockConflict";
    case ErrorCode::LockInvalid: return "LockInvalid";
    case ErrorCode::ChecklistInconsistent: return "ChecklistInconsistent";
    case ErrorCode::MalformedArtifact: return "MalformedArtifact";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::NoDecidableRecords: return "NoDecidableRecords";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::InvalidEntry: return "InvalidEntry";
    case ErrorCode::UnknownRecord: return "UnknownRecord";
    case ErrorCode::ConflictingEntries: return "ConflictingEntries";
    case ErrorCode::LedgerChainBroken: return "LedgerChainBroken";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::InvalidRecord, field, field + ": " + message);
}

}  // namespace

RunRecord make_record(std::string record_id, CellKey cell, std::string case_id,
                      std::vector<std::string> episode_refs, RecordStatus status, NativeOutcome native,
                      std::string bundle_ref) {
  RunRecord record;
  record.record_id = std::move(record_id);
  record.cell = std::move(cell);
  record.case_id = std::move(case_id);
  record.episode_refs = std::move(episode_refs);
  record.status = status;
  record.native = std::move(native);
  record.bundle_ref = std::move(bundle_ref);
  validate_record(record);
  return record;
}

void validate_record(const RunRecord& record) {
  if (record.record_id.empty()) invalid("record_id", "must be non-empty");
  if (record.cell.benchmark_id.empty()) invalid("cell.benchmark_id", "must be non-empty");
  if (record.cell.model_id.empty()) invalid("cell.model_id", "must be non-empty");
  if (record.case_id.empty()) invalid("case_id", "must be non-empty");
  if (record.episode_refs.empty() || record.episode_refs.size() > 2) {
    invalid("episode_refs", "must hold 1 episode (2 for paired-arm cases), got " +
                                std::to_string(record.episode_refs.size()));
  }
  for (const auto& ref : record.episode_refs) {
    if (ref.empty()) invalid("episode_refs", "episode identifiers must be non-empty");
  }
  if (record.paired() && record.episode_refs[0] == record.episode_refs[1]) {
    invalid("episode_refs", "paired arms must reference distinct episodes");
  }
  if (record.bundle_ref.empty() && record.status == RecordStatus::Completed) {
    invalid("bundle_ref", "completed records must reference an artifact bundle");
  }
  if (const auto& score = record.native.score_value) {
    if (*score < Rational(0) || *score > Rational(1)) invalid("native.score_value", "must lie in [0,1]");
  }
  std::set<std::string> names;
  for (const auto& sub : record.native.subchecks) {
    if (sub.name.empty()) invalid("native.subchecks", "subcheck names must be non-empty");
    if (!names.insert(sub.name).second) invalid("native.subchecks", "duplicate subcheck name '" + sub.name + "'");
  }
  if (record.evidence) {
    const auto& ev = *record.evidence;
    bool unknown = ev.label == EvidenceLabel::Unknown;
    if (unknown != ev.reason.has_value()) invalid("evidence.reason", "must be present exactly when label is unknown");
    if (unknown != (ev.fired_clause == FiredClause::Neither)) {
      invalid("evidence.fired_clause", "must be 'neither' exactly when label is unknown");
    }
    if (!record.channel_labels.contains(Channel::NativeAligned)) {
      invalid("channel_labels", "records with evidence need a native_aligned label");
    }
  }
}

}  // namespace evaudit
