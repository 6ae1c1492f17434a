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

// Case checklists: the per-case claim, the artifacts that decide it, and the
// draft -> review -> lock lifecycle.
//
// Files:
//   <checklist_dir>/<benchmark>/<case_id>.json          draft document
//   <checklist_dir>/<benchmark>/<case_id>.<arm>.json    per-arm document of a paired case
//   <lock_dir>/<benchmark>/<case_id>[.<arm>].lock.json  locked document

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evaudit/model.hpp"
#include "evaudit/predicate.hpp"

namespace evaudit {

constexpr int kChecklistSchemaVersion = 1;

inline constexpr std::string_view kBenignArm = "benign";
inline constexpr std::string_view kInjectedArm = "injected";

struct RequiredRole {
  std::string role;
  ReasonCode reason_code = ReasonCode::R1;
  std::string description;

  friend bool operator==(const RequiredRole&, const RequiredRole&) = default;
};

struct StrongerItem {
  std::string name;
  Predicate pass_when;
  Predicate fail_when;
  std::string justification;

  friend bool operator==(const StrongerItem&, const StrongerItem&) = default;
};

struct CaseChecklist {
  std::string case_id;
  std::string benchmark_id;
  std::optional<std::string> arm;  // "benign" / "injected" for paired-arm cases
  std::string claim_text;
  ClaimSource claim_source = ClaimSource::EvaluatorSemantics;
  std::vector<RequiredRole> required_roles;  // order is semantic: Unknown-reason priority
  Predicate pass_when;
  Predicate fail_when;
  std::vector<StrongerItem> stronger_items;
  std::string notes;

  /// "<case_id>" or "<case_id>.<arm>"; the file stem in both stores.
  std::string key() const { return arm ? case_id + "." + *arm : case_id; }

  friend bool operator==(const CaseChecklist&, const CaseChecklist&) = default;
};

struct ParsedChecklist {
  CaseChecklist checklist;
  std::vector<std::string> warnings;
};

/// Validates every document invariant. Errors: SyntaxError (predicates),
/// UndeclaredRole, HierarchyViolation, InvalidChecklist.
ParsedChecklist checklist_from_json(const Json& document);
ParsedChecklist parse_checklist(const std::filesystem::path& path);

/// Document form with predicates rendered canonically.
Json checklist_to_json(const CaseChecklist& checklist);

/// Canonical bytes (sorted keys, UTF-8, no insignificant whitespace).
std::string canonical_checklist_bytes(const CaseChecklist& checklist);

struct LockedChecklist {
  CaseChecklist checklist;
  std::string lock_hash;  // SHA-256 of the canonical checklist bytes
  std::string locked_at;
  std::vector<std::string> reviewer_ids;
  std::string seal;  // SHA-256 over (lock_hash, locked_at, reviewer_ids)

  friend bool operator==(const LockedChecklist&, const LockedChecklist&) = default;
};

/// Errors: InsufficientReviewers when fewer than two distinct reviewers.
LockedChecklist lock_checklist(const CaseChecklist& checklist, const std::vector<std::string>& reviewers,
                               std::string locked_at);

/// True iff both the checklist hash and the seal recompute to the stored
/// values and the reviewer set is still valid.
bool verify_lock(const LockedChecklist& locked);

/// Canonical lock-file bytes.
std::string lock_to_bytes(const LockedChecklist& locked);

/// Parses lock-file bytes; throws LockInvalid if they are not exactly the
/// canonical serialization of a well-formed lock.
LockedChecklist lock_from_bytes(std::string_view bytes);

/// verify_lock over raw file bytes; any parse or canonical-form failure is
/// `false`.
bool verify_lock_bytes(std::string_view bytes);

/// Lint: stronger items whose pass clause repeats the native pass clause.
std::vector<std::string> lint_checklist(const CaseChecklist& checklist);

class ChecklistStore {
 public:
  ChecklistStore(std::filesystem::path checklist_dir, std::filesystem::path lock_dir)
      : checklist_dir_(std::move(checklist_dir)), lock_dir_(std::move(lock_dir)) {}

  std::filesystem::path checklist_path(const std::string& benchmark_id, const std::string& key) const;
  std::filesystem::path lock_path(const std::string& benchmark_id, const std::string& key) const;

  /// Persists a lock. Re-locking identical checklist bytes keeps the existing
  /// lock and returns it; different bytes for a locked case throw LockConflict.
  LockedChecklist persist(const LockedChecklist& locked) const;

  /// Loads a lock and verifies it. Throws LockInvalid naming the case.
  LockedChecklist load_verified(const std::string& benchmark_id, const std::string& key) const;

  bool has_lock(const std::string& benchmark_id, const std::string& key) const;

  /// (benchmark, key) of every lock file present, sorted.
  std::vector<std::pair<std::string, std::string>> list_locks() const;

 private:
  std::filesystem::path checklist_dir_;
  std::filesystem::path lock_dir_;
};

}  // namespace evaudit
