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

// Three-valued evaluation of locked checklists over retained artifacts.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evaudit/checklist.hpp"
#include "evaudit/ingest.hpp"
#include "evaudit/model.hpp"

namespace evaudit {

// Kleene strong logic, False < Undetermined < True.
constexpr TriBool kleene_not(TriBool v) noexcept {
  return v == TriBool::True ? TriBool::False : v == TriBool::False ? TriBool::True : TriBool::Undetermined;
}
constexpr TriBool kleene_and(TriBool a, TriBool b) noexcept { return a < b ? a : b; }
constexpr TriBool kleene_or(TriBool a, TriBool b) noexcept { return a < b ? b : a; }

/// One artifact's bytes, with the structured form parsed up front. Decimal
/// numbers keep their source token (keyed by JSON pointer) so value_eq can
/// compare tokens instead of doubles.
struct LoadedArtifact {
  std::string role;
  MediaKind media_kind = MediaKind::Structured;
  std::string bytes;
  std::optional<Json> document;                     // structured artifacts that parsed
  std::map<std::string, std::string> decimal_tokens;  // pointer -> raw token
  std::string parse_error;                          // structured artifacts that did not
};

LoadedArtifact load_artifact(std::string role, MediaKind kind, std::string bytes);

/// The artifacts available to a predicate, keyed by role.
class EvidenceView {
 public:
  EvidenceView() = default;

  /// Reads every entry of `bundle` from the store. Entries whose file is
  /// missing or whose bytes no longer hash to the manifest value are left out
  /// (the role reads as missing) and reported in findings().
  static EvidenceView from_bundle(const ArtifactBundle& bundle, const std::filesystem::path& store_root);

  void add(LoadedArtifact artifact);
  const LoadedArtifact* find(std::string_view role) const noexcept;
  const std::vector<std::string>& findings() const noexcept { return findings_; }

 private:
  std::map<std::string, LoadedArtifact, std::less<>> artifacts_;
  std::vector<std::string> findings_;
};

/// Evaluates one atom. Problems that make the atom unanswerable (malformed
/// structured artifact, wrong media kind) yield Undetermined and append a
/// finding when `findings` is given.
TriBool eval_atom(const Atom& atom, const EvidenceView& view, std::vector<std::string>* findings = nullptr);

TriBool eval_predicate(const Predicate& predicate, const EvidenceView& view,
                       std::vector<std::string>* findings = nullptr);

/// "<role>", "<role>#<pointer>", "<role>~/<pattern>/", "<role>@<tool>[#<pointer>]".
std::string atom_source_pointer(const Atom& atom);

/// Label for a clause pair. Throws ChecklistInconsistent when both are True.
EvidenceLabel decide_label(TriBool fail_value, TriBool pass_value, const std::string& subject);

/// Errors: LockInvalid when the lock does not verify; ChecklistInconsistent.
EvidenceAssignment assign_evidence_label(const LockedChecklist& locked, const EvidenceView& view);

/// Priority rule over ordered candidates: drop R2 when anything else is
/// present, then take the first. Empty input yields nullopt.
std::optional<UnknownReason> pick_unknown_reason(const std::vector<UnknownReason>& candidates);

/// Combines per-arm assignments of one paired case. Arms are (benign,
/// injected); atom clauses gain an "<arm>:" prefix and the checklist hash is
/// "<benign hash>+<injected hash>".
EvidenceAssignment merge_paired_arms(const EvidenceAssignment& benign, const EvidenceAssignment& injected);

struct ConflictCandidate {
  std::string record_id;
  ConflictCode suggested_code = ConflictCode::C1;
  std::string evidence_pointer;
  std::string description;

  friend bool operator==(const ConflictCandidate&, const ConflictCandidate&) = default;
};

Json candidate_to_json(const ConflictCandidate& candidate);
ConflictCandidate candidate_from_json(const Json& j);

/// Looks only at the native outcome; never changes a label.
std::vector<ConflictCandidate> probe_native_consistency(const RunRecord& record);

}  // namespace evaudit
