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

// Loading of normalized run records, artifact bundles and sampling manifests,
// plus the denominator rule.
//
// On-disk layout under a store root:
//   bundles/<bundle_id>/manifest.json   {"bundle_id": ..., "entries": [...]}
//   bundles/<bundle_id>/<path>          artifact bytes
//
// A bundle id is the SHA-256 of the canonical JSON of its entries (sorted by
// role), so it addresses both the manifest and, through the per-entry hashes,
// every artifact byte.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evaudit/model.hpp"

namespace evaudit {

constexpr int kRecordSchemaVersion = 1;

struct ArtifactEntry {
  std::string role;
  MediaKind media_kind = MediaKind::Structured;
  std::string path;  // relative to the bundle directory
  std::string content_hash;

  friend bool operator==(const ArtifactEntry&, const ArtifactEntry&) = default;
};

struct ArtifactBundle {
  std::string bundle_id;
  std::vector<ArtifactEntry> entries;

  const ArtifactEntry* find(std::string_view role) const noexcept;

  friend bool operator==(const ArtifactBundle&, const ArtifactBundle&) = default;
};

/// Artifact to be stored by write_bundle.
struct ArtifactFile {
  std::string role;
  MediaKind media_kind = MediaKind::Structured;
  std::string path;
  std::string bytes;
};

std::string compute_bundle_id(std::vector<ArtifactEntry> entries);
Json bundle_to_json(const ArtifactBundle& bundle);
ArtifactBundle bundle_from_json(const Json& j);

/// Stores artifacts under `store_root/bundles/<id>/` and returns the manifest.
/// Storing identical content twice is a no-op.
ArtifactBundle write_bundle(const std::filesystem::path& store_root, const std::vector<ArtifactFile>& files);

/// Reads bundles/<bundle_id>/manifest.json. Throws DanglingBundle when absent.
ArtifactBundle load_bundle(const std::filesystem::path& store_root, const std::string& bundle_id);

std::filesystem::path bundle_dir(const std::filesystem::path& store_root, const std::string& bundle_id);

enum class BundleFindingKind { HashMismatch, MissingFile, BundleIdMismatch, UnsafePath };

struct BundleFinding {
  BundleFindingKind kind;
  std::string role;
  std::string detail;
};

std::string_view to_string(BundleFindingKind kind) noexcept;

/// Recomputes every entry hash; an empty result means the bundle is intact.
std::vector<BundleFinding> verify_bundle(const ArtifactBundle& bundle, const std::filesystem::path& store_root);

// ---- records ----------------------------------------------------------------

Json assignment_to_json(const EvidenceAssignment& assignment);
EvidenceAssignment assignment_from_json(const Json& j);

Json record_to_json(const RunRecord& record);

/// Throws InvalidRecord (field-level) on schema problems.
RunRecord record_from_json(const Json& j);

/// Reads a line-delimited record file. Blank lines are skipped. Errors:
/// ParseError(line, ...), DuplicateId(record_id), DanglingBundle(record_id).
/// Pass an empty `store_root` to skip bundle resolution.
std::vector<RunRecord> load_run_records(const std::filesystem::path& path, const std::filesystem::path& store_root);

/// Same parser over in-memory text; used by load_run_records.
std::vector<RunRecord> parse_run_records(std::string_view text);

std::string serialize_run_records(const std::vector<RunRecord>& records);
void save_run_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);

// ---- denominator rule -----------------------------------------------------

struct ExcludedRecord {
  RunRecord record;
  RecordStatus reason;
};

struct DenominatorPartition {
  std::vector<RunRecord> included;
  std::vector<ExcludedRecord> excluded;
};

/// Completed and AgentFault records stay in N; infrastructure and pre-run
/// failures leave it. Input order is preserved within each side.
DenominatorPartition apply_denominator_rule(const std::vector<RunRecord>& records);

// ---- sampling manifests ---------------------------------------------------

struct ManifestExclusion {
  std::string case_id;
  std::string reason;
};

struct SamplingManifest {
  std::string benchmark_id;
  std::int64_t pool_size = 0;
  std::vector<ManifestExclusion> exclusions;
  std::int64_t seed = 0;
  std::vector<std::string> selected_case_ids;
};

SamplingManifest manifest_from_json(const Json& j);
Json manifest_to_json(const SamplingManifest& manifest);
SamplingManifest load_manifest(const std::filesystem::path& path);

struct ManifestReport {
  // (i) selected cases lacking a record for some model seen in the benchmark
  std::vector<std::pair<std::string, std::string>> missing;  // (case_id, model_id)
  // (ii) records whose case is outside the selection
  std::vector<std::string> stray_record_ids;
  // (iii) (cell, case) pairs with more than one record
  std::vector<std::pair<CellKey, std::string>> duplicates;

  bool consistent() const noexcept { return missing.empty() && stray_record_ids.empty() && duplicates.empty(); }
};

/// Throws BenchmarkMismatch when any record belongs to another benchmark, and
/// InvalidManifest when the manifest itself is malformed (duplicate selection,
/// excluded case selected, selection larger than the eligible pool).
ManifestReport validate_sampling_manifest(const SamplingManifest& manifest, const std::vector<RunRecord>& records);

}  // namespace evaudit
