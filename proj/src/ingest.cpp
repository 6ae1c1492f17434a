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


#include "evaudit/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "evaudit/hash.hpp"
#include "json_fields.hpp"

namespace evaudit {

namespace fs = std::filesystem;
using detail::FieldReader;

const ArtifactEntry* ArtifactBundle::find(std::string_view role) const noexcept {
  for (const auto& e : entries) {
    if (e.role == role) return &e;
  }
  return nullptr;
}

namespace {

Json entry_to_json(const ArtifactEntry& e) {
  return Json{{"role", e.role},
              {"media_kind", std::string(to_token(e.media_kind))},
              {"path", e.path},
              {"content_hash", e.content_hash}};
}

bool safe_relative_path(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.find('\\') != std::string_view::npos) return false;
  fs::path p(path);
  for (const auto& part : p) {
    if (part == ".." || part == ".") return false;
  }
  return true;
}

}  // namespace

std::string compute_bundle_id(std::vector<ArtifactEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.role < b.role; });
  Json list = Json::array();
  for (const auto& e : entries) list.push_back(entry_to_json(e));
  return sha256_hex(canonical_json(list));
}

Json bundle_to_json(const ArtifactBundle& bundle) {
  Json entries = Json::array();
  for (const auto& e : bundle.entries) entries.push_back(entry_to_json(e));
  return Json{{"bundle_id", bundle.bundle_id}, {"entries", std::move(entries)}};
}

ArtifactBundle bundle_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::ParseError, "bundle");
  ArtifactBundle bundle;
  bundle.bundle_id = r.string("bundle_id");
  std::set<std::string> roles;
  std::size_t i = 0;
  for (const auto& item : r.array("entries")) {
    FieldReader e = r.element(item, "entries", i++);
    ArtifactEntry entry{e.string("role"), e.token<MediaKind>("media_kind"), e.string("path"), e.string("content_hash")};
    if (!roles.insert(entry.role).second) e.fail("role", "duplicate role '" + entry.role + "'");
    bundle.entries.push_back(std::move(entry));
  }
  return bundle;
}

fs::path bundle_dir(const fs::path& store_root, const std::string& bundle_id) {
  return store_root / "bundles" / bundle_id;
}

ArtifactBundle write_bundle(const fs::path& store_root, const std::vector<ArtifactFile>& files) {
  ArtifactBundle bundle;
  std::set<std::string> roles;
  for (const auto& f : files) {
    if (!roles.insert(f.role).second) throw Error(ErrorCode::InvalidRecord, f.role, "duplicate artifact role " + f.role);
    if (!safe_relative_path(f.path)) throw Error(ErrorCode::InvalidRecord, f.role, "unsafe artifact path " + f.path);
    bundle.entries.push_back(ArtifactEntry{f.role, f.media_kind, f.path, sha256_hex(f.bytes)});
  }
  std::sort(bundle.entries.begin(), bundle.entries.end(), [](const auto& a, const auto& b) { return a.role < b.role; });
  bundle.bundle_id = compute_bundle_id(bundle.entries);
  fs::path dir = bundle_dir(store_root, bundle.bundle_id);
  if (fs::exists(dir / "manifest.json")) return bundle;
  for (const auto& f : files) write_file_atomic(dir / f.path, f.bytes);
  write_file_atomic(dir / "manifest.json", bundle_to_json(bundle).dump(2) + "\n");
  return bundle;
}

ArtifactBundle load_bundle(const fs::path& store_root, const std::string& bundle_id) {
  fs::path manifest = bundle_dir(store_root, bundle_id) / "manifest.json";
  if (bundle_id.empty() || bundle_id.find('/') != std::string::npos || !fs::exists(manifest)) {
    throw Error(ErrorCode::DanglingBundle, bundle_id, "no artifact bundle '" + bundle_id + "'");
  }
  Json j;
  try {
    j = Json::parse(read_file(manifest));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, bundle_id, "bundle manifest " + manifest.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

std::string_view to_string(BundleFindingKind kind) noexcept {
  switch (kind) {
    case BundleFindingKind::HashMismatch: return "hash_mismatch";
    case BundleFindingKind::MissingFile: return "missing_file";
    case BundleFindingKind::BundleIdMismatch: return "bundle_id_mismatch";
    case BundleFindingKind::UnsafePath: return "unsafe_path";
  }
  return "unknown";
}

std::vector<BundleFinding> verify_bundle(const ArtifactBundle& bundle, const fs::path& store_root) {
  std::vector<BundleFinding> findings;
  if (compute_bundle_id(bundle.entries) != bundle.bundle_id) {
    findings.push_back({BundleFindingKind::BundleIdMismatch, "", "manifest entries do not hash to " + bundle.bundle_id});
  }
  fs::path dir = bundle_dir(store_root, bundle.bundle_id);
  for (const auto& e : bundle.entries) {
    if (!safe_relative_path(e.path)) {
      findings.push_back({BundleFindingKind::UnsafePath, e.role, e.path});
      continue;
    }
    fs::path file = dir / e.path;
    if (!fs::is_regular_file(file)) {
      findings.push_back({BundleFindingKind::MissingFile, e.role, file.string()});
      continue;
    }
    std::string actual = sha256_hex(read_file(file));
    if (actual != e.content_hash) {
      findings.push_back({BundleFindingKind::HashMismatch, e.role, "expected " + e.content_hash + ", found " + actual});
    }
  }
  return findings;
}

// ---- records ----------------------------------------------------------------

namespace {

Json reason_to_json(const UnknownReason& r) {
  return Json{{"code", std::string(to_token(r.code))}, {"blocking_role", r.blocking_role}};
}

UnknownReason reason_from(const FieldReader& r) {
  return UnknownReason{r.token<ReasonCode>("code"), r.string("blocking_role")};
}

Rational score_from_json(const FieldReader& r, std::string_view field) {
  const Json& v = r.at(field);
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) {
      std::string text = v.dump();
      if (text.find_first_of("eE") != std::string::npos) r.fail(field, "use a plain decimal or p/q string");
      return Rational::parse(text);
    }
    if (v.is_string()) return Rational::parse(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    r.fail(field, e.what());
  } catch (const std::domain_error& e) {
    r.fail(field, e.what());
  }
  r.fail(field, "expected a number or 'p/q' string");
}

const std::set<std::string, std::less<>> kRecordFields = {
    "schema_version", "record_id", "cell",           "case_id", "episode_refs", "status",
    "native",         "bundle_ref", "evidence",      "channel_labels", "review"};

}  // namespace

Json assignment_to_json(const EvidenceAssignment& a) {
  Json atoms = Json::array();
  for (const auto& o : a.atom_outcomes) {
    atoms.push_back(Json{{"clause", o.clause},
                         {"atom_index", o.atom_index},
                         {"outcome", std::string(to_token(o.outcome))},
                         {"source_pointer", o.source_pointer}});
  }
  Json candidates = Json::array();
  for (const auto& c : a.blocking_candidates) candidates.push_back(reason_to_json(c));
  Json j{{"label", std::string(to_token(a.label))},
         {"reason", a.reason ? reason_to_json(*a.reason) : Json(nullptr)},
         {"fired_clause", std::string(to_token(a.fired_clause))},
         {"atom_outcomes", std::move(atoms)},
         {"checklist_hash", a.checklist_hash},
         {"blocking_candidates", std::move(candidates)},
         {"findings", a.findings}};
  if (a.stronger_label) j["stronger_label"] = std::string(to_token(*a.stronger_label));
  return j;
}

EvidenceAssignment assignment_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord, "evidence");
  EvidenceAssignment a;
  a.label = r.token<EvidenceLabel>("label");
  if (r.has("reason")) a.reason = reason_from(r.nested("reason"));
  a.fired_clause = r.token<FiredClause>("fired_clause");
  std::size_t i = 0;
  for (const auto& item : r.array("atom_outcomes")) {
    FieldReader o = r.element(item, "atom_outcomes", i++);
    const Json& index = o.at("atom_index");
    if (!index.is_number_unsigned()) o.fail("atom_index", "expected a non-negative integer");
    a.atom_outcomes.push_back(
        AtomOutcome{o.string("clause"), index.get<std::size_t>(), o.token<TriBool>("outcome"), o.string("source_pointer")});
  }
  a.checklist_hash = r.string("checklist_hash");
  if (r.has("blocking_candidates")) {
    i = 0;
    for (const auto& item : r.array("blocking_candidates")) a.blocking_candidates.push_back(reason_from(r.element(item, "blocking_candidates", i++)));
  }
  if (r.has("stronger_label")) a.stronger_label = r.token<EvidenceLabel>("stronger_label");
  if (r.has("findings")) {
    for (const auto& f : r.array("findings")) {
      if (!f.is_string()) r.fail("findings", "expected strings");
      a.findings.push_back(f.get<std::string>());
    }
  }
  return a;
}

Json record_to_json(const RunRecord& record) {
  Json j = record.extra.is_object() ? record.extra : Json::object();
  j["schema_version"] = kRecordSchemaVersion;
  j["record_id"] = record.record_id;
  j["cell"] = Json{{"benchmark_id", record.cell.benchmark_id}, {"model_id", record.cell.model_id}};
  j["case_id"] = record.case_id;
  j["episode_refs"] = record.episode_refs;
  j["status"] = std::string(to_token(record.status));
  Json native{{"label", std::string(to_token(record.native.label))}};
  if (record.native.score_value) native["score_value"] = record.native.score_value->to_string();
  Json subs = Json::array();
  for (const auto& s : record.native.subchecks) subs.push_back(Json{{"name", s.name}, {"passed", s.passed}});
  native["subchecks"] = std::move(subs);
  j["native"] = std::move(native);
  j["bundle_ref"] = record.bundle_ref.empty() ? Json(nullptr) : Json(record.bundle_ref);
  if (record.evidence) j["evidence"] = assignment_to_json(*record.evidence);
  Json channels = Json::object();
  for (const auto& [channel, label] : record.channel_labels) {
    channels[std::string(to_token(channel))] = std::string(to_token(label));
  }
  j["channel_labels"] = std::move(channels);
  if (record.review) {
    const auto& rv = *record.review;
    Json review{{"conflict_code", rv.conflict ? Json(std::string(to_token(*rv.conflict))) : Json(nullptr)},
                {"unknown_reason", rv.unknown_reason ? reason_to_json(*rv.unknown_reason) : Json(nullptr)},
                {"applied_entries", rv.applied_entries}};
    j["review"] = std::move(review);
  }
  return j;
}

RunRecord record_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord);
  if (r.has("schema_version") && r.integer("schema_version") != kRecordSchemaVersion) {
    r.fail("schema_version", "unsupported version " + std::to_string(r.integer("schema_version")));
  }
  RunRecord rec;
  rec.record_id = r.string("record_id");
  FieldReader cell = r.nested("cell");
  rec.cell = CellKey{cell.string("benchmark_id"), cell.string("model_id")};
  rec.case_id = r.string("case_id");
  for (const auto& ref : r.array("episode_refs")) {
    if (!ref.is_string()) r.fail("episode_refs", "expected strings");
    rec.episode_refs.push_back(ref.get<std::string>());
  }
  rec.status = r.token<RecordStatus>("status");
  FieldReader native = r.nested("native");
  rec.native.label = native.token<NativeLabel>("label");
  if (native.has("score_value")) rec.native.score_value = score_from_json(native, "score_value");
  if (native.has("subchecks")) {
    std::size_t i = 0;
    for (const auto& item : native.array("subchecks")) {
      FieldReader s = native.element(item, "subchecks", i++);
      rec.native.subchecks.push_back(Subcheck{s.string("name"), s.boolean("passed")});
    }
  }
  rec.bundle_ref = r.has("bundle_ref") ? r.string("bundle_ref") : std::string();
  if (r.has("evidence")) rec.evidence = assignment_from_json(r.at("evidence"));
  if (r.has("channel_labels")) {
    for (const auto& [key, value] : r.object("channel_labels").items()) {
      auto channel = parse_token<Channel>(key);
      if (!channel) r.fail("channel_labels", "unknown channel '" + key + "'");
      if (!value.is_string()) r.fail("channel_labels", "expected label tokens");
      auto label = parse_token<EvidenceLabel>(value.get<std::string>());
      if (!label) r.fail("channel_labels", "unknown label '" + value.get<std::string>() + "'");
      rec.channel_labels[*channel] = *label;
    }
  }
  if (r.has("review")) {
    FieldReader rv = r.nested("review");
    ReviewState state;
    if (rv.has("conflict_code")) state.conflict = rv.token<ConflictCode>("conflict_code");
    if (rv.has("unknown_reason")) state.unknown_reason = reason_from(rv.nested("unknown_reason"));
    if (rv.has("applied_entries")) {
      for (const auto& id : rv.array("applied_entries")) {
        if (!id.is_number_unsigned()) rv.fail("applied_entries", "expected entry ids");
        state.applied_entries.push_back(id.get<std::uint64_t>());
      }
    }
    rec.review = std::move(state);
  }
  for (const auto& [key, value] : j.items()) {
    if (!kRecordFields.contains(key)) rec.extra[key] = value;
  }
  validate_record(rec);
  return rec;
}

std::vector<RunRecord> parse_run_records(std::string_view text) {
  std::vector<RunRecord> records;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw PositionedError(ErrorCode::ParseError, line_no, "line " + std::to_string(line_no),
                            "line " + std::to_string(line_no) + ": " + e.what());
    }
    RunRecord rec;
    try {
      rec = record_from_json(j);
    } catch (const Error& e) {
      throw PositionedError(ErrorCode::ParseError, line_no, e.subject(),
                            "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(rec.record_id).second) {
      throw Error(ErrorCode::DuplicateId, rec.record_id, "duplicate record_id '" + rec.record_id + "'");
    }
    records.push_back(std::move(rec));
    if (end == text.size()) break;
  }
  return records;
}

std::vector<RunRecord> load_run_records(const fs::path& path, const fs::path& store_root) {
  auto records = parse_run_records(read_file(path));
  if (!store_root.empty()) {
    for (const auto& rec : records) {
      if (rec.bundle_ref.empty()) continue;
      if (!fs::exists(bundle_dir(store_root, rec.bundle_ref) / "manifest.json")) {
        throw Error(ErrorCode::DanglingBundle, rec.record_id,
                    "record " + rec.record_id + " references missing bundle " + rec.bundle_ref);
      }
    }
  }
  return records;
}

std::string serialize_run_records(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += canonical_json(record_to_json(rec));
    out += '\n';
  }
  return out;
}

void save_run_records(const fs::path& path, const std::vector<RunRecord>& records) {
  write_file_atomic(path, serialize_run_records(records));
}

// ---- denominator rule -----------------------------------------------------

DenominatorPartition apply_denominator_rule(const std::vector<RunRecord>& records) {
  DenominatorPartition part;
  for (const auto& rec : records) {
    switch (rec.status) {
      case RecordStatus::Completed:
      case RecordStatus::AgentFault:
        part.included.push_back(rec);
        break;
      case RecordStatus::InfrastructureFailure:
      case RecordStatus::PreRunFailure:
        part.excluded.push_back(ExcludedRecord{rec, rec.status});
        break;
    }
  }
  return part;
}

// ---- sampling manifests ---------------------------------------------------

SamplingManifest manifest_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidManifest, "manifest");
  SamplingManifest m;
  m.benchmark_id = r.string("benchmark_id");
  m.pool_size = r.integer("pool_size");
  m.seed = r.integer("seed");
  std::size_t i = 0;
  for (const auto& item : r.array("exclusions")) {
    FieldReader e = r.element(item, "exclusions", i++);
    m.exclusions.push_back(ManifestExclusion{e.string("case_id"), e.string("reason")});
  }
  for (const auto& id : r.array("selected_case_ids")) {
    if (!id.is_string()) r.fail("selected_case_ids", "expected strings");
    m.selected_case_ids.push_back(id.get<std::string>());
  }
  return m;
}

Json manifest_to_json(const SamplingManifest& m) {
  Json exclusions = Json::array();
  for (const auto& e : m.exclusions) exclusions.push_back(Json{{"case_id", e.case_id}, {"reason", e.reason}});
  return Json{{"benchmark_id", m.benchmark_id},
              {"pool_size", m.pool_size},
              {"exclusions", std::move(exclusions)},
              {"seed", m.seed},
              {"selected_case_ids", m.selected_case_ids}};
}

SamplingManifest load_manifest(const fs::path& path) {
  try {
    return manifest_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, path.string(), path.string() + ": " + e.what());
  }
}

ManifestReport validate_sampling_manifest(const SamplingManifest& manifest, const std::vector<RunRecord>& records) {
  for (const auto& rec : records) {
    if (rec.cell.benchmark_id != manifest.benchmark_id) {
      throw Error(ErrorCode::BenchmarkMismatch, rec.record_id,
                  "record " + rec.record_id + " belongs to '" + rec.cell.benchmark_id + "', manifest is for '" +
                      manifest.benchmark_id + "'");
    }
  }
  std::set<std::string> excluded;
  for (const auto& e : manifest.exclusions) excluded.insert(e.case_id);
  std::set<std::string> selected;
  for (const auto& id : manifest.selected_case_ids) {
    if (!selected.insert(id).second) {
      throw Error(ErrorCode::InvalidManifest, id, "case '" + id + "' is selected more than once");
    }
    if (excluded.contains(id)) throw Error(ErrorCode::InvalidManifest, id, "case '" + id + "' is both excluded and selected");
  }
  if (manifest.pool_size < 0 ||
      static_cast<std::int64_t>(selected.size() + excluded.size()) > manifest.pool_size) {
    throw Error(ErrorCode::InvalidManifest, manifest.benchmark_id,
                "selection plus exclusions exceed the pool size " + std::to_string(manifest.pool_size));
  }

  ManifestReport report;
  std::set<std::string> models;
  std::map<std::pair<CellKey, std::string>, int> seen;
  std::set<std::pair<std::string, std::string>> present;  // (case, model)
  for (const auto& rec : records) {
    models.insert(rec.cell.model_id);
    if (!selected.contains(rec.case_id)) report.stray_record_ids.push_back(rec.record_id);
    if (++seen[{rec.cell, rec.case_id}] == 2) report.duplicates.emplace_back(rec.cell, rec.case_id);
    present.emplace(rec.case_id, rec.cell.model_id);
  }
  for (const auto& id : manifest.selected_case_ids) {
    for (const auto& model : models) {
      if (!present.contains({id, model})) report.missing.emplace_back(id, model);
    }
  }
  return report;
}

}  // namespace evaudit
