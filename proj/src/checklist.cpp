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

#include <algorithm>
#include <set>

#include "evaudit/hash.hpp"
#include "json_fields.hpp"

namespace evaudit {

namespace fs = std::filesystem;
using detail::FieldReader;

namespace {

Predicate parse_clause(const FieldReader& r, std::string_view field) {
  std::string text = r.string(field);
  try {
    return parse_predicate(text);
  } catch (const PositionedError& e) {
    throw PositionedError(ErrorCode::SyntaxError, e.position(), std::string(field),
                          std::string(field) + ": " + e.what());
  }
}

void check_roles(const Predicate& p, const std::set<std::string>& declared, std::string_view where) {
  for (const Atom* a : collect_atoms(p)) {
    if (!declared.contains(a->role)) {
      throw Error(ErrorCode::UndeclaredRole, a->role,
                  std::string(where) + " references role '" + a->role + "' absent from required_roles");
    }
  }
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

std::vector<std::string> lint_checklist(const CaseChecklist& c) {
  std::vector<std::string> warnings;
  for (const auto& item : c.stronger_items) {
    if (item.pass_when == c.pass_when) {
      warnings.push_back("stronger item '" + item.name + "' repeats the native pass_when clause");
    }
  }
  return warnings;
}

ParsedChecklist checklist_from_json(const Json& document) {
  FieldReader r(document, ErrorCode::InvalidChecklist);
  if (r.has("schema_version") && r.integer("schema_version") != kChecklistSchemaVersion) {
    r.fail("schema_version", "unsupported version");
  }
  CaseChecklist c;
  c.case_id = r.string("case_id");
  c.benchmark_id = r.string("benchmark_id");
  if (c.case_id.empty()) r.fail("case_id", "must be non-empty");
  if (c.benchmark_id.empty()) r.fail("benchmark_id", "must be non-empty");
  if (c.case_id.find('/') != std::string::npos || c.benchmark_id.find('/') != std::string::npos) {
    r.fail("case_id", "identifiers may not contain '/'");
  }
  if (r.has("arm")) {
    c.arm = r.string("arm");
    if (*c.arm != kBenignArm && *c.arm != kInjectedArm) r.fail("arm", "must be 'benign' or 'injected'");
  }
  c.claim_text = r.string("claim_text");
  if (blank(c.claim_text)) r.fail("claim_text", "must be non-empty");
  c.claim_source = r.token<ClaimSource>("claim_source");
  c.notes = r.string_or("notes", "");

  std::set<std::string> declared;
  std::size_t i = 0;
  for (const auto& item : r.array("required_roles")) {
    FieldReader e = r.element(item, "required_roles", i++);
    RequiredRole role{e.string("role"), e.token<ReasonCode>("reason_code"), e.string_or("description", "")};
    if (role.role.empty()) e.fail("role", "must be non-empty");
    if (!declared.insert(role.role).second) e.fail("role", "duplicate role '" + role.role + "'");
    c.required_roles.push_back(std::move(role));
  }
  if (c.required_roles.empty()) r.fail("required_roles", "at least one role is required");

  c.pass_when = parse_clause(r, "pass_when");
  c.fail_when = parse_clause(r, "fail_when");
  check_roles(c.pass_when, declared, "pass_when");
  check_roles(c.fail_when, declared, "fail_when");

  if (r.has("stronger_items")) {
    std::set<std::string> names;
    i = 0;
    for (const auto& item : r.array("stronger_items")) {
      FieldReader e = r.element(item, "stronger_items", i++);
      StrongerItem s{e.string("name"), parse_clause(e, "pass_when"), parse_clause(e, "fail_when"),
                     e.string("justification")};
      if (s.name.empty() || !names.insert(s.name).second) e.fail("name", "must be non-empty and unique");
      if (blank(s.justification)) e.fail("justification", "stronger items need a justification");
      check_roles(s.pass_when, declared, "stronger item '" + s.name + "'");
      check_roles(s.fail_when, declared, "stronger item '" + s.name + "'");
      c.stronger_items.push_back(std::move(s));
    }
  }

  if (c.claim_source != ClaimSource::EvaluatorSemantics && blank(c.notes)) {
    throw Error(ErrorCode::HierarchyViolation, c.key(),
                "claim_source '" + std::string(to_token(c.claim_source)) +
                    "' requires notes stating why evaluator semantics do not decide the claim");
  }

  ParsedChecklist parsed{std::move(c), {}};
  parsed.warnings = lint_checklist(parsed.checklist);
  return parsed;
}

ParsedChecklist parse_checklist(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidChecklist, path.string(), path.string() + ": " + e.what());
  }
  return checklist_from_json(j);
}

Json checklist_to_json(const CaseChecklist& c) {
  Json roles = Json::array();
  for (const auto& r : c.required_roles) {
    roles.push_back(Json{{"role", r.role}, {"reason_code", std::string(to_token(r.reason_code))}, {"description", r.description}});
  }
  Json stronger = Json::array();
  for (const auto& s : c.stronger_items) {
    stronger.push_back(Json{{"name", s.name},
                            {"pass_when", to_string(s.pass_when)},
                            {"fail_when", to_string(s.fail_when)},
                            {"justification", s.justification}});
  }
  Json j{{"schema_version", kChecklistSchemaVersion},
         {"case_id", c.case_id},
         {"benchmark_id", c.benchmark_id},
         {"claim_text", c.claim_text},
         {"claim_source", std::string(to_token(c.claim_source))},
         {"required_roles", std::move(roles)},
         {"pass_when", to_string(c.pass_when)},
         {"fail_when", to_string(c.fail_when)},
         {"stronger_items", std::move(stronger)},
         {"notes", c.notes}};
  if (c.arm) j["arm"] = *c.arm;
  return j;
}

std::string canonical_checklist_bytes(const CaseChecklist& checklist) {
  return canonical_json(checklist_to_json(checklist));
}

namespace {

std::string compute_seal(const std::string& lock_hash, const std::string& locked_at,
                         const std::vector<std::string>& reviewers) {
  return sha256_hex(canonical_json(Json{{"lock_hash", lock_hash}, {"locked_at", locked_at}, {"reviewer_ids", reviewers}}));
}

bool reviewers_valid(const std::vector<std::string>& reviewers) {
  std::set<std::string> distinct;
  for (const auto& r : reviewers) {
    if (blank(r)) return false;
    distinct.insert(r);
  }
  return distinct.size() >= 2 && distinct.size() == reviewers.size();
}

Json lock_to_json(const LockedChecklist& l) {
  return Json{{"checklist", checklist_to_json(l.checklist)},
              {"lock_hash", l.lock_hash},
              {"locked_at", l.locked_at},
              {"reviewer_ids", l.reviewer_ids},
              {"seal", l.seal}};
}

}  // namespace

LockedChecklist lock_checklist(const CaseChecklist& checklist, const std::vector<std::string>& reviewers,
                               std::string locked_at) {
  std::vector<std::string> ids;
  for (const auto& r : reviewers) {
    if (!blank(r) && std::find(ids.begin(), ids.end(), r) == ids.end()) ids.push_back(r);
  }
  if (ids.size() < 2) {
    throw Error(ErrorCode::InsufficientReviewers, checklist.key(),
                "locking " + checklist.key() + " needs at least two distinct reviewers");
  }
  std::sort(ids.begin(), ids.end());
  LockedChecklist l;
  l.checklist = checklist;
  l.lock_hash = sha256_hex(canonical_checklist_bytes(checklist));
  l.locked_at = std::move(locked_at);
  l.reviewer_ids = std::move(ids);
  l.seal = compute_seal(l.lock_hash, l.locked_at, l.reviewer_ids);
  return l;
}

bool verify_lock(const LockedChecklist& locked) {
  if (locked.locked_at.empty() || !reviewers_valid(locked.reviewer_ids)) return false;
  if (sha256_hex(canonical_checklist_bytes(locked.checklist)) != locked.lock_hash) return false;
  return compute_seal(locked.lock_hash, locked.locked_at, locked.reviewer_ids) == locked.seal;
}

std::string lock_to_bytes(const LockedChecklist& locked) { return canonical_json(lock_to_json(locked)) + "\n"; }

LockedChecklist lock_from_bytes(std::string_view bytes) {
  auto invalid = [](const std::string& why) -> Error { return Error(ErrorCode::LockInvalid, "", "lock file " + why); };
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::exception& e) {
    throw invalid(std::string("does not parse: ") + e.what());
  }
  if (!j.is_object() || j.size() != 5) throw invalid("has unexpected structure");
  LockedChecklist l;
  try {
    FieldReader r(j, ErrorCode::LockInvalid);
    l.checklist = checklist_from_json(r.object("checklist")).checklist;
    l.lock_hash = r.string("lock_hash");
    l.locked_at = r.string("locked_at");
    for (const auto& id : r.array("reviewer_ids")) {
      if (!id.is_string()) r.fail("reviewer_ids", "expected strings");
      l.reviewer_ids.push_back(id.get<std::string>());
    }
    l.seal = r.string("seal");
  } catch (const Error& e) {
    throw invalid(std::string("is malformed: ") + e.what());
  }
  if (lock_to_bytes(l) != bytes) throw invalid("is not in canonical form");
  return l;
}

bool verify_lock_bytes(std::string_view bytes) {
  try {
    return verify_lock(lock_from_bytes(bytes));
  } catch (const Error&) {
    return false;
  }
}

fs::path ChecklistStore::checklist_path(const std::string& benchmark_id, const std::string& key) const {
  return checklist_dir_ / benchmark_id / (key + ".json");
}

fs::path ChecklistStore::lock_path(const std::string& benchmark_id, const std::string& key) const {
  return lock_dir_ / benchmark_id / (key + ".lock.json");
}

bool ChecklistStore::has_lock(const std::string& benchmark_id, const std::string& key) const {
  return fs::exists(lock_path(benchmark_id, key));
}

LockedChecklist ChecklistStore::persist(const LockedChecklist& locked) const {
  const auto& c = locked.checklist;
  fs::path path = lock_path(c.benchmark_id, c.key());
  if (fs::exists(path)) {
    std::string existing_bytes = read_file(path);
    std::optional<LockedChecklist> existing;
    try {
      existing = lock_from_bytes(existing_bytes);
    } catch (const Error&) {
    }
    if (existing && verify_lock(*existing) && existing->lock_hash == locked.lock_hash) return *existing;
    throw Error(ErrorCode::LockConflict, c.benchmark_id + "/" + c.key(),
                "case " + c.benchmark_id + "/" + c.key() + " is already locked with different content");
  }
  write_file_atomic(path, lock_to_bytes(locked));
  return locked;
}

LockedChecklist ChecklistStore::load_verified(const std::string& benchmark_id, const std::string& key) const {
  std::string subject = benchmark_id + "/" + key;
  fs::path path = lock_path(benchmark_id, key);
  if (!fs::exists(path)) throw Error(ErrorCode::LockInvalid, subject, "no lock for case " + subject);
  LockedChecklist l;
  try {
    l = lock_from_bytes(read_file(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::LockInvalid, subject, "case " + subject + ": " + e.what());
  }
  if (!verify_lock(l)) throw Error(ErrorCode::LockInvalid, subject, "case " + subject + ": lock hash does not verify");
  if (l.checklist.benchmark_id != benchmark_id || l.checklist.key() != key) {
    throw Error(ErrorCode::LockInvalid, subject, "case " + subject + ": lock file holds " + l.checklist.benchmark_id +
                                                      "/" + l.checklist.key());
  }
  return l;
}

std::vector<std::pair<std::string, std::string>> ChecklistStore::list_locks() const {
  std::vector<std::pair<std::string, std::string>> out;
  if (!fs::is_directory(lock_dir_)) return out;
  constexpr std::string_view suffix = ".lock.json";
  for (const auto& bench : fs::directory_iterator(lock_dir_)) {
    if (!bench.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(bench.path())) {
      std::string name = file.path().filename().string();
      if (name.size() > suffix.size() && name.ends_with(suffix)) {
        out.emplace_back(bench.path().filename().string(), name.substr(0, name.size() - suffix.size()));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace evaudit
