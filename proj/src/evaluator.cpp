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


#include "evaudit/evaluator.hpp"

#include <algorithm>
#include <set>

#include "evaudit/hash.hpp"
#include "evaudit/pattern.hpp"
#include "json_fields.hpp"

namespace evaudit {

namespace fs = std::filesystem;

namespace {

std::string escape_pointer_token(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// DOM builder that also remembers the source text of every floating-point
// number, keyed by the JSON pointer of its position.
class TokenKeepingSax {
 public:
  using number_integer_t = Json::number_integer_t;
  using number_unsigned_t = Json::number_unsigned_t;
  using number_float_t = Json::number_float_t;
  using string_t = Json::string_t;
  using binary_t = Json::binary_t;

  explicit TokenKeepingSax(std::map<std::string, std::string>& tokens) : tokens_(tokens) {}

  bool null() { return place(nullptr).first; }
  bool boolean(bool v) { return place(v).first; }
  bool number_integer(number_integer_t v) { return place(v).first; }
  bool number_unsigned(number_unsigned_t v) { return place(v).first; }
  bool number_float(number_float_t v, const string_t& text) {
    auto [ok, pointer] = place(v);
    tokens_[pointer] = text;
    return ok;
  }
  bool string(string_t& v) { return place(v).first; }
  bool binary(binary_t&) { return false; }

  bool start_object(std::size_t) { return open(Json::object()); }
  bool start_array(std::size_t) { return open(Json::array()); }
  bool key(string_t& k) {
    stack_.back().key = k;
    return true;
  }
  bool end_object() { return close(); }
  bool end_array() { return close(); }

  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& e) {
    error_ = "offset " + std::to_string(position) + ": " + e.what();
    return false;
  }

  Json take() { return std::move(root_); }
  const std::string& error() const { return error_; }

 private:
  struct Frame {
    Json* node;
    std::string pointer;
    std::size_t next_index = 0;
    std::string key;
  };

  std::pair<Json*, std::string> insert(Json value) {
    if (stack_.empty()) {
      root_ = std::move(value);
      return {&root_, ""};
    }
    Frame& top = stack_.back();
    if (top.node->is_array()) {
      std::string pointer = top.pointer + "/" + std::to_string(top.next_index++);
      top.node->push_back(std::move(value));
      return {&top.node->back(), pointer};
    }
    std::string pointer = top.pointer + "/" + escape_pointer_token(top.key);
    Json& slot = (*top.node)[top.key];
    slot = std::move(value);
    return {&slot, pointer};
  }

  std::pair<bool, std::string> place(Json value) { return {true, insert(std::move(value)).second}; }

  bool open(Json container) {
    auto [node, pointer] = insert(std::move(container));
    stack_.push_back(Frame{node, std::move(pointer)});
    return true;
  }

  bool close() {
    stack_.pop_back();
    return true;
  }

  std::map<std::string, std::string>& tokens_;
  Json root_;
  std::vector<Frame> stack_;
  std::string error_;
};

// Resolves an RFC 6901 pointer; nullptr when any step is absent.
const Json* resolve(const Json& doc, std::string_view pointer) {
  const Json* node = &doc;
  std::size_t pos = 0;
  while (pos < pointer.size()) {
    std::size_t next = pointer.find('/', pos + 1);
    if (next == std::string_view::npos) next = pointer.size();
    std::string token;
    for (std::size_t i = pos + 1; i < next; ++i) {
      if (pointer[i] == '~' && i + 1 < next) {
        token += pointer[i + 1] == '1' ? '/' : '~';
        ++i;
      } else {
        token += pointer[i];
      }
    }
    if (node->is_object()) {
      auto it = node->find(token);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      if (token.empty() || token.size() > 18 || (token.size() > 1 && token[0] == '0') ||
          !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return nullptr;
      }
      std::size_t index = std::stoull(token);
      if (index >= node->size()) return nullptr;
      node = &(*node)[index];
    } else {
      return nullptr;
    }
    pos = next;
  }
  return node;
}

bool literal_equals(const Json& value, const std::string& pointer, const Literal& literal,
                    const LoadedArtifact& artifact) {
  return std::visit(
      [&](const auto& lit) -> bool {
        using T = std::decay_t<decltype(lit)>;
        if constexpr (std::is_same_v<T, NullLiteral>) {
          return value.is_null();
        } else if constexpr (std::is_same_v<T, bool>) {
          return value.is_boolean() && value.get<bool>() == lit;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          if (value.is_number_integer() && !value.is_number_unsigned()) return value.get<std::int64_t>() == lit;
          if (value.is_number_unsigned()) return lit >= 0 && value.get<std::uint64_t>() == static_cast<std::uint64_t>(lit);
          return false;
        } else if constexpr (std::is_same_v<T, DecimalToken>) {
          if (!value.is_number_float()) return false;
          auto it = artifact.decimal_tokens.find(pointer);
          return it != artifact.decimal_tokens.end() && it->second == lit.text;
        } else {
          return value.is_string() && value.get<std::string>() == lit;
        }
      },
      literal);
}

const Json* trace_calls(const Json& doc, std::string& base) {
  if (doc.is_array()) {
    base = "";
    return &doc;
  }
  if (doc.is_object()) {
    auto it = doc.find("calls");
    if (it != doc.end() && it->is_array()) {
      base = "/calls";
      return &*it;
    }
  }
  return nullptr;
}

std::string call_name(const Json& call) {
  if (!call.is_object()) return {};
  for (const char* field : {"name", "tool"}) {
    auto it = call.find(field);
    if (it != call.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

TriBool from_bool(bool b) { return b ? TriBool::True : TriBool::False; }

TriBool eval_tree(const Predicate& p, const std::vector<TriBool>& values, std::size_t& index) {
  switch (p.op) {
    case Predicate::Op::Atom:
      return values[index++];
    case Predicate::Op::Not:
      return kleene_not(eval_tree(p.children.front(), values, index));
    case Predicate::Op::And: {
      TriBool acc = TriBool::True;
      for (const auto& c : p.children) acc = kleene_and(acc, eval_tree(c, values, index));
      return acc;
    }
    case Predicate::Op::Or: {
      TriBool acc = TriBool::False;
      for (const auto& c : p.children) acc = kleene_or(acc, eval_tree(c, values, index));
      return acc;
    }
  }
  return TriBool::Undetermined;
}

TriBool eval_values(const Predicate& p, const std::vector<TriBool>& values) {
  std::size_t index = 0;
  return eval_tree(p, values, index);
}

struct ClauseValues {
  std::vector<const Atom*> atoms;
  std::vector<TriBool> values;
};

ClauseValues evaluate_clause(const Predicate& p, const std::string& clause, const EvidenceView& view,
                             EvidenceAssignment& out) {
  ClauseValues cv{collect_atoms(p), {}};
  for (std::size_t i = 0; i < cv.atoms.size(); ++i) {
    TriBool v = eval_atom(*cv.atoms[i], view, &out.findings);
    cv.values.push_back(v);
    out.atom_outcomes.push_back(AtomOutcome{clause, i, v, atom_source_pointer(*cv.atoms[i])});
  }
  return cv;
}

// Label for a clause pair where a label change under a hypothetical atom
// value counts as "decided"; an inconsistent result also counts.
std::optional<EvidenceLabel> label_or_inconsistent(TriBool fail_value, TriBool pass_value) {
  if (fail_value == TriBool::True && pass_value == TriBool::True) return std::nullopt;
  if (fail_value == TriBool::True) return EvidenceLabel::EvidenceFail;
  if (pass_value == TriBool::True) return EvidenceLabel::EvidencePass;
  return EvidenceLabel::Unknown;
}

EvidenceLabel min_label(EvidenceLabel a, EvidenceLabel b) { return evidence_rank(a) <= evidence_rank(b) ? a : b; }

}  // namespace

LoadedArtifact load_artifact(std::string role, MediaKind kind, std::string bytes) {
  LoadedArtifact a{std::move(role), kind, std::move(bytes), std::nullopt, {}, {}};
  if (kind != MediaKind::Structured) return a;
  TokenKeepingSax sax(a.decimal_tokens);
  bool ok = false;
  try {
    ok = Json::sax_parse(a.bytes, &sax);
  } catch (const Json::exception& e) {
    a.parse_error = e.what();
  }
  if (ok) {
    a.document = sax.take();
  } else {
    if (a.parse_error.empty()) a.parse_error = sax.error().empty() ? "unparseable" : sax.error();
    a.decimal_tokens.clear();
  }
  return a;
}

EvidenceView EvidenceView::from_bundle(const ArtifactBundle& bundle, const fs::path& store_root) {
  EvidenceView view;
  fs::path dir = bundle_dir(store_root, bundle.bundle_id);
  for (const auto& entry : bundle.entries) {
    fs::path rel(entry.path);
    bool unsafe = rel.is_absolute() || entry.path.empty();
    for (const auto& part : rel) unsafe = unsafe || part == "..";
    if (unsafe) {
      view.findings_.push_back("artifact " + entry.role + ": unsafe path '" + entry.path + "'");
      continue;
    }
    fs::path file = dir / rel;
    if (!fs::is_regular_file(file)) {
      view.findings_.push_back("artifact " + entry.role + ": file missing from bundle " + bundle.bundle_id);
      continue;
    }
    std::string bytes = read_file(file);
    if (sha256_hex(bytes) != entry.content_hash) {
      view.findings_.push_back("artifact " + entry.role + ": content hash mismatch");
      continue;
    }
    view.add(load_artifact(entry.role, entry.media_kind, std::move(bytes)));
  }
  return view;
}

void EvidenceView::add(LoadedArtifact artifact) {
  std::string role = artifact.role;
  artifacts_.insert_or_assign(std::move(role), std::move(artifact));
}

const LoadedArtifact* EvidenceView::find(std::string_view role) const noexcept {
  auto it = artifacts_.find(role);
  return it == artifacts_.end() ? nullptr : &it->second;
}

std::string atom_source_pointer(const Atom& atom) {
  switch (atom.kind) {
    case AtomKind::Exists: return atom.role;
    case AtomKind::ValueEq:
    case AtomKind::ValueHas:
    case AtomKind::CountGe: return atom.role + "#" + atom.pointer;
    case AtomKind::TextMatches: return atom.role + "~/" + atom.text + "/";
    case AtomKind::ToolCalled:
      return atom.role + "@" + atom.text + (atom.has_argument_check ? "#" + atom.pointer : std::string());
  }
  return atom.role;
}

TriBool eval_atom(const Atom& atom, const EvidenceView& view, std::vector<std::string>* findings) {
  const LoadedArtifact* a = view.find(atom.role);
  if (a == nullptr) return TriBool::Undetermined;
  auto undetermined = [&](const std::string& why) {
    if (findings) findings->push_back(std::string(atom_name(atom.kind)) + " on " + atom.role + ": " + why);
    return TriBool::Undetermined;
  };

  if (atom.kind == AtomKind::Exists) return TriBool::True;
  if (atom.kind == AtomKind::TextMatches) {
    try {
      return from_bool(Pattern::compile(atom.text).search(a->bytes));
    } catch (const PatternError& e) {
      return undetermined(e.what());
    }
  }
  if (a->media_kind != MediaKind::Structured) return undetermined("artifact is not structured");
  if (!a->document) return undetermined("MalformedArtifact: " + a->parse_error);
  const Json& doc = *a->document;

  switch (atom.kind) {
    case AtomKind::ValueEq: {
      const Json* v = resolve(doc, atom.pointer);
      return from_bool(v != nullptr && literal_equals(*v, atom.pointer, atom.literal, *a));
    }
    case AtomKind::ValueHas: {
      const Json* v = resolve(doc, atom.pointer);
      return from_bool(v != nullptr && !v->is_null());
    }
    case AtomKind::CountGe: {
      const Json* v = resolve(doc, atom.pointer);
      if (v == nullptr || !(v->is_array() || v->is_object())) return TriBool::False;
      return from_bool(static_cast<std::int64_t>(v->size()) >= atom.threshold);
    }
    case AtomKind::ToolCalled: {
      std::string base;
      const Json* calls = trace_calls(doc, base);
      if (calls == nullptr) return undetermined("MalformedArtifact: trace has no call list");
      for (std::size_t i = 0; i < calls->size(); ++i) {
        const Json& call = (*calls)[i];
        if (call_name(call) != atom.text) continue;
        if (!atom.has_argument_check) return TriBool::True;
        const Json* v = resolve(call, atom.pointer);
        std::string full = base + "/" + std::to_string(i) + atom.pointer;
        if (v != nullptr && literal_equals(*v, full, atom.literal, *a)) return TriBool::True;
      }
      return TriBool::False;
    }
    default:
      break;
  }
  return TriBool::Undetermined;
}

TriBool eval_predicate(const Predicate& predicate, const EvidenceView& view, std::vector<std::string>* findings) {
  std::vector<TriBool> values;
  for (const Atom* a : collect_atoms(predicate)) values.push_back(eval_atom(*a, view, findings));
  return eval_values(predicate, values);
}

EvidenceLabel decide_label(TriBool fail_value, TriBool pass_value, const std::string& subject) {
  auto label = label_or_inconsistent(fail_value, pass_value);
  if (!label) {
    throw Error(ErrorCode::ChecklistInconsistent, subject,
                "checklist " + subject + ": fail_when and pass_when both hold");
  }
  return *label;
}

std::optional<UnknownReason> pick_unknown_reason(const std::vector<UnknownReason>& candidates) {
  bool non_r2 = std::any_of(candidates.begin(), candidates.end(),
                            [](const UnknownReason& r) { return r.code != ReasonCode::R2; });
  for (const auto& c : candidates) {
    if (!non_r2 || c.code != ReasonCode::R2) return c;
  }
  return std::nullopt;
}

EvidenceAssignment assign_evidence_label(const LockedChecklist& locked, const EvidenceView& view) {
  const CaseChecklist& c = locked.checklist;
  const std::string subject = c.benchmark_id + "/" + c.key();
  if (!verify_lock(locked)) throw Error(ErrorCode::LockInvalid, subject, "case " + subject + ": lock does not verify");

  EvidenceAssignment out;
  out.checklist_hash = locked.lock_hash;
  out.findings = view.findings();

  ClauseValues fail = evaluate_clause(c.fail_when, "fail", view, out);
  ClauseValues pass = evaluate_clause(c.pass_when, "pass", view, out);
  TriBool fail_value = eval_values(c.fail_when, fail.values);
  TriBool pass_value = eval_values(c.pass_when, pass.values);
  out.label = decide_label(fail_value, pass_value, subject);
  out.fired_clause = out.label == EvidenceLabel::EvidenceFail   ? FiredClause::FailClause
                     : out.label == EvidenceLabel::EvidencePass ? FiredClause::PassClause
                                                                : FiredClause::Neither;

  if (out.label == EvidenceLabel::Unknown) {
    // Deciding path: an Undetermined atom blocks when fixing it to either
    // truth value (others unchanged) would change the label.
    std::set<std::string> undetermined_roles;
    std::set<std::string> blocking_roles;
    auto probe = [&](ClauseValues& clause, bool is_fail) {
      for (std::size_t i = 0; i < clause.values.size(); ++i) {
        if (clause.values[i] != TriBool::Undetermined) continue;
        undetermined_roles.insert(clause.atoms[i]->role);
        for (TriBool trial : {TriBool::True, TriBool::False}) {
          clause.values[i] = trial;
          TriBool fv = is_fail ? eval_values(c.fail_when, clause.values) : fail_value;
          TriBool pv = is_fail ? pass_value : eval_values(c.pass_when, clause.values);
          if (label_or_inconsistent(fv, pv) != EvidenceLabel::Unknown) blocking_roles.insert(clause.atoms[i]->role);
        }
        clause.values[i] = TriBool::Undetermined;
      }
    };
    probe(fail, true);
    probe(pass, false);
    const auto& roles = blocking_roles.empty() ? undetermined_roles : blocking_roles;
    for (const auto& r : c.required_roles) {
      if (roles.contains(r.role)) out.blocking_candidates.push_back(UnknownReason{r.reason_code, r.role});
    }
    if (out.blocking_candidates.empty()) {
      out.findings.push_back("lint: " + subject + " is Unknown with no undetermined atom (NoBlockingRole)");
      const auto& first = c.required_roles.front();
      out.blocking_candidates.push_back(UnknownReason{first.reason_code, first.role});
    }
    out.reason = pick_unknown_reason(out.blocking_candidates);
  }

  if (!c.stronger_items.empty()) {
    EvidenceLabel stronger = out.label;
    for (const auto& item : c.stronger_items) {
      ClauseValues sf = evaluate_clause(item.fail_when, "stronger:" + item.name + ":fail", view, out);
      ClauseValues sp = evaluate_clause(item.pass_when, "stronger:" + item.name + ":pass", view, out);
      auto label = label_or_inconsistent(eval_values(item.fail_when, sf.values), eval_values(item.pass_when, sp.values));
      if (!label) {
        out.findings.push_back("stronger item " + item.name + ": fail_when and pass_when both hold");
        label = EvidenceLabel::Unknown;
      }
      stronger = min_label(stronger, *label);
    }
    out.stronger_label = stronger;
  }
  return out;
}

EvidenceAssignment merge_paired_arms(const EvidenceAssignment& benign, const EvidenceAssignment& injected) {
  EvidenceAssignment out;
  out.label = min_label(benign.label, injected.label);
  out.fired_clause = out.label == EvidenceLabel::EvidenceFail   ? FiredClause::FailClause
                     : out.label == EvidenceLabel::EvidencePass ? FiredClause::PassClause
                                                                : FiredClause::Neither;
  out.checklist_hash = benign.checklist_hash + "+" + injected.checklist_hash;
  const std::pair<std::string_view, const EvidenceAssignment*> arms[] = {{kBenignArm, &benign},
                                                                         {kInjectedArm, &injected}};
  for (const auto& [arm, a] : arms) {
    for (auto outcome : a->atom_outcomes) {
      outcome.clause = std::string(arm) + ":" + outcome.clause;
      out.atom_outcomes.push_back(std::move(outcome));
    }
    for (const auto& f : a->findings) out.findings.push_back(std::string(arm) + ": " + f);
    if (out.label == EvidenceLabel::Unknown && a->label == EvidenceLabel::Unknown) {
      out.blocking_candidates.insert(out.blocking_candidates.end(), a->blocking_candidates.begin(),
                                     a->blocking_candidates.end());
    }
  }
  if (out.label == EvidenceLabel::Unknown) {
    out.reason = pick_unknown_reason(out.blocking_candidates);
    if (!out.reason) out.reason = benign.label == EvidenceLabel::Unknown ? benign.reason : injected.reason;
  }
  if (benign.stronger_label || injected.stronger_label) {
    out.stronger_label = min_label(benign.stronger_label.value_or(benign.label),
                                   injected.stronger_label.value_or(injected.label));
  }
  return out;
}

Json candidate_to_json(const ConflictCandidate& c) {
  return Json{{"record_id", c.record_id},
              {"suggested_code", std::string(to_token(c.suggested_code))},
              {"evidence_pointer", c.evidence_pointer},
              {"description", c.description}};
}

ConflictCandidate candidate_from_json(const Json& j) {
  detail::FieldReader r(j, ErrorCode::InvalidRecord);
  return ConflictCandidate{r.string("record_id"), r.token<ConflictCode>("suggested_code"), r.string("evidence_pointer"),
                           r.string("description")};
}

std::vector<ConflictCandidate> probe_native_consistency(const RunRecord& record) {
  std::vector<ConflictCandidate> out;
  const auto& subchecks = record.native.subchecks;
  if (subchecks.empty()) return out;
  auto failed = std::find_if(subchecks.begin(), subchecks.end(), [](const Subcheck& s) { return !s.passed; });
  bool reports_success = record.native.label == NativeLabel::Success ||
                         (record.native.score_value && *record.native.score_value == Rational(1));
  if (reports_success && failed != subchecks.end()) {
    out.push_back(ConflictCandidate{record.record_id, ConflictCode::C1, "native.subchecks/" + failed->name,
                                    "native success while subcheck '" + failed->name + "' failed"});
  }
  if (failed == subchecks.end() && record.native.label == NativeLabel::Failure) {
    out.push_back(ConflictCandidate{record.record_id, ConflictCode::C3, "native.label",
                                    "every recorded subcheck passed but the native label is failure"});
  }
  return out;
}

}  // namespace evaudit
