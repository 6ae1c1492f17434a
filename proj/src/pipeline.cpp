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


#include "evaudit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "evaudit/hash.hpp"
#include "json_fields.hpp"

namespace evaudit {

namespace fs = std::filesystem;
using detail::FieldReader;

RunConfig config_from_json(const Json& document, const fs::path& base_dir) {
  FieldReader r(document, ErrorCode::InvalidConfig, "config");
  auto path = [&](std::string_view field, const fs::path& fallback) -> fs::path {
    if (!r.has(field)) return fallback;
    fs::path p = r.string(field);
    if (p.empty()) r.fail(field, "must be non-empty");
    p = (p.is_absolute() ? p : base_dir / p).lexically_normal();
    return p.has_filename() || p == p.root_path() ? p : p.parent_path();
  };
  RunConfig c;
  c.store_root = path("store_root", {});
  if (c.store_root.empty()) r.fail("store_root", "missing field");
  c.checklist_dir = path("checklist_dir", c.store_root / "checklists");
  c.lock_dir = path("lock_dir", c.store_root / "locks");
  c.manifest_dir = path("manifest_dir", c.store_root / "manifests");
  c.records_path = path("records_path", c.store_root / "records.jsonl");
  c.ledger_path = path("ledger_path", c.store_root / "ledger.jsonl");
  c.output_dir = path("output_dir", c.store_root / "out");
  if (r.has("sample_rate")) {
    const Json& v = r.at("sample_rate");
    try {
      c.sample_rate = Rational::parse(v.is_string() ? v.get<std::string>() : v.dump());
    } catch (const std::exception& e) {
      r.fail("sample_rate", e.what());
    }
    if (c.sample_rate < Rational(0) || c.sample_rate > Rational(1)) r.fail("sample_rate", "must lie in [0,1]");
  }
  if (r.has("seed")) {
    const Json& v = r.at("seed");
    if (!v.is_number_integer()) r.fail("seed", "expected an integer");
    c.seed = v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (r.has("excluded_benchmarks_from_leaderboard")) {
    for (const auto& b : r.array("excluded_benchmarks_from_leaderboard")) {
      if (!b.is_string()) r.fail("excluded_benchmarks_from_leaderboard", "expected benchmark ids");
      c.excluded_benchmarks_from_leaderboard.insert(b.get<std::string>());
    }
  }
  if (r.has("benchmark")) c.benchmark = r.string("benchmark");
  if (r.has("notes")) {
    for (const auto& [bench, note] : r.object("notes").items()) {
      if (!note.is_string()) r.fail("notes", "expected strings");
      c.notes[bench] = note.get<std::string>();
    }
  }
  if (r.has("threads")) {
    std::int64_t t = r.integer("threads");
    if (t < 0 || t > 1024) r.fail("threads", "must lie in [0,1024]");
    c.threads = static_cast<unsigned>(t);
  }
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j{{"store_root", c.store_root.string()},
         {"checklist_dir", c.checklist_dir.string()},
         {"lock_dir", c.lock_dir.string()},
         {"manifest_dir", c.manifest_dir.string()},
         {"records_path", c.records_path.string()},
         {"ledger_path", c.ledger_path.string()},
         {"output_dir", c.output_dir.string()},
         {"sample_rate", c.sample_rate.to_string()},
         {"seed", c.seed},
         {"excluded_benchmarks_from_leaderboard", c.excluded_benchmarks_from_leaderboard},
         {"notes", c.notes},
         {"threads", c.threads}};
  if (c.benchmark) j["benchmark"] = *c.benchmark;
  return j;
}

fs::path output_path(const RunConfig& config, std::string_view name) { return config.output_dir / name; }

namespace {

std::vector<RunRecord> load_records(const RunConfig& config) {
  if (!fs::exists(config.records_path)) {
    throw Error(ErrorCode::Io, config.records_path.string(), "no record file at " + config.records_path.string());
  }
  std::vector<RunRecord> records = load_run_records(config.records_path, config.store_root);
  if (config.benchmark) {
    std::erase_if(records, [&](const RunRecord& r) { return r.cell.benchmark_id != *config.benchmark; });
  }
  return records;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

Json partition_to_json(const std::vector<RunRecord>& included, const std::vector<ExcludedRecord>& excluded) {
  Json in = Json::array();
  for (const auto& r : included) in.push_back(r.record_id);
  Json out = Json::array();
  for (const auto& e : excluded) {
    out.push_back(Json{{"record_id", e.record.record_id}, {"status", std::string(to_token(e.reason))}});
  }
  return Json{{"included", std::move(in)}, {"excluded", std::move(out)}};
}

std::vector<fs::path> manifest_files(const RunConfig& config) {
  std::vector<fs::path> out;
  if (!fs::is_directory(config.manifest_dir)) return out;
  for (const auto& e : fs::directory_iterator(config.manifest_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// One line per manifest problem; empty when every manifest is consistent.
std::vector<std::string> check_manifests(const RunConfig& config, const std::vector<RunRecord>& records) {
  std::vector<std::string> problems;
  for (const auto& path : manifest_files(config)) {
    SamplingManifest m = load_manifest(path);
    if (config.benchmark && m.benchmark_id != *config.benchmark) continue;
    std::vector<RunRecord> subset;
    for (const auto& r : records) {
      if (r.cell.benchmark_id == m.benchmark_id) subset.push_back(r);
    }
    ManifestReport report = validate_sampling_manifest(m, subset);
    std::string name = "manifest " + m.benchmark_id + ": ";
    for (const auto& [case_id, model] : report.missing) problems.push_back(name + "no record for case " + case_id + " and model " + model);
    for (const auto& id : report.stray_record_ids) problems.push_back(name + "record " + id + " is outside the selection");
    for (const auto& [cell, case_id] : report.duplicates) {
      problems.push_back(name + "duplicate records for " + cell.model_id + " on case " + case_id);
    }
  }
  return problems;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<Json>& lines) {
  std::string text;
  for (const auto& j : lines) text += canonical_json(j) + "\n";
  write_file_atomic(path, text);
}

CellTable read_cells(const RunConfig& config) {
  fs::path path = output_path(config, "cells.json");
  if (!fs::exists(path)) return {};
  try {
    return cells_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string(), path.string() + ": " + e.what());
  }
}

}  // namespace

StageResult run_ingest(const RunConfig& config) {
  std::vector<RunRecord> records = load_records(config);
  DenominatorPartition part = apply_denominator_rule(records);
  StageResult result;
  result.warnings = check_manifests(config, records);
  write_file_atomic(output_path(config, "partition.json"), pretty(partition_to_json(part.included, part.excluded)));
  std::ostringstream out;
  out << "records " << records.size() << ", included " << part.included.size() << ", excluded "
      << part.excluded.size() << "\n";
  result.output = out.str();
  return result;
}

StageResult run_validate(const RunConfig& config) {
  std::vector<std::string> problems;
  std::vector<RunRecord> records;
  try {
    records = load_records(config);
  } catch (const Error& e) {
    problems.push_back(std::string("records: ") + e.what());
  }
  try {
    for (auto& p : check_manifests(config, records)) problems.push_back(std::move(p));
  } catch (const Error& e) {
    problems.push_back(e.what());
  }

  std::set<std::string> bundles;
  for (const auto& r : records) {
    if (!r.bundle_ref.empty()) bundles.insert(r.bundle_ref);
  }
  for (const auto& id : bundles) {
    try {
      for (const auto& f : verify_bundle(load_bundle(config.store_root, id), config.store_root)) {
        problems.push_back("bundle " + id + ": " + std::string(to_string(f.kind)) + " " + f.role + " " + f.detail);
      }
    } catch (const Error& e) {
      problems.push_back("bundle " + id + ": " + e.what());
    }
  }

  ChecklistStore store(config.checklist_dir, config.lock_dir);
  std::size_t locks = 0;
  for (const auto& [bench, key] : store.list_locks()) {
    if (config.benchmark && bench != *config.benchmark) continue;
    ++locks;
    try {
      store.load_verified(bench, key);
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }

  std::size_t entries = 0;
  try {
    entries = LedgerStore(config.ledger_path).entries().size();
  } catch (const Error& e) {
    problems.push_back(std::string("ledger: ") + e.what());
  }

  StageResult result;
  std::ostringstream out;
  out << "records " << records.size() << ", bundles " << bundles.size() << ", locks " << locks << ", ledger entries "
      << entries << "\n";
  out << join_lines(problems);
  out << (problems.empty() ? "ok\n" : std::to_string(problems.size()) + " problem(s)\n");
  result.output = out.str();
  result.exit_code = problems.empty() ? 0 : 1;
  return result;
}

StageResult run_lock(const RunConfig& config, const std::string& case_ref, const std::vector<std::string>& reviewers,
                     const std::string& locked_at) {
  ChecklistStore store(config.checklist_dir, config.lock_dir);
  std::vector<std::pair<std::string, std::string>> targets;
  if (!case_ref.empty()) {
    auto slash = case_ref.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == case_ref.size()) {
      throw Error(ErrorCode::InvalidConfig, case_ref, "case reference must be <benchmark>/<case key>");
    }
    targets.emplace_back(case_ref.substr(0, slash), case_ref.substr(slash + 1));
  } else if (fs::is_directory(config.checklist_dir)) {
    for (const auto& bench : fs::directory_iterator(config.checklist_dir)) {
      if (!bench.is_directory()) continue;
      std::string bench_id = bench.path().filename().string();
      if (config.benchmark && bench_id != *config.benchmark) continue;
      for (const auto& file : fs::directory_iterator(bench.path())) {
        if (file.path().extension() == ".json") targets.emplace_back(bench_id, file.path().stem().string());
      }
    }
    std::sort(targets.begin(), targets.end());
  }

  StageResult result;
  std::string when = locked_at.empty() ? utc_timestamp_now() : locked_at;
  for (const auto& [bench, key] : targets) {
    fs::path path = store.checklist_path(bench, key);
    if (!fs::exists(path)) throw Error(ErrorCode::InvalidChecklist, bench + "/" + key, "no draft at " + path.string());
    ParsedChecklist parsed = parse_checklist(path);
    if (parsed.checklist.benchmark_id != bench || parsed.checklist.key() != key) {
      throw Error(ErrorCode::InvalidChecklist, bench + "/" + key,
                  path.string() + " declares " + parsed.checklist.benchmark_id + "/" + parsed.checklist.key());
    }
    for (const auto& w : parsed.warnings) result.warnings.push_back(bench + "/" + key + ": " + w);
    LockedChecklist fresh = lock_checklist(parsed.checklist, reviewers, when);
    bool existed = store.has_lock(bench, key);
    LockedChecklist stored = store.persist(fresh);
    result.output += (existed ? "unchanged " : "locked ") + bench + "/" + key + " " + stored.lock_hash + "\n";
  }
  return result;
}

RunRecord score_record(const RunRecord& record, const ChecklistStore& checklists, const fs::path& store_root) {
  RunRecord out = record;
  out.evidence.reset();
  out.channel_labels.clear();
  out.review.reset();
  if (record.bundle_ref.empty()) return out;  // agent fault with nothing retained

  EvidenceView view = EvidenceView::from_bundle(load_bundle(store_root, record.bundle_ref), store_root);
  const std::string& bench = record.cell.benchmark_id;
  EvidenceAssignment evidence;
  if (record.paired()) {
    EvidenceAssignment benign =
        assign_evidence_label(checklists.load_verified(bench, record.case_id + "." + std::string(kBenignArm)), view);
    EvidenceAssignment injected =
        assign_evidence_label(checklists.load_verified(bench, record.case_id + "." + std::string(kInjectedArm)), view);
    evidence = merge_paired_arms(benign, injected);
  } else {
    evidence = assign_evidence_label(checklists.load_verified(bench, record.case_id), view);
  }
  out.channel_labels[Channel::NativeAligned] = evidence.label;
  if (evidence.stronger_label) out.channel_labels[Channel::Stronger] = *evidence.stronger_label;
  out.evidence = std::move(evidence);
  return out;
}

ScoreOutput score_records(const RunConfig& config, const std::vector<RunRecord>& records) {
  DenominatorPartition part = apply_denominator_rule(records);
  ScoreOutput out;
  out.excluded = std::move(part.excluded);
  out.scored.resize(part.included.size());

  ChecklistStore checklists(config.checklist_dir, config.lock_dir);
  std::vector<std::exception_ptr> errors(part.included.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < part.included.size(); i = next++) {
      try {
        out.scored[i] = score_record(part.included[i], checklists, config.store_root);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, part.included.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& r : out.scored) {
    for (auto& c : probe_native_consistency(r)) out.probe_findings.push_back(std::move(c));
  }
  out.queue = build_review_queue(out.scored, out.probe_findings, config.sample_rate, config.seed);
  out.cells = compute_cells(out.scored);
  return out;
}

StageResult run_score(const RunConfig& config) {
  std::vector<RunRecord> records = load_records(config);
  ScoreOutput s = score_records(config, records);

  std::vector<Json> assignments;
  std::vector<const RunRecord*> by_id;
  for (const auto& r : s.scored) by_id.push_back(&r);
  std::sort(by_id.begin(), by_id.end(), [](const RunRecord* a, const RunRecord* b) { return a->record_id < b->record_id; });
  for (const RunRecord* r : by_id) {
    if (r->evidence) assignments.push_back(Json{{"record_id", r->record_id}, {"assignment", assignment_to_json(*r->evidence)}});
  }
  std::vector<Json> probes;
  for (const auto& c : s.probe_findings) probes.push_back(candidate_to_json(c));

  write_file_atomic(output_path(config, "partition.json"), pretty(partition_to_json(s.scored, s.excluded)));
  write_jsonl(output_path(config, "assignments.jsonl"), assignments);
  write_jsonl(output_path(config, "probe_findings.jsonl"), probes);
  save_run_records(output_path(config, "scored.jsonl"), s.scored);
  write_file_atomic(output_path(config, "queue.json"), pretty(queue_to_json(s.queue)));
  write_file_atomic(output_path(config, "cells.json"), pretty(cells_to_json(s.cells)));
  fs::remove(output_path(config, "corrected.jsonl"));

  StageResult result;
  std::set<std::string> warned;
  for (const auto& r : s.scored) {
    if (!r.evidence) continue;
    for (const auto& f : r.evidence->findings) {
      if (f.starts_with("lint:") && warned.insert(f).second) result.warnings.push_back(f);
    }
  }
  std::ostringstream out;
  out << "scored " << s.scored.size() << " records (" << s.excluded.size() << " excluded), " << s.probe_findings.size()
      << " probe findings, " << s.queue.size() << " queued for review\n";
  result.output = out.str() + render(to_table(score_support_table(s.cells, config.notes)), Format::Text);
  return result;
}

std::vector<RunRecord> load_scored_records(const RunConfig& config) {
  fs::path path = output_path(config, "scored.jsonl");
  if (!fs::exists(path)) return {};
  return load_run_records(path, {});
}

std::vector<RunRecord> load_latest_records(const RunConfig& config) {
  fs::path corrected = output_path(config, "corrected.jsonl");
  if (fs::exists(corrected)) return load_run_records(corrected, {});
  return load_scored_records(config);
}

StageResult run_adjudicate_apply(const RunConfig& config) {
  if (!fs::exists(output_path(config, "scored.jsonl"))) {
    throw Error(ErrorCode::Io, "scored.jsonl", "no scored records in " + config.output_dir.string() + "; run score first");
  }
  std::vector<RunRecord> scored = load_scored_records(config);
  std::vector<LedgerEntry> ledger = LedgerStore(config.ledger_path).entries();
  std::vector<RunRecord> corrected = apply_corrections(scored, ledger);
  save_run_records(output_path(config, "corrected.jsonl"), corrected);
  CellTable cells = compute_cells(corrected);
  write_file_atomic(output_path(config, "cells.json"), pretty(cells_to_json(cells)));

  StageResult result;
  std::set<std::string> known;
  for (const auto& r : scored) known.insert(r.record_id);
  std::size_t touched = 0;
  for (const auto& r : corrected) touched += r.review ? 1 : 0;
  for (const auto& e : ledger) {
    if (!known.contains(e.record_id)) result.warnings.push_back("ledger entry " + std::to_string(e.entry_id) + " names unscored record " + e.record_id);
  }
  result.output = "applied " + std::to_string(ledger.size()) + " entries to " + std::to_string(touched) + " records\n" +
                  render(to_table(score_support_table(cells, config.notes)), Format::Text);
  return result;
}

StageResult run_adjudicate_append(const RunConfig& config, const Json& draft) {
  std::vector<RunRecord> scored = load_scored_records(config);
  std::set<std::string> known;
  for (const auto& r : scored) known.insert(r.record_id);
  AppendReceipt receipt = LedgerStore(config.ledger_path).append(entry_from_json(draft, true), known);
  StageResult result;
  result.output = canonical_json(Json{{"entry_id", receipt.entry_id}, {"hash", receipt.hash}, {"duplicate", receipt.duplicate}}) + "\n";
  return result;
}

StageResult run_report(const RunConfig& config, Format format) {
  fs::path cells_path = output_path(config, "cells.json");
  bool have_cells = fs::exists(cells_path);
  CellTable cells = read_cells(config);
  std::vector<RunRecord> records = have_cells ? load_latest_records(config) : std::vector<RunRecord>{};
  std::vector<LedgerEntry> ledger = have_cells ? LedgerStore(config.ledger_path).entries() : std::vector<LedgerEntry>{};

  const Table tables[] = {
      to_table(score_support_table(cells, config.notes)),
      to_table(leaderboard_table(cells, config.excluded_benchmarks_from_leaderboard)),
      to_table(reason_breakdown(records)),
      to_table(ledger_summary(ledger, records)),
  };
  for (const auto& t : tables) {
    for (Format f : {Format::Text, Format::Csv, Format::Json}) {
      write_file_atomic(config.output_dir / "report" / (t.name + "." + std::string(format_extension(f))), render(t, f));
    }
  }
  StageResult result;
  if (!have_cells) result.warnings.push_back("no cells.json in " + config.output_dir.string() + "; wrote empty tables");
  result.output = render(tables[0], format);
  return result;
}

StageResult run_rank(const RunConfig& config, Format format) {
  StageResult result;
  result.output = render(to_table(leaderboard_table(read_cells(config), config.excluded_benchmarks_from_leaderboard)), format);
  return result;
}

}  // namespace evaudit
