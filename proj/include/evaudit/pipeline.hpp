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

// Pipeline stages. Each stage reads only persisted inputs and earlier stage
// outputs, so any stage can be re-run on its own.
//
// Outputs under output_dir:
//   partition.json          included / excluded record ids
//   assignments.jsonl       one evidence assignment per scored record
//   probe_findings.jsonl    native-consistency candidates
//   scored.jsonl            included records with labels, before review
//   queue.json              review queue
//   corrected.jsonl         scored records after the ledger (adjudicate apply)
//   cells.json              per-cell counts and bounds (latest stage)
//   report/*.{txt,csv,json}

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evaudit/aggregate.hpp"
#include "evaudit/checklist.hpp"
#include "evaudit/evaluator.hpp"
#include "evaudit/ingest.hpp"
#include "evaudit/ledger.hpp"
#include "evaudit/rational.hpp"
#include "evaudit/report.hpp"

namespace evaudit {

struct RunConfig {
  std::filesystem::path store_root;
  std::filesystem::path checklist_dir;  // default <store_root>/checklists
  std::filesystem::path lock_dir;       // default <store_root>/locks
  std::filesystem::path manifest_dir;   // default <store_root>/manifests
  std::filesystem::path records_path;   // default <store_root>/records.jsonl
  std::filesystem::path ledger_path;    // default <store_root>/ledger.jsonl
  std::filesystem::path output_dir;     // default <store_root>/out
  Rational sample_rate{0};
  std::uint64_t seed = 0;
  std::set<std::string> excluded_benchmarks_from_leaderboard;
  std::optional<std::string> benchmark;  // restrict stages to one benchmark
  std::map<std::string, std::string> notes;  // benchmark -> score-support note
  unsigned threads = 0;                       // 0: hardware concurrency
};

/// Reads the configuration document. Relative paths resolve against
/// `base_dir`; unset directories default under store_root. Throws
/// InvalidConfig.
RunConfig config_from_json(const Json& document, const std::filesystem::path& base_dir);
Json config_to_json(const RunConfig& config);

struct StageResult {
  int exit_code = 0;
  std::string output;                 // primary human-readable output
  std::vector<std::string> warnings;  // diagnostics
};

std::filesystem::path output_path(const RunConfig& config, std::string_view name);

/// Loads and partitions records, checks manifests when present, writes
/// partition.json.
StageResult run_ingest(const RunConfig& config);

/// Manifests, bundle hashes, lock hashes and the ledger chain. Any problem
/// gives a nonzero exit code and is named in the output.
StageResult run_validate(const RunConfig& config);

/// Locks the draft <checklist_dir>/<benchmark>/<key>.json, or every draft
/// when `case_ref` is empty. `case_ref` is "<benchmark>/<key>".
StageResult run_lock(const RunConfig& config, const std::string& case_ref, const std::vector<std::string>& reviewers,
                     const std::string& locked_at);

/// Evaluate + aggregate. Writes every pre-review output and removes a stale
/// corrected.jsonl.
StageResult run_score(const RunConfig& config);

/// Applies the ledger to scored.jsonl; writes corrected.jsonl and cells.json.
StageResult run_adjudicate_apply(const RunConfig& config);

/// Appends one draft entry (JSON) to the ledger.
StageResult run_adjudicate_append(const RunConfig& config, const Json& draft);

/// Writes report/* in every format and returns the score-support table in
/// `format`.
StageResult run_report(const RunConfig& config, Format format);

/// Leaderboard table from cells.json.
StageResult run_rank(const RunConfig& config, Format format);

// ---- pieces shared with the server and tests -----------------------------------

struct ScoreOutput {
  std::vector<RunRecord> scored;
  std::vector<ExcludedRecord> excluded;
  std::vector<ConflictCandidate> probe_findings;
  std::vector<ReviewQueueItem> queue;
  CellTable cells;
};

/// Evaluates in memory without writing anything.
ScoreOutput score_records(const RunConfig& config, const std::vector<RunRecord>& records);

/// Evaluates one included record; returns it with evidence and channel
/// labels set.
RunRecord score_record(const RunRecord& record, const ChecklistStore& checklists,
                       const std::filesystem::path& store_root);

/// corrected.jsonl when present, else scored.jsonl; empty when neither exists.
std::vector<RunRecord> load_latest_records(const RunConfig& config);
std::vector<RunRecord> load_scored_records(const RunConfig& config);

}  // namespace evaudit
