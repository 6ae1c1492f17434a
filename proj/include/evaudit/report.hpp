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

// Report tables: score support, leaderboard resolution, Unknown-reason and
// conflict breakdowns, review summary; rendered as aligned text, CSV or JSON.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "evaudit/aggregate.hpp"
#include "evaudit/ledger.hpp"
#include "evaudit/model.hpp"

namespace evaudit {

struct ScoreSupportRow {
  std::string benchmark_id;
  std::string model_id;  // empty on the benchmark aggregate row
  CellCounts counts;
  std::string note;  // benchmark rows only; supplied by configuration

  bool benchmark_row() const noexcept { return model_id.empty(); }
  friend bool operator==(const ScoreSupportRow&, const ScoreSupportRow&) = default;
};

/// Benchmark rows (summed over models) each followed by their model rows, in
/// presentation order. Benchmarks without records are omitted.
std::vector<ScoreSupportRow> score_support_table(const CellTable& cells,
                                                 const std::map<std::string, std::string>& notes = {});

struct LeaderboardRow {
  std::string benchmark_id;
  std::string native_point_order;
  std::string separated;  // "k/total"
  std::string supported_claim;
  bool unresolved = false;  // the native strict order is not identified

  friend bool operator==(const LeaderboardRow&, const LeaderboardRow&) = default;
};

/// One row per benchmark with at least two models and not in `excluded`.
std::vector<LeaderboardRow> leaderboard_table(const CellTable& cells, const std::set<std::string>& excluded);
LeaderboardClaim claim_for(const CellTable& cells, const std::string& benchmark_id);

struct ReasonRow {
  std::string benchmark_id;
  std::int64_t unknown = 0;
  std::map<ReasonCode, std::int64_t> reasons;
  std::int64_t conflicts = 0;
  std::map<ConflictCode, std::int64_t> conflict_types;

  friend bool operator==(const ReasonRow&, const ReasonRow&) = default;
};

/// The primary reason of an Unknown record: the ledger's, else the scorer's,
/// else R1 (agent-fault records that retained nothing).
ReasonCode primary_reason(const RunRecord& record);

/// Per benchmark over included records; reasons sum to U, types to conflicts.
std::vector<ReasonRow> reason_breakdown(const std::vector<RunRecord>& records);

enum class Format { Text, Csv, Json };

std::optional<Format> parse_format(std::string_view name) noexcept;
std::string_view format_extension(Format format) noexcept;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;
  Json rows = Json::array();  // structured form, one object per row
};

Table to_table(const std::vector<ScoreSupportRow>& rows);
Table to_table(const std::vector<LeaderboardRow>& rows);
Table to_table(const std::vector<ReasonRow>& rows);
Table to_table(const std::vector<BenchmarkReview>& rows);

std::string render(const Table& table, Format format);

/// Parse the structured render back.
std::vector<ScoreSupportRow> score_support_from_json(const Json& j);
std::vector<LeaderboardRow> leaderboard_from_json(const Json& j);
std::vector<ReasonRow> reasons_from_json(const Json& j);

}  // namespace evaudit
