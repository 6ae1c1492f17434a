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

// Per-cell counts, partial-identification bounds and interval-separation
// leaderboard claims. All arithmetic is exact; only the *_display helpers
// round.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evaudit/model.hpp"
#include "evaudit/rational.hpp"

namespace evaudit {

struct CellCounts {
  CellKey cell;
  std::int64_t P = 0;
  std::int64_t F = 0;
  std::int64_t U = 0;
  std::int64_t N = 0;
  std::int64_t native_successes = 0;
  std::int64_t conflict_records = 0;

  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

struct Bound {
  Rational lower;
  Rational upper;

  friend bool operator==(const Bound&, const Bound&) = default;
};

enum class PairDecision { LeftWins, RightWins, Unresolved };

/// The native-aligned label a record contributes to its cell. Records without
/// one fall back to the agent-fault rule: no artifacts and a native failure
/// count as EvidenceFail, a native success as Unknown (and is queued for
/// review). Any other record without a label yields nullopt.
std::optional<EvidenceLabel> effective_label(const RunRecord& record);

/// Tallies included records of one cell. Throws MissingLabel(record_id).
CellCounts cell_counts(const CellKey& cell, const std::vector<const RunRecord*>& records);

/// Cells sorted by (benchmark, model) plus, per benchmark, the models in
/// order of first appearance in the input (the presentation order).
struct CellTable {
  std::vector<CellCounts> cells;
  std::map<std::string, std::vector<std::string>> model_order;

  /// Cells of one benchmark in presentation order.
  std::vector<CellCounts> benchmark_cells(const std::string& benchmark_id) const;
  std::vector<std::string> benchmarks() const;

  friend bool operator==(const CellTable&, const CellTable&) = default;
};

/// Groups included records by cell.
CellTable compute_cells(const std::vector<RunRecord>& included);

/// Throws NoDecidableRecords when P + F = 0.
Rational counted_score(const CellCounts& c);

/// [P/N, (P+U)/N]. Throws EmptyCell when N = 0.
Bound performance_bounds(const CellCounts& c);
Rational unknown_share(const CellCounts& c);
Rational native_score(const CellCounts& c);

PairDecision pairwise_resolution(const Bound& left, const Bound& right);

std::string bound_display(const Bound& b);

struct ModelStanding {
  std::string model_id;
  Bound bound;
  Rational native;
};

struct LeaderboardClaim {
  std::string benchmark_id;
  std::vector<std::string> models;
  std::size_t separated_pairs = 0;
  std::size_t total_pairs = 0;
  std::vector<std::pair<std::string, std::string>> supported;  // (winner, loser)
  // Descending native score; each inner group holds tied models.
  std::vector<std::vector<std::string>> native_point_order;

  /// "3/3".
  std::string separated_text() const;
  /// "C > G > D" for a total order, pairs joined by "; " otherwise, "none"
  /// when nothing separates.
  std::string supported_text() const;
  /// "C > G = D".
  std::string native_order_text() const;
};

/// `standings` in presentation order; ties in the native order keep it.
LeaderboardClaim leaderboard_claim(std::string benchmark_id, const std::vector<ModelStanding>& standings);

/// Aggregates cells of one benchmark by summing counts.
CellCounts sum_cells(const std::string& benchmark_id, const std::vector<CellCounts>& cells);

/// cells.json form: counts plus derived fields as exact fractions and
/// display strings. Derived fields that are undefined are null.
Json cell_to_json(const CellCounts& c);
CellCounts cell_from_json(const Json& j);
Json cells_to_json(const CellTable& table);
CellTable cells_from_json(const Json& j);

}  // namespace evaudit
