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


#include "evaudit/aggregate.hpp"

#include <algorithm>
#include <map>

#include "json_fields.hpp"

namespace evaudit {

std::optional<EvidenceLabel> effective_label(const RunRecord& record) {
  auto it = record.channel_labels.find(Channel::NativeAligned);
  if (it != record.channel_labels.end()) return it->second;
  if (record.status == RecordStatus::AgentFault && !record.evidence) {
    return record.native.label == NativeLabel::Failure ? EvidenceLabel::EvidenceFail : EvidenceLabel::Unknown;
  }
  return std::nullopt;
}

CellCounts cell_counts(const CellKey& cell, const std::vector<const RunRecord*>& records) {
  CellCounts c{cell};
  for (const RunRecord* r : records) {
    auto label = effective_label(*r);
    if (!label) {
      throw Error(ErrorCode::MissingLabel, r->record_id, "record " + r->record_id + " has no native_aligned label");
    }
    switch (*label) {
      case EvidenceLabel::EvidencePass: ++c.P; break;
      case EvidenceLabel::EvidenceFail: ++c.F; break;
      case EvidenceLabel::Unknown: ++c.U; break;
    }
    ++c.N;
    if (r->native.label == NativeLabel::Success) ++c.native_successes;
    if (r->review && r->review->conflict) ++c.conflict_records;
  }
  return c;
}

CellTable compute_cells(const std::vector<RunRecord>& included) {
  std::map<CellKey, std::vector<const RunRecord*>> groups;
  CellTable table;
  for (const auto& r : included) {
    auto& records = groups[r.cell];
    if (records.empty()) table.model_order[r.cell.benchmark_id].push_back(r.cell.model_id);
    records.push_back(&r);
  }
  for (const auto& [key, records] : groups) table.cells.push_back(cell_counts(key, records));
  return table;
}

std::vector<CellCounts> CellTable::benchmark_cells(const std::string& benchmark_id) const {
  std::vector<CellCounts> out;
  auto it = model_order.find(benchmark_id);
  if (it != model_order.end()) {
    for (const auto& model : it->second) {
      for (const auto& c : cells) {
        if (c.cell.benchmark_id == benchmark_id && c.cell.model_id == model) out.push_back(c);
      }
    }
  }
  for (const auto& c : cells) {
    if (c.cell.benchmark_id == benchmark_id &&
        std::none_of(out.begin(), out.end(), [&](const CellCounts& o) { return o.cell == c.cell; })) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> CellTable::benchmarks() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (out.empty() || out.back() != c.cell.benchmark_id) out.push_back(c.cell.benchmark_id);
  }
  return out;
}

namespace {

std::string cell_name(const CellCounts& c) { return c.cell.benchmark_id + "/" + c.cell.model_id; }

void require_nonempty(const CellCounts& c) {
  if (c.N <= 0) throw Error(ErrorCode::EmptyCell, cell_name(c), "cell " + cell_name(c) + " has no records");
}

}  // namespace

Rational counted_score(const CellCounts& c) {
  if (c.P + c.F == 0) {
    throw Error(ErrorCode::NoDecidableRecords, cell_name(c), "cell " + cell_name(c) + " has no decidable records");
  }
  return Rational(c.P, c.P + c.F);
}

Bound performance_bounds(const CellCounts& c) {
  require_nonempty(c);
  return Bound{Rational(c.P, c.N), Rational(c.P + c.U, c.N)};
}

Rational unknown_share(const CellCounts& c) {
  require_nonempty(c);
  return Rational(c.U, c.N);
}

Rational native_score(const CellCounts& c) {
  require_nonempty(c);
  return Rational(c.native_successes, c.N);
}

PairDecision pairwise_resolution(const Bound& left, const Bound& right) {
  if (left.lower > right.upper) return PairDecision::LeftWins;
  if (right.lower > left.upper) return PairDecision::RightWins;
  return PairDecision::Unresolved;
}

std::string bound_display(const Bound& b) {
  return "[" + percent_display(b.lower) + ", " + percent_display(b.upper) + "]";
}

std::string LeaderboardClaim::separated_text() const {
  return std::to_string(separated_pairs) + "/" + std::to_string(total_pairs);
}

std::string LeaderboardClaim::supported_text() const {
  if (supported.empty()) return "none";
  std::string out;
  if (separated_pairs == total_pairs) {
    std::map<std::string, std::size_t> wins;
    for (const auto& [winner, loser] : supported) ++wins[winner];
    std::vector<std::string> order = models;
    std::stable_sort(order.begin(), order.end(),
                     [&](const std::string& a, const std::string& b) { return wins[a] > wins[b]; });
    for (const auto& m : order) out += (out.empty() ? "" : " > ") + m;
    return out;
  }
  for (const auto& [winner, loser] : supported) out += (out.empty() ? "" : "; ") + winner + " > " + loser;
  return out;
}

std::string LeaderboardClaim::native_order_text() const {
  std::string out;
  for (const auto& group : native_point_order) {
    if (!out.empty()) out += " > ";
    for (std::size_t i = 0; i < group.size(); ++i) out += (i ? " = " : "") + group[i];
  }
  return out;
}

LeaderboardClaim leaderboard_claim(std::string benchmark_id, const std::vector<ModelStanding>& standings) {
  LeaderboardClaim claim;
  claim.benchmark_id = std::move(benchmark_id);
  for (const auto& s : standings) claim.models.push_back(s.model_id);
  for (std::size_t i = 0; i < standings.size(); ++i) {
    for (std::size_t j = i + 1; j < standings.size(); ++j) {
      ++claim.total_pairs;
      switch (pairwise_resolution(standings[i].bound, standings[j].bound)) {
        case PairDecision::LeftWins:
          ++claim.separated_pairs;
          claim.supported.emplace_back(standings[i].model_id, standings[j].model_id);
          break;
        case PairDecision::RightWins:
          ++claim.separated_pairs;
          claim.supported.emplace_back(standings[j].model_id, standings[i].model_id);
          break;
        case PairDecision::Unresolved:
          break;
      }
    }
  }
  std::vector<const ModelStanding*> order;
  for (const auto& s : standings) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const ModelStanding* a, const ModelStanding* b) { return a->native > b->native; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && order[i]->native == order[i - 1]->native) {
      claim.native_point_order.back().push_back(order[i]->model_id);
    } else {
      claim.native_point_order.push_back({order[i]->model_id});
    }
  }
  return claim;
}

CellCounts sum_cells(const std::string& benchmark_id, const std::vector<CellCounts>& cells) {
  CellCounts total{CellKey{benchmark_id, ""}};
  for (const auto& c : cells) {
    if (c.cell.benchmark_id != benchmark_id) continue;
    total.P += c.P;
    total.F += c.F;
    total.U += c.U;
    total.N += c.N;
    total.native_successes += c.native_successes;
    total.conflict_records += c.conflict_records;
  }
  return total;
}

Json cell_to_json(const CellCounts& c) {
  Json j{{"benchmark_id", c.cell.benchmark_id},
         {"model_id", c.cell.model_id},
         {"P", c.P},
         {"F", c.F},
         {"U", c.U},
         {"N", c.N},
         {"native_successes", c.native_successes},
         {"conflict_records", c.conflict_records}};
  auto put = [&j](const char* field, const std::optional<Rational>& v) {
    j[field] = v ? Json(v->to_string()) : Json(nullptr);
    j[std::string(field) + "_display"] = v ? Json(percent_display(*v)) : Json(nullptr);
  };
  std::optional<Rational> counted;
  if (c.P + c.F > 0) counted = counted_score(c);
  put("counted_score", counted);
  if (c.N > 0) {
    Bound b = performance_bounds(c);
    put("lower", b.lower);
    put("upper", b.upper);
    put("unknown_share", unknown_share(c));
    put("native_score", native_score(c));
    j["bound_display"] = bound_display(b);
  } else {
    for (const char* f : {"lower", "upper", "unknown_share", "native_score"}) put(f, std::nullopt);
    j["bound_display"] = nullptr;
  }
  return j;
}

CellCounts cell_from_json(const Json& j) {
  detail::FieldReader r(j, ErrorCode::InvalidRecord, "cell");
  CellCounts c{CellKey{r.string("benchmark_id"), r.string("model_id")}};
  c.P = r.integer("P");
  c.F = r.integer("F");
  c.U = r.integer("U");
  c.N = r.integer("N");
  c.native_successes = r.integer("native_successes");
  c.conflict_records = r.integer("conflict_records");
  if (c.P < 0 || c.F < 0 || c.U < 0 || c.N != c.P + c.F + c.U) r.fail("N", "counts must be non-negative with N = P+F+U");
  if (c.native_successes < 0 || c.native_successes > c.N || c.conflict_records < 0 || c.conflict_records > c.N) {
    r.fail("native_successes", "must lie in [0, N]");
  }
  return c;
}

Json cells_to_json(const CellTable& table) {
  Json arr = Json::array();
  for (const auto& c : table.cells) arr.push_back(cell_to_json(c));
  return Json{{"cells", std::move(arr)}, {"model_order", table.model_order}};
}

CellTable cells_from_json(const Json& j) {
  detail::FieldReader r(j, ErrorCode::InvalidRecord);
  CellTable table;
  for (const auto& c : r.array("cells")) table.cells.push_back(cell_from_json(c));
  std::sort(table.cells.begin(), table.cells.end(),
            [](const CellCounts& a, const CellCounts& b) { return a.cell < b.cell; });
  if (r.has("model_order")) {
    for (const auto& [bench, models] : r.object("model_order").items()) {
      for (const auto& m : models) {
        if (!m.is_string()) r.fail("model_order", "expected model ids");
        table.model_order[bench].push_back(m.get<std::string>());
      }
    }
  }
  return table;
}

}  // namespace evaudit
