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


#include "evaudit/report.hpp"

#include <algorithm>

#include "json_fields.hpp"

namespace evaudit {

using detail::FieldReader;

std::vector<ScoreSupportRow> score_support_table(const CellTable& cells, const std::map<std::string, std::string>& notes) {
  std::vector<ScoreSupportRow> rows;
  for (const auto& bench : cells.benchmarks()) {
    CellCounts total = sum_cells(bench, cells.cells);
    if (total.N == 0) continue;
    auto note = notes.find(bench);
    rows.push_back(ScoreSupportRow{bench, "", total, note == notes.end() ? "" : note->second});
    for (const auto& c : cells.benchmark_cells(bench)) {
      if (c.N > 0) rows.push_back(ScoreSupportRow{bench, c.cell.model_id, c, ""});
    }
  }
  return rows;
}

LeaderboardClaim claim_for(const CellTable& cells, const std::string& benchmark_id) {
  std::vector<ModelStanding> standings;
  for (const auto& c : cells.benchmark_cells(benchmark_id)) {
    if (c.N == 0) continue;
    standings.push_back(ModelStanding{c.cell.model_id, performance_bounds(c), native_score(c)});
  }
  return leaderboard_claim(benchmark_id, standings);
}

std::vector<LeaderboardRow> leaderboard_table(const CellTable& cells, const std::set<std::string>& excluded) {
  std::vector<LeaderboardRow> rows;
  for (const auto& bench : cells.benchmarks()) {
    if (excluded.contains(bench)) continue;
    LeaderboardClaim claim = claim_for(cells, bench);
    if (claim.models.size() < 2) continue;
    rows.push_back(LeaderboardRow{bench, claim.native_order_text(), claim.separated_text(), claim.supported_text(),
                                  claim.separated_pairs < claim.total_pairs});
  }
  return rows;
}

ReasonCode primary_reason(const RunRecord& record) {
  if (record.review && record.review->unknown_reason) return record.review->unknown_reason->code;
  if (record.evidence && record.evidence->reason) return record.evidence->reason->code;
  return ReasonCode::R1;
}

std::vector<ReasonRow> reason_breakdown(const std::vector<RunRecord>& records) {
  std::map<std::string, ReasonRow> rows;
  for (const auto& r : records) {
    ReasonRow& row = rows[r.cell.benchmark_id];
    row.benchmark_id = r.cell.benchmark_id;
    if (effective_label(r) == EvidenceLabel::Unknown) {
      ++row.unknown;
      ++row.reasons[primary_reason(r)];
    }
    if (r.review && r.review->conflict) {
      ++row.conflicts;
      ++row.conflict_types[*r.review->conflict];
    }
  }
  std::vector<ReasonRow> out;
  for (auto& [id, row] : rows) {
    for (const auto& [code, token] : EnumTokens<ReasonCode>::table) row.reasons.try_emplace(code, 0);
    for (const auto& [code, token] : EnumTokens<ConflictCode>::table) row.conflict_types.try_emplace(code, 0);
    out.push_back(std::move(row));
  }
  return out;
}

std::optional<Format> parse_format(std::string_view name) noexcept {
  if (name == "text") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

std::string_view format_extension(Format format) noexcept {
  switch (format) {
    case Format::Text: return "txt";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
  }
  return "txt";
}

namespace {

std::string upper_token(std::string_view token) {
  std::string s(token);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// UTF-8 aware width so non-ASCII notes align.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

}  // namespace

Table to_table(const std::vector<ScoreSupportRow>& rows) {
  Table t{"score_support", {"benchmark", "N", "native_score", "P/F/U", "bound", "unknown_share", "conflicts", "note"}, {}};
  for (const auto& r : rows) {
    const CellCounts& c = r.counts;
    Bound b = performance_bounds(c);
    t.cells.push_back({r.benchmark_row() ? r.benchmark_id : "  " + r.model_id, std::to_string(c.N),
                       percent_display(native_score(c)),
                       std::to_string(c.P) + "/" + std::to_string(c.F) + "/" + std::to_string(c.U), bound_display(b),
                       percent_display(unknown_share(c)), std::to_string(c.conflict_records), r.note});
    Json j = cell_to_json(c);
    j["model_id"] = r.model_id;
    j["scope"] = r.benchmark_row() ? "benchmark" : "model";
    j["note"] = r.note;
    j["unknown_flag"] = c.U > 0;
    j["conflict_flag"] = c.conflict_records > 0;
    t.rows.push_back(std::move(j));
  }
  return t;
}

Table to_table(const std::vector<LeaderboardRow>& rows) {
  Table t{"leaderboard", {"benchmark", "native_point_order", "separated_pairs", "supported_claim", "unresolved"}, {}};
  for (const auto& r : rows) {
    t.cells.push_back({r.benchmark_id, r.native_point_order, r.separated, r.supported_claim, r.unresolved ? "yes" : "no"});
    t.rows.push_back(Json{{"benchmark_id", r.benchmark_id},
                          {"native_point_order", r.native_point_order},
                          {"separated_pairs", r.separated},
                          {"supported_claim", r.supported_claim},
                          {"unresolved", r.unresolved}});
  }
  return t;
}

Table to_table(const std::vector<ReasonRow>& rows) {
  Table t{"reasons", {"benchmark", "unknown"}, {}};
  for (const auto& [code, token] : EnumTokens<ReasonCode>::table) t.columns.push_back(upper_token(token));
  t.columns.push_back("conflicts");
  for (const auto& [code, token] : EnumTokens<ConflictCode>::table) t.columns.push_back(upper_token(token));
  for (const auto& r : rows) {
    std::vector<std::string> line{r.benchmark_id, std::to_string(r.unknown)};
    Json reasons = Json::object();
    Json types = Json::object();
    for (const auto& [code, token] : EnumTokens<ReasonCode>::table) {
      auto it = r.reasons.find(code);
      std::int64_t n = it == r.reasons.end() ? 0 : it->second;
      line.push_back(std::to_string(n));
      reasons[std::string(token)] = n;
    }
    line.push_back(std::to_string(r.conflicts));
    for (const auto& [code, token] : EnumTokens<ConflictCode>::table) {
      auto it = r.conflict_types.find(code);
      std::int64_t n = it == r.conflict_types.end() ? 0 : it->second;
      line.push_back(std::to_string(n));
      types[std::string(token)] = n;
    }
    t.cells.push_back(std::move(line));
    t.rows.push_back(Json{{"benchmark_id", r.benchmark_id},
                          {"unknown", r.unknown},
                          {"reasons", std::move(reasons)},
                          {"conflicts", r.conflicts},
                          {"conflict_types", std::move(types)}});
  }
  return t;
}

Table to_table(const std::vector<BenchmarkReview>& rows) {
  Table t{"review_summary", {"benchmark", "reviewed", "corrected"}, {}};
  for (const auto& [d, token] : EnumTokens<Decision>::table) t.columns.emplace_back(token);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.benchmark_id, std::to_string(r.reviewed), std::to_string(r.corrected)};
    for (const auto& [d, token] : EnumTokens<Decision>::table) {
      auto it = r.by_decision.find(d);
      line.push_back(std::to_string(it == r.by_decision.end() ? 0 : it->second));
    }
    t.cells.push_back(std::move(line));
  }
  t.rows = summary_to_json(rows).at("benchmarks");
  return t;
}

std::string render(const Table& table, Format format) {
  std::string out;
  switch (format) {
    case Format::Json:
      out = Json{{"table", table.name}, {"columns", table.columns}, {"rows", table.rows}}.dump(2);
      out += '\n';
      break;
    case Format::Csv: {
      auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
        out += '\n';
      };
      line(table.columns);
      for (const auto& row : table.cells) line(row);
      break;
    }
    case Format::Text: {
      std::vector<std::size_t> width(table.columns.size(), 0);
      auto measure = [&width](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size() && i < width.size(); ++i) {
          width[i] = std::max(width[i], display_width(fields[i]));
        }
      };
      measure(table.columns);
      for (const auto& row : table.cells) measure(row);
      auto line = [&](const std::vector<std::string>& fields) {
        std::string s;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (i) s += "  ";
          s += fields[i];
          if (i + 1 < fields.size()) s.append(width[i] - display_width(fields[i]), ' ');
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out += s + '\n';
      };
      line(table.columns);
      for (const auto& row : table.cells) line(row);
      break;
    }
  }
  return out;
}

std::vector<ScoreSupportRow> score_support_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord, "score_support");
  std::vector<ScoreSupportRow> out;
  std::size_t i = 0;
  for (const auto& row : r.array("rows")) {
    FieldReader e = r.element(row, "rows", i++);
    CellCounts c = cell_from_json(row);
    out.push_back(ScoreSupportRow{c.cell.benchmark_id, c.cell.model_id, c, e.string_or("note", "")});
  }
  return out;
}

std::vector<LeaderboardRow> leaderboard_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord, "leaderboard");
  std::vector<LeaderboardRow> out;
  std::size_t i = 0;
  for (const auto& row : r.array("rows")) {
    FieldReader e = r.element(row, "rows", i++);
    out.push_back(LeaderboardRow{e.string("benchmark_id"), e.string("native_point_order"), e.string("separated_pairs"),
                                 e.string("supported_claim"), e.boolean("unresolved")});
  }
  return out;
}

std::vector<ReasonRow> reasons_from_json(const Json& j) {
  FieldReader r(j, ErrorCode::InvalidRecord, "reasons");
  std::vector<ReasonRow> out;
  std::size_t i = 0;
  for (const auto& row : r.array("rows")) {
    FieldReader e = r.element(row, "rows", i++);
    ReasonRow rr;
    rr.benchmark_id = e.string("benchmark_id");
    rr.unknown = e.integer("unknown");
    rr.conflicts = e.integer("conflicts");
    FieldReader reasons = e.nested("reasons");
    for (const auto& [code, token] : EnumTokens<ReasonCode>::table) rr.reasons[code] = reasons.integer(token);
    FieldReader types = e.nested("conflict_types");
    for (const auto& [code, token] : EnumTokens<ConflictCode>::table) rr.conflict_types[code] = types.integer(token);
    out.push_back(std::move(rr));
  }
  return out;
}

}  // namespace evaudit
