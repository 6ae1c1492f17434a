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

#include <gtest/gtest.h>

#include <fstream>

#include "study_fixture.hpp"
#include "test_support.hpp"

namespace evaudit {
namespace {

namespace fx = evaudit::fixture;
using test::TempDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig load_config(const std::filesystem::path& config_path) {
  return config_from_json(Json::parse(slurp(config_path)), config_path.parent_path());
}

TEST(PipelineTest, ConfigDefaultsAndErrors) {
  RunConfig c = config_from_json(Json{{"store_root", "store"}, {"sample_rate", "0.05"}, {"seed", 9}}, "/base");
  EXPECT_EQ(c.store_root, std::filesystem::path("/base/store"));
  EXPECT_EQ(c.lock_dir, std::filesystem::path("/base/store/locks"));
  EXPECT_EQ(c.output_dir, std::filesystem::path("/base/store/out"));
  EXPECT_EQ(c.sample_rate, Rational(1, 20));
  EXPECT_EQ(c.seed, 9u);
  RunConfig back = config_from_json(config_to_json(c), "/elsewhere");
  EXPECT_EQ(back.store_root, c.store_root);
  EXPECT_EQ(back.sample_rate, c.sample_rate);

  auto code = [](const Json& j) {
    try {
      config_from_json(j, "/base");
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code(Json::object()), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(Json{{"store_root", "s"}, {"sample_rate", "3/2"}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(Json{{"store_root", "s"}, {"seed", "x"}}), ErrorCode::InvalidConfig);
}

TEST(PipelineTest, ScoreIsDeterministicAcrossThreadCounts) {
  TempDir a, b;
  fx::Options opt;
  opt.benchmarks = {fx::kAppWorld, fx::kAgentDojo};
  RunConfig ca = load_config(fx::write_study(a.path(), opt));
  RunConfig cb = load_config(fx::write_study(b.path(), opt));
  ca.threads = 1;
  cb.threads = 8;
  ASSERT_EQ(run_score(ca).exit_code, 0);
  ASSERT_EQ(run_score(cb).exit_code, 0);
  for (const char* name : {"scored.jsonl", "cells.json", "queue.json", "assignments.jsonl", "probe_findings.jsonl"}) {
    EXPECT_EQ(slurp(output_path(ca, name)), slurp(output_path(cb, name))) << name;
  }
  ASSERT_EQ(run_score(ca).exit_code, 0);
  EXPECT_EQ(slurp(output_path(ca, "scored.jsonl")), slurp(output_path(cb, "scored.jsonl")));
}

TEST(PipelineTest, StagesEndToEnd) {
  TempDir dir;
  fx::Options opt;
  opt.benchmarks = {fx::kAppWorld};
  opt.pre_review = true;
  RunConfig c = load_config(fx::write_study(dir.path(), opt));

  StageResult ingest = run_ingest(c);
  EXPECT_EQ(ingest.exit_code, 0);
  EXPECT_TRUE(std::filesystem::exists(output_path(c, "partition.json")));

  ASSERT_EQ(run_score(c).exit_code, 0);
  auto scored = load_scored_records(c);
  EXPECT_EQ(scored.size(), 300u);
  ASSERT_EQ(run_adjudicate_apply(c).exit_code, 0);
  auto corrected = load_latest_records(c);
  ASSERT_EQ(corrected.size(), 300u);
  EXPECT_NE(scored, corrected);

  StageResult report = run_report(c, Format::Csv);
  EXPECT_EQ(report.exit_code, 0);
  EXPECT_NE(report.output.find("appworld"), std::string::npos);
  for (const char* f : {"score_support.txt", "score_support.csv", "score_support.json"}) {
    EXPECT_TRUE(std::filesystem::exists(c.output_dir / "report" / f)) << f;
  }
  EXPECT_EQ(run_rank(c, Format::Text).exit_code, 0);
  EXPECT_EQ(run_validate(c).exit_code, 0);
}

TEST(PipelineTest, AppendThroughStage) {
  TempDir dir;
  fx::Options opt;
  opt.benchmarks = {fx::kMiniWob};
  opt.with_ledger = false;
  RunConfig c = load_config(fx::write_study(dir.path(), opt));
  ASSERT_EQ(run_score(c).exit_code, 0);
  std::string id = load_scored_records(c).front().record_id;
  Json draft{{"record_id", id},
             {"trigger", "sampled_check"},
             {"decision", "kept"},
             {"before_label", "evidence_pass"},
             {"after_label", "evidence_pass"},
             {"rationale", "final DOM shows the task done"},
             {"source_pointers", {"dom_final#/task_done"}},
             {"reviewer_id", "reviewer-a"}};
  auto label = load_scored_records(c).front().channel_labels.at(Channel::NativeAligned);
  draft["before_label"] = draft["after_label"] = std::string(to_token(label));
  EXPECT_EQ(run_adjudicate_append(c, draft).exit_code, 0);
  EXPECT_EQ(run_adjudicate_append(c, draft).exit_code, 0);
  EXPECT_EQ(LedgerStore(c.ledger_path).entries().size(), 1u);
  draft["record_id"] = "nope";
  EXPECT_THROW(run_adjudicate_append(c, draft), Error);
}

TEST(PipelineTest, ReportWithoutCellsWritesEmptyTables) {
  TempDir dir;
  RunConfig c = config_from_json(Json{{"store_root", "."}}, dir.path());
  StageResult r = run_report(c, Format::Text);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_FALSE(r.warnings.empty());
  Json j = Json::parse(slurp(c.output_dir / "report" / "score_support.json"));
  EXPECT_TRUE(j["rows"].empty());
}

TEST(PipelineTest, ScoreRefusesUnlockedOrTamperedCases) {
  TempDir dir;
  fx::Options opt;
  opt.benchmarks = {fx::kMiniWob};
  opt.lock = false;
  RunConfig c = load_config(fx::write_study(dir.path(), opt));
  try {
    run_score(c);
    FAIL() << "scored without locks";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LockInvalid);
  }
  StageResult lock = run_lock(c, "", {"reviewer-a", "reviewer-b"}, "2026-03-01T12:00:00Z");
  ASSERT_EQ(lock.exit_code, 0);
  EXPECT_EQ(run_score(c).exit_code, 0);
  EXPECT_THROW(run_lock(c, "", {"reviewer-a"}, ""), Error);

  ChecklistStore store(c.checklist_dir, c.lock_dir);
  auto [bench, key] = store.list_locks().front();
  std::filesystem::path lock_file = store.lock_path(bench, key);
  std::string bytes = slurp(lock_file);
  bytes[bytes.find("reviewer-a")] = 'R';
  std::ofstream(lock_file, std::ios::binary | std::ios::trunc) << bytes;
  EXPECT_THROW(run_score(c), Error);
  EXPECT_NE(run_validate(c).exit_code, 0);
}

}  // namespace
}  // namespace evaudit
