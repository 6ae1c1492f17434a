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

#include <gtest/gtest.h>

#include <fstream>

#include "evaudit/evaluator.hpp"
#include "test_support.hpp"

namespace evaudit {
namespace {

using test::TempDir;

RunRecord plain(const std::string& case_id, const std::string& model, RecordStatus status = RecordStatus::Completed,
                const std::string& bench = "appworld") {
  return make_record(bench + ":" + case_id + ":" + model, CellKey{bench, model}, case_id, {case_id + "-" + model},
                     status, test::native(true), status == RecordStatus::Completed ? "bundle-1" : "");
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

TEST(IngestTest, RecordRoundTripKeepsEverything) {
  RunRecord r = plain("c1", "m");
  r.native.score_value = Rational(1, 3);
  r.native.subchecks = {{"action_0", true}, {"action_1", false}};
  EvidenceAssignment ev;
  ev.label = EvidenceLabel::Unknown;
  ev.reason = UnknownReason{ReasonCode::R4, "downloads"};
  ev.blocking_candidates = {*ev.reason};
  ev.atom_outcomes = {AtomOutcome{"pass", 0, TriBool::Undetermined, "downloads"}};
  ev.checklist_hash = std::string(64, 'a');
  ev.stronger_label = EvidenceLabel::EvidenceFail;
  ev.findings = {"note"};
  r.evidence = ev;
  r.channel_labels = {{Channel::NativeAligned, EvidenceLabel::Unknown}, {Channel::Stronger, EvidenceLabel::EvidenceFail}};
  r.review = ReviewState{ConflictCode::C2, UnknownReason{ReasonCode::R3, "db"}, {3, 4}};
  r.extra = Json{{"harness_version", "2.1"}};

  Json j = record_to_json(r);
  EXPECT_EQ(record_from_json(j), r);
  auto parsed = parse_run_records(serialize_run_records({r, plain("c2", "m")}));
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], r);
  EXPECT_EQ(assignment_from_json(assignment_to_json(ev)), ev);
}

TEST(IngestTest, RecordParseErrors) {
  std::string good = record_to_json(plain("c1", "m")).dump();
  try {
    parse_run_records(good + "\n\n{broken\n");
    FAIL();
  } catch (const PositionedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.position(), 3u);
  }
  EXPECT_EQ(code_of([&] { parse_run_records(good + "\n" + good + "\n"); }), ErrorCode::DuplicateId);

  Json bad_status = record_to_json(plain("c1", "m"));
  bad_status["status"] = "crashed";
  EXPECT_EQ(code_of([&] { parse_run_records(bad_status.dump()); }), ErrorCode::ParseError);

  Json no_bundle = record_to_json(plain("c1", "m"));
  no_bundle["bundle_ref"] = "";
  EXPECT_THROW(record_from_json(no_bundle), Error);

  Json three_eps = record_to_json(plain("c1", "m"));
  three_eps["episode_refs"] = Json::array({"a", "b", "c"});
  EXPECT_THROW(record_from_json(three_eps), Error);
}

TEST(IngestTest, DanglingBundleIsReported) {
  TempDir dir;
  std::ofstream(dir / "records.jsonl") << record_to_json(plain("c1", "m")).dump() << "\n";
  EXPECT_EQ(code_of([&] { load_run_records(dir / "records.jsonl", dir.path()); }), ErrorCode::DanglingBundle);
  EXPECT_EQ(load_run_records(dir / "records.jsonl", {}).size(), 1u);
}

TEST(IngestTest, BundlesAreContentAddressedAndVerified) {
  TempDir dir;
  std::vector<ArtifactFile> files = {test::json_file("state", Json{{"ok", true}}), test::text_file("log", "done")};
  ArtifactBundle b = write_bundle(dir.path(), files);
  EXPECT_EQ(b.bundle_id.size(), 64u);
  EXPECT_EQ(write_bundle(dir.path(), {files[1], files[0]}), b);
  EXPECT_EQ(load_bundle(dir.path(), b.bundle_id), b);
  EXPECT_EQ(bundle_from_json(bundle_to_json(b)), b);
  EXPECT_TRUE(verify_bundle(b, dir.path()).empty());
  ASSERT_NE(b.find("log"), nullptr);

  std::ofstream(bundle_dir(dir.path(), b.bundle_id) / "log.txt") << "not done";
  auto findings = verify_bundle(b, dir.path());
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, BundleFindingKind::HashMismatch);
  EXPECT_EQ(findings[0].role, "log");

  // A tampered artifact reads as missing.
  EvidenceView view = EvidenceView::from_bundle(b, dir.path());
  EXPECT_EQ(view.find("log"), nullptr);
  EXPECT_NE(view.find("state"), nullptr);
  EXPECT_EQ(view.findings().size(), 1u);

  std::filesystem::remove(bundle_dir(dir.path(), b.bundle_id) / "state.json");
  EXPECT_EQ(verify_bundle(b, dir.path()).size(), 2u);

  EXPECT_EQ(code_of([&] { load_bundle(dir.path(), std::string(64, '0')); }), ErrorCode::DanglingBundle);
  EXPECT_THROW(write_bundle(dir.path(), {ArtifactFile{"x", MediaKind::Text, "../escape.txt", "x"}}), Error);
  EXPECT_THROW(write_bundle(dir.path(), {files[0], files[0]}), Error);
}

TEST(IngestTest, DenominatorRule) {
  std::vector<RunRecord> rs = {plain("c1", "m"), plain("c2", "m", RecordStatus::InfrastructureFailure),
                               plain("c3", "m", RecordStatus::AgentFault),
                               plain("c4", "m", RecordStatus::PreRunFailure), plain("c5", "m")};
  DenominatorPartition p = apply_denominator_rule(rs);
  ASSERT_EQ(p.included.size(), 3u);
  EXPECT_EQ(p.included[0].case_id, "c1");
  EXPECT_EQ(p.included[1].case_id, "c3");
  EXPECT_EQ(p.included[2].case_id, "c5");
  ASSERT_EQ(p.excluded.size(), 2u);
  EXPECT_EQ(p.excluded[0].reason, RecordStatus::InfrastructureFailure);
  EXPECT_EQ(p.excluded[1].reason, RecordStatus::PreRunFailure);
}

TEST(IngestTest, SamplingManifestChecks) {
  SamplingManifest m{"appworld", 5, {{"c5", "smoke test"}}, 7, {"c1", "c2"}};
  EXPECT_EQ(manifest_from_json(manifest_to_json(m)).selected_case_ids, m.selected_case_ids);

  std::vector<RunRecord> rs = {plain("c1", "m1"), plain("c2", "m1"), plain("c1", "m2")};
  ManifestReport r = validate_sampling_manifest(m, rs);
  EXPECT_FALSE(r.consistent());
  ASSERT_EQ(r.missing.size(), 1u);
  EXPECT_EQ(r.missing[0], (std::pair<std::string, std::string>{"c2", "m2"}));

  rs.push_back(plain("c2", "m2"));
  EXPECT_TRUE(validate_sampling_manifest(m, rs).consistent());

  RunRecord stray = plain("c3", "m1");
  RunRecord dup = plain("c1", "m1");
  dup.record_id = "other-id";
  auto r2 = validate_sampling_manifest(m, {rs[0], rs[1], rs[2], rs[3], stray, dup});
  EXPECT_EQ(r2.stray_record_ids, std::vector<std::string>{stray.record_id});
  ASSERT_EQ(r2.duplicates.size(), 1u);
  EXPECT_EQ(r2.duplicates[0].second, "c1");

  EXPECT_EQ(code_of([&] { validate_sampling_manifest(m, {plain("c1", "m1", RecordStatus::Completed, "tau3")}); }),
            ErrorCode::BenchmarkMismatch);
  SamplingManifest excluded_selected = m;
  excluded_selected.selected_case_ids.push_back("c5");
  EXPECT_EQ(code_of([&] { validate_sampling_manifest(excluded_selected, rs); }), ErrorCode::InvalidManifest);
  SamplingManifest repeated = m;
  repeated.selected_case_ids.push_back("c1");
  EXPECT_EQ(code_of([&] { validate_sampling_manifest(repeated, rs); }), ErrorCode::InvalidManifest);
  SamplingManifest too_many{"appworld", 2, {{"c5", "smoke"}}, 7, {"c1", "c2"}};
  EXPECT_EQ(code_of([&] { validate_sampling_manifest(too_many, rs); }), ErrorCode::InvalidManifest);
}

}  // namespace
}  // namespace evaudit
