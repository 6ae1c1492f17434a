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


#include "evaudit/server.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <thread>

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

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fx::Options opt;
    opt.benchmarks = {fx::kMiniWob};
    opt.with_ledger = false;
    auto config_path = fx::write_study(dir_.path(), opt);
    config_ = config_from_json(Json::parse(slurp(config_path)), config_path.parent_path());
    ASSERT_EQ(run_score(config_).exit_code, 0);
    scored_ = load_scored_records(config_);
    server_ = std::make_unique<ApiServer>(config_, "s3cret");
    port_ = server_->bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_bearer_token_auth("s3cret");
    for (int i = 0; i < 100; ++i) {
      if (client_->Get("/api/summary")) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }

  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }

  Json kept_draft(const RunRecord& r, const std::string& reviewer = "reviewer-a") const {
    std::string label(to_token(effective_label(r).value()));
    return Json{{"record_id", r.record_id},     {"trigger", "sampled_check"}, {"decision", "kept"},
                {"before_label", label},        {"after_label", label},       {"rationale", "label matches the DOM"},
                {"source_pointers", {"dom_final#/task_done"}}, {"reviewer_id", reviewer}};
  }

  const RunRecord& record_with(EvidenceLabel label) const {
    for (const auto& r : scored_) {
      if (r.evidence && effective_label(r) == label) return r;
    }
    throw std::runtime_error("no such record");
  }

  TempDir dir_;
  RunConfig config_;
  std::vector<RunRecord> scored_;
  std::unique_ptr<ApiServer> server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServerTest, RequiresBearerToken) {
  httplib::Client anon("127.0.0.1", port_);
  auto res = anon.Get("/api/queue");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  anon.set_bearer_token_auth("wrong");
  EXPECT_EQ(anon.Get("/api/cells")->status, 401);
  EXPECT_EQ(client_->Get("/api/queue")->status, 200);
}

TEST_F(ServerTest, QueueRecordsAndArtifacts) {
  Json queue = Json::parse(client_->Get("/api/queue")->body);
  EXPECT_FALSE(queue["items"].empty());

  const RunRecord& r = record_with(EvidenceLabel::EvidencePass);
  auto res = client_->Get("/api/records/" + r.record_id);
  ASSERT_EQ(res->status, 200);
  Json body = Json::parse(res->body);
  EXPECT_EQ(body["record"]["record_id"], r.record_id);
  EXPECT_FALSE(body["atom_outcomes"].empty());
  EXPECT_TRUE(body.contains("native"));
  EXPECT_EQ(client_->Get("/api/records/nope")->status, 404);

  ArtifactBundle bundle = load_bundle(config_.store_root, r.bundle_ref);
  const ArtifactEntry& e = bundle.entries.front();
  auto art = client_->Get("/api/artifacts/" + bundle.bundle_id + "/" + e.role);
  ASSERT_EQ(art->status, 200);
  EXPECT_EQ(art->get_header_value("X-Media-Kind"), std::string(to_token(e.media_kind)));
  EXPECT_EQ(art->body, slurp(bundle_dir(config_.store_root, bundle.bundle_id) / e.path));
  EXPECT_EQ(client_->Get("/api/artifacts/" + bundle.bundle_id + "/no_such_role")->status, 404);
  EXPECT_EQ(client_->Get("/api/artifacts/" + std::string(64, '0') + "/x")->status, 404);
}

TEST_F(ServerTest, LedgerAppendStatuses) {
  const RunRecord& r = record_with(EvidenceLabel::EvidencePass);
  Json draft = kept_draft(r);
  auto first = client_->Post("/api/ledger", draft.dump(), "application/json");
  ASSERT_EQ(first->status, 201);
  Json receipt = Json::parse(first->body);
  EXPECT_EQ(receipt["entry_id"], 1);
  EXPECT_FALSE(receipt["duplicate"].get<bool>());

  auto dup = client_->Post("/api/ledger", draft.dump(), "application/json");
  ASSERT_EQ(dup->status, 200);
  EXPECT_TRUE(Json::parse(dup->body)["duplicate"].get<bool>());
  EXPECT_EQ(Json::parse(dup->body)["hash"], receipt["hash"]);

  Json bad = draft;
  bad["after_label"] = "evidence_fail";
  auto invalid = client_->Post("/api/ledger", bad.dump(), "application/json");
  ASSERT_EQ(invalid->status, 422);
  Json err = Json::parse(invalid->body)["errors"][0];
  EXPECT_EQ(err["code"], "InvalidEntry");
  EXPECT_TRUE(err.contains("field"));

  Json unknown = draft;
  unknown["record_id"] = "miniwob:none:gpt";
  EXPECT_EQ(client_->Post("/api/ledger", unknown.dump(), "application/json")->status, 422);
  EXPECT_EQ(client_->Post("/api/ledger", "{not json", "application/json")->status, 400);

  EXPECT_EQ(LedgerStore(config_.ledger_path).entries().size(), 1u);
  Json summary = Json::parse(client_->Get("/api/summary")->body);
  EXPECT_EQ(summary["benchmarks"][0]["reviewed"], 1);
}

TEST_F(ServerTest, PreviewDoesNotPersist) {
  const RunRecord& r = record_with(EvidenceLabel::EvidencePass);
  Json draft = kept_draft(r);
  draft["decision"] = "scorer_checklist_mismatch";
  draft["after_label"] = "evidence_fail";
  auto res = client_->Post("/api/cells/preview", draft.dump(), "application/json");
  ASSERT_EQ(res->status, 200);
  Json body = Json::parse(res->body);
  auto find_cell = [&](const Json& cells) {
    for (const auto& c : cells["cells"]) {
      if (c["model_id"] == r.cell.model_id) return c;
    }
    return Json();
  };
  Json before = find_cell(body["before"]);
  Json after = find_cell(body["after"]);
  EXPECT_EQ(after["P"].get<int>(), before["P"].get<int>() - 1);
  EXPECT_EQ(after["F"].get<int>(), before["F"].get<int>() + 1);
  EXPECT_FALSE(std::filesystem::exists(config_.ledger_path));
  EXPECT_EQ(Json::parse(client_->Get("/api/cells")->body), body["before"]);
}

TEST_F(ServerTest, ConcurrentAppendsKeepTheChain) {
  std::vector<std::thread> workers;
  std::atomic<int> created{0};
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", port_);
      c.set_bearer_token_auth("s3cret");
      for (int i = 0; i < 5; ++i) {
        const RunRecord& r = scored_[static_cast<std::size_t>(t * 5 + i)];
        auto res = c.Post("/api/ledger", kept_draft(r, "reviewer-" + std::to_string(t)).dump(), "application/json");
        if (res && res->status == 201) ++created;
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(created.load(), 40);
  auto entries = parse_ledger(slurp(config_.ledger_path));
  EXPECT_EQ(entries.size(), 40u);
}

}  // namespace
}  // namespace evaudit
