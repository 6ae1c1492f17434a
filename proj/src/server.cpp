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

#include <httplib.h>

#include "evaudit/hash.hpp"

namespace evaudit {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const std::string& field = {}) {
  Json err{{"code", code}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  send_json(res, status, Json{{"errors", Json::array({err})}});
}

std::string_view content_type(MediaKind kind) {
  switch (kind) {
    case MediaKind::Structured: return "application/json";
    case MediaKind::Text: return "text/plain; charset=utf-8";
    case MediaKind::Binary: return "application/octet-stream";
  }
  return "application/octet-stream";
}

}  // namespace

struct ApiServer::Impl {
  RunConfig config;
  std::string token;
  LedgerStore ledger;
  httplib::Server http;

  Impl(RunConfig c, std::string t) : config(std::move(c)), token(std::move(t)), ledger(config.ledger_path) {}

  std::vector<RunRecord> corrected(const std::vector<RunRecord>& scored, const std::vector<LedgerEntry>& entries) {
    return apply_corrections(scored, entries);
  }

  // Translates core errors into HTTP statuses.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        int status = 500;
        switch (e.code()) {
          case ErrorCode::InvalidEntry:
          case ErrorCode::UnknownRecord:
          case ErrorCode::ConflictingEntries: status = 422; break;
          case ErrorCode::DanglingBundle: status = 404; break;
          default: break;
        }
        send_error(res, status, std::string(error_code_name(e.code())), e.what(), e.subject());
      } catch (const Json::exception& e) {
        send_error(res, 400, "ParseError", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    };
  }

  static Json cells_payload(const CellTable& cells) { return cells_to_json(cells); }

  LedgerEntry draft_from(const httplib::Request& req) {
    LedgerEntry draft = entry_from_json(Json::parse(req.body), true);
    draft.entry_id = 0;
    draft.timestamp.clear();
    return draft;
  }

  void routes() {
    if (!token.empty()) {
      http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("Authorization") == "Bearer " + token) return httplib::Server::HandlerResponse::Unhandled;
        send_error(res, 401, "Unauthorized", "missing or wrong bearer token");
        return httplib::Server::HandlerResponse::Handled;
      });
    }

    http.Get("/api/queue", guarded([this](const httplib::Request&, httplib::Response& res) {
      auto path = output_path(config, "queue.json");
      Json queue = std::filesystem::exists(path) ? Json::parse(read_file(path)) : queue_to_json({});
      send_json(res, 200, queue);
    }));

    http.Get("/api/records/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string& id = req.path_params.at("id");
      auto records = corrected(load_scored_records(config), ledger.entries());
      for (const auto& r : records) {
        if (r.record_id != id) continue;
        Json body{{"record", record_to_json(r)},
                  {"assignment", r.evidence ? assignment_to_json(*r.evidence) : Json(nullptr)},
                  {"atom_outcomes", r.evidence ? assignment_to_json(*r.evidence).at("atom_outcomes") : Json::array()},
                  {"native", record_to_json(r).at("native")}};
        Json probes = Json::array();
        for (const auto& c : probe_native_consistency(r)) probes.push_back(candidate_to_json(c));
        body["probe_findings"] = std::move(probes);
        send_json(res, 200, body);
        return;
      }
      send_error(res, 404, "UnknownRecord", "no scored record '" + id + "'", "record_id");
    }));

    http.Get("/api/artifacts/:bundle/:role", guarded([this](const httplib::Request& req, httplib::Response& res) {
      ArtifactBundle bundle = load_bundle(config.store_root, req.path_params.at("bundle"));
      const ArtifactEntry* entry = bundle.find(req.path_params.at("role"));
      if (entry == nullptr) {
        send_error(res, 404, "MissingArtifact", "bundle has no role '" + req.path_params.at("role") + "'", "role");
        return;
      }
      EvidenceView view = EvidenceView::from_bundle(ArtifactBundle{bundle.bundle_id, {*entry}}, config.store_root);
      const LoadedArtifact* artifact = view.find(entry->role);
      if (artifact == nullptr) {
        send_error(res, 409, "BundleFinding", view.findings().empty() ? "artifact unavailable" : view.findings().front(),
                   "role");
        return;
      }
      res.status = 200;
      res.set_header("X-Media-Kind", std::string(to_token(entry->media_kind)));
      res.set_content(artifact->bytes, std::string(content_type(entry->media_kind)));
    }));

    http.Post("/api/ledger", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::set<std::string> known;
      for (const auto& r : load_scored_records(config)) known.insert(r.record_id);
      AppendReceipt receipt = ledger.append(draft_from(req), known);
      send_json(res, receipt.duplicate ? 200 : 201,
                Json{{"entry_id", receipt.entry_id}, {"hash", receipt.hash}, {"duplicate", receipt.duplicate}});
    }));

    http.Get("/api/summary", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, summary_to_json(ledger_summary(ledger.entries(), load_scored_records(config))));
    }));

    http.Get("/api/cells", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, cells_payload(compute_cells(corrected(load_scored_records(config), ledger.entries()))));
    }));

    http.Post("/api/cells/preview", guarded([this](const httplib::Request& req, httplib::Response& res) {
      LedgerEntry draft = draft_from(req);
      validate_entry(draft);
      auto scored = load_scored_records(config);
      if (std::none_of(scored.begin(), scored.end(), [&](const RunRecord& r) { return r.record_id == draft.record_id; })) {
        throw Error(ErrorCode::UnknownRecord, draft.record_id, "no scored record '" + draft.record_id + "'");
      }
      auto entries = ledger.entries();
      Json before = cells_payload(compute_cells(corrected(scored, entries)));
      draft.entry_id = entries.size() + 1;
      draft.timestamp = utc_timestamp_now();
      entries.push_back(draft);
      Json after = cells_payload(compute_cells(corrected(scored, entries)));
      send_json(res, 200, Json{{"before", std::move(before)}, {"after", std::move(after)}});
    }));
  }
};

ApiServer::ApiServer(RunConfig config, std::string bearer_token)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(bearer_token))) {
  impl_->routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->http.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace evaudit
