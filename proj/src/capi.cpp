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


#include "evaudit/evaudit.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "evaudit/pipeline.hpp"
#include "evaudit/server.hpp"

struct evaudit_session {
  evaudit::RunConfig config;
  std::string error;
  std::string error_name;
  std::string output;
  std::string warnings;
  std::string config_text;
};

namespace {

using evaudit::ErrorCode;

evaudit_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return EVAUDIT_E_CONFIG;
    case ErrorCode::InvalidRecord:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateId:
    case ErrorCode::DanglingBundle:
    case ErrorCode::BenchmarkMismatch:
    case ErrorCode::InvalidManifest:
    case ErrorCode::MalformedArtifact: return EVAUDIT_E_INPUT;
    case ErrorCode::SyntaxError:
    case ErrorCode::UndeclaredRole:
    case ErrorCode::HierarchyViolation:
    case ErrorCode::InvalidChecklist:
    case ErrorCode::ChecklistInconsistent: return EVAUDIT_E_CHECKLIST;
    case ErrorCode::InsufficientReviewers:
    case ErrorCode::LockConflict:
    case ErrorCode::LockInvalid: return EVAUDIT_E_LOCK;
    case ErrorCode::InvalidEntry:
    case ErrorCode::UnknownRecord:
    case ErrorCode::ConflictingEntries:
    case ErrorCode::LedgerChainBroken: return EVAUDIT_E_LEDGER;
    case ErrorCode::MissingLabel:
    case ErrorCode::NoDecidableRecords:
    case ErrorCode::EmptyCell: return EVAUDIT_E_AGGREGATE;
    case ErrorCode::Io: return EVAUDIT_E_IO;
  }
  return EVAUDIT_E_INTERNAL;
}

void reset(evaudit_session* s) {
  s->error.clear();
  s->error_name.clear();
  s->output.clear();
  s->warnings.clear();
}

// Runs `f` and converts exceptions to a status recorded on the session.
template <typename F>
evaudit_status guarded(evaudit_session* s, F&& f) {
  if (s == nullptr) return EVAUDIT_E_ARGUMENT;
  reset(s);
  try {
    return f();
  } catch (const evaudit::Error& e) {
    s->error = e.what();
    s->error_name = std::string(evaudit::error_code_name(e.code()));
    return status_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    s->error = e.what();
    s->error_name = "ParseError";
    return EVAUDIT_E_INPUT;
  } catch (const std::filesystem::filesystem_error& e) {
    s->error = e.what();
    s->error_name = "Io";
    return EVAUDIT_E_IO;
  } catch (const std::exception& e) {
    s->error = e.what();
    s->error_name = "Internal";
    return EVAUDIT_E_INTERNAL;
  }
}

evaudit_status finish(evaudit_session* s, const evaudit::StageResult& r) {
  s->output = r.output;
  for (const auto& w : r.warnings) s->warnings += w + "\n";
  if (r.exit_code != 0) {
    s->error = "stage reported problems";
    s->error_name = "Failed";
    return EVAUDIT_E_FAILED;
  }
  return EVAUDIT_OK;
}

std::optional<evaudit::Format> format_of(evaudit_format f) {
  switch (f) {
    case EVAUDIT_FORMAT_TEXT: return evaudit::Format::Text;
    case EVAUDIT_FORMAT_CSV: return evaudit::Format::Csv;
    case EVAUDIT_FORMAT_JSON: return evaudit::Format::Json;
  }
  return std::nullopt;
}

evaudit_status bad_argument(evaudit_session* s, const char* what) {
  s->error = what;
  s->error_name = "Argument";
  return EVAUDIT_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* evaudit_version(void) { return "1.0.0"; }

const char* evaudit_status_name(evaudit_status status) {
  switch (status) {
    case EVAUDIT_OK: return "ok";
    case EVAUDIT_E_ARGUMENT: return "argument";
    case EVAUDIT_E_CONFIG: return "config";
    case EVAUDIT_E_INPUT: return "input";
    case EVAUDIT_E_CHECKLIST: return "checklist";
    case EVAUDIT_E_LOCK: return "lock";
    case EVAUDIT_E_LEDGER: return "ledger";
    case EVAUDIT_E_AGGREGATE: return "aggregate";
    case EVAUDIT_E_IO: return "io";
    case EVAUDIT_E_FAILED: return "failed";
    case EVAUDIT_E_INTERNAL: return "internal";
  }
  return "unknown";
}

evaudit_status evaudit_session_open(const char* config_json, const char* base_dir, evaudit_session** out) {
  if (config_json == nullptr || out == nullptr) return EVAUDIT_E_ARGUMENT;
  *out = nullptr;
  auto session = std::make_unique<evaudit_session>();
  evaudit_status st = guarded(session.get(), [&] {
    std::filesystem::path base = base_dir ? std::filesystem::path(base_dir) : std::filesystem::current_path();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw evaudit::Error(ErrorCode::InvalidConfig, "config", std::string("config does not parse: ") + e.what());
    }
    session->config = evaudit::config_from_json(doc, base);
    return EVAUDIT_OK;
  });
  // On failure the session is still returned so the caller can read the
  // error; it must be closed either way.
  *out = session.release();
  return st;
}

void evaudit_session_close(evaudit_session* session) { delete session; }

const char* evaudit_last_error(const evaudit_session* s) { return s ? s->error.c_str() : ""; }
const char* evaudit_last_error_name(const evaudit_session* s) { return s ? s->error_name.c_str() : ""; }
const char* evaudit_last_output(const evaudit_session* s) { return s ? s->output.c_str() : ""; }
const char* evaudit_last_warnings(const evaudit_session* s) { return s ? s->warnings.c_str() : ""; }

const char* evaudit_session_config(evaudit_session* s) {
  if (s == nullptr) return "";
  s->config_text = evaudit::config_to_json(s->config).dump();
  return s->config_text.c_str();
}

evaudit_status evaudit_ingest(evaudit_session* s) {
  return guarded(s, [&] { return finish(s, evaudit::run_ingest(s->config)); });
}

evaudit_status evaudit_validate(evaudit_session* s) {
  return guarded(s, [&] { return finish(s, evaudit::run_validate(s->config)); });
}

evaudit_status evaudit_lock(evaudit_session* s, const char* case_ref, const char* const* reviewers,
                            size_t reviewer_count, const char* locked_at) {
  return guarded(s, [&] {
    if (reviewer_count > 0 && reviewers == nullptr) return bad_argument(s, "reviewers is null");
    std::vector<std::string> ids;
    for (size_t i = 0; i < reviewer_count; ++i) {
      if (reviewers[i] == nullptr) return bad_argument(s, "reviewer id is null");
      ids.emplace_back(reviewers[i]);
    }
    return finish(s, evaudit::run_lock(s->config, case_ref ? case_ref : "", ids, locked_at ? locked_at : ""));
  });
}

evaudit_status evaudit_score(evaudit_session* s) {
  return guarded(s, [&] { return finish(s, evaudit::run_score(s->config)); });
}

evaudit_status evaudit_adjudicate_apply(evaudit_session* s) {
  return guarded(s, [&] { return finish(s, evaudit::run_adjudicate_apply(s->config)); });
}

evaudit_status evaudit_adjudicate_append(evaudit_session* s, const char* entry_json) {
  return guarded(s, [&] {
    if (entry_json == nullptr) return bad_argument(s, "entry_json is null");
    nlohmann::json draft;
    try {
      draft = nlohmann::json::parse(entry_json);
    } catch (const nlohmann::json::exception& e) {
      throw evaudit::Error(ErrorCode::InvalidEntry, "entry", std::string("entry does not parse: ") + e.what());
    }
    return finish(s, evaudit::run_adjudicate_append(s->config, draft));
  });
}

evaudit_status evaudit_report(evaudit_session* s, evaudit_format format) {
  return guarded(s, [&] {
    auto f = format_of(format);
    if (!f) return bad_argument(s, "unknown format");
    return finish(s, evaudit::run_report(s->config, *f));
  });
}

evaudit_status evaudit_rank(evaudit_session* s, evaudit_format format) {
  return guarded(s, [&] {
    auto f = format_of(format);
    if (!f) return bad_argument(s, "unknown format");
    return finish(s, evaudit::run_rank(s->config, *f));
  });
}

evaudit_status evaudit_serve(evaudit_session* s, const char* host, int port, const char* token) {
  return guarded(s, [&] {
    evaudit::ApiServer server(s->config, token ? token : "");
    std::string h = host ? host : "127.0.0.1";
    if (server.bind(h, port) < 0) {
      throw evaudit::Error(ErrorCode::Io, h, "cannot bind " + h + ":" + std::to_string(port));
    }
    server.listen();
    return EVAUDIT_OK;
  });
}

evaudit_status evaudit_parse_predicate(evaudit_session* s, const char* text, char** out, size_t* error_offset) {
  return guarded(s, [&] {
    if (text == nullptr || out == nullptr) return bad_argument(s, "text and out are required");
    *out = nullptr;
    try {
      std::string canonical = evaudit::to_string(evaudit::parse_predicate(text));
      *out = static_cast<char*>(std::malloc(canonical.size() + 1));
      if (*out == nullptr) throw std::bad_alloc();
      std::memcpy(*out, canonical.c_str(), canonical.size() + 1);
    } catch (const evaudit::PositionedError& e) {
      if (error_offset) *error_offset = e.position();
      throw;
    }
    return EVAUDIT_OK;
  });
}

void evaudit_string_free(char* text) { std::free(text); }

}  // extern "C"
