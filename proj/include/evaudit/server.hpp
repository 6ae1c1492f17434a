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

// Serve mode: the HTTP API used by the adjudication front end. Reads the
// persisted stage outputs on every request; ledger appends go through one
// LedgerStore, which serializes writers.
//
//   GET  /api/queue                       review queue
//   GET  /api/records/{record_id}         record, assignment, atom outcomes, native outcome
//   GET  /api/artifacts/{bundle_id}/{role} raw bytes; X-Media-Kind header
//   POST /api/ledger                      draft entry -> 201 receipt | 200 duplicate | 422 field errors
//   GET  /api/summary                     review summary per benchmark
//   GET  /api/cells                       cells after the current ledger
//   POST /api/cells/preview               cells before/after a draft entry; never persists

#include <memory>
#include <string>

#include "evaudit/pipeline.hpp"

namespace evaudit {

class ApiServer {
 public:
  /// An empty `bearer_token` disables authentication.
  ApiServer(RunConfig config, std::string bearer_token = {});
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);

  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evaudit
