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

// Synthetic study corpus: five benchmarks, the per-cell label mix of the
// reported study, artifact bundles that make the locked checklists produce
// those labels, sampling manifests and a review ledger.
//
// With `pre_review` set, records that the review corrected carry the
// artifacts behind their pre-correction label, and the ledger holds the
// corrections; `score` then yields the flagged counts and `adjudicate apply`
// the reported ones. Without it the bundles already yield the reported labels
// and the ledger holds only the label-preserving decisions.

#include <filesystem>
#include <set>
#include <string>

namespace evaudit::fixture {

inline constexpr const char* kAndroidWorld = "androidworld";
inline constexpr const char* kTau3 = "tau3_retail";
inline constexpr const char* kAppWorld = "appworld";
inline constexpr const char* kAgentDojo = "agentdojo";
inline constexpr const char* kMiniWob = "miniwob";

inline constexpr const char* kGpt = "gpt-5.4";
inline constexpr const char* kClaude = "claude-4.7";
inline constexpr const char* kDeepSeek = "deepseek-v4-pro";

struct Options {
  bool pre_review = false;
  bool with_ledger = true;
  bool lock = true;
  std::set<std::string> benchmarks;  // empty: all five
};

/// "<benchmark>:<case_id>:<model>"
std::string record_id(const std::string& benchmark, const std::string& case_id, const std::string& model);

/// Writes config.json, records.jsonl, bundles/, checklists/, locks/,
/// manifests/ and (optionally) ledger.jsonl under `root`. Returns the path of
/// config.json.
std::filesystem::path write_study(const std::filesystem::path& root, const Options& options);

}  // namespace evaudit::fixture
