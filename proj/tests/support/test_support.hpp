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

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "evaudit/checklist.hpp"
#include "evaudit/hash.hpp"
#include "evaudit/ingest.hpp"

namespace evaudit::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "evaudit-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline CaseChecklist make_checklist(const std::string& benchmark, const std::string& case_id, const std::string& pass,
                                    const std::string& fail, const std::vector<std::pair<std::string, ReasonCode>>& roles) {
  Json doc{{"case_id", case_id},
           {"benchmark_id", benchmark},
           {"claim_text", "the final state shows the task done"},
           {"claim_source", "evaluator_semantics"},
           {"pass_when", pass},
           {"fail_when", fail},
           {"required_roles", Json::array()}};
  for (const auto& [role, code] : roles) {
    doc["required_roles"].push_back(Json{{"role", role}, {"reason_code", std::string(to_token(code))}});
  }
  return checklist_from_json(doc).checklist;
}

inline LockedChecklist lock_two(const CaseChecklist& c) {
  return lock_checklist(c, {"reviewer-a", "reviewer-b"}, "2026-03-01T12:00:00Z");
}

inline ArtifactFile json_file(const std::string& role, const Json& j) {
  return ArtifactFile{role, MediaKind::Structured, role + ".json", j.dump()};
}

inline ArtifactFile text_file(const std::string& role, const std::string& body) {
  return ArtifactFile{role, MediaKind::Text, role + ".txt", body};
}

inline NativeOutcome native(bool success) {
  NativeOutcome n;
  n.label = success ? NativeLabel::Success : NativeLabel::Failure;
  return n;
}

}  // namespace evaudit::test
