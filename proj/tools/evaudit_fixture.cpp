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


// Writes the synthetic study corpus used by the tests into a directory.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "study_fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic study corpus"};
  std::string out;
  bool pre_review = false;
  bool no_ledger = false;
  bool no_lock = false;
  std::vector<std::string> benchmarks;
  app.add_option("dir", out, "Target directory")->required();
  app.add_flag("--pre-review", pre_review, "Bundles carry pre-correction evidence; the ledger holds the corrections");
  app.add_flag("--no-ledger", no_ledger, "Skip ledger.jsonl");
  app.add_flag("--no-lock", no_lock, "Write drafts only");
  app.add_option("--benchmark", benchmarks, "Restrict to these benchmarks");
  CLI11_PARSE(app, argc, argv);

  evaudit::fixture::Options options;
  options.pre_review = pre_review;
  options.with_ledger = !no_ledger;
  options.lock = !no_lock;
  options.benchmarks.insert(benchmarks.begin(), benchmarks.end());
  try {
    std::cout << evaudit::fixture::write_study(out, options).string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "evaudit-fixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
