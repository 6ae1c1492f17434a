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


// Command-line front end. Everything goes through the C interface.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evaudit/evaudit.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::string slurp(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

int report_status(evaudit_session* s, evaudit_status st) {
  std::cout << evaudit_last_output(s);
  std::cerr << evaudit_last_warnings(s);
  if (st != EVAUDIT_OK) {
    std::cerr << "evaudit: " << evaudit_last_error_name(s) << ": " << evaudit_last_error(s) << "\n";
  }
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence audit of completed agent-benchmark runs"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string store_root;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::string sample_rate;
  std::string format = "text";
  std::string benchmark;
  std::vector<std::string> exclude;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "Configuration file (JSON)")->check(CLI::ExistingFile);
  app.add_option("--store-root", store_root, "Artifact store root; overrides EVIDENCE_STORE_ROOT and the file");
  app.add_option("--output-dir", output_dir, "Stage output directory");
  app.add_option("--seed", seed, "Seed for sampled review checks");
  app.add_option("--sample-rate", sample_rate, "Sampled-check rate in [0,1], e.g. 1/20");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--benchmark", benchmark, "Restrict to one benchmark");
  app.add_option("--exclude-from-leaderboard", exclude, "Benchmark left out of leaderboard tables");
  app.add_option("--threads", threads, "Worker threads for score (0: all cores)");

  auto* ingest = app.add_subcommand("ingest", "Load and partition records, check manifests");
  auto* validate = app.add_subcommand("validate", "Check manifests, bundles, locks and the ledger chain");

  auto* lock = app.add_subcommand("lock", "Lock reviewed checklist drafts");
  std::string case_ref;
  std::vector<std::string> reviewers;
  std::string locked_at;
  lock->add_option("--case", case_ref, "<benchmark>/<case key>; all drafts when omitted");
  lock->add_option("--reviewer", reviewers, "Reviewer id (at least two distinct)")->required();
  lock->add_option("--locked-at", locked_at, "Lock timestamp (default: now)");

  auto* score = app.add_subcommand("score", "Evaluate locked checklists and aggregate cells");

  auto* adjudicate = app.add_subcommand("adjudicate", "Review ledger operations");
  adjudicate->require_subcommand(1);
  auto* apply = adjudicate->add_subcommand("apply", "Apply the ledger to scored records");
  auto* append = adjudicate->add_subcommand("append", "Append one ledger entry");
  std::string entry_path;
  append->add_option("--entry", entry_path, "Entry JSON file, or - for stdin")->required();

  auto* report = app.add_subcommand("report", "Write report tables");
  auto* rank = app.add_subcommand("rank", "Print the leaderboard-resolution table");

  auto* serve = app.add_subcommand("serve", "Serve the adjudication HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--token", token, "Static bearer token required on every request");

  CLI11_PARSE(app, argc, argv);

  Json config = Json::object();
  fs::path base = fs::current_path();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      config = Json::parse(slurp(in));
      base = fs::absolute(config_path).parent_path();
    }
  } catch (const Json::exception& e) {
    std::cerr << "evaudit: config " << config_path << " does not parse: " << e.what() << "\n";
    return static_cast<int>(EVAUDIT_E_CONFIG);
  }
  if (!config.is_object()) {
    std::cerr << "evaudit: config must be a JSON object\n";
    return static_cast<int>(EVAUDIT_E_CONFIG);
  }
  if (const char* env = std::getenv("EVIDENCE_STORE_ROOT"); env && *env) config["store_root"] = fs::absolute(env).string();
  if (!store_root.empty()) config["store_root"] = fs::absolute(store_root).string();
  if (!output_dir.empty()) config["output_dir"] = fs::absolute(output_dir).string();
  if (seed) config["seed"] = *seed;
  if (!sample_rate.empty()) config["sample_rate"] = sample_rate;
  if (!benchmark.empty()) config["benchmark"] = benchmark;
  if (threads) config["threads"] = *threads;
  if (!exclude.empty()) {
    Json& list = config["excluded_benchmarks_from_leaderboard"];
    if (!list.is_array()) list = Json::array();
    for (const auto& b : exclude) list.push_back(b);
  }

  evaudit_session* s = nullptr;
  std::string base_text = base.string();
  evaudit_status st = evaudit_session_open(config.dump().c_str(), base_text.c_str(), &s);
  if (st != EVAUDIT_OK) {
    int code = report_status(s, st);
    evaudit_session_close(s);
    return code;
  }

  evaudit_format fmt = format == "csv" ? EVAUDIT_FORMAT_CSV : format == "json" ? EVAUDIT_FORMAT_JSON : EVAUDIT_FORMAT_TEXT;
  if (*ingest) {
    st = evaudit_ingest(s);
  } else if (*validate) {
    st = evaudit_validate(s);
  } else if (*lock) {
    std::vector<const char*> ids;
    for (const auto& r : reviewers) ids.push_back(r.c_str());
    st = evaudit_lock(s, case_ref.empty() ? nullptr : case_ref.c_str(), ids.data(), ids.size(),
                      locked_at.empty() ? nullptr : locked_at.c_str());
  } else if (*score) {
    st = evaudit_score(s);
  } else if (*apply) {
    st = evaudit_adjudicate_apply(s);
  } else if (*append) {
    std::string text;
    if (entry_path == "-") {
      text = slurp(std::cin);
    } else {
      std::ifstream in(entry_path, std::ios::binary);
      if (!in) {
        std::cerr << "evaudit: cannot read " << entry_path << "\n";
        evaudit_session_close(s);
        return static_cast<int>(EVAUDIT_E_IO);
      }
      text = slurp(in);
    }
    st = evaudit_adjudicate_append(s, text.c_str());
  } else if (*report) {
    st = evaudit_report(s, fmt);
  } else if (*rank) {
    st = evaudit_rank(s, fmt);
  } else if (*serve) {
    std::cerr << "serving on " << host << ":" << port << "\n";
    st = evaudit_serve(s, host.c_str(), port, token.c_str());
  }
  int code = report_status(s, st);
  evaudit_session_close(s);
  return code;
}
