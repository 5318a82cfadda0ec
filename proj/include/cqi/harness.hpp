// Copyright 2026 the cqi-lab authors
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

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cqi::harness {

// Raised for malformed or invalid experiment configurations; the CLI maps it
// to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One experiment sweep. Scalar fields apply to every grid point; `d` and `n`
// may be grids. `n` is the task's primary grid: copy counts for identity, rp,
// cloning, qpa, and dme (LMR steps), and the extendibility order for
// definetti. Serialization is JSON with a versioned `schema` field; unknown
// keys are rejected so typos cannot silently change an experiment.
struct ExperimentConfig {
  int schema = 1;
  std::string task;              // identity | rp | cloning | qpa | dme | definetti
  std::vector<int> d{2};         // local dimension(s)
  int r = 1;                     // input rank (rp)
  std::vector<int> n{1};         // primary grid
  int ell = 1;                   // m = n + ell for rp/cloning grids
  int k = 1;                     // target eigenindex (qpa)
  std::vector<double> p;         // spectrum, sorted descending (qpa)
  double t = 1.0;                // evolution time (dme)
  double eps = 0.01;             // accuracy parameter (qpa calculators, dme bound)
  long long samples = 10000;     // Monte-Carlo samples per grid point
  double min_effective = 0;      // ESS target for the qpa protocol (0 = single batch)
  std::uint64_t seed = 1;
  long long timeout_ms = 60000;  // per-grid-point wall-clock budget
  std::string out;               // output path ("" = stdout)
  std::string format = "csv";    // csv | json

  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  // Task-specific structural checks (grid limits, spectrum shape, ...).
  void validate() const;
};

// One measurement: a metric at a grid point (or a fit summary), with the
// matching closed-form value when one exists. `stderr_` < 0 means the value
// is not a Monte-Carlo estimate. `valid` is "ok" or a semicolon-joined list
// of explanatory flags (e.g. "timeout", "asymptotic-formula-gap").
struct ExperimentRecord {
  std::string task;
  std::vector<std::pair<std::string, std::string>> params;  // flattened key/value
  std::string metric;
  double value = 0;
  double stderr_ = -1;
  double formula = 0;
  bool has_formula = false;
  std::string valid = "ok";
  std::uint64_t seed = 0;
  long long ms = 0;

  bool operator==(const ExperimentRecord&) const = default;
};

// Shortest stable decimal form used for every numeric cell (printf %.12g).
std::string format_double(double v);

// CSV columns: task, one param.<key> column per flattened parameter key
// (union over records, sorted), then metric,value,stderr,formula,valid,seed,ms.
std::string emit_csv(const std::vector<ExperimentRecord>& records);
std::string emit_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_json_records(const std::string& text);

// Serializes and writes; throws ConfigError on empty records (no file is
// created) and std::runtime_error on I/O failure.
void emit(const std::vector<ExperimentRecord>& records, const std::string& format,
          const std::string& path);

std::vector<ExperimentRecord> run_identity(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_rp(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_cloning(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_qpa(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_dme(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_definetti(const ExperimentConfig& cfg);

// Validates and dispatches on cfg.task.
std::vector<ExperimentRecord> run_task(const ExperimentConfig& cfg);

bool any_timeout(const std::vector<ExperimentRecord>& records);

// Worker-pool width: hardware concurrency, capped by the CQI_THREADS
// environment variable when set.
int thread_cap();

// Fast end-to-end invariant sweep; prints one line per check and returns the
// number of failures.
int selftest(std::ostream& log);

}  // namespace cqi::harness
