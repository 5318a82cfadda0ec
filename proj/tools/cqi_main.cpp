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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cqi/harness.hpp"
#include "cqi/matrix.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitTimeoutPartial = 3;

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw cqi::harness::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  long long samples = 0;
  bool seed_set = false;
  bool samples_set = false;
  bool out_set = false;
  bool format_set = false;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", opts.seed, "override config seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--samples", opts.samples, "override config sample count")
      ->each([&](const std::string&) { opts.samples_set = true; });
  cmd->add_option("--out", opts.out, "output path (default: config, else stdout)")
      ->each([&](const std::string&) { opts.out_set = true; });
  cmd->add_option("--format", opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->each([&](const std::string&) { opts.format_set = true; });
}

cqi::harness::ExperimentConfig load_config(const std::string& task,
                                           const CommonOpts& opts) {
  cqi::harness::ExperimentConfig cfg =
      cqi::harness::ExperimentConfig::from_json_text(read_file(opts.config_path));
  if (cfg.task.empty()) cfg.task = task;
  if (cfg.task != task)
    throw cqi::harness::ConfigError("config task '" + cfg.task +
                                    "' does not match subcommand '" + task + "'");
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.samples_set) cfg.samples = opts.samples;
  if (opts.out_set) cfg.out = opts.out;
  if (opts.format_set) cfg.format = opts.format;
  cfg.validate();
  return cfg;
}

int run_subcommand(const std::string& task, const CommonOpts& opts) {
  const cqi::harness::ExperimentConfig cfg = load_config(task, opts);
  const std::vector<cqi::harness::ExperimentRecord> records =
      cqi::harness::run_task(cfg);
  cqi::harness::emit(records, cfg.format, cfg.out);
  return cqi::harness::any_timeout(records) ? kExitTimeoutPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for coherent quantum-inference protocols"};
  app.require_subcommand(1);

  const char* task_names[] = {"identity", "rp", "cloning", "qpa", "dme", "definetti"};
  const char* task_help[] = {
      "pure-state forwarding vs tomography baseline",
      "random-purification separation table",
      "symmetric cloner fidelities with brute-force checks",
      "purity-amplification bounds and covariant protocol",
      "density-matrix exponentiation scaling",
      "finite de Finetti gap decay",
  };
  CommonOpts task_opts[6];
  for (int i = 0; i < 6; ++i)
    attach_common(app.add_subcommand(task_names[i], task_help[i]), task_opts[i]);

  CommonOpts validate_opts;
  CLI::App* validate = app.add_subcommand("validate", "check a config and exit");
  validate->add_option("--config", validate_opts.config_path, "experiment config (JSON)")
      ->required();

  CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (selftest->parsed()) {
      const int failures = cqi::harness::selftest(std::cout);
      if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return kExitNumerical;
      }
      std::cout << "all checks passed\n";
      return kExitOk;
    }
    if (validate->parsed()) {
      cqi::harness::ExperimentConfig cfg = cqi::harness::ExperimentConfig::from_json_text(
          read_file(validate_opts.config_path));
      cfg.validate();
      std::cout << "config ok: task=" << cfg.task << "\n";
      return kExitOk;
    }
    for (int i = 0; i < 6; ++i)
      if (app.get_subcommand(task_names[i])->parsed())
        return run_subcommand(task_names[i], task_opts[i]);
    std::cerr << "no subcommand selected\n";
    return kExitConfig;
  } catch (const cqi::harness::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const cqi::NumericalError& ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNumerical;
  }
}
