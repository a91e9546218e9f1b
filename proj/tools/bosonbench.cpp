// Copyright 2026 The bosonbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bosonbench/experiments.hpp"
#include "bosonbench/version.hpp"

namespace {

struct Flag {
  std::string key;      // config key
  std::string cli;      // --flag spelling
  std::string help;
};

// One CLI flag per config key; values stay strings so the experiment layer
// owns parsing and validation.
const std::vector<Flag> kFlags = {
    {"seed", "--seed", "Random seed (default 12345)"},
    {"modes", "--modes", "Number of modes m"},
    {"photons", "--photons", "Number of photons n"},
    {"trials", "--trials", "Monte Carlo trials"},
    {"samples", "--samples", "Samples per trial / total samples"},
    {"out", "--out", "Output path (default stdout)"},
    {"format", "--format", "Output format: json | csv"},
    {"radius", "--radius", "Bucket detector radius R"},
    {"alpha", "--alpha", "Type-I error budget"},
    {"epsilon", "--epsilon", "Flatness / threshold parameter"},
    {"threshold", "--threshold", "Exceedance threshold"},
    {"budget_seconds", "--budget-seconds", "Abort cleanly after this many seconds"},
    {"restricted", "--restricted", "Collision-free subspace (true/false)"},
    {"space_size", "--space-size", "Label space size N"},
    {"k", "--k", "Number of sample sequences"},
    {"order", "--order", "Moment order (2 or 4)"},
    {"sigma", "--sigma", "Gaussian ensemble sigma"},
    {"loss", "--loss", "Loss channel transmissivity eta"},
    {"control", "--control", "Uniform-vs-uniform control run (true/false)"},
    {"variant", "--variant", "Bound variant"},
    {"unitary", "--unitary", "Path to a matrix JSON file"},
    {"circuit", "--circuit", "Path to a circuit JSON file"},
    {"source", "--source", "Sample source: uniform | boson"},
    {"a", "--a", "Lemma-scale parameter a"},
    {"lr_samples", "--lr-samples", "Likelihood-ratio certifier sample count"},
    {"amplitude_re", "--amplitude-re", "Coherent amplitude (real part)"},
    {"amplitude_im", "--amplitude-im", "Coherent amplitude (imaginary part)"},
    {"cap", "--cap", "Enumeration cap"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bosonbench: desk-scale linear-optics sampling experiments"};
  app.set_version_flag("--version", bosonbench::kVersion);

  std::string experiment;
  std::string valid;
  for (const auto& name : bosonbench::experiment_names())
    valid += (valid.empty() ? "" : ", ") + name;
  app.add_option("experiment", experiment, "One of: " + valid)->required();

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value config file (flags override it)");

  std::map<std::string, std::string> cli_values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& flag : kFlags)
    options[flag.key] = app.add_option(flag.cli, cli_values[flag.key], flag.help);

  CLI11_PARSE(app, argc, argv);

  try {
    bosonbench::ExperimentConfig config;
    config.experiment = experiment;
    if (!config_path.empty())
      config.params = bosonbench::ExperimentConfig::parse_config_file(config_path);
    for (const auto& flag : kFlags)
      if (options[flag.key]->count() > 0) config.params[flag.key] = cli_values[flag.key];

    const bosonbench::ExperimentRecord record = bosonbench::run(config);
    const std::string out = record.config_echo["params"].value("out", "");
    const std::string format = record.config_echo["params"].value("format", "json");
    if (out.empty()) std::cout << (format == "csv" ? record.to_csv() : record.to_jsonl());
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["type"] = "error";
    err["experiment"] = experiment;
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
