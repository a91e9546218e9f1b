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

#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bosonbench {

/// Names accepted by run().
const std::vector<std::string>& experiment_names();

/// A named experiment plus a flat key-value parameter map (config file
/// entries with command-line overrides already applied; overrides win).
/// Unknown keys are rejected by run() with a schema error listing them.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;

  /// Parses a flat "key = value" file (# comments, blank lines ignored).
  static std::map<std::string, std::string> parse_config_file(const std::string& path);

  /// Rebuilds the config from a record's config-echo line, for exact reruns.
  static ExperimentConfig from_echo(const nlohmann::json& echo);
};

/// Self-contained result of one experiment run. Serialized as JSON lines:
/// the config echo first, one object per trial, the summary object last.
/// Infinite report values are serialized as the string "inf".
struct ExperimentRecord {
  nlohmann::json config_echo;           // {"type":"config", ...}
  std::vector<nlohmann::json> trials;   // {"type":"trial","trial":i, ...}
  nlohmann::json summary;               // {"type":"summary", ...}
  bool incomplete = false;

  std::string to_jsonl() const;
  /// Trials as a CSV table (scalar fields only), summary in a trailing
  /// comment line. The distribution and gaussian-sim experiments emit their
  /// interface-specific CSV instead.
  std::string to_csv() const;

  /// Structural schema check; throws std::runtime_error on violation.
  void validate() const;

  /// Writes via temp file + rename so partial files never appear.
  void write_atomic(const std::string& path, const std::string& format) const;
};

/// Dispatches to the named experiment. Throws std::invalid_argument on
/// config errors (message lists offending keys or the valid experiment set).
ExperimentRecord run(const ExperimentConfig& config);

/// JSON helper shared with the CLI: finite numbers pass through, +-infinity
/// becomes the strings "inf"/"-inf".
nlohmann::json json_real(double value);

}  // namespace bosonbench
