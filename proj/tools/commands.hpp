// Copyright 2026 The nmq Authors
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

// Subcommands of the nmq executable. Kept in a library so that tests can run
// them in-process.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nmq/serialize.hpp"

namespace nmq::cli {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kConfigError = 2,
  kIncompatible = 3,
  kNotConverged = 4,
};

struct SimulateOptions {
  std::string model;
  std::string params_path;
  std::string schedule_path;
  std::optional<int> shots;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct FitOptions {
  std::string data_path;
  std::string model;
  std::string out;
  std::optional<double> theta;
  std::vector<std::string> constrain{"gamma_ad", "gamma_d"};
  std::vector<std::string> freeze;
  bool fit_kappa = false;
  bool tie_b = false;
  int starts = 16;
  std::uint64_t seed = 0;
  int m = 4;
  double gate_duration_ns = 71.1;
  bool cross_term = true;
  unsigned threads = 0;
};

struct AnalyzeOptions {
  std::string data_path;
  std::vector<std::string> fit_paths;
  std::string out_dir;
  int m = 4;
  std::size_t density_points = 401;
  unsigned threads = 0;
};

struct MapOptions {
  std::string params_path;
  std::string out;
};

struct OracleOptions {
  int draws = 10;
  std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& log);
int cmd_fit(const FitOptions& options, std::ostream& log);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& log);
int cmd_map_models(const MapOptions& options, std::ostream& out);
int cmd_oracle(const OracleOptions& options, std::ostream& out);

/// Parameter values in gate units together with physical conversions for a
/// gate of `gate_duration_ns`.
Json convert_units(const NoiseParams& params, double gate_duration_ns);

/// Parses `args` (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nmq::cli
