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

#pragma once

#include <map>
#include <string>
#include <vector>

#include "nmq/synthetic_lab.hpp"

namespace nmq {

/// Three-basis observables of one theta_full on a common n grid.
struct ObservableSeries {
  double theta_full = 0.0;
  std::vector<int> n;
  std::vector<double> x, y, z;
  /// Largest shot count among the records; 0 for exact data.
  int shots = 0;

  std::size_t size() const { return n.size(); }
  double purity(std::size_t k) const { return 0.5 * (1.0 + x[k] * x[k] + y[k] * y[k] + z[k] * z[k]); }
};

/// Angles are matched within this tolerance.
constexpr double kThetaTolerance = 1e-9;

/// Distinct theta_full values present, ascending.
std::vector<double> thetas_in(const std::vector<ExperimentRecord>& records);

/// Collects the records of `theta_full` into a series sorted by n.
/// Throws DataError if no records match, if some n lacks one of the three
/// bases, or if a (n, basis) pair appears twice.
ObservableSeries collect_series(const std::vector<ExperimentRecord>& records, double theta_full);

/// Records grouped by batch id, preserving record order within a batch.
std::map<std::string, std::vector<ExperimentRecord>> group_by_batch(const std::vector<ExperimentRecord>& records);

}  // namespace nmq
