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

#include "nmq/records.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "nmq/errors.hpp"

namespace nmq {

std::vector<double> thetas_in(const std::vector<ExperimentRecord>& records) {
  std::vector<double> out;
  for (const auto& r : records) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](double t) { return std::abs(t - r.theta_full) <= kThetaTolerance; });
    if (!seen) out.push_back(r.theta_full);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ObservableSeries collect_series(const std::vector<ExperimentRecord>& records, double theta_full) {
  std::map<int, std::array<std::optional<double>, 3>> table;
  ObservableSeries series;
  series.theta_full = theta_full;
  for (const auto& r : records) {
    if (std::abs(r.theta_full - theta_full) > kThetaTolerance) continue;
    auto& slot = table[r.n][static_cast<std::size_t>(r.basis)];
    if (slot) {
      throw DataError("duplicate record for n = " + std::to_string(r.n) + ", basis " + basis_letter(r.basis));
    }
    slot = r.expval;
    series.shots = std::max(series.shots, r.shots);
  }
  if (table.empty()) throw DataError("no records for theta_full = " + std::to_string(theta_full));
  for (const auto& [n, values] : table) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (!values[b]) {
        throw DataError("missing basis " + std::string(1, "XYZ"[b]) + " at n = " + std::to_string(n));
      }
    }
    series.n.push_back(n);
    series.x.push_back(*values[0]);
    series.y.push_back(*values[1]);
    series.z.push_back(*values[2]);
  }
  return series;
}

std::map<std::string, std::vector<ExperimentRecord>> group_by_batch(const std::vector<ExperimentRecord>& records) {
  std::map<std::string, std::vector<ExperimentRecord>> out;
  for (const auto& r : records) out[r.batch_id].push_back(r);
  return out;
}

}  // namespace nmq
