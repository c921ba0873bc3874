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

// Damped purity oscillation fit
//
//   p(n) = (1 + cos^2(2 pi f_p t) exp(-gamma_p t) + (1 - exp(-gamma_r t))^2) / 2,
//   t = n T,
//
// with T the pseudoidentity duration in gate units. The last term is the
// longitudinal recovery of |+> under amplitude damping; without it a
// Markovian purity dip and recovery would be read as an oscillation.

#pragma once

#include <vector>

#include "nmq/records.hpp"

namespace nmq {

struct PurityFit {
  /// Per gate unit, folded into [0, 1 / (4 T dn)] where dn is the n spacing.
  double f_p = 0.0;
  double gamma_p = 0.0;
  /// Longitudinal recovery rate.
  double gamma_r = 0.0;
  /// RMS of the purity residuals.
  double residual = 0.0;
  /// Infinite when the frequency is not identifiable (f_p at 0).
  double sigma_f_p = 0.0;
  double sigma_gamma_p = 0.0;
  /// Significance of f_p > 0: the likelihood-ratio statistic
  /// sqrt((SS_0 - SS) / s^2) against the best fit with f_p = 0, converted to a
  /// one-sided p-value, multiplied by N/2 (independent frequencies scanned)
  /// and mapped back to a normal z.
  double z_score = 0.0;
  /// The likelihood-ratio statistic before the trials correction.
  double local_z = 0.0;
  /// f_p / sigma_f_p; 0 when sigma is infinite.
  double wald_z = 0.0;
};

double purity_model(double f_p, double gamma_p, double gamma_r, double n, double period);

/// Throws DataError for fewer than 4 points.
PurityFit fit_purity(const ObservableSeries& series, double period);

/// Convenience overload: series of `theta_full` from `records`, T = 2m.
PurityFit fit_purity(const std::vector<ExperimentRecord>& records, double theta_full, int m = 4);

}  // namespace nmq
