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

// Least-squares fits of the noise models to pseudoidentity data.
//
// The loss of one angle is sum_n sum_b (measured - predicted)^2 over the
// three bases. Joint fits over several angles (normally a driven angle and
// its idle reference) minimise the sum of the per-angle losses, with some
// parameters shared between the angles or frozen.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmq/noise_models.hpp"
#include "nmq/records.hpp"
#include "nmq/spline.hpp"

namespace nmq {

/// Loss of `params` against records of a single theta_full.
/// Throws DataError for mixed angles or incomplete bases.
double loss(const NoiseParams& params, const std::vector<ExperimentRecord>& records, int m = 4);

/// sqrt(loss / (3 * points)).
double rmse_from_loss(double loss, std::size_t points);

/// Natural spline through records of one basis and one angle, as a function
/// of n. Throws DataError for mixed bases or angles, duplicate n, or fewer
/// than 4 points.
CubicSpline<double> interpolate_spline(const std::vector<ExperimentRecord>& records);

struct ParameterPolicy {
  /// Parameters with one value common to every angle of the fit.
  std::vector<std::string> shared{"gamma_ad", "gamma_d"};
  /// Parameters held at a fixed value for every angle.
  std::map<std::string, double> frozen;
  /// PMME only: b = -2 gamma_z.
  bool tie_b_to_gamma_z = false;
};

/// Shared rates; kappa frozen at 0 for the qubit-defect model.
ParameterPolicy default_policy(ModelKind kind);

struct FitConfig {
  /// Number of screened starting points.
  int starts = 16;
  std::uint64_t seed = 0;
  /// Sub-rotations per half of the pseudoidentity (not stored in records).
  int m = 4;
  int screen_evaluations = 300;
  int refine_count = 3;
  int refine_evaluations = 4000;
  /// Refined minima whose loss exceeds the best by less than this many
  /// units of L_min / (N - p) count as equivalent; the one with the smallest
  /// coherent frequencies is reported (principal alias of the n grid).
  double alias_tolerance = 4.0;
  /// Scale the covariance by L_min / (N - p) instead of L_min.
  bool reduced_covariance = true;
};

struct ThetaFit {
  double theta_full = 0.0;
  NoiseParams params;
  double loss = 0.0;
  double rmse = 0.0;
  std::size_t points = 0;
};

/// One free coordinate of the fit.
struct FreeParameter {
  std::string name;
  /// Angle the parameter belongs to; nullopt for shared parameters.
  std::optional<double> theta_full;
  double value = 0.0;
  double sigma = 0.0;
};

struct OptimizerDiagnostics {
  int starts = 0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

struct FitResult {
  ModelKind kind = ModelKind::markovian;
  int m = 4;
  ParameterPolicy policy;
  /// Ascending theta_full.
  std::vector<ThetaFit> thetas;
  double loss = 0.0;
  double rmse = 0.0;
  std::size_t points = 0;
  std::vector<FreeParameter> free;
  Matrix covariance;
  bool degenerate = false;
  OptimizerDiagnostics diagnostics;

  /// Throws DataError if the angle is not part of the fit.
  const ThetaFit& at(double theta_full) const;
  /// Value of `name` at `theta_full` (shared and frozen ones included).
  double value(const std::string& name, double theta_full) const;
  /// Index into `free` of the coordinate that sets `name` at `theta_full`,
  /// or -1 when the parameter is frozen or tied.
  int free_index(const std::string& name, double theta_full) const;
};

/// Multi-start Nelder-Mead fit seeded by periodogram frequency estimates,
/// followed by a coordinate-wise quadratic polish and the Jacobian
/// covariance. Non-convergence is reported in diagnostics, not thrown.
/// Throws UnsupportedModelError for PMME with driven data and DataError for
/// records that cannot be organised into three-basis series.
FitResult fit_model(ModelKind kind, const std::vector<ExperimentRecord>& records,
                    const ParameterPolicy& policy, const FitConfig& config = {});

struct CovarianceEstimate {
  Matrix covariance;
  Vector sigma;
  double loss = 0.0;
  /// J^T J was singular (or underdetermined) and the pseudo-inverse was used.
  bool degenerate = false;
};

/// Finite-difference Jacobian J of `residuals` at `x` (step
/// max(1e-6, 1e-4 |x_i|), forward where a non-negative coordinate sits within
/// one step of zero) and C = (J^T J)^+ * s with s = L / (N - p) when
/// `reduced`, else s = L. Singular values below 1e-10 of the largest are
/// dropped.
CovarianceEstimate jacobian_covariance(const std::function<Vector(const Vector&)>& residuals, const Vector& x,
                                       const std::vector<bool>& nonnegative, bool reduced = true);

/// Finite-difference Jacobian J of the residual vector at the optimum
/// (step max(1e-6, 1e-4 |x|), one-sided at a zero bound) and
/// C = (J^T J)^+ * scale. Sets covariance, sigmas and the degeneracy flag on
/// `fit`.
void estimate_uncertainty(FitResult& fit, const std::vector<ExperimentRecord>& records,
                          const FitConfig& config = {});

struct Ratio {
  double value = 0.0;
  double sigma = 0.0;
  /// Denominator within 3 sigma of zero.
  bool unstable = false;
};

/// a / b with first-order error propagation
/// (sigma_r / r)^2 = (sa/a)^2 + (sb/b)^2 - 2 cov / (a b).
Ratio ratio_with_uncertainty(double a, double sigma_a, double b, double sigma_b, double covariance = 0.0);

struct ParameterRatio {
  std::string name;
  Ratio ratio;
  bool shared = false;
};

/// x_i(theta) / x_i(0) for every parameter that is free at both angles, and
/// r = 1 for shared ones. Requires a joint fit over theta = 0 and exactly one
/// driven angle (DataError otherwise).
std::vector<ParameterRatio> parameter_ratios(const FitResult& fit, bool include_cross_term = true);

}  // namespace nmq
