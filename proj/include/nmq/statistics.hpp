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

// Aggregation of repeated ratio estimates r_k +- sigma_k.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace nmq {

struct RatioSample {
  double value = 0.0;
  double sigma = 0.0;
};

struct RatioSummary {
  double theta_full = 0.0;
  std::string parameter;
  /// Inverse-variance weighted mean.
  double mean = 0.0;
  /// 1 / sqrt(sum 1/sigma^2).
  double sigma_fit = 0.0;
  /// sqrt(sum (r - mean)^2 / sigma^2 / sum 1/sigma^2).
  double sigma_dispersion = 0.0;
  /// sqrt(sigma_fit^2 + sigma_dispersion^2).
  double sigma_total = 0.0;
  std::vector<RatioSample> contributions;
  std::vector<std::string> warnings;
};

/// Throws DataError for an empty sample set. Non-positive sigmas are replaced
/// by `sigma_floor` and reported in warnings.
RatioSummary aggregate_ratios(std::span<const RatioSample> samples, double sigma_floor = 1e-12);

/// `count` evenly spaced points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// Grid wide enough to hold every Gaussian of the mixture (+-8 sigma).
std::vector<double> density_grid(std::span<const RatioSample> samples, std::size_t count = 2001);

/// (1/K) sum_k N(z; r_k, sigma_k) on the grid `z`.
std::vector<double> density_profile(std::span<const RatioSample> samples, std::span<const double> z);

struct QuadraticTrend {
  /// r(x) = 1 - c x^2.
  double c = 0.0;
  double sigma_c = 0.0;
};

/// Weighted least squares of r = 1 - c x^2. Points with non-finite or
/// non-positive sigma are skipped. Throws DataError if nothing remains.
QuadraticTrend fit_quadratic_trend(std::span<const double> x, std::span<const RatioSample> ratios);

}  // namespace nmq
