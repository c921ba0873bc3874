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

#include "nmq/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nmq/errors.hpp"

namespace nmq {

RatioSummary aggregate_ratios(std::span<const RatioSample> samples, double sigma_floor) {
  if (samples.empty()) throw DataError("no ratios to aggregate");
  RatioSummary out;
  out.contributions.assign(samples.begin(), samples.end());
  for (auto& s : out.contributions) {
    if (!(s.sigma > 0.0)) {
      out.warnings.push_back("sigma " + std::to_string(s.sigma) + " replaced by floor " + std::to_string(sigma_floor));
      s.sigma = sigma_floor;
    }
  }
  double wsum = 0.0;
  double wr = 0.0;
  for (const auto& s : out.contributions) {
    const double w = 1.0 / (s.sigma * s.sigma);
    wsum += w;
    wr += w * s.value;
  }
  out.mean = wr / wsum;
  double spread = 0.0;
  for (const auto& s : out.contributions) {
    const double d = s.value - out.mean;
    spread += d * d / (s.sigma * s.sigma);
  }
  out.sigma_fit = 1.0 / std::sqrt(wsum);
  out.sigma_dispersion = std::sqrt(spread / wsum);
  out.sigma_total = std::hypot(out.sigma_fit, out.sigma_dispersion);
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> z(count);
  for (std::size_t k = 0; k < count; ++k) z[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  return z;
}

std::vector<double> density_grid(std::span<const RatioSample> samples, std::size_t count) {
  if (samples.empty()) throw DataError("no ratios for a density grid");
  double lo = samples.front().value;
  double hi = lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s.value - 8.0 * s.sigma);
    hi = std::max(hi, s.value + 8.0 * s.sigma);
  }
  if (hi <= lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  return linear_grid(lo, hi, count);
}

std::vector<double> density_profile(std::span<const RatioSample> samples, std::span<const double> z) {
  if (samples.empty()) throw DataError("no ratios for a density profile");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> f(z.size(), 0.0);
  for (const auto& s : samples) {
    const double sigma = s.sigma > 0.0 ? s.sigma : 1e-12;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double u = (z[k] - s.value) / sigma;
      f[k] += norm * std::exp(-0.5 * u * u) / sigma;
    }
  }
  for (double& v : f) v /= static_cast<double>(samples.size());
  return f;
}

QuadraticTrend fit_quadratic_trend(std::span<const double> x, std::span<const RatioSample> ratios) {
  if (x.size() != ratios.size()) throw DataError("trend inputs differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double s = ratios[k].sigma;
    if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(ratios[k].value)) continue;
    const double w = 1.0 / (s * s);
    const double x2 = x[k] * x[k];
    num += w * x2 * (1.0 - ratios[k].value);
    den += w * x2 * x2;
  }
  if (!(den > 0.0)) throw DataError("no usable points for the quadratic trend");
  return QuadraticTrend{num / den, 1.0 / std::sqrt(den)};
}

}  // namespace nmq
