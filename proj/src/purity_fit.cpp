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

#include "nmq/purity_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "nmq/errors.hpp"
#include "nmq/optimize.hpp"
#include "nmq/spectral.hpp"

namespace nmq {
namespace {

// Model in per-step units: a = 2 pi f T, g = gamma T, h = gamma_r T.
double model(double a, double g, double h, double n) {
  const double c = std::cos(a * n);
  const double r = 1.0 - std::exp(-h * n);
  return 0.5 * (1.0 + c * c * std::exp(-g * n) + r * r);
}

// One-sided significance after a Bonferroni correction over `trials`
// independent frequency cells.
double trials_corrected_z(double z, double trials) {
  if (!(z > 0.0)) return 0.0;
  if (std::isinf(z)) return z;
  const boost::math::normal normal;
  const double p_local = boost::math::cdf(boost::math::complement(normal, z));
  const double p_global = std::min(0.5, trials * p_local);
  if (p_global > 1e-300) return boost::math::quantile(boost::math::complement(normal, p_global));
  return std::sqrt(std::max(0.0, z * z - 2.0 * std::log(trials)));
}

}  // namespace

double purity_model(double f_p, double gamma_p, double gamma_r, double n, double period) {
  return model(2.0 * std::numbers::pi * f_p * period, gamma_p * period, gamma_r * period, n);
}

PurityFit fit_purity(const ObservableSeries& series, double period) {
  const std::size_t count = series.size();
  if (count < 4) throw DataError("purity fit needs at least 4 points");
  if (!(period > 0.0)) throw DomainError("pseudoidentity duration must be positive");
  const double pi = std::numbers::pi;

  // With shot noise, c^2 is estimated without bias as (s c^2 - 1) / (s - 1)
  // and points are weighted by the propagated variance of the purity.
  const double shots = series.shots > 1 ? static_cast<double>(series.shots) : 0.0;
  std::vector<double> n(count), p(count), w(count, 1.0);
  int step = 0;
  for (std::size_t k = 0; k < count; ++k) {
    n[k] = series.n[k];
    if (k > 0) step = std::gcd(step, series.n[k] - series.n[k - 1]);
    if (shots == 0.0) {
      p[k] = series.purity(k);
      continue;
    }
    double sum = 0.0;
    double var = 0.0;
    for (double c : {series.x[k], series.y[k], series.z[k]}) {
      const double c2 = std::clamp((shots * c * c - 1.0) / (shots - 1.0), 0.0, 1.0);
      const double sigma2 = std::max(1.0 - c2, 1.0 / shots) / shots;
      sum += c2;
      var += c2 * sigma2 + 0.5 * sigma2 * sigma2;
    }
    p[k] = 0.5 * (1.0 + sum);
    w[k] = 1.0 / var;
  }
  step = std::max(step, 1);
  const double n_max = std::max(1.0, n.back());
  const double fold = pi / step;  // cos^2(a n) is periodic in a with this period

  auto sse = [&](double a, double g, double h) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double r = p[k] - model(a, g, h, n[k]);
      s += w[k] * r * r;
    }
    return s;
  };
  auto objective = [&](const Vector& u) {
    return sse(std::abs(u[0]) / n_max, std::abs(u[1]) / n_max, std::abs(u[2]) / n_max);
  };

  // Starting frequencies: a regular grid over the identifiable range plus the
  // strongest lines of 2p - 1 (which oscillates at twice the frequency).
  std::vector<double> a_seeds;
  for (int j = 0; j <= 12; ++j) a_seeds.push_back(0.5 * fold * j / 12.0);
  const bool uniform = static_cast<int>(count) == (series.n.back() - series.n.front()) / step + 1;
  if (uniform) {
    std::vector<Complex> q;
    for (double v : p) q.emplace_back(2.0 * v - 1.0, 0.0);
    PeakOptions opts;
    opts.exclusion = 0.0;
    const auto peaks = find_peaks(periodogram(q), opts);
    for (std::size_t j = 0; j < std::min<std::size_t>(2, peaks.size()); ++j) {
      a_seeds.push_back(std::abs(peaks[j].omega) / (2.0 * step));
    }
  }

  NelderMeadOptions<double> opts;
  opts.max_evaluations = 400;
  opts.x_tolerance = 1e-10;
  opts.f_tolerance = 1e-16;
  Vector best_u = Vector::Zero(3);
  double best = std::numeric_limits<double>::infinity();
  for (double a0 : a_seeds) {
    for (double g0 : {0.0, 1.0, 4.0}) {
      for (double h0 : {0.0, 1.0}) {
        Vector u0(3);
        u0 << a0 * n_max, g0, h0;
        Vector s(3);
        s << std::max(0.1, 0.1 * u0[0]), 0.5, 0.5;
        const auto r = nelder_mead<double>(objective, u0, s, opts);
        if (r.value < best) {
          best = r.value;
          best_u = r.x;
        }
      }
    }
  }
  NelderMeadOptions<double> fine = opts;
  fine.max_evaluations = 3000;
  const auto refined = nelder_mead<double>(objective, best_u, Vector::Constant(3, 0.01), fine);
  if (refined.value <= best) {
    best = refined.value;
    best_u = refined.x;
  }

  // Null fit with the frequency pinned at zero, for the likelihood-ratio
  // significance.
  auto null_objective = [&](const Vector& u) { return sse(0.0, std::abs(u[0]) / n_max, std::abs(u[1]) / n_max); };
  double null_best = std::numeric_limits<double>::infinity();
  for (double g0 : {0.0, 1.0, 4.0}) {
    for (double h0 : {0.0, 1.0}) {
      Vector u0(2);
      u0 << g0, h0;
      const auto r = nelder_mead<double>(null_objective, u0, Vector::Constant(2, 0.5), fine);
      null_best = std::min(null_best, r.value);
    }
  }
  best = std::min(best, null_best);

  double a = std::fmod(std::abs(best_u[0]) / n_max, fold);
  if (a > 0.5 * fold) a = fold - a;
  const double g = std::abs(best_u[1]) / n_max;
  const double h = std::abs(best_u[2]) / n_max;

  // Jacobian of the model in (a, g, h); one-sided at the zero bound.
  const auto rows = static_cast<Eigen::Index>(count);
  Matrix jac(rows, 3);
  const double x[3] = {a, g, h};
  for (int c = 0; c < 3; ++c) {
    const double step_c = std::max(1e-7, 1e-4 * x[c]);
    double lo[3] = {a, g, h};
    double hi[3] = {a, g, h};
    hi[c] += step_c;
    lo[c] = std::max(0.0, lo[c] - step_c);
    for (std::size_t k = 0; k < count; ++k) {
      jac(static_cast<Eigen::Index>(k), c) = std::sqrt(w[k]) *
          (model(hi[0], hi[1], hi[2], n[k]) - model(lo[0], lo[1], lo[2], n[k])) / (hi[c] - lo[c]);
    }
  }
  const double residual_ss = sse(a, g, h);
  const double dof = static_cast<double>(count) - 3.0;
  // Exact data: residual variance estimated from the fit. Shot-noise data:
  // known weights, inflated if the fit is overdispersed.
  double scale = dof > 0.0 ? residual_ss / dof : 0.0;
  if (shots > 0.0) scale = std::max(1.0, scale);

  // Pseudo-inverse of J^T J; a coordinate touching a null direction gets an
  // infinite variance.
  const Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();
  const Matrix& v = svd.matrixV();
  const double inf = std::numeric_limits<double>::infinity();
  double var[3] = {0.0, 0.0, 0.0};
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    const bool null = !(sv[j] > 1e-10 * sv[0]);
    for (int c = 0; c < 3; ++c) {
      const double w = v(c, j) * v(c, j);
      if (null) {
        if (w > 1e-12) var[c] = inf;
      } else {
        var[c] += w * scale / (sv[j] * sv[j]);
      }
    }
  }

  PurityFit out;
  out.f_p = a / (2.0 * pi * period);
  out.gamma_p = g / period;
  out.gamma_r = h / period;
  double plain = 0.0;
  for (std::size_t k = 0; k < count; ++k) plain += std::pow(p[k] - model(a, g, h, n[k]), 2);
  out.residual = std::sqrt(plain / static_cast<double>(count));
  out.sigma_f_p = std::sqrt(var[0]) / (2.0 * pi * period);
  out.sigma_gamma_p = std::sqrt(var[1]) / period;
  if (std::isinf(out.sigma_f_p)) {
    out.wald_z = 0.0;
  } else if (out.sigma_f_p > 0.0) {
    out.wald_z = out.f_p / out.sigma_f_p;
  } else {
    out.wald_z = out.f_p > 0.0 ? inf : 0.0;
  }
  const double gain = std::max(0.0, null_best - residual_ss);
  if (gain == 0.0) {
    out.local_z = 0.0;
  } else {
    out.local_z = scale > 0.0 ? std::sqrt(gain / scale) : inf;
  }
  out.z_score = trials_corrected_z(out.local_z, std::max(1.0, 0.5 * static_cast<double>(count)));
  return out;
}

PurityFit fit_purity(const std::vector<ExperimentRecord>& records, double theta_full, int m) {
  return fit_purity(collect_series(records, theta_full), 2.0 * m);
}

}  // namespace nmq
