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

#include "nmq/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "nmq/errors.hpp"
#include "nmq/optimize.hpp"
#include "nmq/spline.hpp"

namespace nmq {
namespace {

struct Candidate {
  double value;
  Vector u;
};

// Series on a uniform grid; spline-resampled when knots are missing.
ObservableSeries uniform_series(const ObservableSeries& s, int& step) {
  step = 0;
  for (std::size_t k = 1; k < s.size(); ++k) step = std::gcd(step, s.n[k] - s.n[k - 1]);
  step = std::max(step, 1);
  if (s.size() < 2) return s;
  const int count = (s.n.back() - s.n.front()) / step + 1;
  if (count == static_cast<int>(s.size()) || s.size() < 4) return s;
  std::vector<double> knots(s.n.begin(), s.n.end());
  const CubicSpline<double> sx(knots, s.x), sy(knots, s.y), sz(knots, s.z);
  ObservableSeries out;
  out.theta_full = s.theta_full;
  out.shots = s.shots;
  for (int j = 0; j < count; ++j) {
    const int n = s.n.front() + j * step;
    out.n.push_back(n);
    out.x.push_back(sx(n));
    out.y.push_back(sy(n));
    out.z.push_back(sz(n));
  }
  return out;
}

}  // namespace

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::markovian_consistent:
      return "markovian_consistent";
    case Verdict::non_markovian:
      return "non_markovian";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

MarkovianFormFit fit_markovian_form(const ObservableSeries& series, const std::vector<double>& theta_seeds) {
  const auto count = static_cast<Eigen::Index>(series.size());
  if (count < 5) throw DataError("Markovian-form fit needs at least 5 points");
  const double pi = std::numbers::pi;
  const double n_max = std::max(1.0, static_cast<double>(series.n.back()));
  Matrix data(count, 3);
  for (Eigen::Index k = 0; k < count; ++k) {
    data(k, 0) = series.x[static_cast<std::size_t>(k)];
    data(k, 1) = series.y[static_cast<std::size_t>(k)];
    data(k, 2) = series.z[static_cast<std::size_t>(k)];
  }

  Matrix basis(count, 4);
  auto ss = [&](double theta, double r, double d) {
    for (Eigen::Index k = 0; k < count; ++k) {
      const double n = series.n[static_cast<std::size_t>(k)];
      const double rn = std::pow(r, n);
      basis(k, 0) = 1.0;
      basis(k, 1) = rn * std::cos(n * theta);
      basis(k, 2) = rn * std::sin(n * theta);
      basis(k, 3) = std::pow(d, n);
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(basis);
    const Matrix coeff = qr.solve(data);
    return (data - basis * coeff).squaredNorm();
  };
  auto unpack = [&](const Vector& u, double& theta, double& r, double& d) {
    theta = u[0] / n_max;
    r = std::exp(-std::abs(u[1]) / n_max);
    d = std::sin(u[2]);
  };
  auto objective = [&](const Vector& u) {
    double theta, r, d;
    unpack(u, theta, r, d);
    return ss(theta, r, d);
  };

  int step = 0;
  for (std::size_t k = 1; k < series.size(); ++k) step = std::gcd(step, series.n[k] - series.n[k - 1]);
  step = std::max(step, 1);
  std::vector<double> thetas(theta_seeds.begin(), theta_seeds.end());
  for (int j = 0; j <= 8; ++j) thetas.push_back(pi / step * j / 8.0);

  NelderMeadOptions<double> screen;
  screen.max_evaluations = 200;
  std::vector<Candidate> candidates;
  for (double theta : thetas) {
    for (double a : {0.0, 1.0, 5.0}) {
      for (double w : {0.5 * pi - 0.1, 0.5 * pi - 0.6, 0.3}) {
        Vector u(3);
        u << theta * n_max, a, w;
        Vector s(3);
        s << std::max(0.05, 0.05 * std::abs(u[0])), 0.5, 0.1;
        const auto r = nelder_mead<double>(objective, u, s, screen);
        candidates.push_back({r.value, r.x});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  NelderMeadOptions<double> fine;
  fine.max_evaluations = 3000;
  fine.x_tolerance = 1e-10;
  fine.f_tolerance = 1e-16;
  double best = candidates.front().value;
  Vector best_u = candidates.front().u;
  for (std::size_t j = 0; j < std::min<std::size_t>(3, candidates.size()); ++j) {
    const auto r = nelder_mead<double>(objective, candidates[j].u, Vector::Constant(3, 0.02), fine);
    if (r.value < best) {
      best = r.value;
      best_u = r.x;
    }
  }
  MarkovianFormFit out;
  unpack(best_u, out.theta, out.r, out.d);
  out.theta = std::abs(out.theta);
  out.rms = std::sqrt(std::max(0.0, best) / (3.0 * static_cast<double>(count)));
  return out;
}

DetectorReport detect_nonmarkovianity(const ObservableSeries& raw, const DetectorConfig& config) {
  DetectorReport report;
  report.theta_full = raw.theta_full;
  int step = 1;
  ObservableSeries series;
  try {
    series = uniform_series(raw, step);
  } catch (const Error& e) {
    report.note = e.what();
    return report;
  }
  report.sample_step = step;
  if (static_cast<int>(series.size()) < config.min_points) {
    report.note = "fewer than " + std::to_string(config.min_points) + " points";
    return report;
  }

  const auto count = series.size();
  const double shots = static_cast<double>(raw.shots);
  const double sigma_shot = shots > 0.0 ? 1.0 / std::sqrt(shots) : 0.0;
  report.noise_floor = sigma_shot / std::sqrt(static_cast<double>(count));

  // (i) purity oscillation, fitted on the raw knots.
  report.purity = fit_purity(raw, 2.0 * config.m);

  // (ii) dominant frequencies of <X> + i<Y>.
  std::vector<Complex> signal(count);
  for (std::size_t k = 0; k < count; ++k) signal[k] = Complex(series.x[k], series.y[k]);
  PeakOptions opts;
  opts.threshold = config.peak_factor * report.noise_floor;
  opts.relative_threshold = config.relative_peak;
  report.peaks = find_peaks(periodogram(signal, config.oversample), opts);
  const double lobe = 4.0 * std::numbers::pi / static_cast<double>(count);
  std::vector<double> distinct;
  for (const auto& p : report.peaks) {
    const double w = std::abs(p.omega);
    if (std::none_of(distinct.begin(), distinct.end(), [&](double v) { return std::abs(v - w) < lobe; })) {
      distinct.push_back(w);
    }
  }
  report.frequency_count = static_cast<int>(distinct.size());

  // (iii) Markovian single-frequency form on the raw knots.
  std::vector<double> seeds;
  for (std::size_t j = 0; j < std::min<std::size_t>(3, distinct.size()); ++j) seeds.push_back(distinct[j] / step);
  if (raw.size() >= 5) {
    report.markovian_form_residual = fit_markovian_form(raw, seeds).rms;
  }
  report.residual_threshold = config.residual_factor * sigma_shot + config.residual_floor;

  const bool multi = report.frequency_count >= 2;
  const bool misfit = report.markovian_form_residual > report.residual_threshold;
  const bool revival = report.purity.z_score > config.z_threshold;
  report.votes = static_cast<int>(multi) + static_cast<int>(misfit) + static_cast<int>(revival);
  if (revival || (multi && misfit)) {
    report.verdict = Verdict::non_markovian;
    report.note = revival ? "purity oscillation" : "several frequencies and Markovian-form misfit";
  } else if (multi || misfit) {
    report.verdict = Verdict::inconclusive;
    report.note = multi ? "several frequencies only" : "Markovian-form misfit only";
  } else {
    report.verdict = Verdict::markovian_consistent;
  }
  return report;
}

DetectorReport detect_nonmarkovianity(const std::vector<ExperimentRecord>& records, double theta_full,
                                      const DetectorConfig& config) {
  return detect_nonmarkovianity(collect_series(records, theta_full), config);
}

}  // namespace nmq
