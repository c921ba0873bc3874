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

// Derivative-free minimisers used by the fitting layer.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace nmq {

template <typename Scalar>
struct NelderMeadOptions {
  int max_evaluations = 2000;
  /// Stop when every vertex is within x_tolerance of the best one (max-norm)
  /// and their values within f_tolerance.
  Scalar x_tolerance = Scalar(1e-9);
  Scalar f_tolerance = Scalar(1e-13);
};

template <typename Scalar>
struct OptimizeResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar value = std::numeric_limits<Scalar>::infinity();
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex minimisation of f starting from x0 with initial
/// vertices x0 + step_i e_i. Non-finite objective values count as +inf.
template <typename Scalar, typename F>
OptimizeResult<Scalar> nelder_mead(F&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& step,
                                   const NelderMeadOptions<Scalar>& options = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index dim = x0.size();
  OptimizeResult<Scalar> result;
  auto eval = [&](const Vec& x) {
    ++result.evaluations;
    const Scalar v = f(x);
    return std::isfinite(static_cast<double>(v)) ? v : std::numeric_limits<Scalar>::infinity();
  };
  if (dim == 0) {
    result.x = x0;
    result.value = eval(x0);
    result.converged = true;
    return result;
  }

  std::vector<Vec> simplex(static_cast<std::size_t>(dim + 1), x0);
  std::vector<Scalar> values(static_cast<std::size_t>(dim + 1));
  values[0] = eval(x0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Vec& v = simplex[static_cast<std::size_t>(i + 1)];
    v[i] += step[i] != Scalar(0) ? step[i] : Scalar(1e-3);
    values[static_cast<std::size_t>(i + 1)] = eval(v);
  }

  std::vector<std::size_t> order(simplex.size());
  while (result.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<Vec> s2;
      std::vector<Scalar> v2;
      for (std::size_t k : order) {
        s2.push_back(simplex[k]);
        v2.push_back(values[k]);
      }
      simplex.swap(s2);
      values.swap(v2);
    }
    ++result.iterations;

    Scalar x_spread = 0;
    Scalar f_spread = 0;
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      x_spread = std::max(x_spread, (simplex[k] - simplex[0]).cwiseAbs().maxCoeff());
      f_spread = std::max(f_spread, std::abs(values[k] - values[0]));
    }
    if (x_spread <= options.x_tolerance && f_spread <= options.f_tolerance) {
      result.converged = true;
      break;
    }

    const std::size_t worst = simplex.size() - 1;
    Vec centroid = Vec::Zero(dim);
    for (std::size_t k = 0; k < worst; ++k) centroid += simplex[k];
    centroid /= static_cast<Scalar>(dim);

    const Vec reflected = centroid + (centroid - simplex[worst]);
    const Scalar fr = eval(reflected);
    if (fr < values[0]) {
      const Vec expanded = centroid + Scalar(2) * (centroid - simplex[worst]);
      const Scalar fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[worst - 1]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Vec contracted = outside ? Vec(centroid + Scalar(0.5) * (reflected - centroid))
                                   : Vec(centroid + Scalar(0.5) * (simplex[worst] - centroid));
    const Scalar fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      simplex[k] = simplex[0] + Scalar(0.5) * (simplex[k] - simplex[0]);
      values[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

/// Coordinate-wise parabolic refinement: for each coordinate, fits a parabola
/// through x - h, x, x + h and moves to its vertex when that lowers f.
/// The step halves after every sweep.
template <typename Scalar, typename F>
OptimizeResult<Scalar> quadratic_polish(F&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& step, int sweeps = 6) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  OptimizeResult<Scalar> result;
  Vec x = x0;
  Scalar fx = f(x);
  ++result.evaluations;
  Vec h = step;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (h[i] == Scalar(0)) continue;
      Vec lo = x;
      Vec hi = x;
      lo[i] -= h[i];
      hi[i] += h[i];
      const Scalar fl = f(lo);
      const Scalar fh = f(hi);
      result.evaluations += 2;
      const Scalar curvature = fl - Scalar(2) * fx + fh;
      Vec candidate = x;
      if (curvature > Scalar(0)) {
        candidate[i] -= h[i] * (fh - fl) / (Scalar(2) * curvature);
      } else {
        candidate[i] = fl < fh ? lo[i] : hi[i];
      }
      const Scalar fc = f(candidate);
      ++result.evaluations;
      Scalar best = fx;
      Vec best_x = x;
      for (auto [v, p] : {std::pair{fl, &lo}, std::pair{fh, &hi}, std::pair{fc, &candidate}}) {
        if (std::isfinite(static_cast<double>(v)) && v < best) {
          best = v;
          best_x = *p;
        }
      }
      x = best_x;
      fx = best;
    }
    h *= Scalar(0.5);
    ++result.iterations;
  }
  result.x = x;
  result.value = fx;
  result.converged = true;
  return result;
}

}  // namespace nmq
