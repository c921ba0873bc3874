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

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "nmq/errors.hpp"

namespace nmq {

/// Natural cubic spline (zero second derivative at both ends). Evaluation
/// outside the knot range extrapolates the end cubic.
template <typename Scalar>
class CubicSpline {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Throws DataError for fewer than 4 knots or knots that are not strictly
  /// increasing.
  CubicSpline(std::vector<Scalar> knots, std::vector<Scalar> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    const std::size_t n = knots_.size();
    if (n != values_.size()) throw DataError("spline knots and values differ in length");
    if (n < 4) throw DataError("spline needs at least 4 points");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(knots_[i] > knots_[i - 1])) throw DataError("spline knots must be strictly increasing");
    }

    // Tridiagonal system for the interior second derivatives.
    const Eigen::Index m = static_cast<Eigen::Index>(n) - 2;
    Vec sub(m), diag(m), sup(m), rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const std::size_t i = static_cast<std::size_t>(k) + 1;
      const Scalar h0 = knots_[i] - knots_[i - 1];
      const Scalar h1 = knots_[i + 1] - knots_[i];
      sub[k] = h0;
      diag[k] = Scalar(2) * (h0 + h1);
      sup[k] = h1;
      rhs[k] = Scalar(6) * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
    }
    for (Eigen::Index k = 1; k < m; ++k) {
      const Scalar w = sub[k] / diag[k - 1];
      diag[k] -= w * sup[k - 1];
      rhs[k] -= w * rhs[k - 1];
    }
    second_.assign(n, Scalar(0));
    for (Eigen::Index k = m - 1; k >= 0; --k) {
      const Scalar next = k + 1 < m ? second_[static_cast<std::size_t>(k) + 2] : Scalar(0);
      second_[static_cast<std::size_t>(k) + 1] = (rhs[k] - sup[k] * next) / diag[k];
    }
  }

  Scalar operator()(Scalar x) const {
    const std::size_t n = knots_.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), x) - knots_.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1);
    const Scalar h = knots_[i] - knots_[i - 1];
    const Scalar a = (knots_[i] - x) / h;
    const Scalar b = (x - knots_[i - 1]) / h;
    return a * values_[i - 1] + b * values_[i] +
           ((a * a * a - a) * second_[i - 1] + (b * b * b - b) * second_[i]) * h * h / Scalar(6);
  }

  const std::vector<Scalar>& knots() const { return knots_; }

 private:
  std::vector<Scalar> knots_;
  std::vector<Scalar> values_;
  std::vector<Scalar> second_;
};

}  // namespace nmq
