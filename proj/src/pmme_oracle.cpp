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

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "nmq/errors.hpp"
#include "nmq/noise_models.hpp"

namespace nmq {

std::vector<PauliVector> pmme_numeric_oracle(const PMMEParams& p, std::span<const double> t_grid) {
  validate(p);
  if (t_grid.empty()) return {};

  double h = 0.01;
  if (t_grid.size() > 1) {
    h = t_grid[1] - t_grid[0];
    if (!(h > 0.0)) throw DomainError("time grid must be strictly increasing");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
      const double step = t_grid[k] - t_grid[k - 1];
      if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(t_grid[k]))) {
        throw DomainError("time grid must be uniform");
      }
    }
  }
  if (h > 0.05 + 1e-12) throw DomainError("time step must not exceed 0.05 gate units");
  if (!(t_grid[0] >= 0.0)) throw DomainError("time grid must start at t >= 0");
  const double offset = t_grid[0] / h;
  const long first = std::lround(offset);
  if (std::abs(offset - static_cast<double>(first)) > 1e-6) {
    throw DomainError("time grid must start at a multiple of its step");
  }
  const long last = first + static_cast<long>(t_grid.size()) - 1;

  const Matrix l0 = markovian_generator(p.markovian, 0.0).entries();
  const Matrix l1 = markovian_generator(MarkovianParams{0.0, 0.0, p.gamma_z}, 0.0).entries();
  const Matrix identity = Matrix::Identity(4, 4);
  const Matrix phi = (l0 * h).exp().eval();
  const Matrix kernel_step = ((l0 + l1 - p.b * identity) * h).exp().eval();
  const Matrix phi_l1 = phi * l1;

  Vector rho = PauliVector::plus_state().coeffs();
  Vector memory = rho;     // sum_j E^j rho_{n-j}
  Vector kernel_rho0 = rho;  // E^n rho_0
  Vector integral = Vector::Zero(4);

  std::vector<PauliVector> out;
  out.reserve(t_grid.size());
  if (first == 0) out.emplace_back(rho);

  for (long n = 0; n < last; ++n) {
    const Vector free_part = phi * rho;
    const Vector memory_prev_part = kernel_step * memory;
    const Vector kernel_next = kernel_step * kernel_rho0;

    const Vector predicted = free_part + h * (phi_l1 * integral);
    const Vector integral_pred = h * (0.5 * predicted + memory_prev_part - 0.5 * kernel_next);
    rho = free_part + 0.5 * h * (phi_l1 * integral + l1 * integral_pred);
    rho[0] = 1.0;

    memory = rho + memory_prev_part;
    kernel_rho0 = kernel_next;
    integral = h * (memory - 0.5 * rho - 0.5 * kernel_rho0);
    if (!rho.allFinite()) throw NumericError("PMME oracle diverged");
    if (n + 1 >= first) out.emplace_back(rho);
  }
  return out;
}

}  // namespace nmq
