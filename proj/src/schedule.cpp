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

#include "nmq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nmq/errors.hpp"

namespace nmq {
namespace {

GeneratorMatrix drive_generator(const NoiseParams& params, double drive) {
  if (const auto* m = std::get_if<MarkovianParams>(&params)) return markovian_generator(*m, drive);
  if (const auto* t = std::get_if<QubitTLSParams>(&params)) return qubit_tls_generator(*t, drive);
  throw UnsupportedModelError("the PMME describes idle evolution only and cannot be driven");
}

int subsystems_of(const NoiseParams& params) {
  return kind_of(params) == ModelKind::qubit_tls ? 2 : 1;
}

PauliVector initial_state(const NoiseParams& params) {
  if (kind_of(params) == ModelKind::qubit_tls) {
    return PauliVector::product(PauliVector::plus_state(), PauliVector::qubit(0.0, 0.0, 1.0));
  }
  return PauliVector::plus_state();
}

Superoperator matrix_power(const Superoperator& base, int m) {
  Superoperator out = base;
  for (int k = 1; k < m; ++k) out = out * base;
  return out;
}

}  // namespace

std::vector<GateSpec> build_pseudoidentity(double theta_full, int m) {
  if (m < 1) throw DomainError("sub-rotation count m must be at least 1");
  const double theta_gate = theta_full / m;
  const double pi = std::numbers::pi;
  std::vector<GateSpec> gates;
  gates.reserve(static_cast<std::size_t>(2 * m + 2));
  for (int k = 0; k < m; ++k) gates.push_back({GateKind::drive_x, theta_gate, 1.0, 0.0});
  gates.push_back({GateKind::virtual_z, pi, 0.0, 0.0});
  for (int k = 0; k < m; ++k) gates.push_back({GateKind::drive_x, theta_gate, 1.0, pi});
  gates.push_back({GateKind::virtual_z, pi, 0.0, pi});
  return gates;
}

char basis_letter(Basis basis) {
  switch (basis) {
    case Basis::X: return 'X';
    case Basis::Y: return 'Y';
    case Basis::Z: return 'Z';
  }
  return '?';
}

Basis parse_basis(std::string_view text) {
  if (text == "X" || text == "x") return Basis::X;
  if (text == "Y" || text == "y") return Basis::Y;
  if (text == "Z" || text == "z") return Basis::Z;
  throw DomainError("unknown measurement basis '" + std::string(text) + "'");
}

std::vector<int> default_n_values() {
  std::vector<int> n;
  for (int k = 0; k <= 150; k += 10) n.push_back(k);
  return n;
}

std::vector<double> default_theta_grid() {
  std::vector<double> theta;
  for (int k = 0; k < 16; ++k) theta.push_back(k * std::numbers::pi / 5.0);
  return theta;
}

void validate(const PseudoidentitySchedule& schedule) {
  if (schedule.m < 1) throw DomainError("sub-rotation count m must be at least 1");
  if (!std::isfinite(schedule.theta_full)) throw DomainError("theta_full must be finite");
  if (schedule.bases.empty()) throw DomainError("schedule needs at least one basis");
  for (std::size_t k = 0; k < schedule.n_values.size(); ++k) {
    if (schedule.n_values[k] < 0) throw DomainError("repetition counts must be non-negative");
    if (k > 0 && schedule.n_values[k] <= schedule.n_values[k - 1]) {
      throw DomainError("repetition counts must be strictly increasing");
    }
  }
}

Superoperator schedule_superoperator(const NoiseParams& params, const PseudoidentitySchedule& schedule) {
  validate(schedule);
  const Superoperator drive = propagate(drive_generator(params, drive_amplitude(schedule.theta_gate())), 1.0);
  const Superoperator half = matrix_power(drive, schedule.m);
  const Superoperator flip = z_rotation(std::numbers::pi, subsystems_of(params));
  return flip * half * flip * half;
}

Superoperator gates_superoperator(const NoiseParams& params, std::span<const GateSpec> gates) {
  const int q = subsystems_of(params);
  Superoperator total = Superoperator::identity(q);
  for (const auto& gate : gates) {
    if (gate.kind == GateKind::virtual_z) {
      total = z_rotation(gate.theta, q) * total;
    } else {
      total = propagate(drive_generator(params, drive_amplitude(gate.theta) / gate.duration), gate.duration) *
              total;
    }
  }
  return total;
}

Trajectory trajectory_from_channel(const Superoperator& channel, std::span<const int> n_values,
                                   const PauliVector& initial) {
  std::vector<int> ns(n_values.begin(), n_values.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::map<int, Matrix> gap_powers;
  auto power_of = [&](int gap) -> const Matrix& {
    auto it = gap_powers.find(gap);
    if (it != gap_powers.end()) return it->second;
    Matrix result = Matrix::Identity(channel.matrix().rows(), channel.matrix().cols());
    Matrix base = channel.matrix();
    for (int e = gap; e > 0; e >>= 1) {
      if (e & 1) result = result * base;
      if (e > 1) base = base * base;
    }
    return gap_powers.emplace(gap, std::move(result)).first->second;
  };

  Trajectory out;
  Vector current = initial.coeffs();
  int current_n = 0;
  for (int n : ns) {
    if (n < 0) throw DomainError("repetition counts must be non-negative");
    if (n > current_n) current = power_of(n - current_n) * current;
    current_n = n;
    current[0] = 1.0;
    const PauliVector state(current);
    const PauliVector qubit = state.subsystems() == 2 ? partial_trace_tls(state) : state;
    out[n] = BlochPoint{qubit.x(), qubit.y(), qubit.z()};
  }
  return out;
}

Trajectory predict_trajectory(const NoiseParams& params, const PseudoidentitySchedule& schedule) {
  validate(schedule);
  if (schedule.theta_full == 0.0) {
    // Idle schedules: the frame flips commute with the generator, so the
    // closed forms are exact.
    Trajectory out;
    for (int n : schedule.n_values) {
      const double t = schedule.duration() * n;
      PauliVector s;
      if (const auto* p = std::get_if<PMMEParams>(&params)) {
        s = pmme_idle_analytic(*p, t);
      } else if (const auto* q = std::get_if<QubitTLSParams>(&params)) {
        s = qubit_tls_idle_analytic(*q, t);
      } else {
        s = qubit_tls_idle_analytic(QubitTLSParams{std::get<MarkovianParams>(params), 0.0, 0.0}, t);
      }
      out[n] = BlochPoint{s.x(), s.y(), s.z()};
    }
    return out;
  }
  if (kind_of(params) == ModelKind::pmme) {
    throw UnsupportedModelError("the PMME can only be evaluated for idle (theta_full = 0) schedules");
  }
  return trajectory_from_channel(schedule_superoperator(params, schedule), schedule.n_values,
                                 initial_state(params));
}

ComplexMatrix composite_unitary(std::span<const GateSpec> gates, const CoherentError& error) {
  const Complex i1(0.0, 1.0);
  ComplexMatrix total = ComplexMatrix::Identity(2, 2);
  for (const auto& gate : gates) {
    ComplexMatrix u(2, 2);
    if (gate.kind == GateKind::virtual_z) {
      u << 1.0, 0.0, 0.0, std::exp(i1 * gate.theta);
    } else {
      // exp(-i (a X + c Z) t) for constant coefficients.
      const double a = drive_amplitude(gate.theta * (1.0 + error.over_rotation)) / gate.duration;
      const double c = error.sigma_z;
      const double norm = std::hypot(a, c);
      const double angle = norm * gate.duration;
      const double s = norm > 0.0 ? std::sin(angle) / norm : gate.duration;
      u << std::cos(angle) - i1 * c * s, -i1 * a * s, -i1 * a * s, std::cos(angle) + i1 * c * s;
    }
    total = u * total;
  }
  return total;
}

}  // namespace nmq
