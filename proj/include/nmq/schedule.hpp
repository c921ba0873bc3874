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

// Mirrored pseudoidentity sequences
//
//   m x X(theta_full/m), Z(pi), m x X(theta_full/m), Z(pi)
//
// which equal the identity without noise. The Z(pi) gates are virtual frame
// changes of zero duration, so the second half effectively applies X(-theta).

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nmq/liouville.hpp"
#include "nmq/noise_models.hpp"

namespace nmq {

enum class GateKind { drive_x, virtual_z };

struct GateSpec {
  GateKind kind = GateKind::drive_x;
  double theta = 0.0;
  /// Gate units; 1 for drive_x, 0 for virtual_z.
  double duration = 1.0;
  /// Accumulated virtual-Z frame phase when the gate is played.
  double frame_phase = 0.0;
};

/// X coefficient of the constant gate Hamiltonian for a rotation by `theta`
/// over one gate unit. Linear in theta; pi/4 for the calibrated X(pi/2).
inline double drive_amplitude(double theta) { return 0.5 * theta; }

/// Throws DomainError if m < 1.
std::vector<GateSpec> build_pseudoidentity(double theta_full, int m);

enum class Basis { X, Y, Z };

char basis_letter(Basis basis);
/// Throws DomainError on anything except "X", "Y", "Z".
Basis parse_basis(std::string_view text);

struct PseudoidentitySchedule {
  double theta_full = 0.0;
  int m = 4;
  std::vector<int> n_values;
  std::vector<Basis> bases{Basis::X, Basis::Y, Basis::Z};

  double theta_gate() const { return theta_full / m; }
  double duration() const { return 2.0 * m; }
};

/// n = 0, 10, ..., 150.
std::vector<int> default_n_values();
/// theta_full = k pi / 5 for k = 0..15.
std::vector<double> default_theta_grid();

/// Throws DomainError for m < 1, negative or unsorted n values, or no bases.
void validate(const PseudoidentitySchedule& schedule);

/// Channel of one pseudoidentity. Phase error and dissipation act during
/// every drive gate, including zero-amplitude ones.
/// Throws UnsupportedModelError for PMME parameters.
Superoperator schedule_superoperator(const NoiseParams& params, const PseudoidentitySchedule& schedule);

/// Same as above from an explicit gate list.
Superoperator gates_superoperator(const NoiseParams& params, std::span<const GateSpec> gates);

struct BlochPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double component(Basis basis) const { return basis == Basis::X ? x : (basis == Basis::Y ? y : z); }
};

using Trajectory = std::map<int, BlochPoint>;

/// Exact expectation values after n pseudoidentities applied to |+>
/// (defect in |0> for the qubit-defect model). Idle schedules use the closed
/// forms, driven ones the composed channel. PMME is supported for
/// theta_full = 0 only and otherwise throws UnsupportedModelError.
Trajectory predict_trajectory(const NoiseParams& params, const PseudoidentitySchedule& schedule);

/// Qubit marginals of Lambda^n applied to `initial` for every n in `n_values`,
/// stepping between sorted n with cached powers of the gaps.
Trajectory trajectory_from_channel(const Superoperator& channel, std::span<const int> n_values,
                                   const PauliVector& initial);

/// Coherent errors applied to every drive gate of a unitary composite.
struct CoherentError {
  /// Z coefficient of the gate Hamiltonian (rad per gate unit).
  double sigma_z = 0.0;
  /// Relative over-rotation: X(theta) becomes X(theta (1 + eps)).
  double over_rotation = 0.0;
};

/// Unitary of a gate list with virtual Z(phi) = diag(1, exp(i phi)).
ComplexMatrix composite_unitary(std::span<const GateSpec> gates, const CoherentError& error = {});

}  // namespace nmq
