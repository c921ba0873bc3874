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

// Noise models for a driven qubit. All rates and frequencies are expressed per
// gate unit (the duration of one single-qubit gate).
//
//   markovian  H = d X + dw Z, jump operators |0><1| (gamma_ad) and Z (gamma_d)
//   qubit_tls  the same qubit terms (x) I, plus nu_zx Z (x) X coupling to a
//              defect that relaxes with I (x) |0><1| at rate kappa
//   pmme       markovian terms plus a memory-kernel dephasing channel with
//              weight gamma_z and kernel exp(-b t); idle evolution only

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmq/liouville.hpp"

namespace nmq {

enum class ModelKind { markovian, qubit_tls, pmme };

struct MarkovianParams {
  double delta_omega = 0.0;
  double gamma_ad = 0.0;
  double gamma_d = 0.0;
};

struct QubitTLSParams {
  MarkovianParams markovian;
  double nu_zx = 0.0;
  double kappa = 0.0;
};

struct PMMEParams {
  MarkovianParams markovian;
  double gamma_z = 0.0;
  double b = 0.0;
};

using NoiseParams = std::variant<MarkovianParams, QubitTLSParams, PMMEParams>;

std::string_view model_name(ModelKind kind);
/// Parses "markovian", "qubit_tls" or "pmme". Throws DomainError otherwise.
ModelKind parse_model_kind(std::string_view name);
ModelKind kind_of(const NoiseParams& params);
const MarkovianParams& markovian_part(const NoiseParams& params);

/// Parameter names in vector order, e.g. {delta_omega, gamma_ad, gamma_d, nu_zx, kappa}.
std::vector<std::string> parameter_names(ModelKind kind);
/// Index of `name` within parameter_names(kind), or -1.
int parameter_index(ModelKind kind, std::string_view name);
/// True for parameters constrained to be >= 0 (everything except delta_omega and b).
bool is_nonnegative(ModelKind kind, int index);

Vector to_vector(const NoiseParams& params);
NoiseParams from_vector(ModelKind kind, const Vector& values);

/// Throws DomainError on negative rates and NumericError on non-finite values.
void validate(const NoiseParams& params);

/// Single-qubit generator with drive coefficient `drive` on X (rad per gate unit).
GeneratorMatrix markovian_generator(const MarkovianParams& p, double drive);

/// Qubit (x) defect generator.
GeneratorMatrix qubit_tls_generator(const QubitTLSParams& p, double drive);

/// Closed-form idle evolution of the qubit marginal for the qubit (x) defect
/// model, starting from |+> (x) |0>. Qubit amplitude damping, which the
/// coherence decouples from exactly, is included as an extra factor
/// exp(-gamma_ad t / 2) and a relaxing <Z>. Throws DomainError for t < 0.
PauliVector qubit_tls_idle_analytic(const QubitTLSParams& p, double t);

/// Closed-form idle evolution of the PMME starting from |+>.
/// Throws DomainError for t < 0.
PauliVector pmme_idle_analytic(const PMMEParams& p, double t);

/// Direct time stepping of the PMME integro-differential equation
///   d rho/dt = L0 rho + L1 int_0^t k(s) exp((L0 + L1) s) rho(t - s) ds,
/// with k(s) = exp(-b s), L1 the Z dephasing channel with weight gamma_z and
/// L0 the Markovian part. Exponential integrator for L0 with a
/// predictor-corrector trapezoid for the memory term; second order in the
/// step. `t_grid` must be uniform with step <= 0.05 and start at a
/// non-negative multiple of the step; otherwise DomainError.
std::vector<PauliVector> pmme_numeric_oracle(const PMMEParams& p, std::span<const double> t_grid);

/// gamma_z = 2 nu^2, b = kappa/2 - 4 nu^2; Markovian part copied.
PMMEParams map_qubit_tls_to_pmme(const QubitTLSParams& p);

/// Effective Markovian dephasing, gamma_d + (b + 2 gamma_z)/4 for PMME and
/// gamma_d + kappa/8 for the defect model. Markovian returns gamma_d.
double effective_dephasing(const NoiseParams& params);

}  // namespace nmq
