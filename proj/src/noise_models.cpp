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

#include "nmq/noise_models.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "nmq/errors.hpp"

namespace nmq {
namespace {

// Generators with unit coefficient; every model generator is a linear
// combination of these.
struct UnitGenerators {
  Matrix drive, detuning, damping, dephasing, coupling, tls_damping;
};

Matrix single_term(const char* label, int q) {
  const PauliTerm term{label, 1.0};
  return build_generator(std::span<const PauliTerm>(&term, 1), {}, q).entries();
}

Matrix single_dissipator(const ComplexMatrix& jump, int q) {
  const Dissipator d{jump, 1.0};
  return build_generator({}, std::span<const Dissipator>(&d, 1), q).entries();
}

const UnitGenerators& qubit_units() {
  static const UnitGenerators units = [] {
    UnitGenerators u;
    u.drive = single_term("X", 1);
    u.detuning = single_term("Z", 1);
    u.damping = single_dissipator(lowering_operator(), 1);
    u.dephasing = single_dissipator(pauli_string_matrix("Z"), 1);
    return u;
  }();
  return units;
}

const UnitGenerators& tls_units() {
  static const UnitGenerators units = [] {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    UnitGenerators u;
    u.drive = single_term("XI", 2);
    u.detuning = single_term("ZI", 2);
    u.damping = single_dissipator(Eigen::kroneckerProduct(lowering_operator(), id).eval(), 2);
    u.dephasing = single_dissipator(pauli_string_matrix("ZI"), 2);
    u.coupling = single_term("ZX", 2);
    u.tls_damping = single_dissipator(Eigen::kroneckerProduct(id, lowering_operator()).eval(), 2);
    return u;
  }();
  return units;
}

void check_time(double t) {
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
}

// 2 sinh(s t) / s, continuous through s = 0.
Complex sinhc2(Complex s, double t) {
  const Complex x = s * t;
  if (std::abs(x) < 1e-4) return 2.0 * t * (1.0 + x * x / 6.0);
  return 2.0 * std::sinh(x) / s;
}

PauliVector coherence_state(Complex rho01, double gamma_ad, double t) {
  // rho01 = (x - i y) / 2; <Z> relaxes towards +1 from 0.
  return PauliVector::qubit(2.0 * rho01.real(), -2.0 * rho01.imag(), 1.0 - std::exp(-gamma_ad * t));
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::markovian: return "markovian";
    case ModelKind::qubit_tls: return "qubit_tls";
    case ModelKind::pmme: return "pmme";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "markovian") return ModelKind::markovian;
  if (name == "qubit_tls") return ModelKind::qubit_tls;
  if (name == "pmme") return ModelKind::pmme;
  throw DomainError("unknown model '" + std::string(name) + "'");
}

ModelKind kind_of(const NoiseParams& params) { return static_cast<ModelKind>(params.index()); }

const MarkovianParams& markovian_part(const NoiseParams& params) {
  if (const auto* m = std::get_if<MarkovianParams>(&params)) return *m;
  if (const auto* t = std::get_if<QubitTLSParams>(&params)) return t->markovian;
  return std::get<PMMEParams>(params).markovian;
}

std::vector<std::string> parameter_names(ModelKind kind) {
  std::vector<std::string> names{"delta_omega", "gamma_ad", "gamma_d"};
  if (kind == ModelKind::qubit_tls) {
    names.insert(names.end(), {"nu_zx", "kappa"});
  } else if (kind == ModelKind::pmme) {
    names.insert(names.end(), {"gamma_z", "b"});
  }
  return names;
}

int parameter_index(ModelKind kind, std::string_view name) {
  const auto names = parameter_names(kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

bool is_nonnegative(ModelKind kind, int index) {
  if (index == 0) return false;
  return !(kind == ModelKind::pmme && index == 4);
}

Vector to_vector(const NoiseParams& params) {
  const MarkovianParams& m = markovian_part(params);
  Vector v(kind_of(params) == ModelKind::markovian ? 3 : 5);
  v[0] = m.delta_omega;
  v[1] = m.gamma_ad;
  v[2] = m.gamma_d;
  if (const auto* t = std::get_if<QubitTLSParams>(&params)) {
    v[3] = t->nu_zx;
    v[4] = t->kappa;
  } else if (const auto* p = std::get_if<PMMEParams>(&params)) {
    v[3] = p->gamma_z;
    v[4] = p->b;
  }
  return v;
}

NoiseParams from_vector(ModelKind kind, const Vector& values) {
  const Eigen::Index expected = kind == ModelKind::markovian ? 3 : 5;
  if (values.size() != expected) {
    throw ShapeError("parameter vector for " + std::string(model_name(kind)) + " needs " +
                     std::to_string(expected) + " entries");
  }
  const MarkovianParams m{values[0], values[1], values[2]};
  switch (kind) {
    case ModelKind::markovian: return m;
    case ModelKind::qubit_tls: return QubitTLSParams{m, values[3], values[4]};
    case ModelKind::pmme: return PMMEParams{m, values[3], values[4]};
  }
  return m;
}

void validate(const NoiseParams& params) {
  const ModelKind kind = kind_of(params);
  const Vector v = to_vector(params);
  const auto names = parameter_names(kind);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericError("parameter " + names[static_cast<std::size_t>(i)] + " is not finite");
    if (is_nonnegative(kind, static_cast<int>(i)) && v[i] < 0.0) {
      throw DomainError("parameter " + names[static_cast<std::size_t>(i)] + " must be non-negative");
    }
  }
}

GeneratorMatrix markovian_generator(const MarkovianParams& p, double drive) {
  validate(p);
  const UnitGenerators& u = qubit_units();
  return GeneratorMatrix(drive * u.drive + p.delta_omega * u.detuning + p.gamma_ad * u.damping +
                             p.gamma_d * u.dephasing,
                         1);
}

GeneratorMatrix qubit_tls_generator(const QubitTLSParams& p, double drive) {
  validate(p);
  const UnitGenerators& u = tls_units();
  const MarkovianParams& m = p.markovian;
  return GeneratorMatrix(drive * u.drive + m.delta_omega * u.detuning + m.gamma_ad * u.damping +
                             m.gamma_d * u.dephasing + p.nu_zx * u.coupling +
                             p.kappa * u.tls_damping,
                         2);
}

PauliVector qubit_tls_idle_analytic(const QubitTLSParams& p, double t) {
  check_time(t);
  validate(p);
  const MarkovianParams& m = p.markovian;
  const Complex i1(0.0, 1.0);
  const double k4 = p.kappa / 4.0;
  const Complex s = std::sqrt(Complex(p.kappa * p.kappa / 16.0 - 4.0 * p.nu_zx * p.nu_zx, 0.0));
  const Complex envelope =
      std::exp((-2.0 * i1 * m.delta_omega - 2.0 * m.gamma_d - 0.5 * m.gamma_ad - k4) * t);
  const Complex rho01 = 0.25 * envelope * (2.0 * std::cosh(s * t) + k4 * sinhc2(s, t));
  return coherence_state(rho01, m.gamma_ad, t);
}

PauliVector pmme_idle_analytic(const PMMEParams& p, double t) {
  check_time(t);
  validate(p);
  const MarkovianParams& m = p.markovian;
  const Complex i1(0.0, 1.0);
  const Complex lambda0 = -2.0 * i1 * m.delta_omega - 2.0 * m.gamma_d - 0.5 * m.gamma_ad;
  Complex rho01;
  if (p.gamma_z == 0.0) {
    rho01 = 0.5 * std::exp(lambda0 * t);
  } else {
    const double gp = 0.5 * (p.b + 2.0 * p.gamma_z);
    const Complex r = std::sqrt(Complex(gp * gp - 2.0 * p.gamma_z, 0.0));
    rho01 = 0.25 * std::exp((lambda0 - gp) * t) * (2.0 * std::cosh(r * t) + gp * sinhc2(r, t));
  }
  return coherence_state(rho01, m.gamma_ad, t);
}

PMMEParams map_qubit_tls_to_pmme(const QubitTLSParams& p) {
  const double nu2 = p.nu_zx * p.nu_zx;
  return PMMEParams{p.markovian, 2.0 * nu2, 0.5 * p.kappa - 4.0 * nu2};
}

double effective_dephasing(const NoiseParams& params) {
  const double gd = markovian_part(params).gamma_d;
  if (const auto* t = std::get_if<QubitTLSParams>(&params)) return gd + t->kappa / 8.0;
  if (const auto* p = std::get_if<PMMEParams>(&params)) return gd + (p->b + 2.0 * p->gamma_z) / 4.0;
  return gd;
}

}  // namespace nmq
