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

#include "nmq/liouville.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nmq/errors.hpp"

namespace nmq {
namespace {

constexpr char kPauliLetters[] = "IXYZ";

ComplexMatrix single_pauli(char letter) {
  const Complex i1(0.0, 1.0);
  ComplexMatrix m(2, 2);
  switch (letter) {
    case 'I': m << 1.0, 0.0, 0.0, 1.0; break;
    case 'X': m << 0.0, 1.0, 1.0, 0.0; break;
    case 'Y': m << 0.0, -i1, i1, 0.0; break;
    case 'Z': m << 1.0, 0.0, 0.0, -1.0; break;
    default:
      throw ShapeError(std::string("unknown Pauli letter '") + letter + "'");
  }
  return m;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void check_square_pauli(const Matrix& m, int subsystems, const char* what) {
  if (subsystems != 1 && subsystems != 2) {
    throw ShapeError(std::string(what) + ": subsystem count must be 1 or 2");
  }
  const Eigen::Index d = pauli_dimension(subsystems);
  if (m.rows() != d || m.cols() != d) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                     std::to_string(d) + " matrix, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

}  // namespace

ComplexMatrix pauli_string_matrix(std::string_view label) {
  if (label.empty()) throw ShapeError("empty Pauli label");
  ComplexMatrix out = single_pauli(label[0]);
  for (std::size_t k = 1; k < label.size(); ++k) {
    ComplexMatrix next = Eigen::kroneckerProduct(out, single_pauli(label[k])).eval();
    out = std::move(next);
  }
  return out;
}

std::string pauli_label(Eigen::Index index, int subsystems) {
  if (index < 0 || index >= pauli_dimension(subsystems)) {
    throw ShapeError("Pauli index out of range");
  }
  std::string label(static_cast<std::size_t>(subsystems), 'I');
  for (int k = subsystems - 1; k >= 0; --k) {
    label[static_cast<std::size_t>(k)] = kPauliLetters[index % 4];
    index /= 4;
  }
  return label;
}

ComplexMatrix lowering_operator() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

// ---------------------------------------------------------------- PauliVector

PauliVector::PauliVector(Vector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != 4 && coeffs_.size() != 16) {
    throw ShapeError("PauliVector length must be 4 or 16, got " + std::to_string(coeffs_.size()));
  }
  if (!coeffs_.allFinite()) throw NumericError("PauliVector has non-finite coefficients");
  if (std::abs(coeffs_[0] - 1.0) > 1e-9) {
    throw DomainError("PauliVector trace coefficient must be 1, got " + std::to_string(coeffs_[0]));
  }
  coeffs_[0] = 1.0;
}

PauliVector PauliVector::qubit(double x, double y, double z) {
  Vector c(4);
  c << 1.0, x, y, z;
  return PauliVector(std::move(c));
}

PauliVector PauliVector::product(const PauliVector& qubit, const PauliVector& tls) {
  if (qubit.subsystems() != 1 || tls.subsystems() != 1) {
    throw ShapeError("product expects two single-subsystem vectors");
  }
  Vector c(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) c[4 * a + b] = qubit[a] * tls[b];
  }
  return PauliVector(std::move(c));
}

ComplexMatrix PauliVector::density_matrix() const {
  const int q = subsystems();
  const Eigen::Index dim = Eigen::Index{1} << q;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) rho += coeffs_[i] * pauli_string_matrix(pauli_label(i, q));
  }
  return rho / static_cast<double>(dim);
}

// ----------------------------------------------------------- GeneratorMatrix

GeneratorMatrix::GeneratorMatrix(Matrix entries, int subsystems)
    : entries_(std::move(entries)), subsystems_(subsystems) {
  check_square_pauli(entries_, subsystems_, "GeneratorMatrix");
  if (!all_finite(entries_)) throw NumericError("GeneratorMatrix has non-finite entries");
  entries_.row(0).setZero();
}

GeneratorMatrix GeneratorMatrix::operator+(const GeneratorMatrix& other) const {
  if (other.subsystems_ != subsystems_) throw ShapeError("generator dimension mismatch");
  return GeneratorMatrix(entries_ + other.entries_, subsystems_);
}

GeneratorMatrix GeneratorMatrix::operator*(double scale) const {
  return GeneratorMatrix(entries_ * scale, subsystems_);
}

Dissipator Dissipator::from_pauli(std::string_view label, double rate) {
  return Dissipator{pauli_string_matrix(label), rate};
}

GeneratorMatrix build_generator(std::span<const PauliTerm> hamiltonian,
                                std::span<const Dissipator> dissipators, int subsystems) {
  if (subsystems != 1 && subsystems != 2) throw ShapeError("subsystem count must be 1 or 2");
  const Eigen::Index hilbert = Eigen::Index{1} << subsystems;
  const Eigen::Index d = pauli_dimension(subsystems);

  ComplexMatrix h = ComplexMatrix::Zero(hilbert, hilbert);
  for (const auto& term : hamiltonian) {
    if (term.label.size() != static_cast<std::size_t>(subsystems)) {
      throw ShapeError("Hamiltonian term '" + term.label + "' does not act on " +
                       std::to_string(subsystems) + " subsystem(s)");
    }
    if (!std::isfinite(term.coeff)) throw NumericError("non-finite Hamiltonian coefficient");
    h += term.coeff * pauli_string_matrix(term.label);
  }
  for (const auto& diss : dissipators) {
    if (!(diss.rate >= 0.0)) {
      throw DomainError("dissipator rate must be non-negative, got " + std::to_string(diss.rate));
    }
    if (diss.jump.rows() != hilbert || diss.jump.cols() != hilbert) {
      throw ShapeError("jump operator dimension does not match subsystem count");
    }
  }

  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) basis.push_back(pauli_string_matrix(pauli_label(i, subsystems)));

  const Complex minus_i(0.0, -1.0);
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const ComplexMatrix& f = basis[static_cast<std::size_t>(i)];
    ComplexMatrix image = minus_i * (h * f - f * h);
    for (const auto& diss : dissipators) {
      if (diss.rate == 0.0) continue;
      const ComplexMatrix& l = diss.jump;
      const ComplexMatrix ldl = l.adjoint() * l;
      image += diss.rate * (l * f * l.adjoint() - 0.5 * (ldl * f + f * ldl));
    }
    for (Eigen::Index j = 1; j < d; ++j) {
      // Tr[F_j A] without forming the product.
      out(j, i) = (basis[static_cast<std::size_t>(j)].transpose().cwiseProduct(image)).sum().real() /
                  static_cast<double>(hilbert);
    }
  }
  return GeneratorMatrix(std::move(out), subsystems);
}

// ------------------------------------------------------------- Superoperator

Superoperator::Superoperator(Matrix matrix, double duration)
    : matrix_(std::move(matrix)), duration_(duration) {
  const int q = matrix_.rows() == 4 ? 1 : 2;
  check_square_pauli(matrix_, q, "Superoperator");
  if (!all_finite(matrix_)) throw NumericError("Superoperator has non-finite entries");
  if (!(duration_ >= 0.0)) throw DomainError("Superoperator duration must be non-negative");
  const Vector e0 = Vector::Unit(matrix_.cols(), 0);
  if ((matrix_.row(0).transpose() - e0).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError("Superoperator does not preserve the trace coefficient");
  }
  matrix_.row(0) = e0.transpose();
}

Superoperator Superoperator::identity(int subsystems) {
  const Eigen::Index d = pauli_dimension(subsystems);
  return Superoperator(Matrix::Identity(d, d), 0.0);
}

Superoperator Superoperator::operator*(const Superoperator& rhs) const {
  if (rhs.matrix_.rows() != matrix_.rows()) throw ShapeError("superoperator dimension mismatch");
  return Superoperator(matrix_ * rhs.matrix_, duration_ + rhs.duration_);
}

PauliVector Superoperator::apply(const PauliVector& state) const {
  if (state.coeffs().size() != matrix_.cols()) throw ShapeError("state dimension mismatch");
  return PauliVector(matrix_ * state.coeffs());
}

Superoperator propagate(const GeneratorMatrix& generator, double duration) {
  if (!(duration >= 0.0)) throw DomainError("propagation time must be non-negative");
  if (!all_finite(generator.entries())) throw NumericError("generator has non-finite entries");
  const Eigen::Index d = generator.entries().rows();
  if (duration == 0.0) return Superoperator(Matrix::Identity(d, d), 0.0);
  Matrix scaled = generator.entries() * duration;
  Matrix result = scaled.exp();
  if (!all_finite(result)) throw NumericError("matrix exponential overflowed");
  return Superoperator(std::move(result), duration);
}

Superoperator z_rotation(double angle, int subsystems) {
  const Eigen::Index d = pauli_dimension(subsystems);
  const Eigen::Index stride = subsystems == 1 ? 1 : 4;
  Matrix m = Matrix::Identity(d, d);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (Eigen::Index b = 0; b < stride; ++b) {
    const Eigen::Index ix = 1 * stride + b;
    const Eigen::Index iy = 2 * stride + b;
    m(ix, ix) = c;
    m(ix, iy) = -s;
    m(iy, ix) = s;
    m(iy, iy) = c;
  }
  return Superoperator(std::move(m), 0.0);
}

// -------------------------------------------------------------- ChannelPower

ChannelPower::ChannelPower(const Superoperator& channel) : matrix_(channel.matrix()) {
  Eigen::EigenSolver<Matrix> solver(matrix_);
  if (solver.info() != Eigen::Success) return;
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  diagnostics_.spectral_radius = eigenvalues_.cwiseAbs().maxCoeff();
  diagnostics_.cptp_violation = diagnostics_.spectral_radius > 1.0 + 1e-6;

  Eigen::JacobiSVD<ComplexMatrix> svd(eigenvectors_);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  diagnostics_.eigenvector_condition =
      smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  if (diagnostics_.eigenvector_condition < 1e8) {
    eigenvector_lu_.compute(eigenvectors_);
    diagnostics_.used_eigendecomposition = true;
  }
}

PauliVector ChannelPower::apply(long n, const PauliVector& state) const {
  if (n < 0) throw DomainError("repetition count must be non-negative");
  if (state.coeffs().size() != matrix_.cols()) throw ShapeError("state dimension mismatch");
  if (n == 0) return state;
  if (!diagnostics_.used_eigendecomposition) return apply_by_squaring(n, state);

  ComplexVector coords = eigenvector_lu_.solve(state.coeffs().cast<Complex>());
  for (Eigen::Index k = 0; k < coords.size(); ++k) {
    coords[k] *= std::pow(eigenvalues_[k], static_cast<double>(n));
  }
  Vector out = (eigenvectors_ * coords).real();
  out[0] = 1.0;
  return PauliVector(std::move(out));
}

PauliVector ChannelPower::apply_by_squaring(long n, const PauliVector& state) const {
  if (n < 0) throw DomainError("repetition count must be non-negative");
  Vector v = state.coeffs();
  Matrix base = matrix_;
  while (n > 0) {
    if (n & 1) v = base * v;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return PauliVector(std::move(v));
}

PauliVector repeat_apply(const Superoperator& pseudoidentity, long n, const PauliVector& state,
                         PowerDiagnostics* diagnostics) {
  if (n < 0) throw DomainError("repetition count must be non-negative");
  ChannelPower power(pseudoidentity);
  if (diagnostics != nullptr) *diagnostics = power.diagnostics();
  return power.apply(n, state);
}

double purity(const PauliVector& state) {
  if (state.subsystems() != 1) throw ShapeError("purity expects a single-qubit state");
  return 0.5 * (1.0 + state.x() * state.x() + state.y() * state.y() + state.z() * state.z());
}

PauliVector partial_trace_tls(const PauliVector& state) {
  if (state.subsystems() != 2) throw ShapeError("partial trace expects a qubit-defect state");
  return PauliVector::qubit(state[4], state[8], state[12]);
}

}  // namespace nmq
