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

// Pauli-basis (Pauli transfer matrix) representation of states, Lindblad
// generators and channels for one qubit (q = 1) or a qubit coupled to a
// two-level defect (q = 2).
//
// A state of q two-level subsystems is stored as the real coefficient vector
// c of length 4^q with rho = sum_i c_i F_i / 2^q, where F_i runs over the
// tensor products of {I, X, Y, Z} in lexicographic order (first factor is the
// qubit). With this normalisation c_0 = 1 and c_i = Tr[F_i rho], so the qubit
// observables <X>, <Y>, <Z> are read off directly.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nmq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Number of Pauli coefficients for q two-level subsystems.
constexpr Eigen::Index pauli_dimension(int subsystems) { return Eigen::Index{1} << (2 * subsystems); }

/// Matrix of a Pauli string such as "Z", "ZX" or "IZ" (first letter acts on
/// the qubit). Throws ShapeError on an unknown letter.
ComplexMatrix pauli_string_matrix(std::string_view label);

/// Label of the i-th basis element for q subsystems, e.g. index 7 -> "XZ".
std::string pauli_label(Eigen::Index index, int subsystems);

class PauliVector {
 public:
  PauliVector() : PauliVector(Vector::Unit(4, 0)) {}

  /// Takes ownership of a coefficient vector of length 4 or 16.
  /// Throws ShapeError on other lengths and DomainError if c_0 != 1.
  explicit PauliVector(Vector coeffs);

  static PauliVector qubit(double x, double y, double z);
  /// |+> on the qubit.
  static PauliVector plus_state() { return qubit(1.0, 0.0, 0.0); }
  /// rho_qubit (x) rho_tls.
  static PauliVector product(const PauliVector& qubit, const PauliVector& tls);

  int subsystems() const { return coeffs_.size() == 4 ? 1 : 2; }
  const Vector& coeffs() const { return coeffs_; }
  double operator[](Eigen::Index i) const { return coeffs_[i]; }

  // Single-qubit Bloch components (q = 1 only).
  double x() const { return coeffs_[1]; }
  double y() const { return coeffs_[2]; }
  double z() const { return coeffs_[3]; }

  /// Reconstructed density matrix (2^q x 2^q).
  ComplexMatrix density_matrix() const;

 private:
  Vector coeffs_;
};

/// Hamiltonian term coeff * P(label) (coefficients in rad per gate unit).
struct PauliTerm {
  std::string label;
  double coeff = 0.0;
};

/// Lindblad jump operator with rate, contributing
/// rate * (L rho L^dag - {L^dag L, rho} / 2).
struct Dissipator {
  ComplexMatrix jump;
  double rate = 0.0;

  static Dissipator from_pauli(std::string_view label, double rate);
};

/// Amplitude-damping jump operator |0><1|.
ComplexMatrix lowering_operator();

/// Real matrix l = -i h + D acting on Pauli coefficient vectors, dc/dt = l c.
class GeneratorMatrix {
 public:
  GeneratorMatrix() = default;
  /// Throws ShapeError if the matrix is not 4^q square, NumericError if it
  /// holds non-finite values. Row 0 is forced to zero.
  GeneratorMatrix(Matrix entries, int subsystems);

  const Matrix& entries() const { return entries_; }
  int subsystems() const { return subsystems_; }

  GeneratorMatrix operator+(const GeneratorMatrix& other) const;
  GeneratorMatrix operator*(double scale) const;

 private:
  Matrix entries_ = Matrix::Zero(4, 4);
  int subsystems_ = 1;
};

/// Builds the Pauli-basis generator of
///   d rho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
/// with entries l_ji = Tr[F_j L(F_i)] / 2^q.
///
/// Throws DomainError for negative rates and ShapeError when a Pauli label or a
/// jump operator does not match q.
GeneratorMatrix build_generator(std::span<const PauliTerm> hamiltonian,
                                std::span<const Dissipator> dissipators,
                                int subsystems);

/// A fixed channel on Pauli vectors; row 0 is exactly (1, 0, ..., 0).
class Superoperator {
 public:
  Superoperator() = default;
  /// Throws ShapeError on bad dimensions and DomainError if row 0 deviates
  /// from (1, 0, ..., 0) by more than 1e-9 (the row is then set exactly).
  Superoperator(Matrix matrix, double duration);

  static Superoperator identity(int subsystems);

  const Matrix& matrix() const { return matrix_; }
  double duration() const { return duration_; }
  int subsystems() const { return matrix_.rows() == 4 ? 1 : 2; }

  /// Composition: (a * b) applies b first, then a. Durations add.
  Superoperator operator*(const Superoperator& rhs) const;

  PauliVector apply(const PauliVector& state) const;

 private:
  Matrix matrix_ = Matrix::Identity(4, 4);
  double duration_ = 0.0;
};

/// exp(l * duration), computed by Pade scaling and squaring.
/// Throws DomainError for negative durations and NumericError for
/// non-finite generators.
Superoperator propagate(const GeneratorMatrix& generator, double duration);

/// Instantaneous rotation of the qubit frame about z by `angle`
/// (a virtual Z gate), acting as identity on the defect.
Superoperator z_rotation(double angle, int subsystems);

struct PowerDiagnostics {
  bool used_eigendecomposition = false;
  double eigenvector_condition = 0.0;
  double spectral_radius = 0.0;
  /// Some eigenvalue has |lambda| > 1 + 1e-6: the channel is not CPTP.
  bool cptp_violation = false;
};

/// Cached powers of one channel. Uses Lambda^n = U V^n U^-1 when the
/// eigenvector matrix is well conditioned (cond < 1e8) and falls back to
/// binary exponentiation otherwise.
class ChannelPower {
 public:
  explicit ChannelPower(const Superoperator& channel);

  PauliVector apply(long n, const PauliVector& state) const;
  /// Result of n-fold application with the multiplication route regardless
  /// of conditioning.
  PauliVector apply_by_squaring(long n, const PauliVector& state) const;

  const PowerDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  Matrix matrix_;
  ComplexVector eigenvalues_;
  ComplexMatrix eigenvectors_;
  Eigen::PartialPivLU<ComplexMatrix> eigenvector_lu_;
  PowerDiagnostics diagnostics_;
};

/// n-fold application of `pseudoidentity` to `state`. Throws DomainError for
/// n < 0. Diagnostics (path taken, CPTP violation) are written when requested.
PauliVector repeat_apply(const Superoperator& pseudoidentity, long n, const PauliVector& state,
                         PowerDiagnostics* diagnostics = nullptr);

/// Tr[rho^2] = (1 + x^2 + y^2 + z^2) / 2. Throws ShapeError unless q = 1.
double purity(const PauliVector& state);

/// Qubit marginal of a qubit (x) defect state. Throws ShapeError unless q = 2.
PauliVector partial_trace_tls(const PauliVector& state);

}  // namespace nmq
