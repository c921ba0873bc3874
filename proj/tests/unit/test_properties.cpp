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

// Randomised invariants over many parameter draws.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nmq/liouville.hpp"
#include "nmq/noise_models.hpp"
#include "nmq/schedule.hpp"

namespace nmq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDraws = 200;

struct Draws {
  std::mt19937_64 rng{20260101};
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  MarkovianParams markovian() { return {uniform(-0.05, 0.05), uniform(0.0, 0.02), uniform(0.0, 0.02)}; }
  QubitTLSParams tls() { return {markovian(), uniform(0.0, 0.1), uniform(0.0, 0.02)}; }
  double theta() { return kPi / 5 * std::uniform_int_distribution<int>(0, 15)(rng); }
  PauliVector bloch_state() {
    Vector v = Vector::Zero(3);
    for (int k = 0; k < 3; ++k) v[k] = std::normal_distribution<double>()(rng);
    v *= uniform(0.0, 1.0) / v.norm();
    return PauliVector::qubit(v[0], v[1], v[2]);
  }
};

// Choi matrix sum_ab |a><b| (x) Lambda(|a><b|) of a Pauli transfer matrix.
ComplexMatrix choi(const Superoperator& channel) {
  const int q = channel.subsystems();
  const Eigen::Index d = Eigen::Index{1} << q;
  const Eigen::Index dim = pauli_dimension(q);
  std::vector<ComplexMatrix> paulis;
  for (Eigen::Index k = 0; k < dim; ++k) paulis.push_back(pauli_string_matrix(pauli_label(k, q)));
  const Matrix& r = channel.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      ComplexMatrix image = ComplexMatrix::Zero(d, d);
      for (Eigen::Index k = 0; k < dim; ++k) {
        const Complex coeff = paulis[static_cast<std::size_t>(k)](b, a) / static_cast<double>(d);
        if (coeff == Complex(0.0, 0.0)) continue;
        for (Eigen::Index l = 0; l < dim; ++l) image += coeff * r(l, k) * paulis[static_cast<std::size_t>(l)];
      }
      out.block(a * d, b * d, d, d) = image;
    }
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues().minCoeff();
}

PseudoidentitySchedule schedule(double theta) {
  PseudoidentitySchedule s;
  s.theta_full = theta;
  s.n_values = {0, 1, 7, 40};
  return s;
}

TEST(Properties, PseudoidentityChannelsAreCompletelyPositive) {
  Draws draws;
  for (int k = 0; k < kDraws / 4; ++k) {
    const double theta = draws.theta();
    EXPECT_GT(min_eigenvalue(choi(schedule_superoperator(draws.markovian(), schedule(theta)))), -1e-10);
    EXPECT_GT(min_eigenvalue(choi(schedule_superoperator(draws.tls(), schedule(theta)))), -1e-10);
  }
}

TEST(Properties, TracePreservingFirstRow) {
  Draws draws;
  for (int k = 0; k < kDraws; ++k) {
    const auto channel = schedule_superoperator(draws.tls(), schedule(draws.theta()));
    const Matrix& m = channel.matrix();
    EXPECT_NEAR(m(0, 0), 1.0, 1e-12);
    EXPECT_LT(m.row(0).tail(m.cols() - 1).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Properties, TrajectoriesStayInBlochBall) {
  Draws draws;
  for (int k = 0; k < kDraws; ++k) {
    const double theta = draws.theta();
    const NoiseParams p = k % 2 == 0 ? NoiseParams(draws.markovian()) : NoiseParams(draws.tls());
    for (const auto& [n, b] : predict_trajectory(p, schedule(theta))) {
      EXPECT_LE(b.x * b.x + b.y * b.y + b.z * b.z, 1.0 + 1e-10) << "n " << n;
    }
    const auto channel = schedule_superoperator(draws.markovian(), schedule(theta));
    const auto out = channel.apply(draws.bloch_state());
    EXPECT_LE(out.x() * out.x() + out.y() * out.y() + out.z() * out.z(), 1.0 + 1e-10);
  }
}

TEST(Properties, CompositionIsAssociative) {
  Draws draws;
  for (int k = 0; k < kDraws / 4; ++k) {
    const auto a = propagate(markovian_generator(draws.markovian(), draws.uniform(-1, 1)), draws.uniform(0, 3));
    const auto b = propagate(markovian_generator(draws.markovian(), draws.uniform(-1, 1)), draws.uniform(0, 3));
    const auto c = z_rotation(draws.uniform(-kPi, kPi), 1);
    EXPECT_LT((((a * b) * c).matrix() - (a * (b * c)).matrix()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(((a * b) * c).duration(), a.duration() + b.duration(), 1e-15);
  }
}

TEST(Properties, PowersAgreeWithRepeatedSquaring) {
  Draws draws;
  for (int k = 0; k < kDraws / 4; ++k) {
    const auto channel = schedule_superoperator(draws.tls(), schedule(draws.theta()));
    const ChannelPower power(channel);
    const auto start = PauliVector::product(PauliVector::plus_state(), PauliVector::qubit(0, 0, 1));
    const long n = std::uniform_int_distribution<long>(0, 200)(draws.rng);
    EXPECT_LT((power.apply(n, start).coeffs() - power.apply_by_squaring(n, start).coeffs()).cwiseAbs().maxCoeff(),
              1e-9);
  }
}

TEST(Properties, PurityNeverExceedsOne) {
  Draws draws;
  for (int k = 0; k < kDraws / 4; ++k) {
    const auto channel = schedule_superoperator(draws.tls(), schedule(draws.theta()));
    auto state = PauliVector::product(PauliVector::plus_state(), PauliVector::qubit(0, 0, 1));
    for (int n = 0; n < 30; ++n) {
      state = channel.apply(state);
      // Tr rho^2 = |c|^2 / 4 for the two-qubit Pauli coefficients.
      EXPECT_LE(state.coeffs().squaredNorm() / 4.0, 1.0 + 1e-10);
      EXPECT_LE(purity(partial_trace_tls(state)), 1.0 + 1e-10);
    }
  }
}

TEST(Properties, PmmeMapFormulas) {
  Draws draws;
  for (int k = 0; k < kDraws; ++k) {
    const auto tls = draws.tls();
    const auto pmme = map_qubit_tls_to_pmme(tls);
    EXPECT_NEAR(pmme.gamma_z, 2.0 * tls.nu_zx * tls.nu_zx, 1e-15);
    EXPECT_NEAR(pmme.b, tls.kappa / 2.0 - 4.0 * tls.nu_zx * tls.nu_zx, 1e-15);
  }
}

}  // namespace
}  // namespace nmq
