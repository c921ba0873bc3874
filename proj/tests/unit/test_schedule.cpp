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
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "nmq/errors.hpp"
#include "nmq/schedule.hpp"
#include "test_support.hpp"

namespace nmq {
namespace {

constexpr double kPi = std::numbers::pi;

double distance_to_identity(const ComplexMatrix& u) {
  const Complex phase = u(0, 0) / std::abs(u(0, 0));
  return (u / phase - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
}

PseudoidentitySchedule schedule_for(double theta, std::vector<int> n = default_n_values()) {
  PseudoidentitySchedule s;
  s.theta_full = theta;
  s.n_values = std::move(n);
  return s;
}

TEST(Pseudoidentity, IdleSequenceIsEightEmptyGates) {
  const auto gates = build_pseudoidentity(0.0, 4);
  int drives = 0;
  double duration = 0.0;
  for (const auto& g : gates) {
    if (g.kind == GateKind::drive_x) {
      ++drives;
      EXPECT_DOUBLE_EQ(g.theta, 0.0);
    }
    duration += g.duration;
  }
  EXPECT_EQ(drives, 8);
  EXPECT_DOUBLE_EQ(duration, 8.0);
  EXPECT_THROW(build_pseudoidentity(kPi, 0), DomainError);
}

TEST(Pseudoidentity, DurationIsIndependentOfAngle) {
  for (double theta : default_theta_grid()) {
    for (int m : {1, 3, 4}) {
      double duration = 0.0;
      for (const auto& g : build_pseudoidentity(theta, m)) duration += g.duration;
      EXPECT_DOUBLE_EQ(duration, 2.0 * m);
    }
  }
}

TEST(Pseudoidentity, NoiselessCompositeIsIdentity) {
  for (double theta : default_theta_grid()) {
    EXPECT_LT(distance_to_identity(composite_unitary(build_pseudoidentity(theta, 4))), 1e-12);
    const auto lambda = schedule_superoperator(MarkovianParams{}, schedule_for(theta));
    EXPECT_LT((lambda.matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pseudoidentity, OverRotationCancels) {
  // X(a) followed by X(-a) is the identity for any a, so a relative
  // over-rotation leaves no deviation at all (in particular O(eps^2)).
  for (double theta : default_theta_grid()) {
    const auto gates = build_pseudoidentity(theta, 4);
    for (double eps : {0.04, 0.02, 0.01}) {
      EXPECT_LT(distance_to_identity(composite_unitary(gates, {0.0, eps})), 1e-14) << theta;
    }
  }
}

TEST(Pseudoidentity, FullTurnPhaseErrorIsThirdOrder) {
  const auto gates = build_pseudoidentity(2 * kPi, 4);
  for (double eps : {0.05, 0.02, 0.01}) {
    // Z coefficient eps times the drive amplitude of each gate.
    const auto u = composite_unitary(gates, {drive_amplitude(2 * kPi / 4) * eps, 0.0});
    const double phase = 0.5 * std::abs(std::arg(u(1, 1) / u(0, 0)));
    EXPECT_NEAR(phase / (kPi * eps * eps * eps), 1.0, 0.2) << eps;
    EXPECT_LT(std::abs(u(0, 1)), 50.0 * std::pow(eps, 5));
  }
}

TEST(Pseudoidentity, FrameFlipEqualsNegatedDrive) {
  MarkovianParams p{0.013, 0.001, 0.002};
  const double theta = 3 * kPi / 5;
  const auto mirrored = gates_superoperator(p, build_pseudoidentity(theta, 4));
  Superoperator manual = Superoperator::identity(1);
  const double drive = drive_amplitude(theta / 4);
  const auto first = propagate(markovian_generator(p, drive), 1.0);
  for (int k = 0; k < 4; ++k) manual = first * manual;
  manual = z_rotation(kPi, 1) * manual;
  for (int k = 0; k < 4; ++k) manual = first * manual;
  manual = z_rotation(kPi, 1) * manual;
  EXPECT_LT((mirrored.matrix() - manual.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  // Conjugating by Z(pi) maps X to -X: the second half acts as X(-theta).
  Superoperator second_half = Superoperator::identity(1);
  const auto flipped = propagate(markovian_generator(p, -drive), 1.0);
  for (int k = 0; k < 4; ++k) second_half = flipped * second_half;
  Superoperator first_half = Superoperator::identity(1);
  for (int k = 0; k < 4; ++k) first_half = first * first_half;
  EXPECT_LT((mirrored.matrix() - (second_half * first_half).matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ScheduleSuperoperator, IdlePhaseErrorIsZRotation) {
  const auto lambda = schedule_superoperator(MarkovianParams{0.01, 0.0, 0.0}, schedule_for(0.0));
  const auto expected = z_rotation(2 * 0.01 * 8, 1);
  EXPECT_LT((lambda.matrix() - expected.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ScheduleSuperoperator, PMMEIsUnsupported) {
  EXPECT_THROW(schedule_superoperator(PMMEParams{}, schedule_for(0.0)), UnsupportedModelError);
}

TEST(PredictTrajectory, NoiselessStaysOnPlusState) {
  const auto traj = predict_trajectory(MarkovianParams{}, schedule_for(kPi));
  for (const auto& [n, b] : traj) {
    EXPECT_NEAR(b.x, 1.0, 1e-12);
    EXPECT_NEAR(b.y, 0.0, 1e-12);
    EXPECT_NEAR(b.z, 0.0, 1e-12);
  }
}

TEST(PredictTrajectory, IdleMarkovianClosedForm) {
  const auto traj = predict_trajectory(MarkovianParams{0.01, 0.0, 0.001}, schedule_for(0.0));
  for (const auto& [n, b] : traj) {
    EXPECT_NEAR(b.x, std::exp(-2 * 0.001 * 8 * n) * std::cos(2 * 0.01 * 8 * n), 1e-12);
  }
}

TEST(PredictTrajectory, IdleDefectPurity) {
  QubitTLSParams p;
  p.nu_zx = 0.05;
  std::vector<int> n;
  for (int k = 0; k <= 40; ++k) n.push_back(k);
  const auto traj = predict_trajectory(p, schedule_for(0.0, n));
  for (const auto& [k, b] : traj) {
    const double c = std::cos(0.8 * k);
    EXPECT_NEAR(0.5 * (1 + b.x * b.x + b.y * b.y + b.z * b.z), 0.5 + 0.5 * c * c, 1e-12);
  }
}

TEST(PredictTrajectory, IdleFastPathAgreesWithChannelComposition) {
  QubitTLSParams p;
  p.markovian = {0.004, 0.0007, 0.002};
  p.nu_zx = 0.012;
  p.kappa = 0.01;
  const auto s = schedule_for(0.0);
  const auto fast = predict_trajectory(p, s);
  const auto initial = PauliVector::product(PauliVector::plus_state(), PauliVector::qubit(0, 0, 1));
  const auto slow = trajectory_from_channel(schedule_superoperator(p, s), s.n_values, initial);
  for (int n : s.n_values) {
    EXPECT_NEAR(fast.at(n).x, slow.at(n).x, 1e-10);
    EXPECT_NEAR(fast.at(n).y, slow.at(n).y, 1e-10);
    EXPECT_NEAR(fast.at(n).z, slow.at(n).z, 1e-10);
  }
}

TEST(PredictTrajectory, MatchesReferenceIntegration) {
  for (const auto& c : testing::oracles().at("pseudoidentity")) {
    const NoiseParams params = params_from_json(c.at("params"));
    PseudoidentitySchedule s;
    s.theta_full = c.at("theta_full").get<double>();
    s.m = c.at("m").get<int>();
    for (const auto& [key, value] : c.at("trajectory").items()) s.n_values.push_back(std::stoi(key));
    std::sort(s.n_values.begin(), s.n_values.end());
    const auto traj = predict_trajectory(params, s);
    for (const auto& [key, value] : c.at("trajectory").items()) {
      const auto b = value.get<std::vector<double>>();
      const auto& p = traj.at(std::stoi(key));
      EXPECT_NEAR(p.x, b[0], 1e-8) << c.at("name") << " n=" << key;
      EXPECT_NEAR(p.y, b[1], 1e-8) << c.at("name") << " n=" << key;
      EXPECT_NEAR(p.z, b[2], 1e-8) << c.at("name") << " n=" << key;
    }
  }
}

TEST(PredictTrajectory, FullTurnHidesDefectCoupling) {
  QubitTLSParams p;
  p.nu_zx = 0.05;
  const auto idle = predict_trajectory(p, schedule_for(0.0));
  const auto full = predict_trajectory(p, schedule_for(2 * kPi));
  double idle_dev = 0.0;
  double full_dev = 0.0;
  for (int n : default_n_values()) {
    idle_dev = std::max(idle_dev, std::abs(idle.at(n).x - 1.0));
    full_dev = std::max(full_dev, std::abs(full.at(n).x - 1.0));
  }
  EXPECT_GT(idle_dev, 1.0);
  EXPECT_LT(full_dev, 0.05 * idle_dev);
}

TEST(Schedule, ValidationAndDefaults) {
  EXPECT_EQ(default_n_values().size(), 16u);
  EXPECT_EQ(default_n_values().back(), 150);
  EXPECT_EQ(default_theta_grid().size(), 16u);
  EXPECT_NEAR(default_theta_grid().back(), 3 * kPi, 1e-15);
  auto s = schedule_for(kPi, {0, 10, 10});
  EXPECT_THROW(validate(s), DomainError);
  s.n_values = {-1, 0};
  EXPECT_THROW(validate(s), DomainError);
  s.n_values = {0, 5};
  s.bases.clear();
  EXPECT_THROW(validate(s), DomainError);
  EXPECT_EQ(parse_basis("Y"), Basis::Y);
  EXPECT_THROW(parse_basis("W"), DomainError);
}

}  // namespace
}  // namespace nmq
