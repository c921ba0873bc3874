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
#include <vector>

#include <gtest/gtest.h>

#include "nmq/errors.hpp"
#include "nmq/noise_models.hpp"

namespace nmq {
namespace {

std::vector<double> grid(double step, double t_max) {
  std::vector<double> t;
  const int count = static_cast<int>(std::lround(t_max / step));
  for (int k = 0; k <= count; ++k) t.push_back(k * step);
  return t;
}

double max_deviation(const PMMEParams& p, double step, double t_max) {
  const auto t = grid(step, t_max);
  const auto numeric = pmme_numeric_oracle(p, t);
  double dev = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto exact = pmme_idle_analytic(p, t[k]);
    dev = std::max({dev, std::abs(numeric[k].x() - exact.x()), std::abs(numeric[k].y() - exact.y()),
                    std::abs(numeric[k].z() - exact.z())});
  }
  return dev;
}

TEST(PMMEOracle, MarkovianLimitIsExponential) {
  PMMEParams p;
  p.markovian = {0.03, 0.002, 0.004};
  EXPECT_LT(max_deviation(p, 0.01, 40.0), 1e-6);
}

TEST(PMMEOracle, GenericParametersMatchClosedForm) {
  PMMEParams p;
  p.markovian = {0.1, 0.0, 0.01};
  p.gamma_z = 0.005;
  p.b = 0.02;
  EXPECT_LT(max_deviation(p, 0.01, 50.0), 1e-6);
}

TEST(PMMEOracle, TiedKernelMatchesClosedForm) {
  PMMEParams p;
  p.markovian = {0.02, 0.0, 0.003};
  p.gamma_z = 0.008;
  p.b = -0.016;
  EXPECT_LT(max_deviation(p, 0.01, 50.0), 1e-6);
}

TEST(PMMEOracle, HalvingTheStepReducesTheError) {
  PMMEParams p;
  p.markovian = {0.05, 0.001, 0.004};
  p.gamma_z = 0.01;
  p.b = 0.03;
  const double coarse = max_deviation(p, 0.02, 40.0);
  const double fine = max_deviation(p, 0.01, 40.0);
  EXPECT_GE(coarse / fine, 3.0);
}

TEST(PMMEOracle, RejectsBadGrids) {
  PMMEParams p;
  EXPECT_THROW(pmme_numeric_oracle(p, std::vector<double>{0.0, 0.1, 0.2}), DomainError);
  EXPECT_THROW(pmme_numeric_oracle(p, std::vector<double>{0.0, 0.01, 0.03}), DomainError);
  EXPECT_THROW(pmme_numeric_oracle(p, std::vector<double>{0.005, 0.015}), DomainError);
}

TEST(PMMEOracle, GridMayStartLate) {
  PMMEParams p;
  p.markovian = {0.02, 0.0, 0.001};
  p.gamma_z = 0.003;
  p.b = 0.01;
  std::vector<double> t;
  for (int k = 100; k <= 200; ++k) t.push_back(0.01 * k);
  const auto out = pmme_numeric_oracle(p, t);
  ASSERT_EQ(out.size(), t.size());
  EXPECT_NEAR(out.back().x(), pmme_idle_analytic(p, 2.0).x(), 1e-6);
}

}  // namespace
}  // namespace nmq
