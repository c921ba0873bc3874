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
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "nmq/detector.hpp"
#include "nmq/errors.hpp"
#include "nmq/purity_fit.hpp"
#include "nmq/records.hpp"
#include "nmq/spectral.hpp"
#include "nmq/synthetic_lab.hpp"

namespace nmq {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> dense_n() {
  std::vector<int> n(151);
  std::iota(n.begin(), n.end(), 0);
  return n;
}

std::vector<ExperimentRecord> batch(const NoiseParams& p, std::vector<double> thetas, int shots,
                                    std::vector<int> n = default_n_values(), std::uint64_t seed = 0) {
  BatchSpec spec;
  spec.thetas = std::move(thetas);
  spec.shots = shots;
  spec.n_values = std::move(n);
  spec.seed = seed;
  return generate_batch(p, spec);
}

QubitTLSParams tls(double dw, double nu) {
  QubitTLSParams p;
  p.markovian = {dw, 0.0005, 0.001};
  p.nu_zx = nu;
  return p;
}

TEST(Periodogram, PurePhasorPeaksAtItsAmplitude) {
  std::vector<Complex> z(64);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = 0.7 * std::polar(1.0, 0.9 * static_cast<double>(k));
  const auto spec = periodogram(z, 32);
  PeakOptions opt;
  opt.threshold = 0.1;
  const auto peaks = find_peaks(spec, opt);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(peaks[0].omega, 0.9, 2e-3);
  EXPECT_NEAR(peaks[0].amplitude, 0.7, 0.01);
}

TEST(PurityModel, ValuesAtOrigin) {
  EXPECT_DOUBLE_EQ(purity_model(0.01, 0.001, 0.0, 0.0, 8.0), 1.0);
  // Full dephasing without recovery leaves the maximally mixed state.
  EXPECT_NEAR(purity_model(0.0, 1.0, 0.0, 1000.0, 8.0), 0.5, 1e-12);
}

TEST(PurityFit, RecoversTlsFrequency) {
  // Idle qubit-defect purity oscillates at nu / pi per gate unit.
  const double nu = 0.05;
  QubitTLSParams p;
  p.nu_zx = nu;
  const auto fit = fit_purity(batch(p, {}, 0, dense_n()), 0.0);
  EXPECT_NEAR(fit.f_p / (nu / kPi), 1.0, 0.01);
  EXPECT_LT(fit.residual, 1e-6);
}

TEST(PurityFit, MarkovianDataIsNotSignificant) {
  const MarkovianParams p{0.003, 0.0005, 0.002};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fit = fit_purity(batch(p, {kPi}, 1024, default_n_values(), seed), kPi);
    EXPECT_LE(fit.z_score, 3.0) << "seed " << seed;
  }
}

TEST(PurityFit, RejectsBadInput) {
  ObservableSeries s;
  s.n = {0, 1, 2};
  s.x = s.y = s.z = {1.0, 1.0, 1.0};
  EXPECT_THROW(fit_purity(s, 8.0), DataError);
  s.n.push_back(3);
  s.x.push_back(1.0);
  s.y.push_back(0.0);
  s.z.push_back(0.0);
  EXPECT_THROW(fit_purity(s, 0.0), DomainError);
}

TEST(Detector, TlsShowsTwoFrequencies) {
  const double dw = 0.02;
  const double nu = 0.05;
  const auto report = detect_nonmarkovianity(batch(tls(dw, nu), {}, 0, dense_n()), 0.0);
  EXPECT_EQ(report.frequency_count, 2);
  ASSERT_GE(report.peaks.size(), 2u);
  std::vector<double> found{std::abs(report.peaks[0].omega), std::abs(report.peaks[1].omega)};
  std::sort(found.begin(), found.end());
  EXPECT_NEAR(found[0], 2.0 * (nu - dw) * 8.0, 0.02);
  EXPECT_NEAR(found[1], 2.0 * (nu + dw) * 8.0, 0.02);
  EXPECT_EQ(report.verdict, Verdict::non_markovian);
}

TEST(Detector, MarkovianIsConsistent) {
  const MarkovianParams p{0.003, 0.0005, 0.002};
  const auto report = detect_nonmarkovianity(batch(p, {kPi}, 1024), kPi);
  EXPECT_EQ(report.verdict, Verdict::markovian_consistent) << report.note;
  EXPECT_LE(report.frequency_count, 1);
}

TEST(Detector, FullTurnHidesTheDefect) {
  const auto report = detect_nonmarkovianity(batch(tls(0.003, 0.006), {2 * kPi}, 1024), 2 * kPi);
  EXPECT_EQ(report.verdict, Verdict::markovian_consistent) << report.note;
}

TEST(Detector, ShortSeriesIsInconclusive) {
  const auto report =
      detect_nonmarkovianity(batch(tls(0.003, 0.006), {}, 1024, {0, 10, 20, 30, 40}), 0.0);
  EXPECT_EQ(report.verdict, Verdict::inconclusive);
  EXPECT_FALSE(report.note.empty());
}

TEST(Detector, NoiseFloorScalesWithShots) {
  const MarkovianParams p{0.003, 0.0005, 0.002};
  const auto report = detect_nonmarkovianity(batch(p, {}, 1024), 0.0);
  EXPECT_NEAR(report.noise_floor, 1.0 / std::sqrt(1024.0) / 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(detect_nonmarkovianity(batch(p, {}, 0), 0.0).noise_floor, 0.0);
}

TEST(MarkovianForm, ExactMarkovianFitsWell) {
  const MarkovianParams p{0.004, 0.0005, 0.002};
  const auto series = collect_series(batch(p, {3 * kPi / 5}, 0), 3 * kPi / 5);
  EXPECT_LT(fit_markovian_form(series, {}).rms, 1e-3);
  ObservableSeries tiny = series;
  tiny.n.resize(4);
  tiny.x.resize(4);
  tiny.y.resize(4);
  tiny.z.resize(4);
  EXPECT_THROW(fit_markovian_form(tiny, {}), DataError);
}

}  // namespace
}  // namespace nmq
