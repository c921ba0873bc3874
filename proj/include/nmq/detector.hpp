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

// Signatures that a repeated channel cannot be a fixed Markovian map:
//
//  * an oscillating purity (a Markovian channel applied n times gives a
//    purity that cannot revive periodically),
//  * more than one oscillation frequency in <X> + i<Y>,
//  * a poor fit of the Markovian form g0 + r^n (g1 cos n theta + g2 sin n theta) + g3 d^n,
//    with r, theta, d shared by the three bases.
//
// A significant purity oscillation is decisive on its own. Otherwise the
// verdict is non-Markovian only when the spectrum has several lines and the
// Markovian form also fails; one of the two alone is inconclusive.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nmq/purity_fit.hpp"
#include "nmq/records.hpp"
#include "nmq/spectral.hpp"

namespace nmq {

enum class Verdict { markovian_consistent, non_markovian, inconclusive };

std::string_view verdict_name(Verdict verdict);

struct DetectorConfig {
  int m = 4;
  /// Peaks must exceed this many times the shot-noise floor.
  double peak_factor = 5.0;
  double relative_peak = 0.05;
  double z_threshold = 3.0;
  /// Residual is large above residual_factor * sigma_shot + residual_floor.
  double residual_factor = 1.5;
  double residual_floor = 2e-3;
  int min_points = 8;
  int oversample = 16;
};

struct DetectorReport {
  double theta_full = 0.0;
  Verdict verdict = Verdict::inconclusive;
  PurityFit purity;
  /// Distinct |omega| among the dominant peaks.
  int frequency_count = 0;
  /// Peaks in rad per sample of the (possibly resampled) series.
  std::vector<SpectralPeak> peaks;
  /// n spacing of the spectral series.
  int sample_step = 1;
  /// 2 sqrt(p (1 - p) / shots) / sqrt(N) at p = 1/2; 0 for exact data.
  double noise_floor = 0.0;
  /// RMS over the three bases of the best Markovian-form fit.
  double markovian_form_residual = 0.0;
  double residual_threshold = 0.0;
  /// Number of the three signatures present.
  int votes = 0;
  std::string note;
};

/// Never throws on short input: fewer than `min_points` samples after
/// interpolation gives an inconclusive report.
DetectorReport detect_nonmarkovianity(const ObservableSeries& series, const DetectorConfig& config = {});

DetectorReport detect_nonmarkovianity(const std::vector<ExperimentRecord>& records, double theta_full,
                                      const DetectorConfig& config = {});

struct MarkovianFormFit {
  double r = 0.0;
  double theta = 0.0;
  double d = 0.0;
  /// sqrt(SS / (3 N)).
  double rms = 0.0;
};

/// Best fit of the single-frequency Markovian form, seeded with `theta_seeds`
/// (rad per unit n) plus a regular grid.
MarkovianFormFit fit_markovian_form(const ObservableSeries& series, const std::vector<double>& theta_seeds);

}  // namespace nmq
