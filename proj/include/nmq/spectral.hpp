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

// Windowed amplitude periodogram of short, uniformly sampled complex series.

#pragma once

#include <span>
#include <vector>

#include "nmq/liouville.hpp"

namespace nmq {

struct Periodogram {
  /// Angular frequency per sample, in [-pi, pi).
  std::vector<double> omega;
  /// |sum_k w_k (z_k - mean) e^{-i omega k}| / sum_k w_k. A pure phasor
  /// A e^{i omega0 k} peaks at |A|.
  std::vector<double> amplitude;
  /// sqrt(sum w^2) / sum w: multiplies the per-sample noise std to give the
  /// noise scale of `amplitude`.
  double noise_gain = 0.0;
  /// Number of input samples.
  std::size_t samples = 0;
};

/// Hann-windowed, mean-removed DTFT on a grid of `oversample * N` frequencies.
Periodogram periodogram(std::span<const Complex> series, int oversample = 16);

struct SpectralPeak {
  double omega = 0.0;
  double amplitude = 0.0;
};

struct PeakOptions {
  /// Absolute amplitude a peak must exceed.
  double threshold = 0.0;
  /// Also require amplitude >= relative_threshold * (largest peak).
  double relative_threshold = 0.05;
  /// Peaks with |omega| below this are ignored (DC leakage). Negative means
  /// the default 4 pi / N, the Hann main-lobe half width.
  double exclusion = -1.0;
  /// A local maximum within this distance of a larger one is dropped.
  /// Negative means 4 pi / N.
  double min_separation = -1.0;
};

/// Local maxima above threshold, strongest first, with parabolic refinement
/// of the peak position.
std::vector<SpectralPeak> find_peaks(const Periodogram& spectrum, const PeakOptions& options);

}  // namespace nmq
