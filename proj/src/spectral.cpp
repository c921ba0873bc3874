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

#include "nmq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nmq/errors.hpp"

namespace nmq {

Periodogram periodogram(std::span<const Complex> series, int oversample) {
  const std::size_t n = series.size();
  if (n < 2) throw DataError("periodogram needs at least 2 samples");
  if (oversample < 1) throw DomainError("oversample must be positive");
  const double pi = std::numbers::pi;

  Complex mean(0.0, 0.0);
  for (const auto& z : series) mean += z;
  mean /= static_cast<double>(n);

  std::vector<double> w(n);
  double wsum = 0.0;
  double w2sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    wsum += w[k];
    w2sum += w[k] * w[k];
  }

  Periodogram out;
  out.samples = n;
  out.noise_gain = std::sqrt(w2sum) / wsum;
  const std::size_t bins = static_cast<std::size_t>(oversample) * n;
  out.omega.resize(bins);
  out.amplitude.resize(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    const double omega = -pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(bins);
    const Complex step = std::polar(1.0, -omega);
    Complex phase(1.0, 0.0);
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      acc += w[k] * (series[k] - mean) * phase;
      phase *= step;
    }
    out.omega[j] = omega;
    out.amplitude[j] = std::abs(acc) / wsum;
  }
  return out;
}

std::vector<SpectralPeak> find_peaks(const Periodogram& spectrum, const PeakOptions& options) {
  const std::size_t bins = spectrum.omega.size();
  if (bins < 3) return {};
  const double pi = std::numbers::pi;
  const double lobe = 4.0 * pi / static_cast<double>(spectrum.samples);
  const double exclusion = options.exclusion < 0.0 ? lobe : options.exclusion;
  const double separation = options.min_separation < 0.0 ? lobe : options.min_separation;
  const double bin_width = 2.0 * pi / static_cast<double>(bins);

  std::vector<SpectralPeak> candidates;
  for (std::size_t j = 0; j < bins; ++j) {
    const double a = spectrum.amplitude[j];
    const double left = spectrum.amplitude[(j + bins - 1) % bins];
    const double right = spectrum.amplitude[(j + 1) % bins];
    if (!(a > left && a >= right)) continue;
    // Parabolic interpolation of the peak on the three bins.
    const double denom = left - 2.0 * a + right;
    const double shift = denom != 0.0 ? 0.5 * (left - right) / denom : 0.0;
    double omega = spectrum.omega[j] + shift * bin_width;
    if (omega >= pi) omega -= 2.0 * pi;
    if (omega < -pi) omega += 2.0 * pi;
    if (std::abs(omega) < exclusion) continue;
    candidates.push_back({omega, a - 0.25 * (left - right) * shift});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.amplitude > b.amplitude; });

  std::vector<SpectralPeak> peaks;
  const double largest = candidates.empty() ? 0.0 : candidates.front().amplitude;
  for (const auto& c : candidates) {
    if (c.amplitude <= options.threshold || c.amplitude < options.relative_threshold * largest) continue;
    const bool shadowed = std::any_of(peaks.begin(), peaks.end(), [&](const SpectralPeak& p) {
      double d = std::abs(p.omega - c.omega);
      d = std::min(d, 2.0 * pi - d);
      return d < separation;
    });
    if (!shadowed) peaks.push_back(c);
  }
  return peaks;
}

}  // namespace nmq
