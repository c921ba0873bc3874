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

// Synthetic pseudoidentity experiments: finite-shot sampling, batches that
// pair a driven schedule with its idle reference, and multi-day campaigns
// whose noise parameters drift between batches.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nmq/noise_models.hpp"
#include "nmq/schedule.hpp"

namespace nmq {

struct ExperimentRecord {
  std::string batch_id;
  std::int64_t timestamp = 0;
  double theta_full = 0.0;
  int n = 0;
  Basis basis = Basis::X;
  /// 0 marks an exact (infinite-shot) value.
  int shots = 0;
  double expval = 0.0;
};

using Rng = std::mt19937_64;

/// SplitMix64 mix of (seed, batch, record); independent streams per record.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t batch, std::uint64_t record);

/// 2k/shots - 1 with k ~ Binomial(shots, (1 + expval)/2). shots == 0 returns
/// expval unchanged. Throws DomainError if expval is outside [-1, 1] or
/// shots < 0.
double sample_shots(double expval, int shots, Rng& rng);

/// Optional dependence of the coherent parameters on the gate angle:
/// x(theta_gate) = x(0) (1 - c theta_gate^2).
struct DriveDependence {
  double delta_omega_quadratic = 0.0;
  double nu_quadratic = 0.0;
};

/// Parameters seen by a schedule with sub-rotation angle `theta_gate`.
NoiseParams params_at_drive(const NoiseParams& base, double theta_gate, const DriveDependence& dependence);

struct BatchSpec {
  std::string batch_id = "b0";
  std::int64_t timestamp = 0;
  /// Driven angles of the batch; theta_full = 0 is always added.
  std::vector<double> thetas;
  int m = 4;
  std::vector<int> n_values = default_n_values();
  std::vector<Basis> bases{Basis::X, Basis::Y, Basis::Z};
  int shots = 1024;
  std::uint64_t seed = 0;
  std::uint64_t batch_index = 0;
};

/// Records for every theta in spec.thetas plus theta = 0, all n, all bases,
/// ordered by (theta as listed with 0 first, n, basis). Deterministic in
/// (params, spec).
std::vector<ExperimentRecord> generate_batch(const NoiseParams& params, const BatchSpec& spec,
                                             const DriveDependence& dependence = {});

struct DriftProcess {
  QubitTLSParams base;
  /// Probability per batch that nu_zx is redrawn.
  double jump_rate_nu = 0.0;
  /// nu_zx is redrawn as |N(mean, spread)|.
  double nu_mean = 0.0;
  double nu_spread = 0.0;
  /// Relative random-walk step of delta_omega and gamma_ad at each new day.
  double slow_delta_omega = 0.0;
  double slow_gamma_ad = 0.0;
  /// Relative per-batch scatter of gamma_d around its base value.
  double fast_gamma_d = 0.0;
};

/// Throws DomainError for probabilities outside [0, 1], negative spreads or
/// invalid base parameters.
void validate(const DriftProcess& drift);

struct GroundTruthEntry {
  std::string batch_id;
  int day = 0;
  int batch = 0;
  std::int64_t timestamp = 0;
  double theta_full = 0.0;
  QubitTLSParams params;
  bool nu_jump = false;
};

/// "dDD-bBB" with zero padding.
std::string campaign_batch_id(int day, int batch);

/// Parameter history of a campaign; batch j of day d starts at
/// d * 86400 + 8 h + 2 min * j seconds. Throws DomainError if days < 1 or
/// batches_per_day < 1.
std::vector<GroundTruthEntry> evolve_drift(const DriftProcess& drift, int days, int batches_per_day,
                                           std::uint64_t seed);

struct CampaignConfig {
  DriftProcess drift;
  int days = 1;
  int batches_per_day = 16;
  /// Batch j of a day measures theta_grid[j % size] together with theta = 0.
  std::vector<double> theta_grid = default_theta_grid();
  int m = 4;
  std::vector<int> n_values = default_n_values();
  std::vector<Basis> bases{Basis::X, Basis::Y, Basis::Z};
  int shots = 1024;
  std::uint64_t seed = 0;
  DriveDependence dependence;
};

struct Campaign {
  std::vector<ExperimentRecord> records;
  std::vector<GroundTruthEntry> truth;
};

/// Batches are generated in parallel and merged in batch order.
Campaign generate_campaign(const CampaignConfig& config);

}  // namespace nmq
