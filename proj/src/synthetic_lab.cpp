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

#include "nmq/synthetic_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <type_traits>
#include <variant>

#include "nmq/errors.hpp"
#include "nmq/parallel.hpp"

namespace nmq {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream reserved for the drift process of a campaign.
constexpr std::uint64_t kDriftStream = ~std::uint64_t{0};

double clamp_expval(double expval) {
  if (!(std::abs(expval) <= 1.0 + 1e-9)) {
    throw DomainError("expectation value outside [-1, 1]: " + std::to_string(expval));
  }
  return std::clamp(expval, -1.0, 1.0);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t batch, std::uint64_t record) {
  return splitmix64(splitmix64(splitmix64(seed) ^ batch) ^ record);
}

double sample_shots(double expval, int shots, Rng& rng) {
  const double value = clamp_expval(expval);
  if (shots < 0) throw DomainError("shots must be non-negative");
  if (shots == 0) return value;
  std::binomial_distribution<int> dist(shots, 0.5 * (1.0 + value));
  const int k = dist(rng);
  return 2.0 * k / shots - 1.0;
}

NoiseParams params_at_drive(const NoiseParams& base, double theta_gate, const DriveDependence& dependence) {
  NoiseParams out = base;
  const double t2 = theta_gate * theta_gate;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MarkovianParams>) {
          p.delta_omega *= 1.0 - dependence.delta_omega_quadratic * t2;
        } else {
          p.markovian.delta_omega *= 1.0 - dependence.delta_omega_quadratic * t2;
          if constexpr (std::is_same_v<T, QubitTLSParams>) {
            p.nu_zx = std::abs(p.nu_zx * (1.0 - dependence.nu_quadratic * t2));
          }
        }
      },
      out);
  return out;
}

std::vector<ExperimentRecord> generate_batch(const NoiseParams& params, const BatchSpec& spec,
                                             const DriveDependence& dependence) {
  validate(params);
  if (spec.shots < 0) throw DomainError("shots must be non-negative");
  std::vector<double> thetas{0.0};
  for (double t : spec.thetas) {
    if (t != 0.0) thetas.push_back(t);
  }

  std::vector<ExperimentRecord> records;
  std::uint64_t record_index = 0;
  for (double theta : thetas) {
    PseudoidentitySchedule schedule{theta, spec.m, spec.n_values, spec.bases};
    const NoiseParams local = params_at_drive(params, schedule.theta_gate(), dependence);
    const Trajectory traj = predict_trajectory(local, schedule);
    for (int n : spec.n_values) {
      const BlochPoint& point = traj.at(n);
      for (Basis basis : spec.bases) {
        Rng rng(derive_stream_seed(spec.seed, spec.batch_index, record_index++));
        records.push_back(ExperimentRecord{spec.batch_id, spec.timestamp, theta, n, basis, spec.shots,
                                           sample_shots(point.component(basis), spec.shots, rng)});
      }
    }
  }
  return records;
}

void validate(const DriftProcess& drift) {
  validate(NoiseParams(drift.base));
  if (!(drift.jump_rate_nu >= 0.0 && drift.jump_rate_nu <= 1.0)) {
    throw DomainError("jump_rate_nu must lie in [0, 1]");
  }
  for (double s : {drift.nu_spread, drift.slow_delta_omega, drift.slow_gamma_ad, drift.fast_gamma_d}) {
    if (!(s >= 0.0)) throw DomainError("drift spreads must be non-negative");
  }
  if (!(drift.nu_mean >= 0.0)) throw DomainError("nu_mean must be non-negative");
}

std::string campaign_batch_id(int day, int batch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "d%02d-b%02d", day, batch);
  return buf;
}

std::vector<GroundTruthEntry> evolve_drift(const DriftProcess& drift, int days, int batches_per_day,
                                           std::uint64_t seed) {
  validate(drift);
  if (days < 1 || batches_per_day < 1) throw DomainError("days and batches_per_day must be >= 1");
  Rng rng(derive_stream_seed(seed, kDriftStream, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  QubitTLSParams current = drift.base;
  std::vector<GroundTruthEntry> log;
  log.reserve(static_cast<std::size_t>(days * batches_per_day));
  for (int day = 0; day < days; ++day) {
    if (day > 0) {
      current.markovian.delta_omega *= 1.0 + drift.slow_delta_omega * normal(rng);
      current.markovian.gamma_ad = std::abs(current.markovian.gamma_ad * (1.0 + drift.slow_gamma_ad * normal(rng)));
    }
    for (int b = 0; b < batches_per_day; ++b) {
      // Draw every variate unconditionally so the stream layout does not
      // depend on the configured rates.
      const double u = uniform(rng);
      const double nu_draw = normal(rng);
      const double gd_draw = normal(rng);
      const bool jump = u < drift.jump_rate_nu;
      if (jump) current.nu_zx = std::abs(drift.nu_mean + drift.nu_spread * nu_draw);
      current.markovian.gamma_d = std::max(0.0, drift.base.markovian.gamma_d * (1.0 + drift.fast_gamma_d * gd_draw));

      GroundTruthEntry entry;
      entry.batch_id = campaign_batch_id(day, b);
      entry.day = day;
      entry.batch = b;
      entry.timestamp = std::int64_t{day} * 86400 + 8 * 3600 + std::int64_t{b} * 120;
      entry.params = current;
      entry.nu_jump = jump;
      log.push_back(entry);
    }
  }
  return log;
}

Campaign generate_campaign(const CampaignConfig& config) {
  if (config.theta_grid.empty()) throw DomainError("campaign needs a theta grid");
  Campaign campaign;
  campaign.truth = evolve_drift(config.drift, config.days, config.batches_per_day, config.seed);
  for (auto& entry : campaign.truth) {
    entry.theta_full = config.theta_grid[static_cast<std::size_t>(entry.batch) % config.theta_grid.size()];
  }

  std::vector<std::vector<ExperimentRecord>> per_batch(campaign.truth.size());
  parallel_for(campaign.truth.size(), [&](std::size_t i) {
    const GroundTruthEntry& entry = campaign.truth[i];
    BatchSpec spec;
    spec.batch_id = entry.batch_id;
    spec.timestamp = entry.timestamp;
    spec.thetas = {entry.theta_full};
    spec.m = config.m;
    spec.n_values = config.n_values;
    spec.bases = config.bases;
    spec.shots = config.shots;
    spec.seed = config.seed;
    spec.batch_index = i;
    per_batch[i] = generate_batch(NoiseParams(entry.params), spec, config.dependence);
  });
  for (auto& batch : per_batch) {
    campaign.records.insert(campaign.records.end(), std::make_move_iterator(batch.begin()),
                            std::make_move_iterator(batch.end()));
  }
  return campaign;
}

}  // namespace nmq
