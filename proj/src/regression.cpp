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

#include "nmq/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nmq/errors.hpp"
#include "nmq/optimize.hpp"
#include "nmq/schedule.hpp"
#include "nmq/spectral.hpp"
#include "nmq/synthetic_lab.hpp"

namespace nmq {
namespace {

bool same_theta(double a, double b) { return std::abs(a - b) <= kThetaTolerance; }

PseudoidentitySchedule schedule_for(const ObservableSeries& s, int m) {
  return PseudoidentitySchedule{s.theta_full, m, s.n, {Basis::X, Basis::Y, Basis::Z}};
}

double series_loss(const NoiseParams& params, const ObservableSeries& s, int m) {
  const Trajectory traj = predict_trajectory(params, schedule_for(s, m));
  double total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const BlochPoint& p = traj.at(s.n[k]);
    const double dx = s.x[k] - p.x;
    const double dy = s.y[k] - p.y;
    const double dz = s.z[k] - p.z;
    total += dx * dx + dy * dy + dz * dz;
  }
  return total;
}

void series_residuals(const NoiseParams& params, const ObservableSeries& s, int m, double* out) {
  const Trajectory traj = predict_trajectory(params, schedule_for(s, m));
  for (std::size_t k = 0; k < s.size(); ++k) {
    const BlochPoint& p = traj.at(s.n[k]);
    out[3 * k] = s.x[k] - p.x;
    out[3 * k + 1] = s.y[k] - p.y;
    out[3 * k + 2] = s.z[k] - p.z;
  }
}

int grid_step(const std::vector<int>& n) {
  int g = 0;
  for (std::size_t k = 1; k < n.size(); ++k) g = std::gcd(g, n[k] - n[k - 1]);
  return std::max(g, 1);
}

// How one model parameter of one angle is obtained from the free vector.
struct Slot {
  enum class Kind { free, frozen, tied } kind = Kind::free;
  int index = -1;
  double value = 0.0;
};

class Problem {
 public:
  Problem(ModelKind kind, std::vector<ObservableSeries> series, const ParameterPolicy& policy, int m)
      : kind_(kind), m_(m), series_(std::move(series)) {
    const auto names = parameter_names(kind);
    for (const auto& [name, value] : policy.frozen) {
      if (parameter_index(kind, name) < 0) {
        throw DomainError("cannot freeze unknown parameter '" + name + "' of model " + std::string(model_name(kind)));
      }
      (void)value;
    }
    for (const auto& name : policy.shared) {
      if (parameter_index(kind, name) < 0) {
        throw DomainError("cannot share unknown parameter '" + name + "' of model " + std::string(model_name(kind)));
      }
    }
    if (policy.tie_b_to_gamma_z && kind != ModelKind::pmme) {
      throw DomainError("the b = -2 gamma_z tie applies to the PMME only");
    }

    std::map<std::string, int> shared_index;
    const bool joint = series_.size() > 1;
    slots_.resize(series_.size());
    for (std::size_t k = 0; k < series_.size(); ++k) {
      for (std::size_t j = 0; j < names.size(); ++j) {
        const std::string& name = names[j];
        Slot slot;
        if (auto it = policy.frozen.find(name); it != policy.frozen.end()) {
          slot.kind = Slot::Kind::frozen;
          slot.value = it->second;
        } else if (policy.tie_b_to_gamma_z && name == "b") {
          slot.kind = Slot::Kind::tied;
        } else if (joint && std::find(policy.shared.begin(), policy.shared.end(), name) != policy.shared.end()) {
          auto it2 = shared_index.find(name);
          if (it2 == shared_index.end()) {
            it2 = shared_index.emplace(name, static_cast<int>(free_.size())).first;
            free_.push_back(FreeParameter{name, std::nullopt, 0.0, 0.0});
            nonneg_.push_back(is_nonnegative(kind, static_cast<int>(j)));
          }
          slot.index = it2->second;
        } else {
          slot.index = static_cast<int>(free_.size());
          free_.push_back(FreeParameter{name, series_[k].theta_full, 0.0, 0.0});
          nonneg_.push_back(is_nonnegative(kind, static_cast<int>(j)));
        }
        slots_[k].push_back(slot);
      }
    }
    int n_max = 1;
    for (const auto& s : series_) {
      points_ += s.size();
      n_max = std::max(n_max, s.n.back());
    }
    scale_ = 2.0 * m_ * n_max;
  }

  ModelKind kind() const { return kind_; }
  int m() const { return m_; }
  const std::vector<ObservableSeries>& series() const { return series_; }
  const std::vector<FreeParameter>& free() const { return free_; }
  std::size_t dim() const { return free_.size(); }
  std::size_t points() const { return points_; }
  bool nonneg(std::size_t i) const { return nonneg_[i]; }
  double scale() const { return scale_; }
  const std::vector<Slot>& slots(std::size_t k) const { return slots_[k]; }

  NoiseParams params_at(const Vector& x, std::size_t k) const {
    const auto& sl = slots_[k];
    Vector v(static_cast<Eigen::Index>(sl.size()));
    for (std::size_t j = 0; j < sl.size(); ++j) {
      v[static_cast<Eigen::Index>(j)] = sl[j].kind == Slot::Kind::free ? x[sl[j].index] : sl[j].value;
    }
    for (std::size_t j = 0; j < sl.size(); ++j) {
      if (sl[j].kind == Slot::Kind::tied) v[static_cast<Eigen::Index>(j)] = -2.0 * v[3];
    }
    return from_vector(kind_, v);
  }

  double block_loss(const Vector& x, std::size_t k) const { return series_loss(params_at(x, k), series_[k], m_); }

  double total_loss(const Vector& x) const {
    double total = 0.0;
    for (std::size_t k = 0; k < series_.size(); ++k) total += block_loss(x, k);
    return total;
  }

  Vector residuals(const Vector& x) const {
    Vector r(static_cast<Eigen::Index>(3 * points_));
    std::size_t offset = 0;
    for (std::size_t k = 0; k < series_.size(); ++k) {
      series_residuals(params_at(x, k), series_[k], m_, r.data() + 3 * offset);
      offset += series_[k].size();
    }
    return r;
  }

  // Sum over angles of |delta_omega| plus the defect coupling (nu_zx, or
  // sqrt(gamma_z / 2) for the PMME), in rad per gate unit.
  double coherent_footprint(const Vector& x) const {
    double total = 0.0;
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const NoiseParams p = params_at(x, k);
      total += std::abs(markovian_part(p).delta_omega);
      if (const auto* tls = std::get_if<QubitTLSParams>(&p)) total += tls->nu_zx;
      if (const auto* pm = std::get_if<PMMEParams>(&p)) total += std::sqrt(std::max(pm->gamma_z, 0.0) / 2.0);
    }
    return total;
  }

  // Optimiser coordinates: u = x * scale, with |u| for non-negative entries.
  Vector to_internal(const Vector& x) const { return x * scale_; }
  Vector to_external(const Vector& u) const {
    Vector x = u / scale_;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (nonneg_[i]) x[static_cast<Eigen::Index>(i)] = std::abs(x[static_cast<Eigen::Index>(i)]);
    }
    return x;
  }

 private:
  ModelKind kind_;
  int m_;
  std::vector<ObservableSeries> series_;
  std::vector<std::vector<Slot>> slots_;
  std::vector<FreeParameter> free_;
  std::vector<bool> nonneg_;
  std::size_t points_ = 0;
  double scale_ = 1.0;
};

// Rough single-angle parameter guesses (gate units) from the transverse
// spectrum and the longitudinal relaxation.
std::vector<Vector> seed_block(ModelKind kind, const ObservableSeries& s, int m) {
  const double dt_unit = 2.0 * m;
  const int step = grid_step(s.n);
  const double dt = dt_unit * step;

  // Uniform complex series, interpolated where the grid has gaps.
  std::vector<Complex> z;
  const bool uniform = static_cast<int>(s.size()) == (s.n.back() - s.n.front()) / step + 1;
  if (uniform || s.size() < 4) {
    for (std::size_t k = 0; k < s.size(); ++k) z.emplace_back(s.x[k], s.y[k]);
  } else {
    std::vector<double> n(s.n.begin(), s.n.end());
    CubicSpline<double> sx(n, s.x), sy(n, s.y);
    for (int k = s.n.front(); k <= s.n.back(); k += step) z.emplace_back(sx(k), sy(k));
  }

  std::vector<std::pair<double, double>> coherent;  // (delta_omega, nu)
  if (z.size() >= 4) {
    PeakOptions opts;
    opts.relative_threshold = 0.1;
    opts.exclusion = 0.0;
    auto peaks = find_peaks(periodogram(z), opts);
    if (peaks.size() > 3) peaks.resize(3);
    for (std::size_t a = 0; a < peaks.size(); ++a) {
      coherent.emplace_back(peaks[a].omega / (2.0 * dt), 0.0);
      for (std::size_t b = a + 1; b < peaks.size(); ++b) {
        coherent.emplace_back((peaks[a].omega + peaks[b].omega) / (4.0 * dt),
                              std::abs(peaks[a].omega - peaks[b].omega) / (4.0 * dt));
      }
    }
  }
  coherent.emplace_back(0.0, 0.0);

  // Transverse decay from the magnitude over the first half, longitudinal
  // rate from the final <Z>.
  const double t_end = dt_unit * s.n.back();
  double mag_end = 1.0;
  const std::size_t half = std::max<std::size_t>(1, s.size() / 2);
  mag_end = std::hypot(s.x[half], s.y[half]);
  const double t_half = std::max(1.0, dt_unit * s.n[half]);
  const double transverse = std::max(0.0, -std::log(std::clamp(mag_end, 0.05, 1.0)) / t_half);
  const double z_end = std::clamp(s.z.back(), 0.0, 0.95);
  const double gamma_ad = t_end > 0.0 ? -std::log(1.0 - z_end) / t_end : 0.0;
  const double gamma_d = std::max(1e-6, 0.5 * (transverse - 0.5 * gamma_ad));

  std::vector<Vector> out;
  for (const auto& [dw, nu] : coherent) {
    Vector v(kind == ModelKind::markovian ? 3 : 5);
    v[0] = dw;
    v[1] = gamma_ad;
    v[2] = gamma_d;
    if (kind == ModelKind::qubit_tls) {
      v[3] = nu;
      v[4] = 0.0;
    } else if (kind == ModelKind::pmme) {
      v[3] = 2.0 * nu * nu;
      v[4] = -4.0 * nu * nu;
    }
    out.push_back(v);
    if (kind == ModelKind::markovian && nu > 0.0) {
      // A two-peak spectrum seen by a single-frequency model: try each line.
      Vector w = v;
      w[0] = dw + nu;
      out.push_back(w);
      w[0] = dw - nu;
      out.push_back(w);
    }
  }
  return out;
}

// Projects a model-parameter vector of one angle onto the free coordinates.
void write_block(const Problem& problem, std::size_t k, const Vector& block, Vector& x) {
  const auto& sl = problem.slots(k);
  for (std::size_t j = 0; j < sl.size(); ++j) {
    if (sl[j].kind == Slot::Kind::free) x[sl[j].index] = block[static_cast<Eigen::Index>(j)];
  }
}

struct MultiStartOutcome {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  OptimizerDiagnostics diagnostics;
};

MultiStartOutcome multistart(const Problem& problem, std::vector<Vector> candidates, const FitConfig& config,
                             std::uint64_t stream) {
  const std::size_t dim = problem.dim();
  MultiStartOutcome outcome;
  outcome.x = Vector::Zero(static_cast<Eigen::Index>(dim));
  auto objective = [&](const Vector& u) { return problem.total_loss(problem.to_external(u)); };
  if (dim == 0) {
    outcome.value = problem.total_loss(outcome.x);
    outcome.diagnostics.converged = true;
    return outcome;
  }

  // Fill up to the requested number of starts with perturbed copies.
  Rng rng(derive_stream_seed(config.seed, stream, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t base_count = std::max<std::size_t>(1, candidates.size());
  const std::size_t target = std::max<std::size_t>(static_cast<std::size_t>(std::max(config.starts, 1)), 1);
  for (std::size_t k = 0; candidates.size() < target; ++k) {
    Vector v = candidates[k % base_count];
    for (std::size_t i = 0; i < dim; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      v[ii] *= std::exp(0.4 * normal(rng));
      v[ii] += 0.3 * normal(rng) / problem.scale();
    }
    candidates.push_back(v);
  }

  struct Screened {
    Vector u;
    double value;
    bool seeded;
  };
  std::vector<Screened> screened;
  NelderMeadOptions<double> screen_opts;
  screen_opts.max_evaluations = config.screen_evaluations;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Vector u0 = problem.to_internal(candidates[k]);
    const Vector step = (0.2 * u0.cwiseAbs()).cwiseMax(0.05);
    auto r = nelder_mead<double>(objective, u0, step, screen_opts);
    outcome.diagnostics.evaluations += r.evaluations;
    outcome.diagnostics.iterations += r.iterations;
    screened.push_back({r.x, r.value, k < base_count});
  }
  outcome.diagnostics.starts = static_cast<int>(candidates.size());
  std::stable_sort(screened.begin(), screened.end(),
                   [](const Screened& a, const Screened& b) { return a.value < b.value; });
  // Always refine the best start that came from a spectral seed, so that the
  // principal alias is among the refined minima.
  std::size_t refine = std::min<std::size_t>(screened.size(), static_cast<std::size_t>(std::max(config.refine_count, 1)));
  for (std::size_t k = refine; k < screened.size(); ++k) {
    if (!screened[k].seeded) continue;
    if (std::none_of(screened.begin(), screened.begin() + static_cast<std::ptrdiff_t>(refine),
                     [](const Screened& s) { return s.seeded; })) {
      std::rotate(screened.begin() + static_cast<std::ptrdiff_t>(refine), screened.begin() + static_cast<std::ptrdiff_t>(k),
                  screened.begin() + static_cast<std::ptrdiff_t>(k) + 1);
      ++refine;
    }
    break;
  }

  NelderMeadOptions<double> refine_opts;
  refine_opts.max_evaluations = config.refine_evaluations;
  refine_opts.x_tolerance = 1e-9;
  struct Refined {
    Vector u;
    double value;
    bool converged;
  };
  std::vector<Refined> refined;
  for (std::size_t k = 0; k < refine; ++k) {
    Vector u = screened[k].u;
    double value = screened[k].value;
    bool converged = false;
    // Restarting from the result rebuilds a fresh simplex around it, which
    // guards against premature collapse.
    for (int pass = 0; pass < 2; ++pass) {
      refine_opts.f_tolerance = 1e-13 * std::max(1.0, value);
      const Vector step = (0.05 * u.cwiseAbs()).cwiseMax(0.01);
      auto r = nelder_mead<double>(objective, u, step, refine_opts);
      outcome.diagnostics.evaluations += r.evaluations;
      outcome.diagnostics.iterations += r.iterations;
      if (r.value <= value) {
        u = r.x;
        value = r.value;
      }
      converged = r.converged;
    }
    refined.push_back({u, value, converged});
  }

  // Sampling every dn sequences leaves coherent frequencies defined modulo
  // 2 pi / (T dn), so distinct minima can fit equally well. Among minima
  // within alias_tolerance reduced-chi^2 units of the best, keep the one with
  // the smallest coherent frequencies.
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : refined) lowest = std::min(lowest, r.value);
  const double dof = std::max(1.0, 3.0 * static_cast<double>(problem.points()) - static_cast<double>(dim));
  const double window = lowest + config.alias_tolerance * lowest / dof;
  std::size_t pick = 0;
  double pick_footprint = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < refined.size(); ++k) {
    if (refined[k].value > window) continue;
    const double footprint = problem.coherent_footprint(problem.to_external(refined[k].u));
    if (footprint < pick_footprint - 1e-12 ||
        (std::abs(footprint - pick_footprint) <= 1e-12 && refined[k].value < refined[pick].value)) {
      pick = k;
      pick_footprint = footprint;
    }
  }
  Vector best_u = refined[pick].u;
  double best = refined[pick].value;
  const bool best_converged = refined[pick].converged;

  const Vector polish_step = (1e-3 * best_u.cwiseAbs()).cwiseMax(1e-4);
  auto polished = quadratic_polish<double>(objective, best_u, polish_step, 6);
  outcome.diagnostics.evaluations += polished.evaluations;
  if (polished.value < best) {
    best = polished.value;
    best_u = polished.x;
  }
  outcome.x = problem.to_external(best_u);
  outcome.value = best;
  outcome.diagnostics.converged = best_converged;
  return outcome;
}

std::vector<ObservableSeries> organise(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw DataError("no records to fit");
  std::vector<ObservableSeries> series;
  for (double theta : thetas_in(records)) series.push_back(collect_series(records, theta));
  return series;
}

Problem build_problem(ModelKind kind, const std::vector<ExperimentRecord>& records, const ParameterPolicy& policy,
                      int m) {
  auto series = organise(records);
  if (kind == ModelKind::pmme) {
    for (const auto& s : series) {
      if (!same_theta(s.theta_full, 0.0)) {
        throw UnsupportedModelError("the PMME can only be fitted to idle (theta_full = 0) data");
      }
    }
  }
  if (m < 1) throw DomainError("m must be at least 1");
  return Problem(kind, std::move(series), policy, m);
}

}  // namespace

double loss(const NoiseParams& params, const std::vector<ExperimentRecord>& records, int m) {
  const auto thetas = thetas_in(records);
  if (thetas.size() != 1) throw DataError("loss expects records of a single theta_full");
  return series_loss(params, collect_series(records, thetas.front()), m);
}

double rmse_from_loss(double loss_value, std::size_t points) {
  if (points == 0) throw DataError("rmse needs at least one point");
  return std::sqrt(loss_value / (3.0 * static_cast<double>(points)));
}

CubicSpline<double> interpolate_spline(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw DataError("no records to interpolate");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (r.basis != records.front().basis) throw DataError("spline records must share one basis");
    if (!same_theta(r.theta_full, records.front().theta_full)) throw DataError("spline records must share one angle");
    pts.emplace_back(r.n, r.expval);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> n, v;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0 && pts[k].first == pts[k - 1].first) {
      throw DataError("duplicate n = " + std::to_string(static_cast<int>(pts[k].first)) + " in spline data");
    }
    n.push_back(pts[k].first);
    v.push_back(pts[k].second);
  }
  return CubicSpline<double>(std::move(n), std::move(v));
}

ParameterPolicy default_policy(ModelKind kind) {
  ParameterPolicy policy;
  if (kind == ModelKind::qubit_tls) policy.frozen["kappa"] = 0.0;
  return policy;
}

const ThetaFit& FitResult::at(double theta_full) const {
  for (const auto& t : thetas) {
    if (same_theta(t.theta_full, theta_full)) return t;
  }
  throw DataError("angle " + std::to_string(theta_full) + " is not part of the fit");
}

double FitResult::value(const std::string& name, double theta_full) const {
  const int j = parameter_index(kind, name);
  if (j < 0) throw DomainError("unknown parameter '" + name + "'");
  return to_vector(at(theta_full).params)[j];
}

int FitResult::free_index(const std::string& name, double theta_full) const {
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i].name != name) continue;
    if (!free[i].theta_full || same_theta(*free[i].theta_full, theta_full)) return static_cast<int>(i);
  }
  return -1;
}

FitResult fit_model(ModelKind kind, const std::vector<ExperimentRecord>& records, const ParameterPolicy& policy,
                    const FitConfig& config) {
  const Problem problem = build_problem(kind, records, policy, config.m);
  const auto& series = problem.series();
  const std::size_t dim = problem.dim();

  // Seeds for the idle reference (or the single angle) first.
  std::size_t idle = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (same_theta(series[k].theta_full, 0.0)) idle = k;
  }
  std::vector<Vector> block_seeds = seed_block(kind, series[idle], config.m);

  OptimizerDiagnostics diagnostics;
  if (series.size() > 1) {
    // Fit the reference angle alone and start the joint fit from it.
    const Problem alone(kind, {series[idle]}, policy, config.m);
    std::vector<Vector> cand;
    for (const auto& b : block_seeds) {
      Vector x = Vector::Zero(static_cast<Eigen::Index>(alone.dim()));
      write_block(alone, 0, b, x);
      cand.push_back(x);
    }
    const auto first = multistart(alone, cand, config, 1);
    diagnostics.evaluations += first.diagnostics.evaluations;
    diagnostics.iterations += first.diagnostics.iterations;
    block_seeds.insert(block_seeds.begin(), to_vector(alone.params_at(first.x, 0)));
  }

  std::vector<Vector> candidates;
  const Vector& reference = block_seeds.front();
  auto make = [&](const Vector& driven) {
    Vector x = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < series.size(); ++k) write_block(problem, k, k == idle ? reference : driven, x);
    // The reference block wins for shared coordinates.
    write_block(problem, idle, reference, x);
    return x;
  };
  if (series.size() > 1) {
    // Driven blocks: variations of the reference coherent terms.
    for (double f_dw : {1.0, 0.5, 1.5, -1.0}) {
      for (double f_nu : {1.0, 0.5, 1.5}) {
        Vector b = reference;
        b[0] *= f_dw;
        if (b.size() > 3) b[3] *= f_nu;
        candidates.push_back(make(b));
      }
    }
  } else {
    for (const auto& b : block_seeds) candidates.push_back(make(b));
  }
  if (static_cast<int>(candidates.size()) > config.starts && config.starts > 0) {
    candidates.resize(static_cast<std::size_t>(config.starts));
  }

  const auto outcome = multistart(problem, candidates, config, 2);
  diagnostics.starts = outcome.diagnostics.starts;
  diagnostics.evaluations += outcome.diagnostics.evaluations;
  diagnostics.iterations += outcome.diagnostics.iterations;
  diagnostics.converged = outcome.diagnostics.converged;

  FitResult fit;
  fit.kind = kind;
  fit.m = config.m;
  fit.policy = policy;
  fit.diagnostics = diagnostics;
  fit.free = problem.free();
  for (std::size_t i = 0; i < dim; ++i) fit.free[i].value = outcome.x[static_cast<Eigen::Index>(i)];
  for (std::size_t k = 0; k < series.size(); ++k) {
    ThetaFit t;
    t.theta_full = series[k].theta_full;
    t.params = problem.params_at(outcome.x, k);
    t.loss = problem.block_loss(outcome.x, k);
    t.points = series[k].size();
    t.rmse = rmse_from_loss(t.loss, t.points);
    fit.loss += t.loss;
    fit.thetas.push_back(t);
  }
  fit.points = problem.points();
  fit.rmse = rmse_from_loss(fit.loss, fit.points);
  estimate_uncertainty(fit, records, config);
  return fit;
}

CovarianceEstimate jacobian_covariance(const std::function<Vector(const Vector&)>& residuals, const Vector& x,
                                       const std::vector<bool>& nonnegative, bool reduced) {
  const auto dim = x.size();
  const Vector r0 = residuals(x);
  CovarianceEstimate out;
  out.loss = r0.squaredNorm();
  Matrix jac(r0.size(), dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double h = std::max(1e-6, 1e-4 * std::abs(x[i]));
    Vector hi = x;
    hi[i] += h;
    const bool at_bound = static_cast<std::size_t>(i) < nonnegative.size() && nonnegative[static_cast<std::size_t>(i)] &&
                          x[i] < h;
    if (at_bound) {
      jac.col(i) = (residuals(hi) - r0) / h;
    } else {
      Vector lo = x;
      lo[i] -= h;
      jac.col(i) = (residuals(hi) - residuals(lo)) / (2.0 * h);
    }
  }

  const double dof = static_cast<double>(r0.size()) - static_cast<double>(dim);
  const double scale = reduced ? (dof > 0.0 ? out.loss / dof : 0.0) : out.loss;

  const Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Vector inv_s2 = Vector::Zero(s.size());
  bool degenerate = dim > r0.size();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > 1e-10 * smax && s[k] > 0.0) {
      inv_s2[k] = 1.0 / (s[k] * s[k]);
    } else {
      degenerate = true;
    }
  }
  const Matrix& v = svd.matrixV();
  out.covariance = v * inv_s2.asDiagonal() * v.transpose() * scale;
  out.degenerate = degenerate;
  out.sigma = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

void estimate_uncertainty(FitResult& fit, const std::vector<ExperimentRecord>& records, const FitConfig& config) {
  const Problem problem = build_problem(fit.kind, records, fit.policy, fit.m);
  const std::size_t dim = problem.dim();
  if (dim != fit.free.size()) throw DataError("fit and records describe different parameter sets");
  Vector x(static_cast<Eigen::Index>(dim));
  std::vector<bool> nonneg(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    x[static_cast<Eigen::Index>(i)] = fit.free[i].value;
    nonneg[i] = problem.nonneg(i);
  }
  const auto estimate =
      jacobian_covariance([&](const Vector& v) { return problem.residuals(v); }, x, nonneg, config.reduced_covariance);
  fit.covariance = estimate.covariance;
  fit.degenerate = estimate.degenerate;
  for (std::size_t i = 0; i < dim; ++i) fit.free[i].sigma = estimate.sigma[static_cast<Eigen::Index>(i)];
}

Ratio ratio_with_uncertainty(double a, double sigma_a, double b, double sigma_b, double covariance) {
  Ratio out;
  out.unstable = std::abs(b) <= 3.0 * sigma_b;
  if (b == 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.sigma = std::numeric_limits<double>::infinity();
    out.unstable = true;
    return out;
  }
  out.value = a / b;
  const double var = (sigma_a * sigma_a + out.value * out.value * sigma_b * sigma_b - 2.0 * out.value * covariance) /
                     (b * b);
  out.sigma = std::sqrt(std::max(0.0, var));
  return out;
}

std::vector<ParameterRatio> parameter_ratios(const FitResult& fit, bool include_cross_term) {
  if (fit.thetas.size() != 2 || !same_theta(fit.thetas.front().theta_full, 0.0)) {
    throw DataError("parameter ratios need a joint fit over theta = 0 and one driven angle");
  }
  const double theta = fit.thetas.back().theta_full;
  std::vector<ParameterRatio> out;
  for (const auto& name : parameter_names(fit.kind)) {
    const int i0 = fit.free_index(name, 0.0);
    const int i1 = fit.free_index(name, theta);
    if (i0 < 0 || i1 < 0) continue;
    ParameterRatio pr;
    pr.name = name;
    if (i0 == i1) {
      pr.shared = true;
      pr.ratio = Ratio{1.0, 0.0, false};
    } else {
      const double cov = include_cross_term && fit.covariance.size() > 0 ? fit.covariance(i1, i0) : 0.0;
      pr.ratio = ratio_with_uncertainty(fit.free[static_cast<std::size_t>(i1)].value,
                                        fit.free[static_cast<std::size_t>(i1)].sigma,
                                        fit.free[static_cast<std::size_t>(i0)].value,
                                        fit.free[static_cast<std::size_t>(i0)].sigma, cov);
    }
    out.push_back(pr);
  }
  return out;
}

}  // namespace nmq
