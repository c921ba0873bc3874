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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "nmq/detector.hpp"
#include "nmq/errors.hpp"
#include "nmq/parallel.hpp"
#include "nmq/purity_fit.hpp"
#include "nmq/records.hpp"
#include "nmq/regression.hpp"
#include "nmq/schedule.hpp"
#include "nmq/statistics.hpp"
#include "nmq/synthetic_lab.hpp"

namespace nmq::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kUnitConvention =
    "delta_omega and nu_zx are Hamiltonian coefficients in rad per gate unit; khz_angular = value / (2 pi T_gate) "
    "treats them as angular frequencies, khz_cyclic = value / T_gate as cyclic ones. Rates in 1/us are "
    "value / T_gate; gamma_z in 1/us^2 is value / T_gate^2.";

// Config problems found before any compute.
struct ConfigError : Error {
  using Error::Error;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

void require_output(const std::string& path) {
  if (path.empty()) throw ConfigError("missing --out");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw ConfigError("output directory does not exist: " + parent.string());
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + what);
    }
  }
}

struct ScheduleFile {
  std::vector<double> thetas;
  int m = 4;
  std::vector<int> n_values = default_n_values();
  std::vector<Basis> bases{Basis::X, Basis::Y, Basis::Z};
  std::optional<int> shots;
  std::string batch_id = "b0";
  std::int64_t timestamp = 0;
  DriveDependence dependence;
  bool campaign = false;
  int days = 1;
  int batches_per_day = 16;
  DriftProcess drift;
};

ScheduleFile parse_schedule(const Json& j) {
  check_keys(j, {"schema", "theta_full", "m", "n_values", "bases", "shots", "batch_id", "timestamp", "dependence", "campaign"},
             "schedule");
  ScheduleFile s;
  try {
    const Json theta = j.contains("theta_full") ? j.at("theta_full") : Json("default");
    if (theta.is_string()) {
      if (theta.get<std::string>() != "default") throw ConfigError("theta_full must be a number, a list or \"default\"");
      s.thetas = default_theta_grid();
    } else if (theta.is_array()) {
      s.thetas = theta.get<std::vector<double>>();
    } else {
      s.thetas = {theta.get<double>()};
    }
    s.m = get_or(j, "m", 4);
    if (j.contains("n_values")) s.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("bases")) {
      s.bases.clear();
      for (const auto& b : j.at("bases")) s.bases.push_back(parse_basis(b.get<std::string>()));
    }
    if (j.contains("shots")) s.shots = j.at("shots").get<int>();
    s.batch_id = get_or<std::string>(j, "batch_id", "b0");
    s.timestamp = get_or<std::int64_t>(j, "timestamp", 0);
    if (j.contains("dependence")) {
      const auto& d = j.at("dependence");
      check_keys(d, {"delta_omega_quadratic", "nu_quadratic"}, "dependence");
      s.dependence.delta_omega_quadratic = get_or(d, "delta_omega_quadratic", 0.0);
      s.dependence.nu_quadratic = get_or(d, "nu_quadratic", 0.0);
    }
    if (j.contains("campaign")) {
      const auto& c = j.at("campaign");
      check_keys(c, {"days", "batches_per_day", "drift"}, "campaign");
      s.campaign = true;
      s.days = get_or(c, "days", 1);
      s.batches_per_day = get_or(c, "batches_per_day", 16);
      if (c.contains("drift")) {
        const auto& d = c.at("drift");
        check_keys(d, {"jump_rate_nu", "nu_mean", "nu_spread", "slow_delta_omega", "slow_gamma_ad", "fast_gamma_d"}, "drift");
        s.drift.jump_rate_nu = get_or(d, "jump_rate_nu", 0.0);
        s.drift.nu_mean = get_or(d, "nu_mean", 0.0);
        s.drift.nu_spread = get_or(d, "nu_spread", 0.0);
        s.drift.slow_delta_omega = get_or(d, "slow_delta_omega", 0.0);
        s.drift.slow_gamma_ad = get_or(d, "slow_gamma_ad", 0.0);
        s.drift.fast_gamma_d = get_or(d, "fast_gamma_d", 0.0);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  return s;
}

Json schedule_to_json(const ScheduleFile& s, int shots) {
  std::vector<std::string> bases;
  for (Basis b : s.bases) bases.emplace_back(1, basis_letter(b));
  Json j{{"theta_full", s.thetas}, {"m", s.m},           {"n_values", s.n_values},
         {"bases", bases},         {"shots", shots},     {"batch_id", s.batch_id},
         {"timestamp", s.timestamp},
         {"dependence", Json{{"delta_omega_quadratic", s.dependence.delta_omega_quadratic},
                             {"nu_quadratic", s.dependence.nu_quadratic}}}};
  if (s.campaign) {
    j["campaign"] = Json{{"days", s.days},
                         {"batches_per_day", s.batches_per_day},
                         {"drift", Json{{"jump_rate_nu", s.drift.jump_rate_nu},
                                        {"nu_mean", s.drift.nu_mean},
                                        {"nu_spread", s.drift.nu_spread},
                                        {"slow_delta_omega", s.drift.slow_delta_omega},
                                        {"slow_gamma_ad", s.drift.slow_gamma_ad},
                                        {"fast_gamma_d", s.drift.fast_gamma_d}}}};
  }
  return j;
}

NoiseParams load_params(const std::string& path, const std::string& model) {
  require_file(path, "--params");
  NoiseParams params;
  try {
    params = params_from_json(read_json(path));
    validate(params);
  } catch (const Error& e) {
    throw ConfigError(std::string("parameters: ") + e.what());
  }
  if (!model.empty()) {
    ModelKind kind;
    try {
      kind = parse_model_kind(model);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (kind != kind_of(params)) {
      throw ConfigError("--model " + model + " does not match the parameter file model " +
                        std::string(model_name(kind_of(params))));
    }
  }
  return params;
}

std::string sibling(const std::string& out, const char* suffix) { return out + suffix; }

bool is_idle(double theta) { return std::abs(theta) < kThetaTolerance; }

Json ratio_json(const ParameterRatio& r) {
  auto number = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"name", r.name},
              {"value", number(r.ratio.value)},
              {"sigma", number(r.ratio.sigma)},
              {"unstable", r.ratio.unstable},
              {"shared", r.shared}};
}

std::string csv_double(double v) { return std::isfinite(v) ? format_double(v) : std::string(v > 0 ? "inf" : "nan"); }

}  // namespace

Json convert_units(const NoiseParams& params, double gate_duration_ns) {
  if (!(gate_duration_ns > 0.0)) throw ConfigError("--gate-duration-ns must be positive");
  const double t_us = gate_duration_ns * 1e-3;
  const ModelKind kind = kind_of(params);
  const auto names = parameter_names(kind);
  const Vector v = to_vector(params);
  Json out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double x = v[static_cast<Eigen::Index>(k)];
    const std::string& name = names[k];
    if (name == "delta_omega" || name == "nu_zx") {
      out[name] = Json{{"gate_units", x},
                       {"khz_angular", x / (2.0 * std::numbers::pi * t_us) * 1e3},
                       {"khz_cyclic", x / t_us * 1e3}};
    } else if (name == "gamma_z") {
      out[name] = Json{{"gate_units", x}, {"per_us2", x / (t_us * t_us)}};
    } else {
      out[name] = Json{{"gate_units", x}, {"per_us", x / t_us}};
    }
  }
  return out;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& log) {
  const NoiseParams params = load_params(o.params_path, o.model);
  require_file(o.schedule_path, "--schedule");
  ScheduleFile schedule = parse_schedule(read_json(o.schedule_path));
  if (!o.seed) throw ConfigError("--seed is required");
  require_output(o.out);
  const int shots = o.shots.value_or(schedule.shots.value_or(1024));
  if (shots < 0) throw ConfigError("shots must be non-negative");

  PseudoidentitySchedule check;
  check.m = schedule.m;
  check.n_values = schedule.n_values;
  check.bases = schedule.bases;
  try {
    validate(check);
  } catch (const Error& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  const bool driven = std::any_of(schedule.thetas.begin(), schedule.thetas.end(), [](double t) { return !is_idle(t); });
  if (kind_of(params) == ModelKind::pmme && (driven || schedule.campaign)) {
    throw UnsupportedModelError("the PMME model supports idle (theta_full = 0) schedules only");
  }

  std::vector<double> driven_thetas;
  for (double t : schedule.thetas) {
    if (!is_idle(t)) driven_thetas.push_back(t);
  }

  std::vector<ExperimentRecord> records;
  std::vector<GroundTruthEntry> truth;
  if (schedule.campaign) {
    if (kind_of(params) != ModelKind::qubit_tls) {
      throw UnsupportedModelError("campaigns drift qubit-defect parameters; use --model qubit_tls");
    }
    CampaignConfig config;
    config.drift = schedule.drift;
    config.drift.base = std::get<QubitTLSParams>(params);
    config.days = schedule.days;
    config.batches_per_day = schedule.batches_per_day;
    config.theta_grid = driven_thetas.empty() ? std::vector<double>{0.0} : driven_thetas;
    config.m = schedule.m;
    config.n_values = schedule.n_values;
    config.bases = schedule.bases;
    config.shots = shots;
    config.seed = *o.seed;
    config.dependence = schedule.dependence;
    try {
      validate(config.drift);
    } catch (const Error& e) {
      throw ConfigError(std::string("drift: ") + e.what());
    }
    Campaign campaign = generate_campaign(config);
    records = std::move(campaign.records);
    truth = std::move(campaign.truth);
  } else {
    BatchSpec spec;
    spec.batch_id = schedule.batch_id;
    spec.timestamp = schedule.timestamp;
    spec.thetas = driven_thetas;
    spec.m = schedule.m;
    spec.n_values = schedule.n_values;
    spec.bases = schedule.bases;
    spec.shots = shots;
    spec.seed = *o.seed;
    records = generate_batch(params, spec, schedule.dependence);
  }

  write_records(o.out, records);
  Json config{{"params", params_to_json(params)}, {"schedule", schedule_to_json(schedule, shots)}, {"seed", *o.seed}};
  Json meta{{"schema", kSchemaVersion},
            {"command", "simulate"},
            {"config_hash", fnv1a_hex(config.dump())},
            {"config", config},
            {"records", records.size()},
            {"format", std::string(fs::path(o.out).extension() == ".jsonl" ? "jsonl" : "csv")},
            {"columns", kRecordsHeader}};
  write_json(sibling(o.out, ".meta.json"), meta);
  if (schedule.campaign) write_json(sibling(o.out, ".truth.json"), truth_to_json(truth));
  log << "wrote " << records.size() << " records to " << o.out << '\n';
  return kOk;
}

int cmd_fit(const FitOptions& o, std::ostream& log) {
  require_file(o.data_path, "--data");
  require_output(o.out);
  ModelKind kind;
  try {
    kind = parse_model_kind(o.model.empty() ? "qubit_tls" : o.model);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (o.starts < 1) throw ConfigError("--starts must be positive");
  if (o.m < 1) throw ConfigError("--m must be positive");
  if (!(o.gate_duration_ns > 0.0)) throw ConfigError("--gate-duration-ns must be positive");

  ParameterPolicy policy = default_policy(kind);
  if (o.fit_kappa) policy.frozen.erase("kappa");
  policy.shared.clear();
  const auto names = parameter_names(kind);
  for (const auto& c : o.constrain) {
    if (c.empty() || c == "none") continue;
    if (parameter_index(kind, c) < 0) throw ConfigError("--constrain: unknown parameter '" + c + "'");
    policy.shared.push_back(c);
  }
  for (const auto& f : o.freeze) {
    const auto eq = f.find('=');
    const std::string name = f.substr(0, eq);
    if (parameter_index(kind, name) < 0) throw ConfigError("--freeze: unknown parameter '" + name + "'");
    double value = 0.0;
    if (eq != std::string::npos) {
      try {
        value = std::stod(f.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("--freeze: bad value in '" + f + "'");
      }
    }
    policy.frozen[name] = value;
  }
  if (o.tie_b) {
    if (kind != ModelKind::pmme) throw ConfigError("--tie-b applies to the pmme model only");
    policy.tie_b_to_gamma_z = true;
  }

  std::vector<ExperimentRecord> records;
  try {
    records = read_records(o.data_path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  struct Job {
    std::string batch;
    double theta;
    std::vector<ExperimentRecord> records;
  };
  std::vector<Job> jobs;
  for (const auto& [batch, batch_records] : group_by_batch(records)) {
    const auto thetas = thetas_in(batch_records);
    const bool has_idle = std::any_of(thetas.begin(), thetas.end(), is_idle);
    std::vector<double> targets;
    for (double t : thetas) {
      if (o.theta && std::abs(t - *o.theta) > kThetaTolerance) continue;
      if (!is_idle(t) || !has_idle || thetas.size() == 1 || (o.theta && is_idle(*o.theta))) targets.push_back(t);
    }
    for (double t : targets) {
      if (!is_idle(t) && kind == ModelKind::pmme) {
        throw UnsupportedModelError("the PMME model fits idle data only; pass --theta 0");
      }
      Job job{batch, t, {}};
      for (const auto& r : batch_records) {
        const bool keep = std::abs(r.theta_full - t) < kThetaTolerance || (has_idle && is_idle(r.theta_full));
        if (keep) job.records.push_back(r);
      }
      jobs.push_back(std::move(job));
    }
  }
  if (jobs.empty()) throw ConfigError("no records match the requested angle");

  std::vector<Json> entries(jobs.size());
  std::vector<char> converged(jobs.size(), 0);
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const Job& job = jobs[i];
        FitConfig config;
        config.starts = o.starts;
        config.seed = o.seed;
        config.m = o.m;
        FitResult fit = fit_model(kind, job.records, policy, config);
        estimate_uncertainty(fit, job.records, config);
        Json entry{{"batch_id", job.batch}, {"theta_full", job.theta}, {"converged", fit.diagnostics.converged}};
        entry["result"] = fit_result_to_json(fit);
        Json ratios = Json::array();
        if (fit.thetas.size() == 2 && is_idle(fit.thetas.front().theta_full)) {
          for (const auto& r : parameter_ratios(fit, o.cross_term)) ratios.push_back(ratio_json(r));
        }
        entry["ratios"] = ratios;
        Json units = Json::array();
        for (const auto& t : fit.thetas) {
          units.push_back(Json{{"theta_full", t.theta_full}, {"params", convert_units(t.params, o.gate_duration_ns)}});
        }
        entry["units"] = units;
        entries[i] = std::move(entry);
        converged[i] = fit.diagnostics.converged ? 1 : 0;
      },
      o.threads);

  Json report{{"schema", kSchemaVersion},
              {"command", "fit"},
              {"model", std::string(model_name(kind))},
              {"data", fs::path(o.data_path).filename().string()},
              {"gate_duration_ns", o.gate_duration_ns},
              {"unit_convention", kUnitConvention},
              {"cross_term", o.cross_term},
              {"fits", entries}};
  const bool all_converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; });
  report["converged"] = all_converged;
  write_json(o.out, report);
  log << "wrote " << jobs.size() << " fits to " << o.out << '\n';
  if (!all_converged) {
    log << "warning: at least one fit did not converge\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& log) {
  if (o.data_path.empty() && o.fit_paths.empty()) throw ConfigError("analyze needs --data and/or --fits");
  if (!o.data_path.empty()) require_file(o.data_path, "--data");
  for (const auto& f : o.fit_paths) require_file(f, "--fits");
  if (o.out_dir.empty()) throw ConfigError("missing --out");
  if (o.density_points < 2) throw ConfigError("--density-points must be at least 2");
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  Json report{{"schema", kSchemaVersion}, {"command", "analyze"}};

  if (!o.data_path.empty()) {
    std::vector<ExperimentRecord> records;
    try {
      records = read_records(o.data_path);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    struct Item {
      std::string batch;
      ObservableSeries series;
      DetectorReport detector;
    };
    std::vector<Item> items;
    for (const auto& [batch, batch_records] : group_by_batch(records)) {
      for (double t : thetas_in(batch_records)) {
        try {
          items.push_back({batch, collect_series(batch_records, t), {}});
        } catch (const DataError& e) {
          throw ConfigError("batch " + batch + ": " + e.what());
        }
      }
    }
    DetectorConfig config;
    config.m = o.m;
    parallel_for(
        items.size(), [&](std::size_t i) { items[i].detector = detect_nonmarkovianity(items[i].series, config); },
        o.threads);

    std::ofstream obs(dir / "observables.csv");
    obs << "batch_id,theta_full,n,x,y,z,purity\n";
    std::ofstream dense(dir / "observables_spline.csv");
    dense << "batch_id,theta_full,n,x,y,z,purity\n";
    std::ofstream purity(dir / "purity.csv");
    purity << "batch_id,theta_full,f_p,sigma_f_p,z_score,gamma_p,gamma_r,residual,frequency_count,"
              "markovian_form_residual,verdict\n";
    Json detectors = Json::array();
    std::map<double, std::vector<double>> fp_by_theta;
    for (const auto& item : items) {
      const auto& s = item.series;
      for (std::size_t k = 0; k < s.size(); ++k) {
        obs << item.batch << ',' << format_double(s.theta_full) << ',' << s.n[k] << ',' << format_double(s.x[k]) << ','
            << format_double(s.y[k]) << ',' << format_double(s.z[k]) << ',' << format_double(s.purity(k)) << '\n';
      }
      if (s.size() >= 4) {
        const std::vector<double> knots(s.n.begin(), s.n.end());
        const CubicSpline<double> sx(knots, s.x), sy(knots, s.y), sz(knots, s.z);
        for (int n = s.n.front(); n <= s.n.back(); ++n) {
          const double x = sx(n), y = sy(n), z = sz(n);
          dense << item.batch << ',' << format_double(s.theta_full) << ',' << n << ',' << format_double(x) << ','
                << format_double(y) << ',' << format_double(z) << ',' << format_double(0.5 * (1 + x * x + y * y + z * z))
                << '\n';
        }
      }
      const auto& d = item.detector;
      purity << item.batch << ',' << format_double(s.theta_full) << ',' << format_double(d.purity.f_p) << ','
             << csv_double(d.purity.sigma_f_p) << ',' << csv_double(d.purity.z_score) << ','
             << format_double(d.purity.gamma_p) << ',' << format_double(d.purity.gamma_r) << ','
             << format_double(d.purity.residual) << ',' << d.frequency_count << ','
             << format_double(d.markovian_form_residual) << ',' << verdict_name(d.verdict) << '\n';
      Json dj = detector_report_to_json(d);
      dj["batch_id"] = item.batch;
      detectors.push_back(dj);
      fp_by_theta[s.theta_full].push_back(d.purity.f_p);
    }
    std::ofstream fp(dir / "fp_vs_theta.csv");
    fp << "theta_full,f_p_mean,f_p_std,batches\n";
    for (const auto& [theta, values] : fp_by_theta) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
      fp << format_double(theta) << ',' << format_double(mean) << ',' << format_double(sd) << ',' << values.size() << '\n';
    }
    report["detector"] = detectors;
  }

  if (!o.fit_paths.empty()) {
    std::map<std::pair<double, std::string>, std::vector<RatioSample>> samples;
    for (const auto& path : o.fit_paths) {
      const Json fits = read_json(path);
      try {
        if (fits.at("schema").get<int>() != kSchemaVersion || fits.at("command").get<std::string>() != "fit") {
          throw ConfigError(path + ": not a schema 1 fit report");
        }
        for (const auto& entry : fits.at("fits")) {
          const double theta = entry.at("theta_full").get<double>();
          for (const auto& r : entry.at("ratios")) {
            if (r.at("shared").get<bool>() || r.at("value").is_null() || r.at("sigma").is_null()) continue;
            samples[{theta, r.at("name").get<std::string>()}].push_back(
                {r.at("value").get<double>(), r.at("sigma").get<double>()});
          }
        }
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
      }
    }
    std::ofstream ratios(dir / "ratios.csv");
    ratios << "theta_full,parameter,mean,sigma_fit,sigma_dispersion,sigma_total,lower,upper,count\n";
    std::ofstream density(dir / "density.csv");
    density << "theta_full,parameter,z,density\n";
    Json summaries = Json::array();
    for (const auto& [key, values] : samples) {
      RatioSummary s = aggregate_ratios(values);
      s.theta_full = key.first;
      s.parameter = key.second;
      for (const auto& w : s.warnings) log << "warning: " << key.second << " at theta " << key.first << ": " << w << '\n';
      ratios << format_double(s.theta_full) << ',' << s.parameter << ',' << format_double(s.mean) << ','
             << format_double(s.sigma_fit) << ',' << format_double(s.sigma_dispersion) << ','
             << format_double(s.sigma_total) << ',' << format_double(s.mean - s.sigma_total) << ','
             << format_double(s.mean + s.sigma_total) << ',' << values.size() << '\n';
      const auto grid = density_grid(values, o.density_points);
      const auto f = density_profile(values, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        density << format_double(s.theta_full) << ',' << s.parameter << ',' << format_double(grid[k]) << ','
                << format_double(f[k]) << '\n';
      }
      summaries.push_back(ratio_summary_to_json(s));
    }
    report["ratios"] = summaries;
  }
  write_json(dir / "report.json", report);
  log << "wrote analysis to " << dir.string() << '\n';
  return kOk;
}

int cmd_map_models(const MapOptions& o, std::ostream& out) {
  const NoiseParams params = load_params(o.params_path, "");
  if (kind_of(params) != ModelKind::qubit_tls) throw ConfigError("map-models expects qubit_tls parameters");
  const auto& tls = std::get<QubitTLSParams>(params);
  const PMMEParams pmme = map_qubit_tls_to_pmme(tls);
  Json j = params_to_json(pmme);
  j["effective_dephasing"] = effective_dephasing(pmme);
  if (o.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    require_output(o.out);
    write_json(o.out, j);
  }
  return kOk;
}

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
  if (o.draws < 1) throw ConfigError("--draws must be positive");
  std::mt19937_64 rng(o.seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto deviation = [](const PauliVector& a, const PauliVector& b) {
    return std::max({std::abs(a.x() - b.x()), std::abs(a.y() - b.y()), std::abs(a.z() - b.z())});
  };
  struct Row {
    std::string name;
    double max_dev;
    double tolerance;
  };
  std::vector<Row> rows;

  double tls_dev = 0.0;
  double map_dev = 0.0;
  double pmme_dev = 0.0;
  for (int d = 0; d < o.draws; ++d) {
    QubitTLSParams p;
    p.markovian = {uniform(-0.05, 0.05), uniform(0.0, 0.01), uniform(0.0, 0.01)};
    p.nu_zx = uniform(0.0, 0.05);
    p.kappa = uniform(0.0, 0.1);
    const auto gen = qubit_tls_generator(p, 0.0);
    const auto initial = PauliVector::product(PauliVector::plus_state(), PauliVector::qubit(0.0, 0.0, 1.0));
    for (double t = 0.0; t <= 200.0; t += 10.0) {
      const auto numeric = partial_trace_tls(propagate(gen, t).apply(initial));
      tls_dev = std::max(tls_dev, deviation(numeric, qubit_tls_idle_analytic(p, t)));
    }

    QubitTLSParams q = p;
    q.markovian.gamma_ad = 0.0;
    const PMMEParams mapped = map_qubit_tls_to_pmme(q);
    for (double t = 0.0; t <= 200.0; t += 10.0) {
      map_dev = std::max(map_dev, deviation(qubit_tls_idle_analytic(q, t), pmme_idle_analytic(mapped, t)));
    }

    PMMEParams pm;
    pm.markovian = {uniform(-0.05, 0.05), uniform(0.0, 0.01), uniform(0.0, 0.01)};
    pm.gamma_z = uniform(0.0, 0.005);
    pm.b = uniform(-0.01, 0.05);
    std::vector<double> grid;
    for (int k = 0; k <= 2000; ++k) grid.push_back(0.01 * k);
    const auto numeric = pmme_numeric_oracle(pm, grid);
    for (std::size_t k = 0; k < grid.size(); k += 100) {
      pmme_dev = std::max(pmme_dev, deviation(numeric[k], pmme_idle_analytic(pm, grid[k])));
    }
  }
  rows.push_back({"qubit_tls superoperator vs closed form", tls_dev, 1e-8});
  rows.push_back({"qubit_tls vs mapped pmme (gamma_ad = 0)", map_dev, 1e-9});
  rows.push_back({"pmme numeric (step 0.01) vs closed form", pmme_dev, 1e-5});

  double identity_dev = 0.0;
  for (double theta : default_theta_grid()) {
    PseudoidentitySchedule s;
    s.theta_full = theta;
    const auto gates = build_pseudoidentity(theta, s.m);
    const ComplexMatrix u = composite_unitary(gates);
    const Complex phase = u(0, 0) / std::abs(u(0, 0));
    identity_dev = std::max(identity_dev, (u / phase - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff());
  }
  rows.push_back({"noiseless pseudoidentity vs identity", identity_dev, 1e-12});

  bool ok = true;
  out << std::left << std::setw(44) << "check" << std::setw(14) << "max_dev" << std::setw(10) << "tol"
      << "result\n";
  for (const auto& r : rows) {
    const bool pass = r.max_dev < r.tolerance;
    ok = ok && pass;
    std::ostringstream dev;
    dev << std::scientific << std::setprecision(2) << r.max_dev;
    std::ostringstream tol;
    tol << std::scientific << std::setprecision(0) << r.tolerance;
    out << std::left << std::setw(44) << r.name << std::setw(14) << dev.str() << std::setw(10) << tol.str()
        << (pass ? "PASS" : "FAIL") << '\n';
  }
  return ok ? kOk : kChecksFailed;
}

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nmq: simulate, fit and analyse pseudoidentity noise experiments"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic records");
  simulate->add_option("--model", sim.model, "markovian, qubit_tls or pmme (checked against --params)");
  simulate->add_option("--params", sim.params_path, "parameter JSON")->required();
  simulate->add_option("--schedule", sim.schedule_path, "schedule JSON")->required();
  simulate->add_option("--shots", sim.shots, "shots per record; 0 gives exact expectation values");
  simulate->add_option("--seed", sim.seed, "random seed")->required();
  simulate->add_option("--out", sim.out, "output records (.csv or .jsonl)")->required();

  FitOptions fit;
  std::vector<std::string> constrain;
  std::vector<std::string> freeze;
  bool no_cross = false;
  auto* fitcmd = app.add_subcommand("fit", "fit a noise model to records");
  fitcmd->add_option("--data", fit.data_path, "records file")->required();
  fitcmd->add_option("--model", fit.model, "markovian, qubit_tls or pmme")->default_val("qubit_tls");
  fitcmd->add_option("--out", fit.out, "output JSON")->required();
  fitcmd->add_option("--theta", fit.theta, "fit only this theta_full");
  fitcmd->add_option("--constrain", constrain, "parameters shared across angles (comma separated, or none)");
  fitcmd->add_option("--freeze", freeze, "name=value pairs held fixed (comma separated)");
  fitcmd->add_flag("--fit-kappa", fit.fit_kappa, "fit the defect relaxation rate instead of freezing it at 0");
  fitcmd->add_flag("--tie-b", fit.tie_b, "pmme only: b = -2 gamma_z");
  fitcmd->add_option("--starts", fit.starts, "multi-start count")->default_val(16);
  fitcmd->add_option("--seed", fit.seed, "optimizer seed")->default_val(0);
  fitcmd->add_option("--m", fit.m, "gates per half of the pseudoidentity")->default_val(4);
  fitcmd->add_option("--gate-duration-ns", fit.gate_duration_ns, "gate duration for unit conversion")->default_val(71.1);
  fitcmd->add_flag("--no-cross-term", no_cross, "drop the covariance term from ratio uncertainties");
  fitcmd->add_option("--threads", fit.threads, "worker threads (0: all cores)")->default_val(0);

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "purity fits, detector verdicts and ratio statistics");
  analyze->add_option("--data", an.data_path, "records file");
  analyze->add_option("--fits", an.fit_paths, "fit reports")->expected(1, -1);
  analyze->add_option("--out", an.out_dir, "output directory")->required();
  analyze->add_option("--m", an.m, "gates per half of the pseudoidentity")->default_val(4);
  analyze->add_option("--density-points", an.density_points, "points of each density profile")->default_val(401);
  analyze->add_option("--threads", an.threads, "worker threads (0: all cores)")->default_val(0);

  MapOptions map;
  auto* mapcmd = app.add_subcommand("map-models", "convert qubit_tls parameters to the equivalent pmme ones");
  mapcmd->add_option("--params", map.params_path, "qubit_tls parameter JSON")->required();
  mapcmd->add_option("--out", map.out, "output JSON (stdout if omitted)");

  OracleOptions oracle;
  auto* oraclecmd = app.add_subcommand("oracle", "closed-form versus numeric cross-checks");
  oraclecmd->add_option("--draws", oracle.draws, "random parameter draws")->default_val(10);
  oraclecmd->add_option("--seed", oracle.seed, "seed of the draws")->default_val(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(sim, err);
    if (*fitcmd) {
      if (!constrain.empty()) fit.constrain = split_list(constrain);
      fit.freeze = split_list(freeze);
      fit.cross_term = !no_cross;
      return cmd_fit(fit, err);
    }
    if (*analyze) return cmd_analyze(an, err);
    if (*mapcmd) return cmd_map_models(map, out);
    if (*oraclecmd) return cmd_oracle(oracle, out);
  } catch (const UnsupportedModelError& e) {
    err << "error: " << e.what() << '\n';
    return kIncompatible;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace nmq::cli
