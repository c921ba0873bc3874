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

#include "nmq/serialize.hpp"

#include <charconv>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nmq/errors.hpp"

namespace nmq {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DataError("");
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " field: '" + s + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& s, const char* what) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(std::string("bad ") + what + " field: '" + s + "'");
  }
  return v;
}

// JSON has no infinity; such values are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

Json record_to_json(const ExperimentRecord& r) {
  return Json{{"batch_id", r.batch_id}, {"timestamp", r.timestamp}, {"theta_full", r.theta_full}, {"n", r.n},
              {"basis", std::string(1, basis_letter(r.basis))}, {"shots", r.shots}, {"expval", r.expval}};
}

ExperimentRecord record_from_json(const Json& j) {
  ExperimentRecord r;
  try {
    r.batch_id = j.at("batch_id").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    r.theta_full = j.at("theta_full").get<double>();
    r.n = j.at("n").get<int>();
    r.basis = parse_basis(j.at("basis").get<std::string>());
    r.shots = j.at("shots").get<int>();
    r.expval = j.at("expval").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad record: ") + e.what());
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  return r;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.batch_id << ',' << r.timestamp << ',' << format_double(r.theta_full) << ',' << r.n << ','
        << basis_letter(r.basis) << ',' << r.shots << ',' << format_double(r.expval) << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty records file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw DataError("unexpected records header: '" + line + "'");
  std::vector<ExperimentRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw DataError("row " + std::to_string(row) + ": expected 7 fields");
    ExperimentRecord r;
    r.batch_id = f[0];
    r.timestamp = parse_int<std::int64_t>(f[1], "timestamp");
    r.theta_full = parse_double(f[2], "theta_full");
    r.n = parse_int<int>(f[3], "n");
    try {
      r.basis = parse_basis(f[4]);
    } catch (const DomainError& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    r.shots = parse_int<int>(f[5], "shots");
    r.expval = parse_double(f[6], "expval");
    records.push_back(std::move(r));
  }
  return records;
}

void write_records_jsonl(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  for (const auto& r : records) {
    // dump() keeps full double precision.
    out << record_to_json(r).dump() << '\n';
  }
}

std::vector<ExperimentRecord> read_records_jsonl(std::istream& in) {
  std::vector<ExperimentRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("bad JSONL line: ") + e.what());
    }
    records.push_back(record_from_json(j));
  }
  return records;
}

void write_records(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  if (path.extension() == ".jsonl") {
    write_records_jsonl(out, records);
  } else {
    write_records_csv(out, records);
  }
}

std::vector<ExperimentRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return path.extension() == ".jsonl" ? read_records_jsonl(in) : read_records_csv(in);
}

Json params_to_json(const NoiseParams& params) {
  const ModelKind kind = kind_of(params);
  Json j;
  j["model"] = std::string(model_name(kind));
  const auto names = parameter_names(kind);
  const Vector v = to_vector(params);
  for (std::size_t k = 0; k < names.size(); ++k) j[names[k]] = v[static_cast<Eigen::Index>(k)];
  return j;
}

NoiseParams params_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("model")) throw DataError("parameters need a \"model\" field");
  ModelKind kind;
  try {
    kind = parse_model_kind(j.at("model").get<std::string>());
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  const auto names = parameter_names(kind);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(names.size()));
  for (const auto& [key, value] : j.items()) {
    if (key == "model" || key == "schema") continue;
    const int idx = parameter_index(kind, key);
    if (idx < 0) throw DataError("unknown parameter '" + key + "' for model " + std::string(model_name(kind)));
    if (!value.is_number()) throw DataError("parameter '" + key + "' is not a number");
    v[idx] = value.get<double>();
  }
  return from_vector(kind, v);
}

Json fit_result_to_json(const FitResult& fit) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["model"] = std::string(model_name(fit.kind));
  j["m"] = fit.m;
  Json frozen = Json::object();
  for (const auto& [k, v] : fit.policy.frozen) frozen[k] = v;
  j["policy"] = Json{{"shared", fit.policy.shared}, {"frozen", frozen}, {"tie_b_to_gamma_z", fit.policy.tie_b_to_gamma_z}};
  j["loss"] = fit.loss;
  j["rmse"] = fit.rmse;
  j["points"] = fit.points;
  j["degenerate"] = fit.degenerate;
  j["diagnostics"] = Json{{"starts", fit.diagnostics.starts},
                          {"evaluations", fit.diagnostics.evaluations},
                          {"iterations", fit.diagnostics.iterations},
                          {"converged", fit.diagnostics.converged}};
  Json thetas = Json::array();
  for (const auto& t : fit.thetas) {
    thetas.push_back(Json{{"theta_full", t.theta_full},
                          {"params", params_to_json(t.params)},
                          {"loss", t.loss},
                          {"rmse", t.rmse},
                          {"points", t.points}});
  }
  j["thetas"] = thetas;
  Json free = Json::array();
  for (const auto& p : fit.free) {
    free.push_back(Json{{"name", p.name},
                        {"theta_full", p.theta_full ? Json(*p.theta_full) : Json(nullptr)},
                        {"value", p.value},
                        {"sigma", number(p.sigma)}});
  }
  j["free"] = free;
  Json cov = Json::array();
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) row.push_back(number(fit.covariance(r, c)));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  return j;
}

FitResult fit_result_from_json(const Json& j) {
  FitResult fit;
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) throw DataError("unsupported fit schema");
    fit.kind = parse_model_kind(j.at("model").get<std::string>());
    fit.m = j.at("m").get<int>();
    const auto& policy = j.at("policy");
    fit.policy.shared = policy.at("shared").get<std::vector<std::string>>();
    for (const auto& [k, v] : policy.at("frozen").items()) fit.policy.frozen[k] = v.get<double>();
    fit.policy.tie_b_to_gamma_z = policy.at("tie_b_to_gamma_z").get<bool>();
    fit.loss = j.at("loss").get<double>();
    fit.rmse = j.at("rmse").get<double>();
    fit.points = j.at("points").get<std::size_t>();
    fit.degenerate = j.at("degenerate").get<bool>();
    const auto& d = j.at("diagnostics");
    fit.diagnostics = {d.at("starts").get<int>(), d.at("evaluations").get<int>(), d.at("iterations").get<int>(),
                       d.at("converged").get<bool>()};
    for (const auto& t : j.at("thetas")) {
      fit.thetas.push_back(ThetaFit{t.at("theta_full").get<double>(), params_from_json(t.at("params")),
                                    t.at("loss").get<double>(), t.at("rmse").get<double>(),
                                    t.at("points").get<std::size_t>()});
    }
    for (const auto& p : j.at("free")) {
      FreeParameter fp;
      fp.name = p.at("name").get<std::string>();
      if (!p.at("theta_full").is_null()) fp.theta_full = p.at("theta_full").get<double>();
      fp.value = p.at("value").get<double>();
      fp.sigma = number_from(p.at("sigma"));
      fit.free.push_back(fp);
    }
    const auto& cov = j.at("covariance");
    const auto size = static_cast<Eigen::Index>(cov.size());
    fit.covariance = Matrix::Zero(size, size);
    for (Eigen::Index r = 0; r < size; ++r) {
      const auto& row = cov.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != size) throw DataError("covariance is not square");
      for (Eigen::Index c = 0; c < size; ++c) fit.covariance(r, c) = number_from(row.at(static_cast<std::size_t>(c)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad fit file: ") + e.what());
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  return fit;
}

Json ratio_summary_to_json(const RatioSummary& s) {
  Json contributions = Json::array();
  for (const auto& c : s.contributions) contributions.push_back(Json{{"value", c.value}, {"sigma", c.sigma}});
  return Json{{"schema", kSchemaVersion},
              {"theta_full", s.theta_full},
              {"parameter", s.parameter},
              {"mean", s.mean},
              {"sigma_fit", s.sigma_fit},
              {"sigma_dispersion", s.sigma_dispersion},
              {"sigma_total", s.sigma_total},
              {"contributions", contributions},
              {"warnings", s.warnings}};
}

Json detector_report_to_json(const DetectorReport& r) {
  Json peaks = Json::array();
  for (const auto& p : r.peaks) peaks.push_back(Json{{"omega", p.omega}, {"amplitude", p.amplitude}});
  return Json{{"schema", kSchemaVersion},
              {"theta_full", r.theta_full},
              {"verdict", std::string(verdict_name(r.verdict))},
              {"purity_oscillation",
               Json{{"f_p", r.purity.f_p},
                    {"significance", number(r.purity.z_score)},
                    {"sigma_f_p", number(r.purity.sigma_f_p)},
                    {"gamma_p", r.purity.gamma_p},
                    {"residual", r.purity.residual}}},
              {"frequency_count", r.frequency_count},
              {"peaks", peaks},
              {"sample_step", r.sample_step},
              {"noise_floor", r.noise_floor},
              {"markovian_form_residual", r.markovian_form_residual},
              {"residual_threshold", r.residual_threshold},
              {"votes", r.votes},
              {"note", r.note}};
}

Json truth_to_json(const std::vector<GroundTruthEntry>& truth) {
  Json entries = Json::array();
  for (const auto& t : truth) {
    entries.push_back(Json{{"batch_id", t.batch_id},
                           {"day", t.day},
                           {"batch", t.batch},
                           {"timestamp", t.timestamp},
                           {"theta_full", t.theta_full},
                           {"params", params_to_json(t.params)},
                           {"nu_jump", t.nu_jump}});
  }
  return Json{{"schema", kSchemaVersion}, {"batches", entries}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nmq
