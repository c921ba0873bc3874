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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "nmq/errors.hpp"
#include "nmq/regression.hpp"
#include "nmq/serialize.hpp"
#include "nmq/synthetic_lab.hpp"

namespace nmq {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ExperimentRecord> sample_records() {
  BatchSpec spec;
  spec.batch_id = "day0-b3";
  spec.timestamp = 1700000123;
  spec.thetas = {3 * kPi / 5};
  spec.shots = 512;
  spec.seed = 9;
  QubitTLSParams p;
  p.markovian = {0.003, 0.0005, 0.002};
  p.nu_zx = 0.006;
  return generate_batch(p, spec);
}

void expect_same(const std::vector<ExperimentRecord>& a, const std::vector<ExperimentRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].batch_id, b[k].batch_id);
    EXPECT_EQ(a[k].timestamp, b[k].timestamp);
    EXPECT_EQ(a[k].theta_full, b[k].theta_full);
    EXPECT_EQ(a[k].n, b[k].n);
    EXPECT_EQ(a[k].basis, b[k].basis);
    EXPECT_EQ(a[k].shots, b[k].shots);
    EXPECT_EQ(a[k].expval, b[k].expval);
  }
}

TEST(Records, CsvRoundTripIsExact) {
  const auto records = sample_records();
  std::stringstream buffer;
  write_records_csv(buffer, records);
  EXPECT_EQ(buffer.str().substr(0, buffer.str().find('\n')), kRecordsHeader);
  expect_same(read_records_csv(buffer), records);
}

TEST(Records, JsonlRoundTripIsExact) {
  const auto records = sample_records();
  std::stringstream buffer;
  write_records_jsonl(buffer, records);
  expect_same(read_records_jsonl(buffer), records);
}

TEST(Records, FileDispatchByExtension) {
  const auto dir = std::filesystem::temp_directory_path() / "nmq_serialize_test";
  std::filesystem::create_directories(dir);
  const auto records = sample_records();
  for (const char* name : {"r.csv", "r.jsonl"}) {
    write_records(dir / name, records);
    expect_same(read_records(dir / name), records);
  }
  std::filesystem::remove_all(dir);
}

TEST(Records, RejectsBadCsv) {
  std::stringstream wrong_header("batch,timestamp\nb,0\n");
  EXPECT_THROW(read_records_csv(wrong_header), DataError);
  std::stringstream bad_basis(std::string(kRecordsHeader) + "\nb,0,0,0,Q,100,0.5\n");
  EXPECT_THROW(read_records_csv(bad_basis), DataError);
  std::stringstream short_row(std::string(kRecordsHeader) + "\nb,0,0,0,X\n");
  EXPECT_THROW(read_records_csv(short_row), DataError);
}

TEST(Params, RoundTripAndValidation) {
  PMMEParams p;
  p.markovian = {0.001, 0.0002, 0.0003};
  p.gamma_z = 5e-5;
  p.b = -2e-4;
  const Json j = params_to_json(p);
  EXPECT_EQ(j.at("model"), "pmme");
  EXPECT_EQ(to_vector(params_from_json(j)), to_vector(p));

  Json unknown = j;
  unknown["nu_zx"] = 0.1;
  EXPECT_THROW(params_from_json(unknown), DataError);
  EXPECT_THROW(params_from_json(Json{{"delta_omega", 0.0}}), DataError);
  const auto defaults = params_from_json(Json{{"model", "markovian"}, {"gamma_d", 0.01}});
  EXPECT_EQ(to_vector(defaults), (Vector(3) << 0.0, 0.0, 0.01).finished());
}

TEST(FitResult, JsonRoundTrip) {
  BatchSpec spec;
  spec.thetas = {kPi};
  spec.shots = 0;
  const auto records = generate_batch(MarkovianParams{0.003, 0.0005, 0.002}, spec);
  FitConfig config;
  config.starts = 4;
  const auto fit = fit_model(ModelKind::markovian, records, default_policy(ModelKind::markovian), config);
  const auto back = fit_result_from_json(fit_result_to_json(fit));
  EXPECT_EQ(back.kind, fit.kind);
  ASSERT_EQ(back.thetas.size(), fit.thetas.size());
  ASSERT_EQ(back.free.size(), fit.free.size());
  for (std::size_t k = 0; k < fit.free.size(); ++k) {
    EXPECT_EQ(back.free[k].name, fit.free[k].name);
    EXPECT_EQ(back.free[k].value, fit.free[k].value);
  }
  EXPECT_EQ(back.covariance, fit.covariance);
  EXPECT_EQ(back.value("delta_omega", kPi), fit.value("delta_omega", kPi));
}

TEST(Format, ShortestExactDoubles) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_NE(fnv1a_hex("a"), fnv1a_hex("b"));
}

}  // namespace
}  // namespace nmq
