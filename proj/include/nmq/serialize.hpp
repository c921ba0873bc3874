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

// File formats. Records go to CSV (or JSONL), structured results to JSON
// objects carrying "schema": 1. Doubles are written with 17 significant
// digits so that files round-trip exactly.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nmq/detector.hpp"
#include "nmq/regression.hpp"
#include "nmq/statistics.hpp"
#include "nmq/synthetic_lab.hpp"

namespace nmq {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

inline constexpr const char* kRecordsHeader = "batch_id,timestamp,theta_full,n,basis,shots,expval";

std::string format_double(double value);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
/// Throws DataError on a header or field mismatch.
std::vector<ExperimentRecord> read_records_csv(std::istream& in);
void write_records_jsonl(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_jsonl(std::istream& in);

/// Chooses JSONL for a ".jsonl" extension, CSV otherwise.
void write_records(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records(const std::filesystem::path& path);

/// {"model": "qubit_tls", "delta_omega": ..., ...}
Json params_to_json(const NoiseParams& params);
/// Missing parameters default to 0; unknown keys throw DataError.
NoiseParams params_from_json(const Json& j);

Json fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& j);
Json ratio_summary_to_json(const RatioSummary& summary);
Json detector_report_to_json(const DetectorReport& report);
Json truth_to_json(const std::vector<GroundTruthEntry>& truth);

/// Throws DataError if the file cannot be read or parsed.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace nmq
