// Copyright 2026 The Metric DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef METRIC_DP_JSON_IO_H_
#define METRIC_DP_JSON_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "metric_dp/auditor.h"
#include "metric_dp/covering.h"
#include "metric_dp/exp_mechanism.h"
#include "metric_dp/measure.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

using Json = nlohmann::json;

// Errors caused by unreadable files, malformed JSON or a wrong schema carry a
// marker payload so callers can tell them apart from domain errors (a valid
// document describing, say, a non-metric).
absl::Status ParseError(absl::string_view message);
bool IsParseError(const absl::Status& status);

// Parses `text`; syntax errors report "<source>:<line>:<column>".
absl::StatusOr<Json> ParseJson(absl::string_view text,
                               absl::string_view source);
absl::StatusOr<Json> ReadJsonFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 absl::string_view contents);

// Infinity is written as the string "inf"; every other double as a number.
Json NumberOrInfinity(double value);
absl::StatusOr<double> ParseNumberOrInfinity(const Json& value);

// Space documents: {"labels": [...], "dist": [[...], ...]}, or a generator
// {"kind": "grid" | "discrete", "n": k}.
struct RawSpace {
  std::vector<std::string> labels;
  DistanceMatrix dist;
};
absl::StatusOr<RawSpace> RawSpaceFromJson(const Json& doc);
absl::StatusOr<FiniteMetricSpace> SpaceFromJson(const Json& doc);
absl::StatusOr<FiniteMetricSpace> LoadSpace(const std::filesystem::path& path);
Json SpaceToJson(const FiniteMetricSpace& space);

// A "space" member may hold an inline space document or a path, resolved
// against `base_dir`. When absent, `fallback` is used; when both are present
// they must describe the same space.
absl::StatusOr<SpacePtr> ResolveSpace(const Json& doc, absl::string_view key,
                                      const SpacePtr& fallback,
                                      const std::filesystem::path& base_dir);

// {"space": <space or path>, "weights": {label: number}}; omitted labels
// weigh 0.
absl::StatusOr<DiscreteMeasure> MeasureFromJson(
    const Json& doc, const SpacePtr& space,
    const std::filesystem::path& base_dir = {});
Json MeasureToJson(const DiscreteMeasure& measure);

// {"domain": <space or path>, "codomain": <space or path>,
//  "table": {input: output}, "lipschitz_c": optional number}.
absl::StatusOr<LipschitzMap> MapFromJson(
    const Json& doc, const SpacePtr& domain, const SpacePtr& codomain,
    const std::filesystem::path& base_dir = {});
Json MapToJson(const LipschitzMap& map);

// {"inputs": [...], "outputs": [...], "rows": {input: [prob, ...]}}. Columns
// follow the "outputs" order, which may differ from the space order.
absl::StatusOr<MechanismTable> MechanismTableFromJson(const Json& doc,
                                                      SpacePtr input_space,
                                                      SpacePtr output_space);
Json MechanismTableToJson(const MechanismTable& mech);

// {"L": int, "levels": [{"radius": number, "centers": [label, ...]}]}.
Json CoverHierarchyToJson(const CoverHierarchy& hierarchy);
absl::StatusOr<CoverHierarchy> CoverHierarchyFromJson(const Json& doc,
                                                      SpacePtr space);

Json ValidationReportToJson(const MetricValidationReport& report,
                            const std::vector<std::string>& labels);

Json PrivacyAuditReportToJson(const PrivacyAuditReport& report,
                              const MechanismTable& mech);
absl::StatusOr<PrivacyAuditReport> PrivacyAuditReportFromJson(
    const Json& doc, const MechanismTable& mech);

Json UtilityAuditReportToJson(const UtilityAuditReport& report,
                              const MechanismTable& mech);
absl::StatusOr<UtilityAuditReport> UtilityAuditReportFromJson(
    const Json& doc, const MechanismTable& mech);

}  // namespace metric_dp

#endif  // METRIC_DP_JSON_IO_H_
