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

#include "metric_dp/json_io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>
#include <utility>

#include <unistd.h>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {
namespace {

constexpr char kParseErrorUrl[] = "metric_dp/parse_error";
constexpr char kInfinityToken[] = "inf";

absl::StatusOr<const Json*> Member(const Json& doc, absl::string_view key) {
  if (!doc.is_object()) {
    return ParseError(absl::StrCat("expected a JSON object holding \"", key,
                                   "\""));
  }
  auto it = doc.find(std::string(key));
  if (it == doc.end()) {
    return ParseError(absl::StrCat("missing member \"", key, "\""));
  }
  return &*it;
}

absl::StatusOr<std::vector<std::string>> StringList(const Json& value,
                                                    absl::string_view what) {
  if (!value.is_array()) {
    return ParseError(absl::StrCat("\"", what, "\" must be an array"));
  }
  std::vector<std::string> out;
  for (const Json& item : value) {
    if (!item.is_string()) {
      return ParseError(
          absl::StrCat("\"", what, "\" must contain only strings"));
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

absl::StatusOr<double> Number(const Json& value, absl::string_view what) {
  if (!value.is_number()) {
    return ParseError(absl::StrCat("\"", what, "\" must be a number"));
  }
  return value.get<double>();
}

absl::StatusOr<std::vector<double>> NumberList(const Json& value,
                                               absl::string_view what) {
  if (!value.is_array()) {
    return ParseError(absl::StrCat("\"", what, "\" must be an array"));
  }
  std::vector<double> out;
  for (const Json& item : value) {
    METRIC_DP_ASSIGN_OR_RETURN(double d, Number(item, what));
    out.push_back(d);
  }
  return out;
}

absl::StatusOr<size_t> LabelIndex(const FiniteMetricSpace& space,
                                  const Json& value, absl::string_view what) {
  if (!value.is_string()) {
    return ParseError(absl::StrCat("\"", what, "\" must be a label string"));
  }
  return space.IndexOf(value.get<std::string>());
}

}  // namespace

absl::Status ParseError(absl::string_view message) {
  absl::Status status = absl::InvalidArgumentError(message);
  status.SetPayload(kParseErrorUrl, absl::Cord("1"));
  return status;
}

bool IsParseError(const absl::Status& status) {
  return status.GetPayload(kParseErrorUrl).has_value();
}

absl::StatusOr<Json> ParseJson(absl::string_view text,
                               absl::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const size_t end = std::min<size_t>(e.byte, text.size());
    size_t line = 1, column = 1;
    for (size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return ParseError(
        absl::StrCat(source, ":", line, ":", column, ": ", e.what()));
  }
}

absl::StatusOr<Json> ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return ParseError(absl::StrCat("cannot open ", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseJson(buffer.str(), path.string());
}

absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 absl::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += absl::StrCat(".tmp.", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          absl::StrCat("cannot write ", tmp.string()));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) {
      return absl::UnavailableError(
          absl::StrCat("short write to ", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    return absl::UnavailableError(
        absl::StrCat("cannot move report into ", path.string()));
  }
  return absl::OkStatus();
}

Json NumberOrInfinity(double value) {
  if (std::isinf(value) && value > 0) return kInfinityToken;
  return value;
}

absl::StatusOr<double> ParseNumberOrInfinity(const Json& value) {
  if (value.is_string() && value.get<std::string>() == kInfinityToken) {
    return std::numeric_limits<double>::infinity();
  }
  return Number(value, "value");
}

absl::StatusOr<RawSpace> RawSpaceFromJson(const Json& doc) {
  if (!doc.is_object()) {
    return ParseError("space document must be a JSON object");
  }
  if (doc.contains("kind")) {
    const Json& kind = doc["kind"];
    METRIC_DP_ASSIGN_OR_RETURN(const Json* n_value, Member(doc, "n"));
    if (!n_value->is_number_integer() || n_value->get<int64_t>() < 0) {
      return ParseError("\"n\" must be a nonnegative integer");
    }
    const size_t n = n_value->get<size_t>();
    FiniteMetricSpace generated = FiniteMetricSpace::Discrete(0);
    if (kind == "grid") {
      generated = FiniteMetricSpace::Grid(n);
    } else if (kind == "discrete") {
      generated = FiniteMetricSpace::Discrete(n);
    } else {
      return ParseError(
          absl::StrCat("unknown space kind ", kind.dump(),
                       "; expected \"grid\" or \"discrete\""));
    }
    return RawSpace{generated.labels(), generated.distances()};
  }
  RawSpace raw;
  METRIC_DP_ASSIGN_OR_RETURN(const Json* labels, Member(doc, "labels"));
  METRIC_DP_ASSIGN_OR_RETURN(raw.labels, StringList(*labels, "labels"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* dist, Member(doc, "dist"));
  if (!dist->is_array()) return ParseError("\"dist\" must be an array of rows");
  for (const Json& row : *dist) {
    METRIC_DP_ASSIGN_OR_RETURN(std::vector<double> values,
                               NumberList(row, "dist"));
    raw.dist.push_back(std::move(values));
  }
  return raw;
}

absl::StatusOr<FiniteMetricSpace> SpaceFromJson(const Json& doc) {
  METRIC_DP_ASSIGN_OR_RETURN(RawSpace raw, RawSpaceFromJson(doc));
  return FiniteMetricSpace::Create(std::move(raw.labels), std::move(raw.dist));
}

absl::StatusOr<FiniteMetricSpace> LoadSpace(const std::filesystem::path& path) {
  METRIC_DP_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(path));
  absl::StatusOr<FiniteMetricSpace> space = SpaceFromJson(doc);
  if (!space.ok()) {
    absl::Status status(space.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     space.status().message()));
    if (IsParseError(space.status())) status = ParseError(status.message());
    return status;
  }
  return space;
}

Json SpaceToJson(const FiniteMetricSpace& space) {
  return Json{{"labels", space.labels()}, {"dist", space.distances()}};
}

absl::StatusOr<SpacePtr> ResolveSpace(const Json& doc, absl::string_view key,
                                      const SpacePtr& fallback,
                                      const std::filesystem::path& base_dir) {
  if (!doc.is_object()) return ParseError("expected a JSON object");
  auto it = doc.find(std::string(key));
  if (it == doc.end()) {
    if (fallback == nullptr) {
      return ParseError(
          absl::StrCat("no \"", key, "\" given and no default space"));
    }
    return fallback;
  }
  SpacePtr resolved;
  if (it->is_string()) {
    METRIC_DP_ASSIGN_OR_RETURN(
        FiniteMetricSpace space,
        LoadSpace(base_dir / it->get<std::string>()));
    resolved = Share(std::move(space));
  } else {
    METRIC_DP_ASSIGN_OR_RETURN(FiniteMetricSpace space, SpaceFromJson(*it));
    resolved = Share(std::move(space));
  }
  if (fallback != nullptr && !(*fallback == *resolved)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "\"", key, "\" does not match the space given on the command line"));
  }
  return fallback != nullptr ? fallback : resolved;
}

absl::StatusOr<DiscreteMeasure> MeasureFromJson(
    const Json& doc, const SpacePtr& space,
    const std::filesystem::path& base_dir) {
  METRIC_DP_ASSIGN_OR_RETURN(SpacePtr resolved,
                             ResolveSpace(doc, "space", space, base_dir));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* weights, Member(doc, "weights"));
  if (!weights->is_object()) {
    return ParseError("\"weights\" must map labels to numbers");
  }
  std::map<std::string, double> by_label;
  for (const auto& [label, value] : weights->items()) {
    METRIC_DP_ASSIGN_OR_RETURN(by_label[label], Number(value, "weights"));
  }
  return DiscreteMeasure::FromLabels(std::move(resolved), by_label);
}

Json MeasureToJson(const DiscreteMeasure& measure) {
  Json weights = Json::object();
  for (size_t i = 0; i < measure.space().size(); ++i) {
    weights[measure.space().label(i)] = measure.weight(i);
  }
  return Json{{"space", SpaceToJson(measure.space())}, {"weights", weights}};
}

absl::StatusOr<LipschitzMap> MapFromJson(
    const Json& doc, const SpacePtr& domain, const SpacePtr& codomain,
    const std::filesystem::path& base_dir) {
  METRIC_DP_ASSIGN_OR_RETURN(SpacePtr from,
                             ResolveSpace(doc, "domain", domain, base_dir));
  METRIC_DP_ASSIGN_OR_RETURN(SpacePtr to,
                             ResolveSpace(doc, "codomain", codomain, base_dir));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* table, Member(doc, "table"));
  if (!table->is_object()) {
    return ParseError("\"table\" must map input labels to output labels");
  }
  std::map<std::string, std::string> entries;
  for (const auto& [label, value] : table->items()) {
    if (!value.is_string()) {
      return ParseError(absl::StrCat("image of \"", label,
                                     "\" must be a label string"));
    }
    entries[label] = value.get<std::string>();
  }
  std::optional<double> claimed;
  if (doc.contains("lipschitz_c")) {
    METRIC_DP_ASSIGN_OR_RETURN(claimed,
                               Number(doc["lipschitz_c"], "lipschitz_c"));
  }
  return LipschitzMap::Create(std::move(from), std::move(to), entries,
                              claimed);
}

Json MapToJson(const LipschitzMap& map) {
  Json table = Json::object();
  for (size_t x = 0; x < map.domain().size(); ++x) {
    table[map.domain().label(x)] = map.codomain().label(map.image(x));
  }
  return Json{{"domain", SpaceToJson(map.domain())},
              {"codomain", SpaceToJson(map.codomain())},
              {"table", table},
              {"lipschitz_c", map.lipschitz_constant()}};
}

absl::StatusOr<MechanismTable> MechanismTableFromJson(const Json& doc,
                                                      SpacePtr input_space,
                                                      SpacePtr output_space) {
  if (input_space == nullptr || output_space == nullptr) {
    return absl::InvalidArgumentError(
        "mechanism tables are read against known input and output spaces");
  }
  METRIC_DP_ASSIGN_OR_RETURN(const Json* inputs_json, Member(doc, "inputs"));
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> inputs,
                             StringList(*inputs_json, "inputs"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* outputs_json, Member(doc, "outputs"));
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> outputs,
                             StringList(*outputs_json, "outputs"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* rows_json, Member(doc, "rows"));
  if (!rows_json->is_object()) {
    return ParseError("\"rows\" must map input labels to probability arrays");
  }
  if (inputs.size() != input_space->size() ||
      outputs.size() != output_space->size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "table is ", inputs.size(), "x", outputs.size(), " but the spaces are ",
        input_space->size(), "x", output_space->size()));
  }
  std::vector<size_t> column(outputs.size());
  std::vector<bool> seen_output(output_space->size(), false);
  for (size_t j = 0; j < outputs.size(); ++j) {
    METRIC_DP_ASSIGN_OR_RETURN(column[j], output_space->IndexOf(outputs[j]));
    if (seen_output[column[j]]) {
      return absl::InvalidArgumentError(
          absl::StrCat("output \"", outputs[j], "\" listed twice"));
    }
    seen_output[column[j]] = true;
  }
  std::vector<std::vector<double>> rows(input_space->size());
  std::vector<bool> seen_input(input_space->size(), false);
  for (const std::string& label : inputs) {
    METRIC_DP_ASSIGN_OR_RETURN(size_t x, input_space->IndexOf(label));
    if (seen_input[x]) {
      return absl::InvalidArgumentError(
          absl::StrCat("input \"", label, "\" listed twice"));
    }
    seen_input[x] = true;
    auto it = rows_json->find(label);
    if (it == rows_json->end()) {
      return ParseError(absl::StrCat("no row for input \"", label, "\""));
    }
    METRIC_DP_ASSIGN_OR_RETURN(std::vector<double> values,
                               NumberList(*it, "rows"));
    if (values.size() != outputs.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row \"", label, "\" has ", values.size(),
                       " entries for ", outputs.size(), " outputs"));
    }
    rows[x].assign(output_space->size(), 0.0);
    for (size_t j = 0; j < values.size(); ++j) rows[x][column[j]] = values[j];
  }
  return MechanismTable::Create(std::move(input_space),
                                std::move(output_space), std::move(rows));
}

Json MechanismTableToJson(const MechanismTable& mech) {
  Json rows = Json::object();
  for (size_t x = 0; x < mech.input_space().size(); ++x) {
    rows[mech.input_space().label(x)] = mech.row(x);
  }
  return Json{{"inputs", mech.input_space().labels()},
              {"outputs", mech.output_space().labels()},
              {"rows", rows}};
}

Json CoverHierarchyToJson(const CoverHierarchy& hierarchy) {
  Json levels = Json::array();
  for (const CoverLevel& level : hierarchy.levels) {
    std::vector<std::string> centers;
    for (size_t c : level.centers) centers.push_back(hierarchy.space->label(c));
    levels.push_back(Json{{"radius", level.radius}, {"centers", centers}});
  }
  return Json{{"L", hierarchy.depth()}, {"levels", levels}};
}

absl::StatusOr<CoverHierarchy> CoverHierarchyFromJson(const Json& doc,
                                                      SpacePtr space) {
  if (space == nullptr) {
    return absl::InvalidArgumentError("cover hierarchy needs its space");
  }
  METRIC_DP_ASSIGN_OR_RETURN(const Json* depth, Member(doc, "L"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* levels, Member(doc, "levels"));
  if (!depth->is_number_integer() || !levels->is_array() ||
      depth->get<int64_t>() != static_cast<int64_t>(levels->size())) {
    return ParseError("\"L\" must be an integer equal to the level count");
  }
  CoverHierarchy hierarchy{space, {}};
  int index = 0;
  for (const Json& level : *levels) {
    ++index;
    CoverLevel parsed;
    parsed.index = index;
    METRIC_DP_ASSIGN_OR_RETURN(const Json* radius, Member(level, "radius"));
    METRIC_DP_ASSIGN_OR_RETURN(parsed.radius, Number(*radius, "radius"));
    if (parsed.radius != std::ldexp(1.0, -index)) {
      return absl::InvalidArgumentError(
          absl::StrCat("level ", index, " must have radius 2^-", index));
    }
    METRIC_DP_ASSIGN_OR_RETURN(const Json* centers, Member(level, "centers"));
    METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> labels,
                               StringList(*centers, "centers"));
    if (labels.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("level ", index, " has no centers"));
    }
    for (const std::string& label : labels) {
      METRIC_DP_ASSIGN_OR_RETURN(size_t c, space->IndexOf(label));
      parsed.centers.push_back(c);
    }
    for (size_t y = 0; y < space->size(); ++y) {
      bool covered = false;
      for (size_t c : parsed.centers) {
        covered = covered || space->distance(c, y) <= parsed.radius;
      }
      if (!covered) {
        return absl::InvalidArgumentError(
            absl::StrCat("level ", index, " does not cover \"",
                         space->label(y), "\""));
      }
    }
    hierarchy.levels.push_back(std::move(parsed));
  }
  return hierarchy;
}

Json ValidationReportToJson(const MetricValidationReport& report,
                            const std::vector<std::string>& labels) {
  Json violations = Json::array();
  for (const AxiomViolation& v : report.violations) {
    std::vector<std::string> witness_labels;
    for (size_t i : v.witness) {
      witness_labels.push_back(i < labels.size() ? labels[i]
                                                 : absl::StrCat(i));
    }
    violations.push_back(Json{{"axiom", std::string(MetricAxiomName(v.axiom))},
                              {"witness", v.witness},
                              {"witness_labels", witness_labels},
                              {"excess", v.excess}});
  }
  return Json{{"ok", report.ok()}, {"violations", violations}};
}

Json PrivacyAuditReportToJson(const PrivacyAuditReport& report,
                              const MechanismTable& mech) {
  Json doc{{"epsilon_max", NumberOrInfinity(report.epsilon_max)},
           {"zero_distance_violation", report.zero_distance_violation}};
  if (report.witness.has_value()) {
    doc["witness"] = Json{{"x", mech.input_space().label(report.witness->x)},
                          {"z", mech.input_space().label(report.witness->z)},
                          {"y", mech.output_space().label(report.witness->y)}};
  } else {
    doc["witness"] = nullptr;
  }
  if (report.per_pair_max.has_value()) {
    Json matrix = Json::array();
    for (const auto& row : *report.per_pair_max) {
      Json encoded = Json::array();
      for (double value : row) encoded.push_back(NumberOrInfinity(value));
      matrix.push_back(std::move(encoded));
    }
    doc["per_pair_max"] = std::move(matrix);
  }
  return doc;
}

absl::StatusOr<PrivacyAuditReport> PrivacyAuditReportFromJson(
    const Json& doc, const MechanismTable& mech) {
  PrivacyAuditReport report;
  METRIC_DP_ASSIGN_OR_RETURN(const Json* eps, Member(doc, "epsilon_max"));
  METRIC_DP_ASSIGN_OR_RETURN(report.epsilon_max, ParseNumberOrInfinity(*eps));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* zero,
                             Member(doc, "zero_distance_violation"));
  if (!zero->is_boolean()) {
    return ParseError("\"zero_distance_violation\" must be a boolean");
  }
  report.zero_distance_violation = zero->get<bool>();
  METRIC_DP_ASSIGN_OR_RETURN(const Json* witness, Member(doc, "witness"));
  if (!witness->is_null()) {
    PrivacyWitness w;
    METRIC_DP_ASSIGN_OR_RETURN(const Json* x, Member(*witness, "x"));
    METRIC_DP_ASSIGN_OR_RETURN(w.x, LabelIndex(mech.input_space(), *x, "x"));
    METRIC_DP_ASSIGN_OR_RETURN(const Json* z, Member(*witness, "z"));
    METRIC_DP_ASSIGN_OR_RETURN(w.z, LabelIndex(mech.input_space(), *z, "z"));
    METRIC_DP_ASSIGN_OR_RETURN(const Json* y, Member(*witness, "y"));
    METRIC_DP_ASSIGN_OR_RETURN(w.y, LabelIndex(mech.output_space(), *y, "y"));
    report.witness = w;
  }
  if (doc.contains("per_pair_max")) {
    std::vector<std::vector<double>> matrix;
    for (const Json& row : doc["per_pair_max"]) {
      std::vector<double> decoded;
      for (const Json& value : row) {
        METRIC_DP_ASSIGN_OR_RETURN(double d, ParseNumberOrInfinity(value));
        decoded.push_back(d);
      }
      matrix.push_back(std::move(decoded));
    }
    report.per_pair_max = std::move(matrix);
  }
  return report;
}

Json UtilityAuditReportToJson(const UtilityAuditReport& report,
                              const MechanismTable& mech) {
  return Json{{"gamma", report.gamma},
              {"min_mass", report.min_mass},
              {"worst_input", mech.input_space().label(report.worst_input)},
              {"per_input_mass", report.per_input_mass}};
}

absl::StatusOr<UtilityAuditReport> UtilityAuditReportFromJson(
    const Json& doc, const MechanismTable& mech) {
  UtilityAuditReport report;
  METRIC_DP_ASSIGN_OR_RETURN(const Json* gamma, Member(doc, "gamma"));
  METRIC_DP_ASSIGN_OR_RETURN(report.gamma, Number(*gamma, "gamma"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* min_mass, Member(doc, "min_mass"));
  METRIC_DP_ASSIGN_OR_RETURN(report.min_mass, Number(*min_mass, "min_mass"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* worst, Member(doc, "worst_input"));
  METRIC_DP_ASSIGN_OR_RETURN(report.worst_input,
                             LabelIndex(mech.input_space(), *worst,
                                        "worst_input"));
  METRIC_DP_ASSIGN_OR_RETURN(const Json* masses,
                             Member(doc, "per_input_mass"));
  METRIC_DP_ASSIGN_OR_RETURN(report.per_input_mass,
                             NumberList(*masses, "per_input_mass"));
  return report;
}

}  // namespace metric_dp
