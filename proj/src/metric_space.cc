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

#include "metric_dp/metric_space.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {
namespace {

std::string FormatCoordinate(double value) {
  char buffer[32];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string DescribeViolation(const AxiomViolation& violation) {
  return absl::StrCat(MetricAxiomName(violation.axiom), " violated at (",
                      absl::StrJoin(violation.witness, ","), ") by ",
                      violation.excess);
}

}  // namespace

absl::string_view MetricAxiomName(MetricAxiom axiom) {
  switch (axiom) {
    case MetricAxiom::kNonnegativity:
      return "nonnegativity";
    case MetricAxiom::kZeroDiagonal:
      return "zero_diagonal";
    case MetricAxiom::kSymmetry:
      return "symmetry";
    case MetricAxiom::kTriangleInequality:
      return "triangle_inequality";
  }
  return "unknown";
}

absl::StatusOr<MetricValidationReport> ValidateMetric(
    const DistanceMatrix& dist) {
  const size_t n = dist.size();
  for (size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n) {
      return absl::InvalidArgumentError(
          absl::StrCat("distance matrix is not square: row ", i, " has ",
                       dist[i].size(), " entries, expected ", n));
    }
    for (size_t j = 0; j < n; ++j) {
      if (!std::isfinite(dist[i][j])) {
        return absl::InvalidArgumentError(
            absl::StrCat("distance matrix entry (", i, ",", j,
                         ") is not finite"));
      }
    }
  }

  MetricValidationReport report;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(dist[i][i]) > kMetricTolerance) {
      report.violations.push_back(
          {MetricAxiom::kZeroDiagonal, {i, i}, std::abs(dist[i][i])});
    }
    for (size_t j = 0; j < n; ++j) {
      if (i != j && dist[i][j] < -kMetricTolerance) {
        report.violations.push_back(
            {MetricAxiom::kNonnegativity, {i, j}, -dist[i][j]});
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(dist[i][j] - dist[j][i]);
      if (gap > kMetricTolerance) {
        report.violations.push_back({MetricAxiom::kSymmetry, {i, j}, gap});
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < n; ++k) {
      for (size_t j = 0; j < n; ++j) {
        const double excess = dist[i][k] - (dist[i][j] + dist[j][k]);
        if (excess > kMetricTolerance) {
          report.violations.push_back(
              {MetricAxiom::kTriangleInequality, {i, k, j}, excess});
        }
      }
    }
  }
  return report;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     DistanceMatrix dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  index_.reserve(labels_.size());
  for (size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
}

absl::StatusOr<FiniteMetricSpace> FiniteMetricSpace::Create(
    std::vector<std::string> labels, DistanceMatrix dist) {
  if (dist.size() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("space has ", labels.size(), " labels but ", dist.size(),
                     " distance rows"));
  }
  absl::flat_hash_map<std::string, size_t> seen;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = seen.emplace(labels[i], i);
    if (!inserted) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate label \"", labels[i], "\" at positions ",
                       it->second, " and ", i));
    }
  }
  METRIC_DP_ASSIGN_OR_RETURN(MetricValidationReport report,
                             ValidateMetric(dist));
  if (!report.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a metric: ", DescribeViolation(report.violations[0]),
                     report.violations.size() > 1
                         ? absl::StrCat(" (and ", report.violations.size() - 1,
                                        " more)")
                         : ""));
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::Grid(size_t n) {
  std::vector<double> coords(n, 0.0);
  for (size_t i = 0; i < n && n > 1; ++i) {
    coords[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  std::vector<std::string> labels;
  DistanceMatrix dist(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    labels.push_back(FormatCoordinate(coords[i]));
    for (size_t j = 0; j < n; ++j) dist[i][j] = std::abs(coords[i] - coords[j]);
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::Discrete(size_t n) {
  std::vector<std::string> labels;
  DistanceMatrix dist(n, std::vector<double>(n, 1.0));
  for (size_t i = 0; i < n; ++i) {
    labels.push_back(absl::StrCat(i));
    dist[i][i] = 0.0;
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

absl::StatusOr<size_t> FiniteMetricSpace::IndexOf(
    absl::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) {
    return absl::NotFoundError(
        absl::StrCat("unknown label \"", label, "\""));
  }
  return it->second;
}

bool FiniteMetricSpace::Contains(absl::string_view label) const {
  return index_.contains(label);
}

std::vector<size_t> BallIndices(const FiniteMetricSpace& space, size_t center,
                                double radius) {
  std::vector<size_t> members;
  for (size_t y = 0; y < space.size(); ++y) {
    if (space.distance(center, y) <= radius) members.push_back(y);
  }
  return members;
}

absl::StatusOr<std::vector<std::string>> Ball(const FiniteMetricSpace& space,
                                              absl::string_view center,
                                              double radius) {
  if (!(radius >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ball radius must be >= 0, got ", radius));
  }
  METRIC_DP_ASSIGN_OR_RETURN(size_t c, space.IndexOf(center));
  std::vector<std::string> labels;
  for (size_t y : BallIndices(space, c, radius)) {
    labels.push_back(space.label(y));
  }
  return labels;
}

absl::StatusOr<double> Diameter(const FiniteMetricSpace& space) {
  if (space.empty()) {
    return absl::InvalidArgumentError("diameter of an empty space");
  }
  double diameter = 0.0;
  for (const auto& row : space.distances()) {
    for (double d : row) diameter = std::max(diameter, d);
  }
  return diameter;
}

std::optional<double> MinPositiveDistance(const FiniteMetricSpace& space) {
  std::optional<double> smallest;
  for (const auto& row : space.distances()) {
    for (double d : row) {
      if (d > kMetricTolerance && (!smallest || d < *smallest)) smallest = d;
    }
  }
  return smallest;
}

absl::StatusOr<FiniteMetricSpace> Rescale(const FiniteMetricSpace& space,
                                          double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rescale factor must be finite and > 0, got ", factor));
  }
  DistanceMatrix dist = space.distances();
  for (auto& row : dist) {
    for (double& d : row) d *= factor;
  }
  return FiniteMetricSpace::Create(space.labels(), std::move(dist));
}

absl::StatusOr<double> LipschitzConstant(const FiniteMetricSpace& domain,
                                         const FiniteMetricSpace& codomain,
                                         absl::Span<const size_t> table) {
  if (table.size() != domain.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("map table has ", table.size(), " entries for a domain of ",
                     domain.size(), " points"));
  }
  for (size_t x = 0; x < table.size(); ++x) {
    if (table[x] >= codomain.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("map sends \"", domain.label(x),
                       "\" outside the codomain"));
    }
  }
  double constant = 0.0;
  for (size_t a = 0; a < domain.size(); ++a) {
    for (size_t b = a + 1; b < domain.size(); ++b) {
      const double rho = domain.distance(a, b);
      const double sigma = codomain.distance(table[a], table[b]);
      if (rho <= kMetricTolerance) {
        if (sigma > kMetricTolerance) {
          return absl::InvalidArgumentError(absl::StrCat(
              "map is not Lipschitz: \"", domain.label(a), "\" and \"",
              domain.label(b), "\" are at distance 0 but their images are ",
              sigma, " apart"));
        }
        continue;
      }
      constant = std::max(constant, sigma / rho);
    }
  }
  return constant;
}

LipschitzMap::LipschitzMap(SpacePtr domain, SpacePtr codomain,
                           std::vector<size_t> table, double lipschitz_c)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      table_(std::move(table)),
      lipschitz_c_(lipschitz_c) {}

absl::StatusOr<LipschitzMap> LipschitzMap::FromIndices(
    SpacePtr domain, SpacePtr codomain, std::vector<size_t> table) {
  if (domain == nullptr || codomain == nullptr) {
    return absl::InvalidArgumentError("map requires a domain and a codomain");
  }
  METRIC_DP_ASSIGN_OR_RETURN(double c,
                             LipschitzConstant(*domain, *codomain, table));
  return LipschitzMap(std::move(domain), std::move(codomain), std::move(table),
                      c);
}

absl::StatusOr<LipschitzMap> LipschitzMap::Create(
    SpacePtr domain, SpacePtr codomain,
    const std::map<std::string, std::string>& table,
    std::optional<double> claimed_constant) {
  if (domain == nullptr || codomain == nullptr) {
    return absl::InvalidArgumentError("map requires a domain and a codomain");
  }
  for (const auto& [from, to] : table) {
    if (!domain->Contains(from)) {
      return absl::NotFoundError(
          absl::StrCat("map entry for unknown domain label \"", from, "\""));
    }
  }
  std::vector<size_t> indices;
  indices.reserve(domain->size());
  for (const std::string& x : domain->labels()) {
    auto it = table.find(x);
    if (it == table.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("map is not total: no image for \"", x, "\""));
    }
    METRIC_DP_ASSIGN_OR_RETURN(size_t y, codomain->IndexOf(it->second));
    indices.push_back(y);
  }
  METRIC_DP_ASSIGN_OR_RETURN(
      LipschitzMap map,
      FromIndices(std::move(domain), std::move(codomain), std::move(indices)));
  if (claimed_constant.has_value()) {
    const double c = map.lipschitz_constant();
    if (std::abs(*claimed_constant - c) > 1e-9 * std::max(1.0, c)) {
      return absl::InvalidArgumentError(
          absl::StrCat("claimed Lipschitz constant ", *claimed_constant,
                       " does not match the computed constant ", c));
    }
  }
  return map;
}

LipschitzMap LipschitzMap::Identity(SpacePtr space) {
  std::vector<size_t> table(space->size());
  for (size_t i = 0; i < table.size(); ++i) table[i] = i;
  // Identity on a pseudometric still has constant <= 1.
  double c = 0.0;
  for (size_t a = 0; a < space->size() && c == 0.0; ++a) {
    for (size_t b = 0; b < space->size(); ++b) {
      if (space->distance(a, b) > kMetricTolerance) {
        c = 1.0;
        break;
      }
    }
  }
  SpacePtr codomain = space;
  return LipschitzMap(std::move(space), std::move(codomain), std::move(table),
                      c);
}

}  // namespace metric_dp
