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

#include "metric_dp/covering.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {
namespace {

std::vector<std::string> ToLabels(const FiniteMetricSpace& space,
                                  const std::vector<size_t>& indices) {
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  for (size_t i : indices) labels.push_back(space.label(i));
  return labels;
}

}  // namespace

absl::StatusOr<std::vector<size_t>> MaxPackingIndices(
    const FiniteMetricSpace& space, double radius) {
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("packing radius must be > 0, got ", radius));
  }
  if (space.empty()) {
    return absl::InvalidArgumentError("packing of an empty space");
  }
  // claimed[p] is set once p lies in the ball of some selected center.
  std::vector<bool> claimed(space.size(), false);
  std::vector<size_t> centers;
  for (size_t p = 0; p < space.size(); ++p) {
    const std::vector<size_t> ball = BallIndices(space, p, radius);
    bool disjoint = true;
    for (size_t q : ball) {
      if (claimed[q]) {
        disjoint = false;
        break;
      }
    }
    if (!disjoint) continue;
    centers.push_back(p);
    for (size_t q : ball) claimed[q] = true;
  }
  return centers;
}

absl::StatusOr<std::vector<std::string>> MaxPacking(
    const FiniteMetricSpace& space, double radius) {
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<size_t> centers,
                             MaxPackingIndices(space, radius));
  return ToLabels(space, centers);
}

absl::StatusOr<std::vector<size_t>> GreedyNetIndices(
    const FiniteMetricSpace& space, double radius) {
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("net radius must be > 0, got ", radius));
  }
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<size_t> centers,
                             MaxPackingIndices(space, radius / 2.0));
  for (size_t y = 0; y < space.size(); ++y) {
    bool covered = false;
    for (size_t c : centers) {
      if (space.distance(c, y) <= radius) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      return absl::InternalError(
          absl::StrCat("greedy net at radius ", radius, " leaves \"",
                       space.label(y), "\" uncovered"));
    }
  }
  return centers;
}

absl::StatusOr<std::vector<std::string>> GreedyNet(
    const FiniteMetricSpace& space, double radius) {
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<size_t> centers,
                             GreedyNetIndices(space, radius));
  return ToLabels(space, centers);
}

absl::StatusOr<int> LevelForRadius(double radius) {
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("radius must be > 0, got ", radius));
  }
  int level = 1;
  while (std::ldexp(1.0, -level) > radius) ++level;
  return level;
}

int DefaultDepth(const FiniteMetricSpace& space) {
  std::optional<double> smallest = MinPositiveDistance(space);
  if (!smallest.has_value()) return 1;
  return *LevelForRadius(*smallest);
}

absl::StatusOr<UniformlyPositiveMeasure> BuildUniformlyPositiveMeasure(
    SpacePtr space, int depth) {
  if (depth < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("cover depth must be >= 1, got ", depth));
  }
  if (space == nullptr || space->empty()) {
    return absl::InvalidArgumentError(
        "cover measure needs a nonempty space");
  }
  METRIC_DP_ASSIGN_OR_RETURN(double diameter, Diameter(*space));

  CoverHierarchy hierarchy{space, {}};
  std::vector<double> weights(space->size(), 0.0);
  for (int i = 1; i <= depth; ++i) {
    const double radius = std::ldexp(1.0, -i);
    METRIC_DP_ASSIGN_OR_RETURN(std::vector<size_t> centers,
                               GreedyNetIndices(*space, radius));
    const double share = radius / static_cast<double>(centers.size());
    for (size_t c : centers) weights[c] += share;
    hierarchy.levels.push_back({i, radius, std::move(centers)});
  }
  METRIC_DP_ASSIGN_OR_RETURN(DiscreteMeasure measure,
                             DiscreteMeasure::Create(space, std::move(weights)));
  return UniformlyPositiveMeasure{std::move(measure), std::move(hierarchy),
                                  diameter > 1.0 + kMetricTolerance};
}

absl::StatusOr<PositivityBound> PositivityLowerBound(
    const CoverHierarchy& hierarchy, double radius) {
  METRIC_DP_ASSIGN_OR_RETURN(int level, LevelForRadius(radius));
  if (level > hierarchy.depth()) {
    return PositivityBound{0.0, level, true};
  }
  const CoverLevel& cover = hierarchy.levels[level - 1];
  return PositivityBound{
      std::ldexp(1.0, -level) / static_cast<double>(cover.centers.size()),
      level, false};
}

}  // namespace metric_dp
