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

#include "metric_dp/measure.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights,
                                 double total_mass)
    : space_(std::move(space)),
      weights_(std::move(weights)),
      total_mass_(total_mass) {}

absl::StatusOr<DiscreteMeasure> DiscreteMeasure::Create(
    SpacePtr space, std::vector<double> weights) {
  if (space == nullptr) {
    return absl::InvalidArgumentError("measure requires a space");
  }
  if (weights.size() != space->size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("measure has ", weights.size(), " weights for a space of ",
                     space->size(), " points"));
  }
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight of \"", space->label(i),
                       "\" must be finite and >= 0, got ", weights[i]));
    }
    total += weights[i];
  }
  return DiscreteMeasure(std::move(space), std::move(weights), total);
}

absl::StatusOr<DiscreteMeasure> DiscreteMeasure::FromLabels(
    SpacePtr space, const std::map<std::string, double>& weights) {
  if (space == nullptr) {
    return absl::InvalidArgumentError("measure requires a space");
  }
  std::vector<double> aligned(space->size(), 0.0);
  for (const auto& [label, w] : weights) {
    METRIC_DP_ASSIGN_OR_RETURN(size_t i, space->IndexOf(label));
    aligned[i] = w;
  }
  return Create(std::move(space), std::move(aligned));
}

absl::StatusOr<DiscreteMeasure> DiscreteMeasure::Uniform(SpacePtr space) {
  if (space == nullptr || space->empty()) {
    return absl::InvalidArgumentError("uniform measure on an empty space");
  }
  const size_t n = space->size();
  return Create(std::move(space),
                std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double MeasureOfIndices(const DiscreteMeasure& measure,
                        absl::Span<const size_t> indices) {
  double mass = 0.0;
  for (size_t i : indices) mass += measure.weight(i);
  return mass;
}

absl::StatusOr<double> MeasureOf(const DiscreteMeasure& measure,
                                 absl::Span<const std::string> labels) {
  absl::flat_hash_set<size_t> members;
  for (const std::string& label : labels) {
    METRIC_DP_ASSIGN_OR_RETURN(size_t i, measure.space().IndexOf(label));
    members.insert(i);
  }
  std::vector<size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  return MeasureOfIndices(measure, sorted);
}

absl::StatusOr<double> UniformPositivityModulus(const DiscreteMeasure& measure,
                                                double radius) {
  if (!(radius >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("modulus radius must be >= 0, got ", radius));
  }
  const FiniteMetricSpace& space = measure.space();
  if (space.empty()) {
    return absl::InvalidArgumentError("modulus of a measure on an empty space");
  }
  double modulus = std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < space.size(); ++y) {
    modulus = std::min(modulus,
                       MeasureOfIndices(measure, BallIndices(space, y, radius)));
  }
  return modulus;
}

absl::StatusOr<DiscreteMeasure> Normalize(const DiscreteMeasure& measure) {
  if (!(measure.total_mass() > 0.0)) {
    return absl::FailedPreconditionError(
        "degenerate measure: total mass is zero");
  }
  std::vector<double> weights = measure.weights();
  for (double& w : weights) w /= measure.total_mass();
  return DiscreteMeasure::Create(measure.space_ptr(), std::move(weights));
}

}  // namespace metric_dp
