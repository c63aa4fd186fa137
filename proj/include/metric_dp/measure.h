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

#ifndef METRIC_DP_MEASURE_H_
#define METRIC_DP_MEASURE_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

// Nonnegative weights on the points of a finite metric space. Weights need
// not sum to one; the exponential mechanism normalizes on its own.
class DiscreteMeasure {
 public:
  // `weights` is aligned with the space's label order.
  static absl::StatusOr<DiscreteMeasure> Create(SpacePtr space,
                                                std::vector<double> weights);

  // Labels absent from `weights` get weight 0.
  static absl::StatusOr<DiscreteMeasure> FromLabels(
      SpacePtr space, const std::map<std::string, double>& weights);

  // Probability measure assigning 1/n to each point. Fails on an empty space.
  static absl::StatusOr<DiscreteMeasure> Uniform(SpacePtr space);

  const FiniteMetricSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(size_t index) const { return weights_[index]; }
  double total_mass() const { return total_mass_; }

 private:
  DiscreteMeasure(SpacePtr space, std::vector<double> weights,
                  double total_mass);

  SpacePtr space_;
  std::vector<double> weights_;
  double total_mass_;
};

// Sum of weights over a set of point indices. Indices must be valid.
double MeasureOfIndices(const DiscreteMeasure& measure,
                        absl::Span<const size_t> indices);

// Sum of weights over a set of labels; duplicates count once.
absl::StatusOr<double> MeasureOf(const DiscreteMeasure& measure,
                                 absl::Span<const std::string> labels);

// min over centers y of measure(ball(y, radius)).
absl::StatusOr<double> UniformPositivityModulus(const DiscreteMeasure& measure,
                                                double radius);

// Rescales to total mass one.
absl::StatusOr<DiscreteMeasure> Normalize(const DiscreteMeasure& measure);

}  // namespace metric_dp

#endif  // METRIC_DP_MEASURE_H_
