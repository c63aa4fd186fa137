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

#ifndef METRIC_DP_COVERING_H_
#define METRIC_DP_COVERING_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "metric_dp/measure.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

// One level of a cover hierarchy: the closed balls of `radius` around
// `centers` cover the whole space.
struct CoverLevel {
  int index = 0;  // 1-based; radius == 2^-index
  double radius = 0.0;
  std::vector<size_t> centers;
};

struct CoverHierarchy {
  SpacePtr space;
  std::vector<CoverLevel> levels;

  int depth() const { return static_cast<int>(levels.size()); }
};

// Greedy maximal packing: scans points in label order and keeps a point iff
// its closed `radius`-ball shares no point with the ball of any point kept
// so far. Balls are compared as point sets within the space.
absl::StatusOr<std::vector<size_t>> MaxPackingIndices(
    const FiniteMetricSpace& space, double radius);
absl::StatusOr<std::vector<std::string>> MaxPacking(
    const FiniteMetricSpace& space, double radius);

// Centers of the greedy (radius/2)-packing. By maximality their closed
// `radius`-balls cover the space; this is checked before returning.
absl::StatusOr<std::vector<size_t>> GreedyNetIndices(
    const FiniteMetricSpace& space, double radius);
absl::StatusOr<std::vector<std::string>> GreedyNet(
    const FiniteMetricSpace& space, double radius);

// Smallest level i >= 1 with 2^-i <= radius, i.e. max(1, ceil(log2(1/r))).
// Computed by exact powers of two so that radii like 0.25 land on their
// level without rounding trouble.
absl::StatusOr<int> LevelForRadius(double radius);

// Depth beyond which every level's net is the whole space:
// LevelForRadius(smallest positive distance), or 1 if there is none.
int DefaultDepth(const FiniteMetricSpace& space);

struct UniformlyPositiveMeasure {
  DiscreteMeasure measure;
  CoverHierarchy hierarchy;
  // Set when the space is wider than the unit-diameter normalization the
  // level radii assume. The construction still runs.
  bool diameter_exceeds_one = false;
};

// Level-weighted cover measure: with C_i = GreedyNet(space, 2^-i) for
// i = 1..depth, each point y gets sum over {i : y in C_i} of 1/(2^i |C_i|).
// Equivalently, pick level i with probability 2^-i and then a center of C_i
// uniformly. Total mass is 1 - 2^-depth; callers may Normalize().
absl::StatusOr<UniformlyPositiveMeasure> BuildUniformlyPositiveMeasure(
    SpacePtr space, int depth);

struct PositivityBound {
  double value = 0.0;
  int level = 0;
  // The requested radius needs a level deeper than the hierarchy; value is 0.
  bool truncated = false;
};

// Lower bound on measure(ball(y, radius)) for every y, certified by the
// hierarchy: the ball contains a center of level i = LevelForRadius(radius),
// which carries at least 1/(2^i n_i).
absl::StatusOr<PositivityBound> PositivityLowerBound(
    const CoverHierarchy& hierarchy, double radius);

}  // namespace metric_dp

#endif  // METRIC_DP_COVERING_H_
