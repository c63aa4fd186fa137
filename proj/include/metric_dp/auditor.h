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

#ifndef METRIC_DP_AUDITOR_H_
#define METRIC_DP_AUDITOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "metric_dp/exp_mechanism.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

// Probabilities below this are treated as exactly zero in log-ratio audits.
inline constexpr double kProbabilityFloor = 1e-300;

// Subset enumeration in CheckEmInequalities is limited to this many outputs.
inline constexpr size_t kMaxSubsetOutputs = 20;

// Indices (input x, input z, output y) of the entry attaining epsilon_max.
struct PrivacyWitness {
  size_t x = 0;
  size_t z = 0;
  size_t y = 0;
};

struct PrivacyAuditReport {
  // Smallest epsilon with row_x(T) <= exp(epsilon * rho(x, z)) row_z(T) for
  // all inputs x, z and output sets T. May be +infinity.
  double epsilon_max = 0.0;
  std::optional<PrivacyWitness> witness;
  // Set when two inputs at distance zero have different rows.
  bool zero_distance_violation = false;
  // per_pair_max[x][z]: the same maximum restricted to the ordered pair.
  std::optional<std::vector<std::vector<double>>> per_pair_max;
};

// Exact metric-privacy level of a finite mechanism. Only single outputs are
// examined: for nonnegative vectors sum_T a / sum_T b <= max_y a_y / b_y, so
// singletons dominate every output set. Entries where both rows vanish
// impose no constraint; a positive entry against a zero entry forces
// infinity.
PrivacyAuditReport AuditPrivacy(const MechanismTable& mech,
                                bool include_per_pair = false);

struct UtilityAuditReport {
  double gamma = 0.0;
  double min_mass = 1.0;
  size_t worst_input = 0;
  // Mass each input's row puts on the closed gamma-ball around f(x).
  std::vector<double> per_input_mass;
};

// `map` must have the mechanism's input space as domain and its output
// space as codomain.
absl::StatusOr<UtilityAuditReport> AuditUtility(const MechanismTable& mech,
                                                const LipschitzMap& map,
                                                double gamma);

struct ImpossibilityBound {
  double eps_lower = 0.0;
  // Position in `centers` of the ball attaining eps_lower (never 0).
  size_t witness_index = 0;
};

// Privacy lower bound from disjoint balls. With x_1 = centers[0] and
// B_i = ball(f(x_i), radius), returns
//   max_{i >= 2} ln(row_{x_i}(B_i) / row_{x_1}(B_i)) / rho(x_i, x_1).
// Preconditions, all checked: at least two distinct centers, pairwise
// disjoint balls, and row_{x_i}(B_i) > utility_threshold for every center.
// Since the x_1 row has total mass 1, with k balls and threshold 1/2 the
// result is at least ln(k/2) / diameter.
absl::StatusOr<ImpossibilityBound> ImpossibilityLowerBound(
    const MechanismTable& mech, const LipschitzMap& map,
    absl::Span<const std::string> centers, double radius,
    double utility_threshold = 0.5);

struct EmInequalityViolation {
  enum class Kind { kSubsetMass, kNormalizer };
  Kind kind = Kind::kSubsetMass;
  std::vector<size_t> subset;  // empty for kNormalizer
  double lhs = 0.0;
  double rhs = 0.0;
};

struct EmInequalityReport {
  bool passed = true;
  uint64_t subsets_checked = 0;
  std::optional<EmInequalityViolation> first_violation;
};

// Checks the two unnormalized bounds behind the exponential mechanism's
// privacy guarantee, with w_x(y) = base(y) exp(-beta sigma(f(x), y)) and
// s = exp(beta * C * rho(x, z)):
//   sum_T w_x <= s * sum_T w_z + 1e-9   for every nonempty output set T,
//   Z(x) >= Z(z) / s - 1e-9             for the full normalizers.
// Exhaustive over subsets, so the output space must have at most
// kMaxSubsetOutputs points.
absl::StatusOr<EmInequalityReport> CheckEmInequalities(
    const ExpMechParams& params, absl::string_view x, absl::string_view z);

}  // namespace metric_dp

#endif  // METRIC_DP_AUDITOR_H_
