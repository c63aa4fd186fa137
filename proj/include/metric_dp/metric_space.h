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

#ifndef METRIC_DP_METRIC_SPACE_H_
#define METRIC_DP_METRIC_SPACE_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"

namespace metric_dp {

// Absolute slack used for every metric-axiom and Lipschitz comparison.
inline constexpr double kMetricTolerance = 1e-12;

using DistanceMatrix = std::vector<std::vector<double>>;

enum class MetricAxiom {
  kNonnegativity,
  kZeroDiagonal,
  kSymmetry,
  kTriangleInequality,
};

absl::string_view MetricAxiomName(MetricAxiom axiom);

// One failed axiom. The witness holds (i, j) for nonnegativity and symmetry,
// (i, i) for the diagonal, and (i, k, j) for a triangle violation
// dist[i][k] > dist[i][j] + dist[j][k].
struct AxiomViolation {
  MetricAxiom axiom;
  std::vector<size_t> witness;
  // Amount by which the axiom fails, always > kMetricTolerance.
  double excess = 0.0;
};

struct MetricValidationReport {
  std::vector<AxiomViolation> violations;

  bool ok() const { return violations.empty(); }
};

// Checks the four metric axioms on `dist`. Distinct points at distance zero
// (pseudometrics) are accepted. A non-square matrix or a non-finite entry is
// a structural problem and is returned as an error status rather than as a
// violation in the report.
absl::StatusOr<MetricValidationReport> ValidateMetric(
    const DistanceMatrix& dist);

// Finite set of labeled points with a full pairwise distance matrix. Instances
// are immutable once created, so they can be shared freely between threads.
class FiniteMetricSpace {
 public:
  // Fails if labels repeat, the matrix shape does not match the labels, or
  // the matrix is not a (pseudo)metric.
  static absl::StatusOr<FiniteMetricSpace> Create(std::vector<std::string> labels,
                                                  DistanceMatrix dist);

  // `n` equally spaced points on [0, 1] under |.|, labeled by coordinate
  // ("0", "0.5", "1" for n = 3). Grid(1) is the single point "0".
  static FiniteMetricSpace Grid(size_t n);

  // `n` points labeled "0".."n-1" with every off-diagonal distance 1.
  static FiniteMetricSpace Discrete(size_t n);

  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(size_t index) const { return labels_[index]; }
  const DistanceMatrix& distances() const { return dist_; }
  double distance(size_t i, size_t j) const { return dist_[i][j]; }

  absl::StatusOr<size_t> IndexOf(absl::string_view label) const;
  bool Contains(absl::string_view label) const;

  // Two spaces are equal when they have the same labels in the same order and
  // identical distance matrices.
  friend bool operator==(const FiniteMetricSpace& a,
                         const FiniteMetricSpace& b) {
    return a.labels_ == b.labels_ && a.dist_ == b.dist_;
  }

 private:
  FiniteMetricSpace(std::vector<std::string> labels, DistanceMatrix dist);

  std::vector<std::string> labels_;
  DistanceMatrix dist_;
  absl::flat_hash_map<std::string, size_t> index_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

inline SpacePtr Share(FiniteMetricSpace space) {
  return std::make_shared<const FiniteMetricSpace>(std::move(space));
}

// Indices of the closed ball { y : dist(center, y) <= radius }, in space order.
std::vector<size_t> BallIndices(const FiniteMetricSpace& space, size_t center,
                                double radius);

// Closed ball around `center`, returned as labels in space order.
absl::StatusOr<std::vector<std::string>> Ball(const FiniteMetricSpace& space,
                                              absl::string_view center,
                                              double radius);

absl::StatusOr<double> Diameter(const FiniteMetricSpace& space);

// Smallest strictly positive pairwise distance, or nullopt when every pair is
// at distance zero (including the singleton and empty spaces).
std::optional<double> MinPositiveDistance(const FiniteMetricSpace& space);

// Multiplies every distance by `factor` (> 0). Labels are unchanged.
absl::StatusOr<FiniteMetricSpace> Rescale(const FiniteMetricSpace& space,
                                          double factor);

// Smallest C with codomain(f(a), f(b)) <= C * domain(a, b) for all pairs,
// where f is given as a table of codomain indices, one per domain point.
// Returns 0 for constant maps. Fails if two points at domain distance zero
// are sent to points at positive codomain distance.
absl::StatusOr<double> LipschitzConstant(const FiniteMetricSpace& domain,
                                         const FiniteMetricSpace& codomain,
                                         absl::Span<const size_t> table);

// A total function between two finite metric spaces together with its
// computed Lipschitz constant.
class LipschitzMap {
 public:
  // Resolves the label table and computes the Lipschitz constant. When
  // `claimed_constant` is given it must agree with the computed value to
  // within 1e-9 (relative); an understated constant would void every privacy
  // bound derived from it.
  static absl::StatusOr<LipschitzMap> Create(
      SpacePtr domain, SpacePtr codomain,
      const std::map<std::string, std::string>& table,
      std::optional<double> claimed_constant = std::nullopt);

  static absl::StatusOr<LipschitzMap> FromIndices(SpacePtr domain,
                                                  SpacePtr codomain,
                                                  std::vector<size_t> table);

  static LipschitzMap Identity(SpacePtr space);

  const FiniteMetricSpace& domain() const { return *domain_; }
  const FiniteMetricSpace& codomain() const { return *codomain_; }
  const SpacePtr& domain_ptr() const { return domain_; }
  const SpacePtr& codomain_ptr() const { return codomain_; }

  // Codomain index of f(x) for domain index x.
  size_t image(size_t x) const { return table_[x]; }
  const std::vector<size_t>& table() const { return table_; }
  double lipschitz_constant() const { return lipschitz_c_; }

 private:
  LipschitzMap(SpacePtr domain, SpacePtr codomain, std::vector<size_t> table,
               double lipschitz_c);

  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<size_t> table_;
  double lipschitz_c_;
};

}  // namespace metric_dp

#endif  // METRIC_DP_METRIC_SPACE_H_
