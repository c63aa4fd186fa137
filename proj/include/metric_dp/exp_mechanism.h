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

#ifndef METRIC_DP_EXP_MECHANISM_H_
#define METRIC_DP_EXP_MECHANISM_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "metric_dp/measure.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

// Tolerance on the row sums of a mechanism table.
inline constexpr double kRowSumTolerance = 1e-9;

// Exponential mechanism whose score is the output distance to the true
// answer: on input x, output y is drawn with probability proportional to
// base(y) * exp(-beta * sigma(f(x), y)).
class ExpMechParams {
 public:
  // Requires beta >= 0, a base with positive total mass, and a base measure
  // living on the codomain of `map`.
  static absl::StatusOr<ExpMechParams> Create(LipschitzMap map,
                                              DiscreteMeasure base,
                                              double beta);

  const LipschitzMap& map() const { return map_; }
  const DiscreteMeasure& base() const { return base_; }
  double beta() const { return beta_; }

 private:
  ExpMechParams(LipschitzMap map, DiscreteMeasure base, double beta)
      : map_(std::move(map)), base_(std::move(base)), beta_(beta) {}

  LipschitzMap map_;
  DiscreteMeasure base_;
  double beta_;
};

// One output distribution per input point, both indexed in space order.
class MechanismTable {
 public:
  // Every row must have one entry per output point, entries must be finite
  // and >= 0, and each row must sum to 1 within kRowSumTolerance.
  static absl::StatusOr<MechanismTable> Create(
      SpacePtr input_space, SpacePtr output_space,
      std::vector<std::vector<double>> rows);

  const FiniteMetricSpace& input_space() const { return *input_space_; }
  const FiniteMetricSpace& output_space() const { return *output_space_; }
  const SpacePtr& input_space_ptr() const { return input_space_; }
  const SpacePtr& output_space_ptr() const { return output_space_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& row(size_t x) const { return rows_[x]; }

 private:
  MechanismTable(SpacePtr input_space, SpacePtr output_space,
                 std::vector<std::vector<double>> rows);

  SpacePtr input_space_;
  SpacePtr output_space_;
  std::vector<std::vector<double>> rows_;
};

// Output pmf for input index `x`. Exponents are shifted by their maximum
// before exponentiating, so large beta cannot underflow the whole row.
absl::StatusOr<std::vector<double>> ExpMechDistributionAt(
    const ExpMechParams& params, size_t x);
absl::StatusOr<std::vector<double>> ExpMechDistribution(
    const ExpMechParams& params, absl::string_view x);

absl::StatusOr<MechanismTable> Tabulate(const ExpMechParams& params);

// SplitMix64 stream. The same seed always yields the same sequence.
class SeededStream {
 public:
  explicit SeededStream(uint64_t seed) : state_(seed) {}

  uint64_t Next();
  // Uniform double in [0, 1) from the top 53 bits of Next().
  double NextUnit();

 private:
  uint64_t state_;
};

// Inverse-CDF draw over `pmf` in index order. Zero-probability entries are
// never returned. `pmf` must have positive total mass.
size_t SampleIndex(absl::Span<const double> pmf, double unit);

// One draw for input `x`, using the first value of SeededStream(seed).
absl::StatusOr<std::string> Sample(const ExpMechParams& params,
                                   absl::string_view x, uint64_t seed);

// `count` consecutive draws from SeededStream(seed); the first equals
// Sample(params, x, seed).
absl::StatusOr<std::vector<std::string>> SampleMany(const ExpMechParams& params,
                                                    absl::string_view x,
                                                    uint64_t seed,
                                                    size_t count);

// beta = max(0, (2/gamma) ln(1/(delta * m))), where m is the smallest base
// mass of a (gamma/2)-ball. With this beta every input keeps at least 1 - delta
// of its output mass within gamma of the true answer.
absl::StatusOr<double> CalibrateBeta(double gamma, double delta, double m);

// 2 * C * beta: the metric privacy level of the mechanism for a map with
// Lipschitz constant C. Both arguments must be >= 0.
double PrivacyBound(double beta, double lipschitz_c);

struct TradeoffBound {
  double epsilon = 0.0;
  double beta = 0.0;
  double m = 0.0;
};

// Constructive upper bound on the best privacy level achieving
// (gamma, delta)-utility with a Lipschitz-1 map, using `base` (normalized
// first) as the exponential mechanism's reference measure.
absl::StatusOr<TradeoffBound> TradeoffUpperBound(const DiscreteMeasure& base,
                                                 double gamma, double delta);

// ceil(eps*/eps_target), at least 1, where eps* = PrivacyBound(
// CalibrateBeta(gamma, delta, m), 1). This is the smallest database size N
// meeting eps_target when the sensitivity scales as 1/N.
absl::StatusOr<int64_t> MinDatabaseSize(double eps_target, double gamma,
                                        double delta, double m);

}  // namespace metric_dp

#endif  // METRIC_DP_EXP_MECHANISM_H_
