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

#include "metric_dp/exp_mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {

absl::StatusOr<ExpMechParams> ExpMechParams::Create(LipschitzMap map,
                                                    DiscreteMeasure base,
                                                    double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be finite and >= 0, got ", beta));
  }
  if (map.codomain_ptr() != base.space_ptr() &&
      !(map.codomain() == base.space())) {
    return absl::InvalidArgumentError(
        "base measure does not live on the codomain of the map");
  }
  if (!(base.total_mass() > 0.0)) {
    return absl::FailedPreconditionError(
        "degenerate measure: base has zero total mass");
  }
  return ExpMechParams(std::move(map), std::move(base), beta);
}

MechanismTable::MechanismTable(SpacePtr input_space, SpacePtr output_space,
                               std::vector<std::vector<double>> rows)
    : input_space_(std::move(input_space)),
      output_space_(std::move(output_space)),
      rows_(std::move(rows)) {}

absl::StatusOr<MechanismTable> MechanismTable::Create(
    SpacePtr input_space, SpacePtr output_space,
    std::vector<std::vector<double>> rows) {
  if (input_space == nullptr || output_space == nullptr) {
    return absl::InvalidArgumentError(
        "mechanism table needs input and output spaces");
  }
  if (rows.size() != input_space->size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("mechanism table has ", rows.size(), " rows for ",
                     input_space->size(), " inputs"));
  }
  for (size_t x = 0; x < rows.size(); ++x) {
    const std::string& label = input_space->label(x);
    if (rows[x].size() != output_space->size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row \"", label, "\" has ", rows[x].size(),
                       " entries for ", output_space->size(), " outputs"));
    }
    double sum = 0.0;
    for (double p : rows[x]) {
      if (!std::isfinite(p) || p < 0.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row \"", label, "\" has an invalid probability ", p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("row \"", label, "\" sums to ", sum, ", not 1"));
    }
  }
  return MechanismTable(std::move(input_space), std::move(output_space),
                        std::move(rows));
}

absl::StatusOr<std::vector<double>> ExpMechDistributionAt(
    const ExpMechParams& params, size_t x) {
  const FiniteMetricSpace& output = params.map().codomain();
  const size_t truth = params.map().image(x);
  const std::vector<double>& weights = params.base().weights();

  // log(weight) - beta * sigma, or -inf outside the support.
  std::vector<double> exponents(output.size(),
                                -std::numeric_limits<double>::infinity());
  double shift = -std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < output.size(); ++y) {
    if (weights[y] > 0.0) {
      exponents[y] =
          std::log(weights[y]) - params.beta() * output.distance(truth, y);
      shift = std::max(shift, exponents[y]);
    }
  }
  if (!std::isfinite(shift)) {
    return absl::FailedPreconditionError(
        absl::StrCat("degenerate measure: zero normalizer for input \"",
                     params.map().domain().label(x), "\""));
  }
  std::vector<double> pmf(output.size(), 0.0);
  double normalizer = 0.0;
  for (size_t y = 0; y < output.size(); ++y) {
    if (weights[y] > 0.0) {
      pmf[y] = std::exp(exponents[y] - shift);
      normalizer += pmf[y];
    }
  }
  for (double& p : pmf) p /= normalizer;
  return pmf;
}

absl::StatusOr<std::vector<double>> ExpMechDistribution(
    const ExpMechParams& params, absl::string_view x) {
  METRIC_DP_ASSIGN_OR_RETURN(size_t index, params.map().domain().IndexOf(x));
  return ExpMechDistributionAt(params, index);
}

absl::StatusOr<MechanismTable> Tabulate(const ExpMechParams& params) {
  const FiniteMetricSpace& input = params.map().domain();
  std::vector<std::vector<double>> rows;
  rows.reserve(input.size());
  for (size_t x = 0; x < input.size(); ++x) {
    absl::StatusOr<std::vector<double>> row = ExpMechDistributionAt(params, x);
    if (!row.ok()) {
      return absl::Status(row.status().code(),
                          absl::StrCat("input \"", input.label(x), "\": ",
                                       row.status().message()));
    }
    rows.push_back(*std::move(row));
  }
  return MechanismTable::Create(params.map().domain_ptr(),
                                params.map().codomain_ptr(), std::move(rows));
}

uint64_t SeededStream::Next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SeededStream::NextUnit() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

size_t SampleIndex(absl::Span<const double> pmf, double unit) {
  std::vector<double> cdf(pmf.size());
  double running = 0.0;
  size_t last_positive = 0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    running += pmf[i];
    cdf[i] = running;
    if (pmf[i] > 0.0) last_positive = i;
  }
  const double target = unit * running;
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) return last_positive;
  return static_cast<size_t>(it - cdf.begin());
}

absl::StatusOr<std::vector<std::string>> SampleMany(const ExpMechParams& params,
                                                    absl::string_view x,
                                                    uint64_t seed,
                                                    size_t count) {
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<double> pmf,
                             ExpMechDistribution(params, x));
  SeededStream stream(seed);
  std::vector<std::string> draws;
  draws.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    draws.push_back(
        params.map().codomain().label(SampleIndex(pmf, stream.NextUnit())));
  }
  return draws;
}

absl::StatusOr<std::string> Sample(const ExpMechParams& params,
                                   absl::string_view x, uint64_t seed) {
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> draws,
                             SampleMany(params, x, seed, 1));
  return std::move(draws.front());
}

absl::StatusOr<double> CalibrateBeta(double gamma, double delta, double m) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be finite and > 0, got ", gamma));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (!(m > 0.0)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "base measure is not uniformly positive at radius gamma/2 = ",
        gamma / 2.0, " (m = ", m, ")"));
  }
  return std::max(0.0, (2.0 / gamma) * std::log(1.0 / (delta * m)));
}

double PrivacyBound(double beta, double lipschitz_c) {
  return 2.0 * lipschitz_c * beta;
}

absl::StatusOr<TradeoffBound> TradeoffUpperBound(const DiscreteMeasure& base,
                                                 double gamma, double delta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be finite and > 0, got ", gamma));
  }
  METRIC_DP_ASSIGN_OR_RETURN(DiscreteMeasure normalized, Normalize(base));
  TradeoffBound bound;
  METRIC_DP_ASSIGN_OR_RETURN(bound.m,
                             UniformPositivityModulus(normalized, gamma / 2.0));
  METRIC_DP_ASSIGN_OR_RETURN(bound.beta, CalibrateBeta(gamma, delta, bound.m));
  bound.epsilon = PrivacyBound(bound.beta, 1.0);
  return bound;
}

absl::StatusOr<int64_t> MinDatabaseSize(double eps_target, double gamma,
                                        double delta, double m) {
  if (!(eps_target > 0.0) || !std::isfinite(eps_target)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target epsilon must be finite and > 0, got ", eps_target));
  }
  METRIC_DP_ASSIGN_OR_RETURN(double beta, CalibrateBeta(gamma, delta, m));
  const double ratio = PrivacyBound(beta, 1.0) / eps_target;
  if (ratio >= static_cast<double>(std::numeric_limits<int64_t>::max())) {
    return absl::OutOfRangeError(
        absl::StrCat("minimum database size overflows: ", ratio));
  }
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(ratio)));
}

}  // namespace metric_dp
