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

#include "metric_dp/auditor.h"

#include <bit>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double Floor(double p) { return p < kProbabilityFloor ? 0.0 : p; }

absl::Status CheckMapMatchesTable(const MechanismTable& mech,
                                  const LipschitzMap& map) {
  if (!(map.domain() == mech.input_space())) {
    return absl::InvalidArgumentError(
        "map domain does not match the mechanism's input space");
  }
  if (!(map.codomain() == mech.output_space())) {
    return absl::InvalidArgumentError(
        "map codomain does not match the mechanism's output space");
  }
  return absl::OkStatus();
}

double RowMass(const std::vector<double>& row,
               const std::vector<size_t>& members) {
  double mass = 0.0;
  for (size_t y : members) mass += row[y];
  return mass;
}

}  // namespace

PrivacyAuditReport AuditPrivacy(const MechanismTable& mech,
                                bool include_per_pair) {
  const FiniteMetricSpace& input = mech.input_space();
  const size_t n = input.size();
  const size_t outputs = mech.output_space().size();

  PrivacyAuditReport report;
  if (include_per_pair) {
    report.per_pair_max.emplace(n, std::vector<double>(n, 0.0));
  }
  for (size_t x = 0; x < n; ++x) {
    for (size_t z = 0; z < n; ++z) {
      if (x == z) continue;
      const double rho = input.distance(x, z);
      const bool zero_distance = rho <= kMetricTolerance;
      double pair_max = 0.0;
      for (size_t y = 0; y < outputs; ++y) {
        const double a = Floor(mech.row(x)[y]);
        const double b = Floor(mech.row(z)[y]);
        if (a == 0.0) continue;
        double value;
        if (b == 0.0) {
          value = kInfinity;
        } else {
          const double log_ratio = std::log(a) - std::log(b);
          if (zero_distance) {
            value = log_ratio > kMetricTolerance ? kInfinity : 0.0;
          } else {
            value = log_ratio / rho;
          }
        }
        if (value == kInfinity && zero_distance) {
          report.zero_distance_violation = true;
        }
        pair_max = std::max(pair_max, value);
        if (value > report.epsilon_max) {
          report.epsilon_max = value;
          report.witness = PrivacyWitness{x, z, y};
        }
      }
      if (include_per_pair) (*report.per_pair_max)[x][z] = pair_max;
    }
  }
  return report;
}

absl::StatusOr<UtilityAuditReport> AuditUtility(const MechanismTable& mech,
                                                const LipschitzMap& map,
                                                double gamma) {
  if (!(gamma >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be >= 0, got ", gamma));
  }
  METRIC_DP_RETURN_IF_ERROR(CheckMapMatchesTable(mech, map));
  if (mech.input_space().empty()) {
    return absl::InvalidArgumentError("utility audit of an empty input space");
  }
  UtilityAuditReport report;
  report.gamma = gamma;
  report.min_mass = kInfinity;
  for (size_t x = 0; x < mech.input_space().size(); ++x) {
    const double mass = RowMass(
        mech.row(x), BallIndices(mech.output_space(), map.image(x), gamma));
    report.per_input_mass.push_back(mass);
    if (mass < report.min_mass) {
      report.min_mass = mass;
      report.worst_input = x;
    }
  }
  return report;
}

absl::StatusOr<ImpossibilityBound> ImpossibilityLowerBound(
    const MechanismTable& mech, const LipschitzMap& map,
    absl::Span<const std::string> centers, double radius,
    double utility_threshold) {
  if (!(radius >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ball radius must be >= 0, got ", radius));
  }
  if (!(utility_threshold > 0.0 && utility_threshold < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "utility threshold must lie in (0, 1), got ", utility_threshold));
  }
  METRIC_DP_RETURN_IF_ERROR(CheckMapMatchesTable(mech, map));
  if (centers.size() < 2) {
    return absl::InvalidArgumentError(
        "lower bound needs at least two centers");
  }
  const FiniteMetricSpace& input = mech.input_space();
  const FiniteMetricSpace& output = mech.output_space();

  std::vector<size_t> inputs;
  absl::flat_hash_set<size_t> seen;
  for (const std::string& label : centers) {
    METRIC_DP_ASSIGN_OR_RETURN(size_t x, input.IndexOf(label));
    if (!seen.insert(x).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("center \"", label, "\" is listed twice"));
    }
    inputs.push_back(x);
  }

  std::vector<std::vector<size_t>> balls;
  for (size_t x : inputs) {
    balls.push_back(BallIndices(output, map.image(x), radius));
  }
  std::vector<int> owner(output.size(), -1);
  for (size_t i = 0; i < balls.size(); ++i) {
    for (size_t y : balls[i]) {
      if (owner[y] >= 0) {
        return absl::FailedPreconditionError(absl::StrCat(
            "balls around centers \"", centers[owner[y]], "\" and \"",
            centers[i], "\" overlap at output \"", output.label(y), "\""));
      }
      owner[y] = static_cast<int>(i);
    }
  }
  for (size_t i = 0; i < inputs.size(); ++i) {
    const double own_mass = RowMass(mech.row(inputs[i]), balls[i]);
    if (!(own_mass > utility_threshold)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "utility hypothesis violated at center \"", centers[i],
          "\": ball mass ", own_mass, " is not above ", utility_threshold));
    }
  }

  ImpossibilityBound bound{-kInfinity, 0};
  const size_t anchor = inputs[0];
  for (size_t i = 1; i < inputs.size(); ++i) {
    const double own = Floor(RowMass(mech.row(inputs[i]), balls[i]));
    const double leaked = Floor(RowMass(mech.row(anchor), balls[i]));
    const double rho = input.distance(inputs[i], anchor);
    double value;
    if (leaked == 0.0 || rho <= kMetricTolerance) {
      value = kInfinity;
    } else {
      value = (std::log(own) - std::log(leaked)) / rho;
    }
    if (value > bound.eps_lower) {
      bound.eps_lower = value;
      bound.witness_index = i;
    }
  }
  return bound;
}

absl::StatusOr<EmInequalityReport> CheckEmInequalities(
    const ExpMechParams& params, absl::string_view x_label,
    absl::string_view z_label) {
  const LipschitzMap& map = params.map();
  const FiniteMetricSpace& output = map.codomain();
  if (output.size() > kMaxSubsetOutputs) {
    return absl::FailedPreconditionError(absl::StrCat(
        "output space has ", output.size(), " points; subset enumeration is "
        "limited to ", kMaxSubsetOutputs, ", use AuditPrivacy instead"));
  }
  METRIC_DP_ASSIGN_OR_RETURN(size_t x, map.domain().IndexOf(x_label));
  METRIC_DP_ASSIGN_OR_RETURN(size_t z, map.domain().IndexOf(z_label));

  const size_t n = output.size();
  const double beta = params.beta();
  std::vector<double> wx(n), wz(n);
  for (size_t y = 0; y < n; ++y) {
    const double base = params.base().weight(y);
    wx[y] = base * std::exp(-beta * output.distance(map.image(x), y));
    wz[y] = base * std::exp(-beta * output.distance(map.image(z), y));
  }
  const double slack = std::exp(beta * map.lipschitz_constant() *
                                map.domain().distance(x, z));

  EmInequalityReport report;
  const uint64_t subsets = uint64_t{1} << n;
  // sum_x[mask] = sum_x[mask without its lowest bit] + wx[lowest bit].
  std::vector<double> sum_x(subsets, 0.0), sum_z(subsets, 0.0);
  for (uint64_t mask = 1; mask < subsets; ++mask) {
    const int low = std::countr_zero(mask);
    const uint64_t rest = mask & (mask - 1);
    sum_x[mask] = sum_x[rest] + wx[low];
    sum_z[mask] = sum_z[rest] + wz[low];
    ++report.subsets_checked;
    const double rhs = slack * sum_z[mask];
    if (report.passed && sum_x[mask] > rhs + 1e-9) {
      std::vector<size_t> members;
      for (size_t y = 0; y < n; ++y) {
        if (mask & (uint64_t{1} << y)) members.push_back(y);
      }
      report.passed = false;
      report.first_violation = EmInequalityViolation{
          EmInequalityViolation::Kind::kSubsetMass, std::move(members),
          sum_x[mask], rhs};
    }
  }
  const double z_full = sum_z[subsets - 1];
  const double x_full = sum_x[subsets - 1];
  if (report.passed && x_full < z_full / slack - 1e-9) {
    report.passed = false;
    report.first_violation = EmInequalityViolation{
        EmInequalityViolation::Kind::kNormalizer, {}, x_full, z_full / slack};
  }
  return report;
}

}  // namespace metric_dp
