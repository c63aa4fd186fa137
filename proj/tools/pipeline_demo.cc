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

#include "pipeline_demo.h"

#include <cmath>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "metric_dp/auditor.h"
#include "metric_dp/covering.h"
#include "metric_dp/exp_mechanism.h"
#include "metric_dp/measure.h"
#include "metric_dp/status_macros.h"

namespace metric_dp {
namespace {

constexpr double kAuditSlack = 1e-9;

// Identity-map exponential mechanism on `space` over its cover measure,
// calibrated for (gamma, delta).
struct CalibratedRun {
  UniformlyPositiveMeasure upm;
  TradeoffBound bound;
  MechanismTable table;
};

absl::StatusOr<CalibratedRun> Calibrate(const SpacePtr& space, int depth,
                                        double gamma, double delta) {
  METRIC_DP_ASSIGN_OR_RETURN(UniformlyPositiveMeasure upm,
                             BuildUniformlyPositiveMeasure(space, depth));
  METRIC_DP_ASSIGN_OR_RETURN(TradeoffBound bound,
                             TradeoffUpperBound(upm.measure, gamma, delta));
  METRIC_DP_ASSIGN_OR_RETURN(
      ExpMechParams params,
      ExpMechParams::Create(LipschitzMap::Identity(space), upm.measure,
                            bound.beta));
  METRIC_DP_ASSIGN_OR_RETURN(MechanismTable table, Tabulate(params));
  return CalibratedRun{std::move(upm), bound, std::move(table)};
}

}  // namespace

absl::StatusOr<Json> PipelineDemo(const DemoConfig& config) {
  if (config.space == nullptr || config.space->empty()) {
    return absl::InvalidArgumentError("demo needs a nonempty space");
  }
  const int depth = config.depth.value_or(DefaultDepth(*config.space));
  METRIC_DP_ASSIGN_OR_RETURN(
      CalibratedRun run,
      Calibrate(config.space, depth, config.gamma, config.delta));
  const LipschitzMap identity = LipschitzMap::Identity(config.space);
  const PrivacyAuditReport privacy = AuditPrivacy(run.table);
  METRIC_DP_ASSIGN_OR_RETURN(UtilityAuditReport utility,
                             AuditUtility(run.table, identity, config.gamma));
  const double privacy_bound =
      PrivacyBound(run.bound.beta, identity.lipschitz_constant());

  Json report{
      {"space", SpaceToJson(*config.space)},
      {"gamma", config.gamma},
      {"delta", config.delta},
      {"hierarchy", CoverHierarchyToJson(run.upm.hierarchy)},
      {"measure", MeasureToJson(run.upm.measure)["weights"]},
      {"total_mass", run.upm.measure.total_mass()},
      {"diameter_exceeds_one", run.upm.diameter_exceeds_one},
      {"modulus", run.bound.m},
      {"beta", run.bound.beta},
      {"lipschitz_c", identity.lipschitz_constant()},
      {"privacy_bound", privacy_bound},
      {"audited_epsilon", NumberOrInfinity(privacy.epsilon_max)},
      {"audited_utility", utility.min_mass},
      {"privacy_ok", privacy.epsilon_max <= privacy_bound + kAuditSlack},
      {"utility_ok", utility.min_mass >= 1.0 - config.delta},
  };

  // Discrete family: unit distances, radius 1/2 balls are single points.
  constexpr double kBallRadius = 0.5;
  Json rows = Json::array();
  for (size_t n : config.discrete_sizes) {
    SpacePtr discrete = Share(FiniteMetricSpace::Discrete(n));
    METRIC_DP_ASSIGN_OR_RETURN(
        CalibratedRun lb_run,
        Calibrate(discrete, DefaultDepth(*discrete), kBallRadius,
                  config.delta));
    METRIC_DP_ASSIGN_OR_RETURN(
        ImpossibilityBound bound,
        ImpossibilityLowerBound(lb_run.table, LipschitzMap::Identity(discrete),
                                discrete->labels(), kBallRadius));
    const PrivacyAuditReport audited = AuditPrivacy(lb_run.table);
    const double floor = std::log(static_cast<double>(n) / 2.0);
    rows.push_back(Json{
        {"n", n},
        {"beta", lb_run.bound.beta},
        {"eps_lower", NumberOrInfinity(bound.eps_lower)},
        {"witness", discrete->label(bound.witness_index)},
        {"ln_n_over_2", floor},
        {"audited_epsilon", NumberOrInfinity(audited.epsilon_max)},
        {"holds", bound.eps_lower >= floor - kAuditSlack &&
                      audited.epsilon_max >= bound.eps_lower - kAuditSlack},
    });
  }
  report["lower_bounds"] = std::move(rows);
  return report;
}

}  // namespace metric_dp
