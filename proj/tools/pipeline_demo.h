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

#ifndef METRIC_DP_TOOLS_PIPELINE_DEMO_H_
#define METRIC_DP_TOOLS_PIPELINE_DEMO_H_

#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "metric_dp/json_io.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {

struct DemoConfig {
  SpacePtr space;
  double gamma = 0.5;
  double delta = 0.1;
  // Cover depth for the base measure; DefaultDepth(space) when unset.
  std::optional<int> depth;
  std::vector<size_t> discrete_sizes = {4, 8, 16, 32};
};

// End-to-end run on one space with the identity map: cover hierarchy, cover
// measure, its modulus at gamma/2, the calibrated beta, and the audited
// privacy and utility of the resulting exponential mechanism. Also tabulates
// the disjoint-ball lower bound on the discrete spaces of `discrete_sizes`
// against ln(N/2).
absl::StatusOr<Json> PipelineDemo(const DemoConfig& config);

}  // namespace metric_dp

#endif  // METRIC_DP_TOOLS_PIPELINE_DEMO_H_
