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

#ifndef METRIC_DP_STATUS_MACROS_H_
#define METRIC_DP_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define METRIC_DP_RETURN_IF_ERROR(expr)            \
  do {                                             \
    const absl::Status _metric_dp_status = (expr); \
    if (!_metric_dp_status.ok()) {                 \
      return _metric_dp_status;                    \
    }                                              \
  } while (0)

#define METRIC_DP_STATUS_CONCAT_INNER(x, y) x##y
#define METRIC_DP_STATUS_CONCAT(x, y) METRIC_DP_STATUS_CONCAT_INNER(x, y)

#define METRIC_DP_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                    \
  if (!statusor.ok()) {                                       \
    return statusor.status();                                 \
  }                                                           \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (an absl::StatusOr<T>) and either assigns the value to
// `lhs` or returns the error from the enclosing function.
#define METRIC_DP_ASSIGN_OR_RETURN(lhs, rexpr) \
  METRIC_DP_ASSIGN_OR_RETURN_IMPL(             \
      METRIC_DP_STATUS_CONCAT(_metric_dp_statusor_, __LINE__), lhs, rexpr)

#endif  // METRIC_DP_STATUS_MACROS_H_
