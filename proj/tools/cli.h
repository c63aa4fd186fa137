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

#ifndef METRIC_DP_TOOLS_CLI_H_
#define METRIC_DP_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace metric_dp {

inline constexpr char kVersion[] = "0.1.0";

enum ExitStatus : int {
  kExitOk = 0,
  kExitThresholdFailed = 1,
  kExitParseError = 2,
  kExitDomainError = 3,
};

// Runs one command. `args` excludes the program name. The JSON report goes to
// --out when given (written atomically) and to `out` otherwise; diagnostics
// go to `err`. No report is produced for kExitParseError.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace metric_dp

#endif  // METRIC_DP_TOOLS_CLI_H_
