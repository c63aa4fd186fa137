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

// Acceptance suite. Runs each criterion at its pinned tolerance and prints
// one PASS/FAIL line per criterion; exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cli.h"
#include "generators.h"
#include "metric_dp/auditor.h"
#include "metric_dp/covering.h"
#include "metric_dp/exp_mechanism.h"
#include "metric_dp/measure.h"
#include "metric_dp/metric_space.h"

namespace metric_dp {
namespace {

using ::metric_dp::testing::RandomMap;
using ::metric_dp::testing::RandomPositiveMeasure;
using ::metric_dp::testing::RandomSpace;
using ::metric_dp::testing::SubsetExhaustiveEpsilon;

struct Verdict {
  bool passed = true;
  std::string detail;
  std::string first_failure;

  void Fail(std::string why) {
    if (passed) first_failure = std::move(why);
    passed = false;
  }
};

// Random space with a random overall scale, so instances are not confined
// to diameter <= 1.
SpacePtr ScaledRandomSpace(std::mt19937_64& rng, size_t n,
                           const std::string& prefix) {
  SpacePtr unit = RandomSpace(rng, n, prefix);
  std::uniform_real_distribution<double> log_scale(std::log(0.1),
                                                   std::log(10.0));
  return Share(*Rescale(*unit, std::exp(log_scale(rng))));
}

Verdict PrivacyBoundHolds() {
  Verdict v;
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> beta(0.0, 20.0);
  double worst_gap = -INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    SpacePtr in = ScaledRandomSpace(rng, size(rng), "x");
    SpacePtr out = ScaledRandomSpace(rng, size(rng), "y");
    LipschitzMap map = RandomMap(rng, in, out);
    auto params = *ExpMechParams::Create(map, RandomPositiveMeasure(rng, out),
                                         beta(rng));
    const double audited = AuditPrivacy(*Tabulate(params)).epsilon_max;
    const double bound = PrivacyBound(params.beta(), map.lipschitz_constant());
    worst_gap = std::max(worst_gap, audited - bound);
    if (!(audited <= bound + 1e-9)) {
      v.Fail(absl::StrFormat("instance %d: audited %.17g > 2C*beta %.17g",
                             trial, audited, bound));
    }
  }
  v.detail = absl::StrFormat("200 instances, max(audit - 2C*beta) = %.3g",
                             worst_gap);
  return v;
}

Verdict CalibratedUtilityHolds() {
  Verdict v;
  int checked = 0;
  double tightest = INFINITY;
  for (int n : {3, 5, 9}) {
    SpacePtr grid = Share(FiniteMetricSpace::Grid(n));
    LipschitzMap identity = LipschitzMap::Identity(grid);
    UniformlyPositiveMeasure upm =
        *BuildUniformlyPositiveMeasure(grid, DefaultDepth(*grid));
    DiscreteMeasure normalized = *Normalize(upm.measure);
    for (double gamma : {0.1, 0.25, 0.5, 1.0}) {
      for (double delta : {0.01, 0.1, 0.5}) {
        // The cover measure as built and its normalization both qualify as
        // the base; each is calibrated with its own modulus.
        for (const DiscreteMeasure* base : {&upm.measure, &normalized}) {
          const double m = *UniformPositivityModulus(*base, gamma / 2);
          const double beta = *CalibrateBeta(gamma, delta, m);
          auto table =
              *Tabulate(*ExpMechParams::Create(identity, *base, beta));
          UtilityAuditReport report = *AuditUtility(table, identity, gamma);
          ++checked;
          tightest = std::min(tightest, report.min_mass - (1 - delta));
          if (!(report.min_mass >= 1 - delta)) {
            v.Fail(absl::StrFormat(
                "n=%d gamma=%g delta=%g: utility %.17g < %.17g", n, gamma,
                delta, report.min_mass, 1 - delta));
          }
        }
      }
    }
  }
  v.detail = absl::StrFormat(
      "%d configurations, min(utility - (1 - delta)) = %.3g", checked,
      tightest);
  return v;
}

std::vector<std::pair<std::string, SpacePtr>> DemoSpaces() {
  std::vector<std::pair<std::string, SpacePtr>> spaces;
  for (int n : {1, 3, 5, 9}) {
    spaces.emplace_back(absl::StrCat("grid", n),
                        Share(FiniteMetricSpace::Grid(n)));
  }
  for (int n : {4, 8, 16, 32}) {
    spaces.emplace_back(absl::StrCat("discrete", n),
                        Share(FiniteMetricSpace::Discrete(n)));
  }
  std::mt19937_64 rng(1003);
  for (int k = 0; k < 4; ++k) {
    spaces.emplace_back(absl::StrCat("random", k), RandomSpace(rng, 10));
  }
  return spaces;
}

Verdict CoveringCertificate() {
  Verdict v;
  int balls = 0;
  double worst_mass_error = 0.0;
  for (const auto& [name, space] : DemoSpaces()) {
    const int base_depth = DefaultDepth(*space);
    for (int depth : {base_depth, base_depth + 2}) {
      UniformlyPositiveMeasure upm =
          *BuildUniformlyPositiveMeasure(space, depth);
      const double expected_mass = 1.0 - std::ldexp(1.0, -depth);
      const double mass_error =
          std::abs(upm.measure.total_mass() - expected_mass);
      worst_mass_error = std::max(worst_mass_error, mass_error);
      if (!(mass_error <= 1e-12)) {
        v.Fail(absl::StrFormat("%s L=%d: total mass %.17g", name, depth,
                               upm.measure.total_mass()));
      }
      // 20 radii spaced geometrically over [2^-L, 1].
      for (int k = 0; k < 20; ++k) {
        const double r = std::ldexp(1.0, -depth) *
                         std::pow(2.0, depth * k / 19.0);
        PositivityBound bound = *PositivityLowerBound(upm.hierarchy, r);
        if (bound.truncated) {
          v.Fail(absl::StrFormat("%s L=%d r=%g: truncated", name, depth, r));
          continue;
        }
        for (size_t y = 0; y < space->size(); ++y) {
          const double mass =
              MeasureOfIndices(upm.measure, BallIndices(*space, y, r));
          ++balls;
          if (!(mass >= bound.value)) {
            v.Fail(absl::StrFormat("%s L=%d r=%g y=%s: mass %.17g < %.17g",
                                   name, depth, r, space->label(y), mass,
                                   bound.value));
          }
        }
      }
    }
  }
  v.detail = absl::StrFormat(
      "%d balls over %d spaces, max |total mass - (1 - 2^-L)| = %.3g", balls,
      static_cast<int>(DemoSpaces().size()), worst_mass_error);
  return v;
}

Verdict ImpossibilityScaling() {
  Verdict v;
  int tested = 0;
  std::string per_n;
  for (int n : {4, 8, 16, 32}) {
    SpacePtr space = Share(FiniteMetricSpace::Discrete(n));
    LipschitzMap identity = LipschitzMap::Identity(space);
    DiscreteMeasure base =
        (*BuildUniformlyPositiveMeasure(space, DefaultDepth(*space))).measure;
    const double floor = std::log(n / 2.0);
    int tested_here = 0;
    double smallest = INFINITY;
    for (int step = 0; step <= 40; ++step) {
      const double beta = 0.5 * step;
      auto table = *Tabulate(*ExpMechParams::Create(identity, base, beta));
      // Precondition evaluated directly: every ball (a singleton at r = 0.5)
      // holds more than half its center's row.
      bool holds = true;
      for (int x = 0; x < n; ++x) holds = holds && table.row(x)[x] > 0.5;
      auto bound =
          ImpossibilityLowerBound(table, identity, space->labels(), 0.5);
      if (!holds) {
        if (bound.ok()) {
          v.Fail(absl::StrFormat("N=%d beta=%g: precondition fails but the "
                                 "bound was computed", n, beta));
        }
        continue;
      }
      if (!bound.ok()) {
        v.Fail(absl::StrCat("N=", n, " beta=", beta, ": ",
                            bound.status().ToString()));
        continue;
      }
      ++tested;
      ++tested_here;
      smallest = std::min(smallest, bound->eps_lower - floor);
      const double audited = AuditPrivacy(table).epsilon_max;
      if (!(bound->eps_lower >= floor - 1e-9)) {
        v.Fail(absl::StrFormat("N=%d beta=%g: eps_lower %.17g < ln(N/2)", n,
                               beta, bound->eps_lower));
      }
      if (!(audited >= bound->eps_lower)) {
        v.Fail(absl::StrFormat("N=%d beta=%g: audit %.17g < eps_lower %.17g",
                               n, beta, audited, bound->eps_lower));
      }
    }
    if (tested_here == 0) v.Fail(absl::StrCat("N=", n, ": no beta tested"));
    absl::StrAppendFormat(&per_n, " N=%d:%d(min margin %.3g)", n, tested_here,
                          smallest);
  }
  v.detail = absl::StrCat(tested, " tables;", per_n);
  return v;
}

Verdict SubsetExhaustion() {
  Verdict v;
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<int> in_size(1, 8);
  std::uniform_int_distribution<int> out_size(1, 6);
  std::uniform_real_distribution<double> beta(0.0, 20.0);
  double worst = 0.0;
  int pairs = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SpacePtr in = ScaledRandomSpace(rng, in_size(rng), "x");
    SpacePtr out = ScaledRandomSpace(rng, out_size(rng), "y");
    auto params = *ExpMechParams::Create(
        RandomMap(rng, in, out), RandomPositiveMeasure(rng, out), beta(rng));
    MechanismTable table = *Tabulate(params);
    const double singleton = AuditPrivacy(table).epsilon_max;
    const double subsets = SubsetExhaustiveEpsilon(table);
    const double gap = std::abs(singleton - subsets);
    worst = std::max(worst, gap);
    if (!(gap <= 1e-9)) {
      v.Fail(absl::StrFormat("instance %d: singleton %.17g vs subsets %.17g",
                             trial, singleton, subsets));
    }
    for (const std::string& x : in->labels()) {
      for (const std::string& z : in->labels()) {
        auto report = CheckEmInequalities(params, x, z);
        ++pairs;
        if (!report.ok() || !report->passed) {
          v.Fail(absl::StrCat("instance ", trial, " pair (", x, ",", z,
                              "): inequality check failed"));
        }
      }
    }
  }
  v.detail = absl::StrFormat(
      "50 instances, %d ordered pairs, max |singleton - subset| = %.3g",
      pairs, worst);
  return v;
}

Verdict NetPackingDuality() {
  Verdict v;
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SpacePtr space = ScaledRandomSpace(rng, size(rng), "p");
    const double diameter = *Diameter(*space);
    const double r = std::max(1e-3, diameter) * (0.05 + 1.1 * unit(rng));
    std::vector<size_t> net = *GreedyNetIndices(*space, r);
    std::vector<size_t> packing = *MaxPackingIndices(*space, r / 2);
    for (size_t y = 0; y < space->size(); ++y) {
      bool covered = false;
      int owners = 0;
      for (size_t c : net) {
        covered = covered || space->distance(c, y) <= r;
        owners += space->distance(c, y) <= r / 2;
      }
      if (!covered) v.Fail(absl::StrCat("trial ", trial, ": point uncovered"));
      if (owners > 1) {
        v.Fail(absl::StrCat("trial ", trial, ": r/2 balls overlap"));
      }
    }
    if (net.size() != packing.size()) {
      v.Fail(absl::StrCat("trial ", trial, ": |net| ", net.size(),
                          " != |packing| ", packing.size()));
    }
  }
  v.detail = "100 metrics";
  return v;
}

Verdict DatabaseSizeArithmetic() {
  Verdict v;
  const int64_t base = *MinDatabaseSize(0.1, 1.0, 0.5, 1.0);
  if (base != 28) v.Fail(absl::StrCat("N(0.1) = ", base, ", expected 28"));
  const int64_t halved = *MinDatabaseSize(0.05, 1.0, 0.5, 1.0);
  if (halved != 56) v.Fail(absl::StrCat("N(0.05) = ", halved, ", expected 56"));

  // Independent evaluation: epsilon* = 2 * (2 / gamma) * ln(1 / (delta m)).
  const auto independent = [](double eps) {
    const double eps_star = 2.0 * (2.0 / 1.0) * std::log(1.0 / (0.5 * 1.0));
    return static_cast<int64_t>(std::ceil(eps_star / eps));
  };
  std::string pairs;
  for (int k = 1; k <= 10; ++k) {
    const double eps = 0.1 * k;
    const int64_t n = *MinDatabaseSize(eps, 1.0, 0.5, 1.0);
    const int64_t n_half = *MinDatabaseSize(eps / 2, 1.0, 0.5, 1.0);
    absl::StrAppend(&pairs, " ", n, "->", n_half);
    if (n != independent(eps) || n_half != independent(eps / 2)) {
      v.Fail(absl::StrFormat("eps=%g: %d/%d vs independent %d/%d", eps, n,
                             n_half, independent(eps), independent(eps / 2)));
    }
    // Ceilings double up to one unit of rounding.
    if (n_half != 2 * n && n_half != 2 * n - 1) {
      v.Fail(absl::StrFormat("eps=%g: N %d -> %d is not a doubling", eps, n,
                             n_half));
    }
  }
  v.detail = absl::StrCat("N(0.1)=", base, ", N(0.05)=", halved, ";", pairs);
  return v;
}

Verdict SamplerFidelity() {
  Verdict v;
  std::vector<std::pair<std::string, ExpMechParams>> instances;
  {
    SpacePtr x3 = Share(FiniteMetricSpace::Grid(3));
    instances.emplace_back(
        "grid3", *ExpMechParams::Create(LipschitzMap::Identity(x3),
                                        *DiscreteMeasure::Uniform(x3), 1.0));
    SpacePtr d5 = Share(FiniteMetricSpace::Discrete(5));
    instances.emplace_back(
        "discrete5",
        *ExpMechParams::Create(LipschitzMap::Identity(d5),
                               (*BuildUniformlyPositiveMeasure(d5, 2)).measure,
                               2.0));
    std::mt19937_64 rng(1008);
    SpacePtr in = RandomSpace(rng, 4, "x");
    SpacePtr out = RandomSpace(rng, 6, "y");
    instances.emplace_back(
        "random", *ExpMechParams::Create(RandomMap(rng, in, out),
                                         RandomPositiveMeasure(rng, out), 5.0));
  }
  constexpr int kDraws = 100000;
  double worst_z = 0.0;
  int rows = 0;
  for (const auto& [name, params] : instances) {
    const FiniteMetricSpace& in = params.map().domain();
    const FiniteMetricSpace& out = params.map().codomain();
    for (size_t x = 0; x < in.size(); ++x) {
      const uint64_t seed = 0x5eed0000 + 97 * x;
      std::vector<double> pmf = *ExpMechDistributionAt(params, x);
      std::vector<std::string> draws =
          *SampleMany(params, in.label(x), seed, kDraws);
      ++rows;
      for (size_t y = 0; y < out.size(); ++y) {
        const double hits = static_cast<double>(
            std::count(draws.begin(), draws.end(), out.label(y)));
        const double mean = kDraws * pmf[y];
        const double sigma = std::sqrt(kDraws * pmf[y] * (1 - pmf[y]));
        const double deviation = std::abs(hits - mean);
        if (sigma > 0) worst_z = std::max(worst_z, deviation / sigma);
        if (!(deviation <= 5 * sigma)) {
          v.Fail(absl::StrFormat("%s x=%s y=%s: %g draws, expected %g", name,
                                 in.label(x), out.label(y), hits, mean));
        }
      }
      if (*SampleMany(params, in.label(x), seed, kDraws) != draws) {
        v.Fail(absl::StrCat(name, " x=", in.label(x), ": reseeding differs"));
      }
    }
  }

  // The CLI report for a fixed seed is byte-identical across runs.
  const std::vector<std::string> args = {
      "sample", "--space", "", "--beta", "1", "--x", "0", "--seed", "7",
      "--count", "1000"};
  std::string first, second;
  {
    const std::string path = "acceptance_grid3.json";
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs(R"({"kind": "grid", "n": 3})", f);
    std::fclose(f);
    std::vector<std::string> with_path = args;
    with_path[2] = path;
    std::ostringstream out1, out2, err;
    const int c1 = RunCli(with_path, out1, err);
    const int c2 = RunCli(with_path, out2, err);
    std::remove(path.c_str());
    first = out1.str();
    second = out2.str();
    if (c1 != 0 || c2 != 0) v.Fail("CLI sample failed: " + err.str());
  }
  if (first != second || first.empty()) {
    v.Fail("CLI sample reports differ for the same seed");
  }
  v.detail = absl::StrFormat(
      "3 instances, %d input rows x %d draws, max |z| = %.2f; CLI report "
      "%d bytes identical",
      rows, kDraws, worst_z, static_cast<int>(first.size()));
  return v;
}

}  // namespace
}  // namespace metric_dp

int main() {
  using metric_dp::Verdict;
  const std::vector<std::pair<std::string, std::function<Verdict()>>>
      criteria = {
          {"privacy bound 2*C*beta", metric_dp::PrivacyBoundHolds},
          {"calibrated utility", metric_dp::CalibratedUtilityHolds},
          {"covering-measure certificate", metric_dp::CoveringCertificate},
          {"impossibility scaling", metric_dp::ImpossibilityScaling},
          {"singleton audit vs subset exhaustion",
           metric_dp::SubsetExhaustion},
          {"net/packing duality", metric_dp::NetPackingDuality},
          {"minimum database size", metric_dp::DatabaseSizeArithmetic},
          {"sampler fidelity", metric_dp::SamplerFidelity},
      };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Verdict v = criteria[i].second();
    std::printf("[%s] %zu %s: %s\n", v.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), v.detail.c_str());
    if (!v.passed) {
      std::printf("       first failure: %s\n", v.first_failure.c_str());
      ++failures;
    }
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
