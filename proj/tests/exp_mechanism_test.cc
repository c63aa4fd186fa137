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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "metric_dp/measure.h"
#include "test_util.h"

namespace metric_dp {
namespace {

using ::metric_dp::testing::DirectPmf;
using ::metric_dp::testing::IsOk;
using ::metric_dp::testing::RandomMap;
using ::metric_dp::testing::RandomPositiveMeasure;
using ::metric_dp::testing::RandomSpace;
using ::metric_dp::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::Each;
using ::testing::HasSubstr;
using ::testing::Pointwise;

SpacePtr X3() { return Share(FiniteMetricSpace::Grid(3)); }

ExpMechParams X3Identity(double beta) {
  SpacePtr x3 = X3();
  return *ExpMechParams::Create(LipschitzMap::Identity(x3),
                                *DiscreteMeasure::Uniform(x3), beta);
}

double Sum(const std::vector<double>& v) {
  double total = 0.0;
  for (double p : v) total += p;
  return total;
}

TEST(ExpMechParamsTest, Validates) {
  SpacePtr x3 = X3();
  LipschitzMap id = LipschitzMap::Identity(x3);
  DiscreteMeasure uniform = *DiscreteMeasure::Uniform(x3);
  EXPECT_THAT(ExpMechParams::Create(id, uniform, -1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ExpMechParams::Create(id, uniform, NAN),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ExpMechParams::Create(id, uniform, INFINITY),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ExpMechParams::Create(
                  id, *DiscreteMeasure::Create(x3, {0, 0, 0}), 1.0),
              StatusIs(absl::StatusCode::kFailedPrecondition,
                       HasSubstr("degenerate measure")));
  auto elsewhere =
      *DiscreteMeasure::Uniform(Share(FiniteMetricSpace::Discrete(3)));
  EXPECT_THAT(ExpMechParams::Create(id, elsewhere, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("codomain")));
  // An equal but separately built space is accepted.
  EXPECT_THAT(ExpMechParams::Create(id, *DiscreteMeasure::Uniform(X3()), 1.0),
              IsOk());
}

TEST(ExpMechDistributionTest, ThreePointGridAtBetaOne) {
  auto row = ExpMechDistribution(X3Identity(1.0), "0");
  ASSERT_THAT(row, IsOk());
  EXPECT_THAT(*row, Pointwise(DoubleNear(1e-15),
                              {0.50648039105565403, 0.3071958857184984,
                               0.18632372322584758}));
  auto middle = ExpMechDistribution(X3Identity(1.0), "0.5");
  ASSERT_THAT(middle, IsOk());
  const double e = std::exp(-0.5);
  EXPECT_THAT(*middle,
              Pointwise(DoubleNear(1e-15),
                        {e / (1 + 2 * e), 1 / (1 + 2 * e), e / (1 + 2 * e)}));
  EXPECT_THAT(ExpMechDistribution(X3Identity(1.0), "0.3"),
              StatusIs(absl::StatusCode::kNotFound));
}

TEST(ExpMechDistributionTest, ZeroBetaReturnsNormalizedBase) {
  std::mt19937_64 rng(200);
  for (int trial = 0; trial < 50; ++trial) {
    SpacePtr in = RandomSpace(rng, 5);
    SpacePtr out = RandomSpace(rng, 6, "q");
    DiscreteMeasure base = RandomPositiveMeasure(rng, out);
    auto params =
        *ExpMechParams::Create(RandomMap(rng, in, out), base, 0.0);
    DiscreteMeasure normalized = *Normalize(base);
    for (size_t x = 0; x < in->size(); ++x) {
      EXPECT_THAT(*ExpMechDistributionAt(params, x),
                  Pointwise(DoubleNear(1e-15), normalized.weights()));
    }
  }
}

TEST(ExpMechDistributionTest, PointMassBaseIsPointMass) {
  SpacePtr x3 = X3();
  auto base = *DiscreteMeasure::Create(x3, {0, 2.5, 0});
  for (double beta : {0.0, 1.0, 50.0}) {
    auto params =
        *ExpMechParams::Create(LipschitzMap::Identity(x3), base, beta);
    for (const std::string& x : x3->labels()) {
      EXPECT_THAT(*ExpMechDistribution(params, x), ElementsAre(0, 1, 0));
    }
  }
}

TEST(ExpMechDistributionTest, MatchesDirectEvaluation) {
  std::mt19937_64 rng(201);
  std::uniform_int_distribution<int> size(1, 10);
  std::uniform_real_distribution<double> beta(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    SpacePtr in = RandomSpace(rng, size(rng));
    SpacePtr out = RandomSpace(rng, size(rng), "q");
    DiscreteMeasure base = RandomPositiveMeasure(rng, out);
    LipschitzMap map = RandomMap(rng, in, out);
    auto params = *ExpMechParams::Create(map, base, beta(rng));
    for (size_t x = 0; x < in->size(); ++x) {
      std::vector<double> row = *ExpMechDistributionAt(params, x);
      EXPECT_NEAR(Sum(row), 1.0, 1e-12);
      EXPECT_THAT(row, Each(::testing::Ge(0.0)));
      EXPECT_THAT(row, Pointwise(DoubleNear(1e-12),
                                 DirectPmf(*out, base.weights(), map.image(x),
                                           params.beta())));
    }
  }
}

// The unshifted formula underflows to 0/0 here; the shifted one does not.
TEST(ExpMechDistributionTest, StableWhenAllWeightIsFar) {
  auto out = FiniteMetricSpace::Create(
      {"home", "far", "farther"},
      {{0, 1000, 1001}, {1000, 0, 1}, {1001, 1, 0}});
  ASSERT_THAT(out, IsOk());
  SpacePtr y = Share(*std::move(out));
  SpacePtr x = Share(FiniteMetricSpace::Discrete(1));
  auto map = *LipschitzMap::FromIndices(x, y, {0});
  auto params = *ExpMechParams::Create(
      map, *DiscreteMeasure::Create(y, {0, 1, 1}), 1.0);
  auto row = ExpMechDistributionAt(params, 0);
  ASSERT_THAT(row, IsOk());
  const double e = std::exp(1.0);
  EXPECT_THAT(*row, Pointwise(DoubleNear(1e-15),
                              {0.0, e / (1 + e), 1 / (1 + e)}));
}

TEST(ExpMechDistributionTest, BallMassIncreasesWithBeta) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> beta(0.0, 15.0);
  std::uniform_real_distribution<double> gamma(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    SpacePtr in = RandomSpace(rng, 4);
    SpacePtr out = RandomSpace(rng, 7, "q");
    DiscreteMeasure base = RandomPositiveMeasure(rng, out);
    LipschitzMap map = RandomMap(rng, in, out);
    double b1 = beta(rng), b2 = beta(rng);
    if (b1 > b2) std::swap(b1, b2);
    auto low = *ExpMechParams::Create(map, base, b1);
    auto high = *ExpMechParams::Create(map, base, b2);
    const double g = gamma(rng);
    for (size_t x = 0; x < in->size(); ++x) {
      std::vector<size_t> ball = BallIndices(*out, map.image(x), g);
      std::vector<double> p_low = *ExpMechDistributionAt(low, x);
      std::vector<double> p_high = *ExpMechDistributionAt(high, x);
      double m_low = 0.0, m_high = 0.0;
      for (size_t y : ball) {
        m_low += p_low[y];
        m_high += p_high[y];
      }
      EXPECT_LE(m_low, m_high + 1e-12);
    }
  }
}

// Unnormalized weights w_x(y) = base(y) exp(-beta sigma(f(x), y)), compared
// over every subset of outputs.
TEST(ExpMechDistributionTest, WeightInequalitiesHoldOnEverySubset) {
  std::mt19937_64 rng(203);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> beta(0.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    SpacePtr in = RandomSpace(rng, size(rng));
    SpacePtr out = RandomSpace(rng, size(rng), "q");
    DiscreteMeasure base = RandomPositiveMeasure(rng, out);
    LipschitzMap map = RandomMap(rng, in, out);
    const double b = beta(rng);
    const size_t m = out->size();
    for (size_t x = 0; x < in->size(); ++x) {
      for (size_t z = 0; z < in->size(); ++z) {
        const double shift = std::exp(
            b * map.lipschitz_constant() * in->distance(x, z));
        double zx = 0.0, zz = 0.0;
        for (uint32_t mask = 1; mask < (1u << m); ++mask) {
          double sx = 0.0, sz = 0.0;
          for (size_t y = 0; y < m; ++y) {
            if (!(mask & (1u << y))) continue;
            sx += base.weight(y) * std::exp(-b * out->distance(map.image(x), y));
            sz += base.weight(y) * std::exp(-b * out->distance(map.image(z), y));
          }
          EXPECT_LE(sx, shift * sz * (1 + 1e-12) + 1e-300);
          if (mask == (1u << m) - 1) {
            zx = sx;
            zz = sz;
          }
        }
        EXPECT_GE(zx * (1 + 1e-12), zz / shift);
      }
    }
  }
}

TEST(MechanismTableTest, Validates) {
  SpacePtr x3 = X3();
  SpacePtr two = Share(FiniteMetricSpace::Discrete(2));
  EXPECT_THAT(MechanismTable::Create(two, x3, {{1, 0, 0}, {0, 0, 1}}),
              IsOk());
  EXPECT_THAT(MechanismTable::Create(two, x3, {{1, 0, 0}}),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("1 rows for 2 inputs")));
  EXPECT_THAT(MechanismTable::Create(two, x3, {{1, 0}, {0, 0, 1}}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(MechanismTable::Create(two, x3, {{1.1, -0.1, 0}, {0, 0, 1}}),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("invalid probability")));
  EXPECT_THAT(MechanismTable::Create(two, x3, {{0.5, 0.4, 0}, {0, 0, 1}}),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("sums to 0.9")));
  EXPECT_THAT(
      MechanismTable::Create(two, x3, {{0.5, 0.5 + 5e-10, 0}, {0, 0, 1}}),
      IsOk());
}

TEST(TabulateTest, ThreePointGrid) {
  auto table = Tabulate(X3Identity(1.0));
  ASSERT_THAT(table, IsOk());
  ASSERT_EQ(table->rows().size(), 3);
  EXPECT_THAT(table->row(0), Pointwise(DoubleNear(1e-15),
                                       {0.50648039105565403, 0.3071958857184984,
                                        0.18632372322584758}));
  for (const auto& row : table->rows()) EXPECT_NEAR(Sum(row), 1.0, 1e-9);
  EXPECT_THAT(table->row(2), Pointwise(DoubleNear(1e-15),
                                       {0.18632372322584758, 0.3071958857184984,
                                        0.50648039105565403}));
}

TEST(TabulateTest, ZeroBetaRowsAreIdentical) {
  auto table = *Tabulate(X3Identity(0.0));
  EXPECT_EQ(table.row(0), table.row(1));
  EXPECT_EQ(table.row(1), table.row(2));
}

TEST(TabulateTest, SingletonInput) {
  SpacePtr one = Share(FiniteMetricSpace::Grid(1));
  auto params = *ExpMechParams::Create(LipschitzMap::Identity(one),
                                       *DiscreteMeasure::Uniform(one), 3.0);
  auto table = *Tabulate(params);
  EXPECT_THAT(table.rows(), ElementsAre(ElementsAre(1.0)));
}

TEST(SeededStreamTest, MatchesSplitMix64ReferenceOutputs) {
  SeededStream stream(0);
  EXPECT_EQ(stream.Next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(stream.Next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(stream.Next(), 0x06c45d188009454fULL);
  SeededStream units(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = units.NextUnit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SampleIndexTest, InverseCdf) {
  std::vector<double> pmf = {0.2, 0.3, 0.5};
  EXPECT_EQ(SampleIndex(pmf, 0.0), 0);
  EXPECT_EQ(SampleIndex(pmf, 0.19), 0);
  EXPECT_EQ(SampleIndex(pmf, 0.2), 1);
  EXPECT_EQ(SampleIndex(pmf, 0.49), 1);
  EXPECT_EQ(SampleIndex(pmf, 0.51), 2);
  EXPECT_EQ(SampleIndex(pmf, std::nextafter(1.0, 0.0)), 2);
}

TEST(SampleIndexTest, NeverPicksZeroProbabilityOutcomes) {
  std::vector<double> pmf = {0.0, 1.0, 0.0};
  for (double u : {0.0, 0.3, 0.999999999}) EXPECT_EQ(SampleIndex(pmf, u), 1);
  // A row that sums to slightly under 1 still lands on a positive entry.
  std::vector<double> short_row = {0.5, 0.5 - 1e-10, 0.0};
  EXPECT_EQ(SampleIndex(short_row, std::nextafter(1.0, 0.0)), 1);
}

TEST(SampleTest, PointMassAlwaysReturnsItsSupport) {
  SpacePtr x3 = X3();
  auto params = *ExpMechParams::Create(
      LipschitzMap::Identity(x3), *DiscreteMeasure::Create(x3, {0, 0, 1}),
      2.0);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    EXPECT_EQ(*Sample(params, "0", seed), "1");
  }
}

TEST(SampleTest, DeterministicPerSeed) {
  ExpMechParams params = X3Identity(1.0);
  for (uint64_t seed : {0ULL, 1ULL, 42ULL, 0xffffffffffffffffULL}) {
    EXPECT_EQ(*Sample(params, "0.5", seed), *Sample(params, "0.5", seed));
    auto first = *SampleMany(params, "0", seed, 50);
    EXPECT_EQ(first, *SampleMany(params, "0", seed, 50));
    EXPECT_EQ(first.front(), *Sample(params, "0", seed));
  }
  EXPECT_THAT(Sample(params, "nowhere", 1),
              StatusIs(absl::StatusCode::kNotFound));
}

void ExpectFrequenciesMatch(const std::vector<std::string>& labels,
                            const std::vector<std::string>& draws,
                            const std::vector<double>& pmf) {
  const double n = static_cast<double>(draws.size());
  for (size_t y = 0; y < labels.size(); ++y) {
    double hits = 0;
    for (const std::string& d : draws) hits += d == labels[y];
    const double sigma = std::sqrt(n * pmf[y] * (1 - pmf[y]));
    EXPECT_LE(std::abs(hits - n * pmf[y]), 5 * sigma + 1e-9)
        << "label " << labels[y];
  }
}

TEST(SampleTest, DistinctSeedsReproduceUniformBase) {
  ExpMechParams params = X3Identity(0.0);
  std::vector<std::string> draws;
  for (uint64_t seed = 0; seed < 100000; ++seed) {
    draws.push_back(*Sample(params, "0", seed));
  }
  SpacePtr x3 = X3();
  ExpectFrequenciesMatch(x3->labels(), draws, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (const std::string& label : x3->labels()) {
    const double freq =
        std::count(draws.begin(), draws.end(), label) / 100000.0;
    EXPECT_NEAR(freq, 1.0 / 3, 0.02);
  }
}

TEST(SampleTest, StreamFrequenciesMatchPmf) {
  ExpMechParams params = X3Identity(1.0);
  SpacePtr x3 = X3();
  for (const std::string& x : x3->labels()) {
    ExpectFrequenciesMatch(x3->labels(), *SampleMany(params, x, 99, 100000),
                           *ExpMechDistribution(params, x));
  }
}

TEST(CalibrateBetaTest, Examples) {
  EXPECT_THAT(*CalibrateBeta(1.0, 0.5, 1.0), DoubleNear(2 * std::log(2.0), 1e-15));
  EXPECT_THAT(*CalibrateBeta(0.5, 0.1, 1.0 / 3),
              DoubleNear(13.604789526648622, 1e-13));
  EXPECT_EQ(*CalibrateBeta(0.7, 0.5, 2.0), 0.0);
  EXPECT_EQ(*CalibrateBeta(0.7, 0.5, 3.0), 0.0);
}

TEST(CalibrateBetaTest, Errors) {
  EXPECT_THAT(CalibrateBeta(1.0, 0.5, 0.0),
              StatusIs(absl::StatusCode::kFailedPrecondition,
                       HasSubstr("not uniformly positive")));
  EXPECT_THAT(CalibrateBeta(0.0, 0.5, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(CalibrateBeta(1.0, 0.0, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(CalibrateBeta(1.0, 1.0, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(CalibrateBetaTest, MeetsUtilityTargetOnRandomSpaces) {
  std::mt19937_64 rng(204);
  std::uniform_real_distribution<double> gamma(0.05, 1.0);
  std::uniform_real_distribution<double> delta(0.001, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    SpacePtr out = RandomSpace(rng, 8);
    DiscreteMeasure base = *Normalize(RandomPositiveMeasure(rng, out));
    const double g = gamma(rng), d = delta(rng);
    const double m = *UniformPositivityModulus(base, g / 2);
    const double beta = *CalibrateBeta(g, d, m);
    auto params =
        *ExpMechParams::Create(LipschitzMap::Identity(out), base, beta);
    for (size_t x = 0; x < out->size(); ++x) {
      std::vector<double> row = *ExpMechDistributionAt(params, x);
      double mass = 0.0;
      for (size_t y : BallIndices(*out, x, g)) mass += row[y];
      EXPECT_GE(mass, 1 - d - 1e-12);
    }
  }
}

TEST(PrivacyBoundTest, Examples) {
  EXPECT_EQ(PrivacyBound(0.5, 1.0), 1.0);
  EXPECT_EQ(PrivacyBound(17.0, 0.0), 0.0);
  EXPECT_THAT(PrivacyBound(2 * std::log(2.0), 1.0),
              DoubleNear(2.7725887222397812, 1e-15));
}

TEST(TradeoffUpperBoundTest, ThreePointGrid) {
  auto bound =
      TradeoffUpperBound(*DiscreteMeasure::Uniform(X3()), 0.5, 0.1);
  ASSERT_THAT(bound, IsOk());
  EXPECT_THAT(bound->m, DoubleNear(1.0 / 3, 1e-15));
  EXPECT_THAT(bound->beta, DoubleNear(13.604789526648622, 1e-13));
  EXPECT_THAT(bound->epsilon, DoubleNear(27.209579053297243, 1e-13));
}

TEST(TradeoffUpperBoundTest, UnnormalizedBaseGivesSameBound) {
  auto heavy = *DiscreteMeasure::Create(X3(), {2, 2, 2});
  auto bound = *TradeoffUpperBound(heavy, 0.5, 0.1);
  EXPECT_THAT(bound.m, DoubleNear(1.0 / 3, 1e-15));
  EXPECT_THAT(bound.epsilon, DoubleNear(27.209579053297243, 1e-13));
}

TEST(TradeoffUpperBoundTest, WideGammaSeesWholeSpace) {
  auto bound = *TradeoffUpperBound(*DiscreteMeasure::Uniform(X3()), 2.0, 0.1);
  EXPECT_THAT(bound.m, DoubleNear(1.0, 1e-15));
  EXPECT_THAT(bound.beta, DoubleNear(std::log(10.0), 1e-15));
  EXPECT_THAT(bound.epsilon, DoubleNear(2 * std::log(10.0), 1e-15));
}

TEST(TradeoffUpperBoundTest, HoleInBaseIsAnError) {
  auto holey = *DiscreteMeasure::Create(X3(), {1, 0, 1});
  EXPECT_THAT(TradeoffUpperBound(holey, 0.5, 0.1),
              StatusIs(absl::StatusCode::kFailedPrecondition,
                       HasSubstr("not uniformly positive")));
  EXPECT_THAT(TradeoffUpperBound(*DiscreteMeasure::Create(X3(), {0, 0, 0}),
                                 0.5, 0.1),
              StatusIs(absl::StatusCode::kFailedPrecondition));
}

TEST(MinDatabaseSizeTest, Examples) {
  EXPECT_EQ(*MinDatabaseSize(0.1, 1.0, 0.5, 1.0), 28);
  EXPECT_EQ(*MinDatabaseSize(0.05, 1.0, 0.5, 1.0), 56);
  EXPECT_EQ(*MinDatabaseSize(3.0, 1.0, 0.5, 1.0), 1);
  EXPECT_EQ(*MinDatabaseSize(0.1, 1.0, 0.5, 2.0), 1);
  EXPECT_THAT(MinDatabaseSize(0.0, 1.0, 0.5, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(MinDatabaseSize(0.1, 1.0, 0.5, 0.0),
              StatusIs(absl::StatusCode::kFailedPrecondition));
}

TEST(MinDatabaseSizeTest, HalvingTargetRoughlyDoublesSize) {
  for (int k = 1; k <= 10; ++k) {
    const double eps = 0.05 * k;
    const int64_t n = *MinDatabaseSize(eps, 1.0, 0.5, 1.0);
    const int64_t doubled = *MinDatabaseSize(eps / 2, 1.0, 0.5, 1.0);
    EXPECT_EQ(n, static_cast<int64_t>(std::ceil(4 * std::log(2.0) / eps)));
    EXPECT_TRUE(doubled == 2 * n || doubled == 2 * n - 1)
        << "eps " << eps << ": " << n << " -> " << doubled;
  }
}

}  // namespace
}  // namespace metric_dp
