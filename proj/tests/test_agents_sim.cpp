// Copyright 2026 The cvmshare Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cvmshare/agents_sim.hpp"
#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

std::vector<double> sorted_values(const Dataset& d) {
  std::vector<double> v(d.values().begin(), d.values().end());
  std::sort(v.begin(), v.end());
  return v;
}

SimulationSetup uniform_alg3(std::vector<std::size_t> sizes) {
  SimulationSetup s{FrequentistGenerator{UniformDistribution{}}, std::move(sizes),
                    MechanismConfig{}, 0};
  s.mechanism.kind = LossKind::kAlg3;
  return s;
}

SimulationSetup bb_alg1(std::vector<std::size_t> sizes) {
  SimulationSetup s{BayesianGenerator{BetaBernoulliModel{2, 2}}, std::move(sizes),
                    MechanismConfig{}, 0};
  s.mechanism.kind = LossKind::kAlg1;
  s.mechanism.model = BetaBernoulliModel{2, 2};
  return s;
}

TEST(CountRule, Counts) {
  EXPECT_EQ(CountRule::same_as_input().count(7), 7u);
  EXPECT_EQ(CountRule::fraction(0.5).count(7), 4u);
  EXPECT_EQ(CountRule::fraction(0.25).count(10), 3u);
  EXPECT_EQ(CountRule::absolute(4).count(100), 4u);
}

TEST(ApplyStrategy, SpecExamples) {
  Rng rng(1);
  const auto d = Dataset::scalars({0.3, 0.7});
  EXPECT_EQ(apply_strategy(Truthful{}, d, rng), d);
  EXPECT_EQ(sorted_values(apply_strategy(MidpointInsert{}, Dataset::scalars({6, 0, 2}), rng)),
            (std::vector<double>{0, 1, 2, 4, 6}));
  EXPECT_EQ(apply_strategy(MidpointInsert{}, Dataset::scalars({3}), rng), Dataset::scalars({3}));
  EXPECT_EQ(sorted_values(apply_strategy(ShiftAll{1.5}, d, rng)), (std::vector<double>{1.8, 2.2}));
}

TEST(ApplyStrategy, TruthfulIsIdentityOnAnyData) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(rng.index(10));
    for (auto& x : v) x = rng.normal(0, 1);
    const auto d = Dataset::scalars(v);
    EXPECT_EQ(apply_strategy(Truthful{}, d, rng), d);
  }
  const auto vec = Dataset::vectors({{1, 2}, {3, 4}});
  EXPECT_EQ(apply_strategy(Truthful{}, vec, rng), vec);
}

TEST(ApplyStrategy, BernPluginMean) {
  Rng rng(3);
  constexpr std::size_t kK = 1000000;
  const auto out = apply_strategy(BernPluginAugment{CountRule::absolute(kK)},
                                  Dataset::scalars({1, 1, 0, 0}), rng);
  ASSERT_EQ(out.size(), kK + 4);
  double sum = 0;
  for (std::size_t i = 4; i < out.size(); ++i) sum += out.values()[i];
  EXPECT_NEAR(sum / kK, 0.5, 3 * std::sqrt(0.25 / kK));
}

TEST(ApplyStrategy, AugmentersAppendAndKeepOriginal) {
  Rng rng(4);
  const auto d = Dataset::scalars({1, 0, 1});
  for (const Strategy& s : {Strategy{BernHalfAugment{}}, Strategy{BernPluginAugment{}},
                            Strategy{DuplicateAugment{}}}) {
    const auto out = apply_strategy(s, d, rng);
    ASSERT_EQ(out.size(), 6u);
    EXPECT_EQ(out.prefix(3), d);
    for (double x : out.values()) EXPECT_TRUE(x == 0.0 || x == 1.0);
  }
}

TEST(ApplyStrategy, Errors) {
  Rng rng(5);
  EXPECT_THROW(apply_strategy(BernPluginAugment{}, Dataset::scalars({}), rng), ValidationError);
  EXPECT_THROW(apply_strategy(MidpointInsert{}, Dataset::scalars({}), rng), ValidationError);
  EXPECT_THROW(apply_strategy(BernHalfAugment{}, Dataset::vectors({{1, 2}}), rng), ValidationError);
}

TEST(ApplyStrategy, EmbeddingFabricateShiftsMean) {
  Rng rng(6);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 500; ++i) rows.push_back({rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)});
  const auto d = Dataset::vectors(rows);
  const auto out = apply_strategy(
      EmbeddingFabricate{{2.0}, 1.0, CountRule::absolute(20000)}, d, rng);
  ASSERT_EQ(out.size(), 20500u);
  double m0 = 0, m1 = 0;
  for (std::size_t i = 500; i < out.size(); ++i) {
    m0 += out.item(i).coords[0];
    m1 += out.item(i).coords[1];
  }
  EXPECT_NEAR(m0 / 20000, 2.0, 0.1);
  EXPECT_NEAR(m1 / 20000, 0.0, 0.1);
}

TEST(GenerateScenario, SpecExamples) {
  Rng rng(7);
  const std::vector<std::size_t> zeros = {0, 0, 0};
  const auto empty = generate_scenario(BayesianGenerator{NormalNormalModel{}}, zeros, rng);
  for (const auto& d : empty.datasets) EXPECT_TRUE(d.empty());

  const std::vector<std::size_t> big = {1000000};
  const auto u = generate_scenario(FrequentistGenerator{UniformDistribution{}}, big, rng);
  double sum = 0;
  for (double x : u.datasets[0].values()) sum += x;
  EXPECT_NEAR(sum / 1e6, 0.5, 0.002);
}

TEST(GenerateScenario, SharedLatent) {
  Rng rng(8);
  const std::vector<std::size_t> sizes = {4000, 4000, 4000};
  for (int rep = 0; rep < 5; ++rep) {
    const auto s = generate_scenario(BayesianGenerator{BetaBernoulliModel{2, 2}}, sizes, rng);
    ASSERT_EQ(s.latent.size(), 1u);
    for (const auto& d : s.datasets) {
      double mean = 0;
      for (double x : d.values()) mean += x;
      EXPECT_NEAR(mean / 4000, s.latent[0], 0.04);
    }
  }
}

TEST(GenerateScenario, NestedPrefixes) {
  const std::vector<std::size_t> small = {5, 8}, large = {5, 20};
  for (const DataGenerator& g :
       {DataGenerator{BayesianGenerator{NormalNormalModel{}}},
        DataGenerator{FrequentistGenerator{NormalDistribution{}}},
        DataGenerator{EmbeddingGenerator{3, 1, 1}}}) {
    Rng a(11), b(11);
    const auto s = generate_scenario(g, small, a);
    const auto l = generate_scenario(g, large, b);
    EXPECT_EQ(s.latent, l.latent);
    EXPECT_EQ(s.datasets[0], l.datasets[0]);
    EXPECT_EQ(s.datasets[1], l.datasets[1].prefix(8));
  }
}

TEST(MonteCarlo, EstimateAndDeterminism) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto e = MonteCarloEstimate::from_samples(v, 0);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_THROW(MonteCarloEstimate::from_samples(std::vector<double>{1}, 0), ValidationError);

  const auto setup = uniform_alg3({20, 21});
  const auto a = expected_loss(setup, {}, 500, 3);
  const auto b = expected_loss(setup, {}, 500, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(ExpectedLoss, PriorFreeClosedForm) {
  const auto setup = uniform_alg3({20, 21});
  const auto e = expected_loss(setup, {}, 200000, 4);
  const double want = (1.0 / 6.0) * (1.0 / 20 + 1.0 / 20);
  EXPECT_NEAR(e.mean, want, 0.02 * want);
}

TEST(ExpectedLoss, NormalNormalBounds) {
  SimulationSetup s{BayesianGenerator{NormalNormalModel{}}, {10, 20}, MechanismConfig{}, 0};
  s.mechanism.kind = LossKind::kAlg1;
  s.mechanism.model = NormalNormalModel{};
  const auto e = expected_loss(s, {}, 50000, 5);
  EXPECT_GE(e.mean + 3 * e.std_error, 1.0 / (6 * 19));
  EXPECT_LE(e.mean - 3 * e.std_error, (1.0 / 6) * (1.0 / 10 + 1.0 / 19));
}

TEST(TruthfulnessGap, TruthfulVsTruthfulIsZero) {
  const auto g = truthfulness_gap(bb_alg1({10, 10, 10}), Truthful{}, 2000, 6);
  EXPECT_EQ(g.gap, 0.0);
  const auto gi = truthfulness_gap(bb_alg1({10, 10, 10}), Truthful{}, 2000, 6, false);
  EXPECT_LE(std::abs(gi.gap), 2 * gi.combined_se);
}

TEST(TruthfulnessGap, BernHalfPunishedUnderAlg1) {
  const auto g = truthfulness_gap(bb_alg1({20, 50, 50, 50}),
                                  BernHalfAugment{CountRule::absolute(1)}, 20000, 7);
  EXPECT_GT(g.gap, 3 * g.combined_se);
}

TEST(TruthfulnessGap, CommonRandomNumbersReduceVariance) {
  const auto setup = bb_alg1({10, 30, 30});
  const Strategy s = BernPluginAugment{};
  const auto crn = truthfulness_gap(setup, s, 5000, 8, true);
  const auto ind = truthfulness_gap(setup, s, 5000, 8, false);
  EXPECT_LE(crn.combined_se, ind.combined_se);
}

TEST(MibCurve, DecreasingAndMatchesSensitivity) {
  const auto setup = uniform_alg3({5, 41});
  const std::vector<std::size_t> ns = {5, 10, 20, 40};
  const auto curve = mib_curve(setup, ns, 40000, 9);
  ASSERT_EQ(curve.size(), 4u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LT(curve[i].estimate.mean, curve[i - 1].estimate.mean);
  }
  const std::vector<std::size_t> one = {7};
  EXPECT_EQ(mib_curve(setup, one, 100, 9).size(), 1u);

  const auto d = paired_size_difference(uniform_alg3({10, 41}), 10, 11, 400000, 10);
  const double want = (1.0 / 6.0) * (1.0 / 10 - 1.0 / 11);
  EXPECT_NEAR(d.mean, want, 4 * d.std_error);
}

TEST(WorstCase, PicksLargestLoss) {
  const auto setup = uniform_alg3({10, 10});
  const std::vector<DataGenerator> family = {
      FrequentistGenerator{UniformDistribution{}},
      FrequentistGenerator{BernoulliDistribution{0.5}},
      FrequentistGenerator{PointMass{1.0}}};
  const auto w = worst_case_expected_loss(setup, family, {}, 2000, 11);
  ASSERT_EQ(w.all.size(), 3u);
  EXPECT_EQ(w.all[2].mean, 0.0);
  for (const auto& e : w.all) EXPECT_LE(e.mean, w.estimate.mean);
}

TEST(SimulationSetup, Validation) {
  auto s = uniform_alg3({10});
  EXPECT_THROW(s.validate(), ValidationError);
  s = uniform_alg3({10, 10});
  s.focal = 2;
  EXPECT_THROW(s.validate(), ValidationError);
  s = bb_alg1({3, 3});
  s.generator = EmbeddingGenerator{};
  EXPECT_THROW(s.validate(), ValidationError);
}

}  // namespace
}  // namespace cvmshare
