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

#include <cmath>
#include <numeric>
#include <vector>

#include "cvmshare/applications.hpp"
#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

std::size_t brute_argmax(const Valuation& v, double c, std::size_t n_max) {
  std::size_t best = 1;
  for (std::size_t n = 2; n <= n_max; ++n) {
    if (v(n) - c * n > v(best) - c * best) best = n;
  }
  return best;
}

TEST(Valuation, FamiliesAndInverse) {
  EXPECT_DOUBLE_EQ(Valuation::sqrt(2)(9), 6.0);
  EXPECT_DOUBLE_EQ(Valuation::log(1)(0), 0.0);
  EXPECT_DOUBLE_EQ(Valuation::linear(3)(4), 12.0);
  const auto t = Valuation::table({0, 5, 7});
  EXPECT_DOUBLE_EQ(t(1), 5.0);
  EXPECT_DOUBLE_EQ(t(10), 7.0);
  EXPECT_TRUE(t.strictly_increasing());
  EXPECT_FALSE(Valuation::table({0, 5, 5}).strictly_increasing());
  EXPECT_TRUE(Valuation::sqrt(1).strictly_increasing());
  EXPECT_EQ(Valuation::sqrt(1).inverse_floor(15, 400), 225u);
  EXPECT_EQ(Valuation::sqrt(1).inverse_floor(14.999, 400), 224u);
  EXPECT_EQ(Valuation::sqrt(1).inverse_floor(100, 400), 400u);
  EXPECT_EQ(Valuation::table({0, 1, 3, 6}).inverse_floor(4, 3), 2u);
}

TEST(Valuation, InverseFloorMatchesScan) {
  for (const auto& v : {Valuation::sqrt(1.7), Valuation::log(3), Valuation::linear(0.5),
                        Valuation::table({0, 1, 1.5, 4, 4.5, 9})}) {
    for (double y = v(0); y < v(60) + 1; y += 0.37) {
      std::size_t want = 0;
      for (std::size_t n = 0; n <= 50; ++n) {
        if (v(n) <= y * (1 + 1e-12)) want = n;
      }
      EXPECT_EQ(v.inverse_floor(y, 50), want) << v.describe() << " y=" << y;
    }
  }
}

TEST(Purchase, Payments) {
  BudgetedPurchaseConfig cfg{100, 10, {}};
  const std::vector<double> taus = {0, 1, 0.25, 0, 0, 0, 0, 0, 0, 0};
  const auto p = purchase_payments(cfg, taus);
  EXPECT_DOUBLE_EQ(p[0], 10.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 7.5);
  EXPECT_THROW(purchase_payments(cfg, std::vector<double>{0.1}), ValidationError);
  EXPECT_THROW(purchase_payments(cfg, std::vector<double>(10, 1.5)), ValidationError);
}

TEST(Purchase, BudgetAndIndividualRationality) {
  Rng rng(1);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t m = 2 + rng.index(20);
    BudgetedPurchaseConfig cfg{rng.uniform(0, 1000), m, {}};
    std::vector<double> taus(m);
    for (auto& t : taus) t = rng.uniform();
    const auto p = purchase_payments(cfg, taus);
    EXPECT_LE(std::accumulate(p.begin(), p.end(), 0.0), cfg.budget * (1 + 1e-12));
    for (double x : p) EXPECT_GE(x, 0.0);
  }
}

TEST(Purchase, RunPurchase) {
  const SubmissionSet subs({Dataset::scalars({0.1, 0.5}), Dataset::scalars({0.2, 0.9}),
                            Dataset::scalars({0.3})});
  BudgetedPurchaseConfig cfg{30, 3, {}};
  const auto out = run_purchase(cfg, subs, 5);
  ASSERT_EQ(out.payments.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(out.payments[i], 10 * (1 - out.reports[i].tau));
  }
}

TEST(Marketplace, OptimalQuantity) {
  EXPECT_EQ(optimal_quantity(Valuation::sqrt(10), 1, 1000), 25u);
  EXPECT_EQ(optimal_quantity(Valuation::linear(1), 2, 1000), 1u);
  EXPECT_EQ(optimal_quantity(Valuation::table({5}), 1, 50), 1u);
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto v = Valuation::sqrt(rng.uniform(1, 40));
    const double c = rng.uniform(0.1, 3);
    EXPECT_EQ(optimal_quantity(v, c, 300), brute_argmax(v, c, 300));
  }
}

TEST(Marketplace, RecommendedCounts) {
  EXPECT_EQ(recommended_counts(10, 3), (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(recommended_counts(8, 4), (std::vector<std::size_t>{2, 2, 2, 2}));
}

TEST(Marketplace, AlphaFormula) {
  EXPECT_DOUBLE_EQ(alpha_from_sensitivity(1, 5, 100, -0.05), 1.0);
  EXPECT_DOUBLE_EQ(alpha_from_sensitivity(0, 5, 100, -0.05), 0.0);
  EXPECT_DOUBLE_EQ(alpha_from_sensitivity(1, 5, 200, -0.05), 0.5);
  EXPECT_THROW(alpha_from_sensitivity(1, 5, 100, 0.0), SensitivityUnresolvedError);
  EXPECT_THROW(alpha_from_sensitivity(1, 5, 0, -0.05), ValidationError);
}

TEST(Marketplace, Round) {
  MarketplaceTerms terms;
  terms.value = 100;
  terms.alpha = 0.5;
  const auto r = marketplace_round(terms, std::vector<double>{0.2, 0, 0, 0});
  EXPECT_DOUBLE_EQ(r.payments[0], 22.5);
  terms.alpha = 1;
  const auto zero = marketplace_round(terms, std::vector<double>{0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(zero.buyer_charge, 100.0);
  EXPECT_DOUBLE_EQ(marketplace_round(terms, std::vector<double>{1, 0}).payments[0], 0.0);
}

TEST(Marketplace, PaymentsNonincreasingInTau) {
  MarketplaceTerms terms;
  terms.value = 50;
  terms.alpha = 0.7;
  double prev = INFINITY;
  for (double t = 0; t <= 1.0; t += 0.05) {
    const double p = marketplace_round(terms, std::vector<double>{t, 0.3}).payments[0];
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(Marketplace, SensitivityClosedForm) {
  SimulationSetup s{FrequentistGenerator{UniformDistribution{}}, {10, 41}, MechanismConfig{}, 0};
  const auto d = finite_diff_sensitivity(s, 400000, 3);
  const double want = -(1.0 / 6.0) * (1.0 / 10 - 1.0 / 11);
  EXPECT_LT(d.mean, 0.0);
  EXPECT_NEAR(d.mean, want, 4 * d.std_error);
  const auto small = estimate_expected_loss(s, 100, 4);
  const auto large = estimate_expected_loss(s, 10000, 4);
  EXPECT_NEAR(small.std_error / large.std_error, 10.0, 3.0);
  EXPECT_THROW(estimate_expected_loss(s, 99, 4), ValidationError);
}

TEST(Marketplace, InfeasibleAndUnresolved) {
  MarketplaceConfig cfg;
  cfg.cost = 1;
  cfg.valuation = Valuation::sqrt(10);
  cfg.agents = 5;
  cfg.n_max = 200;
  cfg.generator = FrequentistGenerator{UniformDistribution{}};
  cfg.trials = 2000;
  cfg.seed = 1;
  EXPECT_THROW(marketplace_alpha(cfg), Error);
  cfg.generator = FrequentistGenerator{PointMass{0.5}};
  EXPECT_THROW(marketplace_alpha(cfg), SensitivityUnresolvedError);
}

TEST(Federated, AlphaAndAllocation) {
  const auto v = Valuation::sqrt(1);
  EXPECT_DOUBLE_EQ(federated_alpha(v, 100, 400, 0.005), 50.0);
  EXPECT_DOUBLE_EQ(federated_alpha(v, 100, 400, 0.0025), 100.0);
  EXPECT_THROW(federated_alpha(v, 100, 400, 0.0), ValidationError);
  EXPECT_THROW(federated_alpha(v, 400, 400, 0.1), ValidationError);
  EXPECT_EQ(federated_allocation_size(v, 50, 0.005, 400), 225u);
  EXPECT_EQ(federated_allocation_size(v, 50, 0, 400), 400u);
  bool below = false;
  EXPECT_EQ(federated_allocation_size(v, 50, 0.03, 400, &below), 0u);
  EXPECT_TRUE(below);
  std::size_t prev = 401;
  for (double t = 0; t <= 0.02; t += 0.001) {
    const auto n = federated_allocation_size(v, 50, t, 400);
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(Federated, AllocateSubset) {
  std::vector<double> pool(400);
  std::iota(pool.begin(), pool.end(), 0.0);
  Rng rng(5);
  const auto a = federated_allocate(Valuation::sqrt(1), 50, 0.005, Dataset::scalars(pool), rng);
  EXPECT_EQ(a.size, 225u);
  std::vector<double> got(a.deployed.values().begin(), a.deployed.values().end());
  std::sort(got.begin(), got.end());
  EXPECT_EQ(std::adjacent_find(got.begin(), got.end()), got.end());
  EXPECT_GE(got.front(), 0.0);
  EXPECT_LE(got.back(), 399.0);
}

TEST(Federated, StudyIsIndividuallyRational) {
  FederatedConfig cfg;
  cfg.valuation = Valuation::sqrt(1);
  cfg.generator = BayesianGenerator{BetaBernoulliModel{2, 2}};
  cfg.mechanism.kind = LossKind::kAlg1;
  cfg.mechanism.model = BetaBernoulliModel{2, 2};
  cfg.trials = 20000;
  cfg.seed = 6;
  const std::vector<std::size_t> sizes = {100, 100, 100, 100, 100};
  const auto st = federated_study(cfg, sizes, 0);
  EXPECT_DOUBLE_EQ(st.own_value, 10.0);
  EXPECT_DOUBLE_EQ(st.others_value, 20.0);
  EXPECT_DOUBLE_EQ(st.predicted_utility, 15.0);
  EXPECT_GT(st.utility.mean - 3 * st.utility.std_error, st.own_value);
  // Allocations clamp at zero when alpha*tau > 1, which only raises utility.
  EXPECT_GE(st.utility.mean + 3 * st.utility.std_error, st.predicted_utility);
  EXPECT_GT(st.below_range, 0u);
}

}  // namespace
}  // namespace cvmshare
