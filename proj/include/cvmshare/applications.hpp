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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvmshare/agents_sim.hpp"
#include "cvmshare/mechanisms.hpp"

namespace cvmshare {

// A value as a function of a sample count: gamma*sqrt(n), gamma*log(1+n),
// gamma*n, or a table indexed by n that stays at its last entry beyond the end.
class Valuation {
 public:
  enum class Kind { kSqrt, kLog, kLinear, kTable };

  static Valuation sqrt(double gamma);
  static Valuation log(double gamma);
  static Valuation linear(double gamma);
  static Valuation table(std::vector<double> values);

  double operator()(std::size_t n) const;

  // Nondecreasing is required of every valuation; strict increase only where
  // it is inverted.
  bool strictly_increasing() const;
  // Largest n in [0, cap] with v(n) <= y, up to a relative rounding slack
  // of 1e-12 in y. Requires y >= v(0).
  std::size_t inverse_floor(double y, std::size_t cap) const;

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& values() const { return values_; }
  std::string describe() const;

 private:
  Valuation(Kind kind, double gamma, std::vector<double> values)
      : kind_(kind), gamma_(gamma), values_(std::move(values)) {}

  Kind kind_;
  double gamma_;
  std::vector<double> values_;
};

struct BudgetedPurchaseConfig {
  double budget = 0.0;
  std::size_t agents = 2;
  MechanismConfig mechanism;

  void validate() const;
};

// p_i = (B/m)(1 - tau_i).
std::vector<double> purchase_payments(const BudgetedPurchaseConfig& cfg,
                                      std::span<const double> losses);
std::vector<double> purchase_payments(const BudgetedPurchaseConfig& cfg,
                                      std::span<const LossReport> reports);

struct PurchaseOutcome {
  std::vector<LossReport> reports;
  std::vector<double> payments;
};

PurchaseOutcome run_purchase(const BudgetedPurchaseConfig& cfg,
                             const SubmissionSet& submissions,
                             std::uint64_t seed);

struct MarketplaceConfig {
  double cost = 1.0;
  Valuation valuation = Valuation::sqrt(1.0);
  std::size_t agents = 2;
  std::size_t n_max = 1000;
  DataGenerator generator;
  MechanismConfig mechanism;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

// argmax over n in 1..n_max of V(n) - c n, ties to the smaller n.
std::size_t optimal_quantity(const Valuation& valuation, double cost,
                             std::size_t n_max);
std::size_t optimal_quantity(const MarketplaceConfig& cfg);

// floor(total / agents) each, the remainder to the lowest indices.
std::vector<std::size_t> recommended_counts(std::size_t total,
                                            std::size_t agents);

// Mean and SE of the focal agent's truthful loss at setup.sizes.
MonteCarloEstimate estimate_expected_loss(const SimulationSetup& setup,
                                          std::size_t trials,
                                          std::uint64_t seed);

// E[tau(n_focal + 1)] - E[tau(n_focal)] with common random numbers.
MonteCarloEstimate finite_diff_sensitivity(const SimulationSetup& setup,
                                           std::size_t trials,
                                           std::uint64_t seed);

// -c m / (dE * V). Requires dE < 0 and V > 0.
double alpha_from_sensitivity(double cost, std::size_t agents, double value,
                              double sensitivity);

struct MarketplaceTerms {
  std::size_t n_star = 0;
  std::vector<std::size_t> counts;
  double value = 0.0;  // V(n*)
  MonteCarloEstimate sensitivity;
  double alpha = 0.0;
};

// Throws SensitivityUnresolvedError when the sensitivity is not below zero by
// two standard errors, InfeasibleMarketError when (V/m)(-dE) < c.
MarketplaceTerms marketplace_alpha(const MarketplaceConfig& cfg);

struct MarketplaceRound {
  std::vector<double> payments;
  double buyer_charge = 0.0;
};

// p_i = (V(n*)/m)(1 - alpha tau_i); the buyer pays the sum.
MarketplaceRound marketplace_round(const MarketplaceTerms& terms,
                                   std::span<const double> losses);
MarketplaceRound marketplace_round(const MarketplaceTerms& terms,
                                   std::span<const LossReport> reports);

struct UtilityPoint {
  std::size_t size = 0;
  MonteCarloEstimate loss;
  double utility = 0.0;
  double utility_se = 0.0;
};

// Agent utility (V/m)(1 - alpha E[tau(n_i)]) - c n_i for n_i in [lo, hi],
// other agents at their recommended counts, shared trial seeds across n_i.
std::vector<UtilityPoint> agent_utility_sweep(const MarketplaceConfig& cfg,
                                              const MarketplaceTerms& terms,
                                              std::size_t agent,
                                              std::size_t lo, std::size_t hi,
                                              std::size_t trials,
                                              std::uint64_t seed);

struct FederatedConfig {
  Valuation valuation = Valuation::sqrt(1.0);
  DataGenerator generator;
  MechanismConfig mechanism;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

// (1/2 - v(own)/(2 v(others))) / E[tau]. Requires own < others, E[tau] > 0.
double federated_alpha(const Valuation& valuation, std::size_t own_size,
                       std::size_t others_size, double expected_loss);

struct FederatedAllocation {
  std::size_t size = 0;
  // The discounted value fell below v(0); the agent receives nothing.
  bool below_range = false;
  Dataset deployed;
};

// floor(v^{-1}((1 - alpha tau) v(|pooled|))), capped at |pooled|.
std::size_t federated_allocation_size(const Valuation& valuation, double alpha,
                                      double tau, std::size_t pooled_size,
                                      bool* below_range = nullptr);

// The allocation size and a uniformly random subset of `pooled_others` of
// that size.
FederatedAllocation federated_allocate(const Valuation& valuation, double alpha,
                                       double tau, const Dataset& pooled_others,
                                       Rng& rng);

struct FederatedStudy {
  MonteCarloEstimate expected_loss;
  double alpha = 0.0;
  MonteCarloEstimate utility;  // E[v(allocation)]
  double own_value = 0.0;      // v(|X_i|)
  double others_value = 0.0;   // v(|Y_{-i}|)
  double predicted_utility = 0.0;
  std::size_t below_range = 0;
};

// Estimates E[tau] for the focal agent, derives alpha, then estimates the
// truthful utility on fresh trials.
FederatedStudy federated_study(const FederatedConfig& cfg,
                               std::span<const std::size_t> sizes,
                               std::size_t agent);

}  // namespace cvmshare
