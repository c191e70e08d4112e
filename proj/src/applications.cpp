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

#include "cvmshare/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

constexpr double kRelTol = 1e-12;

bool at_most(double a, double b) {
  return a <= b + kRelTol * std::max(1.0, std::abs(b));
}

void require_min_trials(std::size_t trials) {
  if (trials < 100) throw ValidationError("trials must be >= 100");
}

}  // namespace

Valuation Valuation::sqrt(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("sqrt valuation needs gamma > 0");
  }
  return Valuation(Kind::kSqrt, gamma, {});
}

Valuation Valuation::log(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("log valuation needs gamma > 0");
  }
  return Valuation(Kind::kLog, gamma, {});
}

Valuation Valuation::linear(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("linear valuation needs gamma >= 0");
  }
  return Valuation(Kind::kLinear, gamma, {});
}

Valuation Valuation::table(std::vector<double> values) {
  if (values.empty()) throw ValidationError("valuation table is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw ValidationError("valuation table entries must be finite and >= 0");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw ValidationError("valuation table must be nondecreasing (entry " +
                            std::to_string(i) + ")");
    }
  }
  return Valuation(Kind::kTable, 1.0, std::move(values));
}

double Valuation::operator()(std::size_t n) const {
  const double x = static_cast<double>(n);
  switch (kind_) {
    case Kind::kSqrt: return gamma_ * std::sqrt(x);
    case Kind::kLog: return gamma_ * std::log1p(x);
    case Kind::kLinear: return gamma_ * x;
    case Kind::kTable: return values_[std::min(n, values_.size() - 1)];
  }
  return 0.0;
}

bool Valuation::strictly_increasing() const {
  switch (kind_) {
    case Kind::kSqrt:
    case Kind::kLog: return true;
    case Kind::kLinear: return gamma_ > 0.0;
    case Kind::kTable:
      for (std::size_t i = 1; i < values_.size(); ++i) {
        if (!(values_[i] > values_[i - 1])) return false;
      }
      return true;
  }
  return false;
}

std::size_t Valuation::inverse_floor(double y, std::size_t cap) const {
  if (!at_most((*this)(0), y)) {
    throw ValidationError("value below the valuation's range");
  }
  std::size_t n = 0;
  double guess = 0.0;
  switch (kind_) {
    case Kind::kSqrt: guess = (y / gamma_) * (y / gamma_); break;
    case Kind::kLog: guess = std::expm1(y / gamma_); break;
    case Kind::kLinear:
      guess = gamma_ > 0.0 ? y / gamma_ : static_cast<double>(cap);
      break;
    case Kind::kTable: {
      std::size_t lo = 0;
      std::size_t hi = cap;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (at_most((*this)(mid), y)) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      return lo;
    }
  }
  if (!(guess < static_cast<double>(cap))) return cap;
  n = static_cast<std::size_t>(std::floor(guess));
  // Closed forms can land one off either side in floating point.
  while (n > 0 && !at_most((*this)(n), y)) --n;
  while (n < cap && at_most((*this)(n + 1), y)) ++n;
  return n;
}

std::string Valuation::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kSqrt: out << "sqrt(gamma=" << gamma_ << ")"; break;
    case Kind::kLog: out << "log(gamma=" << gamma_ << ")"; break;
    case Kind::kLinear: out << "linear(gamma=" << gamma_ << ")"; break;
    case Kind::kTable: out << "table(" << values_.size() << " entries)"; break;
  }
  return out.str();
}

void BudgetedPurchaseConfig::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("budget must be finite and >= 0");
  }
  if (agents < 2) throw ValidationError("purchase needs >= 2 agents");
}

std::vector<double> purchase_payments(const BudgetedPurchaseConfig& cfg,
                                      std::span<const double> losses) {
  cfg.validate();
  if (losses.size() != cfg.agents) {
    throw ValidationError("expected one loss per agent");
  }
  const double share = cfg.budget / static_cast<double>(cfg.agents);
  std::vector<double> out;
  out.reserve(losses.size());
  for (double tau : losses) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw ValidationError("loss outside [0, 1]");
    }
    out.push_back(share * (1.0 - tau));
  }
  return out;
}

std::vector<double> purchase_payments(const BudgetedPurchaseConfig& cfg,
                                      std::span<const LossReport> reports) {
  std::vector<double> losses;
  losses.reserve(reports.size());
  for (const auto& r : reports) losses.push_back(r.tau);
  return purchase_payments(cfg, losses);
}

PurchaseOutcome run_purchase(const BudgetedPurchaseConfig& cfg,
                             const SubmissionSet& submissions,
                             std::uint64_t seed) {
  PurchaseOutcome out;
  out.reports = run_mechanism(cfg.mechanism, submissions, seed);
  out.payments = purchase_payments(cfg, std::span<const LossReport>(out.reports));
  return out;
}

void MarketplaceConfig::validate() const {
  if (!(cost > 0.0) || !std::isfinite(cost)) {
    throw ValidationError("marketplace cost must be > 0");
  }
  if (agents < 2) throw ValidationError("marketplace needs >= 2 agents");
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  require_min_trials(trials);
}

std::size_t optimal_quantity(const Valuation& valuation, double cost,
                             std::size_t n_max) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  std::size_t best = 1;
  double best_value = valuation(1) - cost;
  for (std::size_t n = 2; n <= n_max; ++n) {
    const double v = valuation(n) - cost * static_cast<double>(n);
    if (v > best_value) {
      best = n;
      best_value = v;
    }
  }
  return best;
}

std::size_t optimal_quantity(const MarketplaceConfig& cfg) {
  return optimal_quantity(cfg.valuation, cfg.cost, cfg.n_max);
}

std::vector<std::size_t> recommended_counts(std::size_t total,
                                            std::size_t agents) {
  if (agents == 0) throw ValidationError("need at least one agent");
  std::vector<std::size_t> counts(agents, total / agents);
  for (std::size_t i = 0; i < total % agents; ++i) ++counts[i];
  return counts;
}

MonteCarloEstimate estimate_expected_loss(const SimulationSetup& setup,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  require_min_trials(trials);
  return expected_loss(setup, {}, trials, seed);
}

MonteCarloEstimate finite_diff_sensitivity(const SimulationSetup& setup,
                                           std::size_t trials,
                                           std::uint64_t seed) {
  require_min_trials(trials);
  if (setup.focal >= setup.sizes.size()) {
    throw ValidationError("focal agent out of range");
  }
  const std::size_t n = setup.sizes[setup.focal];
  return paired_size_difference(setup, n + 1, n, trials, seed);
}

double alpha_from_sensitivity(double cost, std::size_t agents, double value,
                              double sensitivity) {
  if (!(sensitivity < 0.0)) {
    throw SensitivityUnresolvedError(
        "sensitivity not resolved; increase trials");
  }
  if (!(value > 0.0)) throw ValidationError("V(n*) must be > 0");
  return -cost * static_cast<double>(agents) / (sensitivity * value);
}

MarketplaceTerms marketplace_alpha(const MarketplaceConfig& cfg) {
  cfg.validate();
  MarketplaceTerms terms;
  terms.n_star = optimal_quantity(cfg);
  terms.counts = recommended_counts(terms.n_star, cfg.agents);
  terms.value = cfg.valuation(terms.n_star);

  SimulationSetup setup{cfg.generator, terms.counts, cfg.mechanism, 0};
  terms.sensitivity = finite_diff_sensitivity(setup, cfg.trials, cfg.seed);
  const auto& s = terms.sensitivity;
  if (!(s.mean + 2.0 * s.std_error < 0.0)) {
    std::ostringstream msg;
    msg << "sensitivity not resolved; increase trials (estimate " << s.mean
        << ", SE " << s.std_error << ")";
    throw SensitivityUnresolvedError(msg.str());
  }
  const double gain =
      terms.value / static_cast<double>(cfg.agents) * (-s.mean);
  if (gain < cfg.cost) throw InfeasibleMarketError(gain, cfg.cost);
  terms.alpha =
      alpha_from_sensitivity(cfg.cost, cfg.agents, terms.value, s.mean);
  return terms;
}

MarketplaceRound marketplace_round(const MarketplaceTerms& terms,
                                   std::span<const double> losses) {
  if (losses.empty()) throw ValidationError("no losses");
  const double share = terms.value / static_cast<double>(losses.size());
  MarketplaceRound out;
  out.payments.reserve(losses.size());
  for (double tau : losses) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw ValidationError("loss outside [0, 1]");
    }
    out.payments.push_back(share * (1.0 - terms.alpha * tau));
    out.buyer_charge += out.payments.back();
  }
  return out;
}

MarketplaceRound marketplace_round(const MarketplaceTerms& terms,
                                   std::span<const LossReport> reports) {
  std::vector<double> losses;
  losses.reserve(reports.size());
  for (const auto& r : reports) losses.push_back(r.tau);
  return marketplace_round(terms, losses);
}

std::vector<UtilityPoint> agent_utility_sweep(const MarketplaceConfig& cfg,
                                              const MarketplaceTerms& terms,
                                              std::size_t agent,
                                              std::size_t lo, std::size_t hi,
                                              std::size_t trials,
                                              std::uint64_t seed) {
  if (lo > hi) throw ValidationError("empty sweep range");
  if (agent >= terms.counts.size()) {
    throw ValidationError("agent out of range");
  }
  std::vector<std::size_t> sizes(hi - lo + 1);
  std::iota(sizes.begin(), sizes.end(), lo);
  const SimulationSetup setup{cfg.generator, terms.counts, cfg.mechanism, agent};
  const auto curve = mib_curve(setup, sizes, trials, seed);
  const double share = terms.value / static_cast<double>(terms.counts.size());
  std::vector<UtilityPoint> out;
  out.reserve(curve.size());
  for (const auto& p : curve) {
    UtilityPoint u;
    u.size = p.size;
    u.loss = p.estimate;
    u.utility = share * (1.0 - terms.alpha * p.estimate.mean) -
                cfg.cost * static_cast<double>(p.size);
    u.utility_se = share * terms.alpha * p.estimate.std_error;
    out.push_back(u);
  }
  return out;
}

void FederatedConfig::validate() const {
  if (!valuation.strictly_increasing()) {
    throw ValidationError("federated valuation must be strictly increasing");
  }
  require_min_trials(trials);
}

double federated_alpha(const Valuation& valuation, std::size_t own_size,
                       std::size_t others_size, double expected_loss) {
  if (!(expected_loss > 0.0)) {
    throw ValidationError("expected loss must be > 0");
  }
  if (own_size >= others_size) {
    throw ValidationError("federated alpha needs |X_i| < |Y_{-i}|");
  }
  const double others = valuation(others_size);
  if (!(others > 0.0)) throw ValidationError("v(|Y_{-i}|) must be > 0");
  return (0.5 - valuation(own_size) / (2.0 * others)) / expected_loss;
}

std::size_t federated_allocation_size(const Valuation& valuation, double alpha,
                                      double tau, std::size_t pooled_size,
                                      bool* below_range) {
  const double target = (1.0 - alpha * tau) * valuation(pooled_size);
  const bool below = !at_most(valuation(0), target);
  if (below_range != nullptr) *below_range = below;
  if (below) return 0;
  return valuation.inverse_floor(target, pooled_size);
}

FederatedAllocation federated_allocate(const Valuation& valuation, double alpha,
                                       double tau, const Dataset& pooled_others,
                                       Rng& rng) {
  FederatedAllocation out;
  out.size = federated_allocation_size(valuation, alpha, tau,
                                       pooled_others.size(), &out.below_range);
  std::vector<std::size_t> idx(pooled_others.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < out.size; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(out.size);
  out.deployed = pooled_others.select(idx);
  if (out.deployed.empty()) out.deployed = Dataset::empty_like(pooled_others);
  return out;
}

FederatedStudy federated_study(const FederatedConfig& cfg,
                               std::span<const std::size_t> sizes,
                               std::size_t agent) {
  cfg.validate();
  if (agent >= sizes.size()) throw ValidationError("agent out of range");
  const SimulationSetup setup{cfg.generator,
                              std::vector<std::size_t>(sizes.begin(), sizes.end()),
                              cfg.mechanism, agent};
  const std::size_t own = sizes[agent];
  const std::size_t others =
      std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) - own;

  FederatedStudy study;
  study.expected_loss =
      estimate_expected_loss(setup, cfg.trials, derive_seed(cfg.seed, {1}));
  study.alpha =
      federated_alpha(cfg.valuation, own, others, study.expected_loss.mean);
  study.own_value = cfg.valuation(own);
  study.others_value = cfg.valuation(others);
  study.predicted_utility = 0.5 * (study.own_value + study.others_value);

  study.utility = monte_carlo(
      cfg.trials, derive_seed(cfg.seed, {2}), [&](std::uint64_t trial_seed) {
        const double tau = trial_loss(setup, {}, trial_seed);
        bool below = false;
        const std::size_t z = federated_allocation_size(
            cfg.valuation, study.alpha, tau, others, &below);
        if (below) ++study.below_range;
        return cfg.valuation(z);
      });
  return study;
}

}  // namespace cvmshare
