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

#include "cvmshare/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "cvmshare/agents_sim.hpp"
#include "cvmshare/applications.hpp"
#include "cvmshare/bayes_models.hpp"
#include "cvmshare/core_stats.hpp"
#include "cvmshare/error.hpp"
#include "cvmshare/mechanisms.hpp"
#include "cvmshare/oracles.hpp"

namespace cvmshare {
namespace {

using Json = nlohmann::ordered_json;

Json estimate_json(const MonteCarloEstimate& e) {
  return {{"mean", e.mean}, {"se", e.std_error}, {"trials", e.trials}};
}

Json gap_json(const GapEstimate& g) {
  return {{"gap", g.gap},
          {"se", g.combined_se},
          {"truthful", estimate_json(g.truthful)},
          {"fabricated", estimate_json(g.fabricated)}};
}

CriterionResult start(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

bool within_relative(double measured, double target, double tol) {
  return std::abs(measured - target) <= tol * std::abs(target);
}

std::vector<double> uniform_sample(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform();
  return x;
}

std::vector<double> bernoulli_sample(Rng& rng, std::size_t n, double p) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.bernoulli(p) ? 1.0 : 0.0;
  return x;
}

MechanismConfig mechanism(LossKind kind,
                          std::optional<PosteriorModel> model = std::nullopt) {
  MechanismConfig cfg;
  cfg.kind = kind;
  cfg.model = std::move(model);
  return cfg;
}

CriterionResult one_sample_identity(const VerificationOptions& o,
                                    std::uint64_t seed) {
  constexpr std::size_t kTrials = 200000;
  constexpr std::size_t kN = 20;
  CriterionResult r = start(1, "one-sample ECDF identity");
  std::vector<double> losses(kTrials);
  Rng rng(seed);
  for (auto& loss : losses) {
    const auto x = uniform_sample(rng, kN);
    const double t = rng.uniform();
    const double d = ecdf_at(x, t) - t;
    loss = d * d;
  }
  const auto est = MonteCarloEstimate::from_samples(losses, seed);
  r.measured = est.mean;
  r.target = o.sixth / kN;
  r.tolerance = 0.02;
  r.rule = "relative";
  r.passed = within_relative(r.measured, r.target, r.tolerance);
  r.time_limit = 5;
  r.details = {{"estimate", estimate_json(est)}, {"n", kN}};
  return r;
}

CriterionResult two_sample_identity(const VerificationOptions& o,
                                    std::uint64_t seed) {
  constexpr std::size_t kTrials = 200000;
  constexpr std::size_t kN = 10;
  constexpr std::size_t kM = 30;
  CriterionResult r = start(2, "two-sample ECDF identity");
  std::vector<double> cont(kTrials), disc(kTrials);
  Rng rng(seed);
  for (std::size_t i = 0; i < kTrials; ++i) {
    const auto x = uniform_sample(rng, kN);
    const auto y = uniform_sample(rng, kM);
    const double t = rng.uniform();
    const double d = ecdf_at(x, t) - ecdf_at(y, t);
    cont[i] = d * d;
  }
  for (std::size_t i = 0; i < kTrials; ++i) {
    const auto x = bernoulli_sample(rng, kN, 0.3);
    const auto y = bernoulli_sample(rng, kM, 0.3);
    const double t = rng.bernoulli(0.3) ? 1.0 : 0.0;
    const double d = ecdf_at(x, t) - ecdf_at(y, t);
    disc[i] = d * d;
  }
  const auto c = MonteCarloEstimate::from_samples(cont, seed);
  const auto d = MonteCarloEstimate::from_samples(disc, seed);
  const double harmonic = 1.0 / kN + 1.0 / kM;
  r.measured = c.mean;
  r.target = o.sixth * harmonic;
  r.tolerance = 0.02;
  r.rule = "relative; discrete case <= bound";
  const double discrete_bound = o.quarter * harmonic;
  const bool discrete_ok = d.mean <= discrete_bound;
  r.passed = within_relative(r.measured, r.target, r.tolerance) && discrete_ok;
  r.time_limit = 10;
  r.details = {{"continuous", estimate_json(c)},
               {"discrete", estimate_json(d)},
               {"discrete_bound", discrete_bound},
               {"discrete_ok", discrete_ok}};
  return r;
}

CriterionResult prior_free_truthful(const VerificationOptions& o,
                                    std::uint64_t seed) {
  constexpr std::size_t kTrials = 100000;
  CriterionResult r = start(3, "prior-free truthful loss");
  // |Y u W| = 20 with W empty; |Z| = 21 - 1 = 20.
  const SimulationSetup setup{FrequentistGenerator{UniformDistribution{}},
                              {20, 21}, mechanism(LossKind::kAlg3), 0};
  const auto est = expected_loss(setup, {}, kTrials, seed);
  r.measured = est.mean;
  r.target = o.sixth * (1.0 / 20 + 1.0 / 20);
  r.tolerance = 0.02;
  r.rule = "relative";
  r.passed = within_relative(r.measured, r.target, r.tolerance);
  r.time_limit = 10;
  r.details = {{"estimate", estimate_json(est)}};
  return r;
}

CriterionResult bayesian_bounds(const VerificationOptions& o,
                                std::uint64_t seed) {
  constexpr std::size_t kTrials = 100000;
  constexpr std::size_t kN = 10;
  constexpr std::size_t kZ = 19;
  CriterionResult r = start(4, "Bayesian loss bounds");
  const SimulationSetup setup{BayesianGenerator{NormalNormalModel{}},
                              {kN, kZ + 1},
                              mechanism(LossKind::kAlg1, NormalNormalModel{}),
                              0};
  const auto est = expected_loss(setup, {}, kTrials, seed);
  const double lower = o.sixth / kZ;
  const double upper = o.sixth * (1.0 / kN + 1.0 / kZ);
  r.measured = est.mean;
  r.target = 0.5 * (lower + upper);
  r.tolerance = 3.0 * est.std_error;
  r.rule = "inside [lower - tol, upper + tol]";
  r.passed = est.mean >= lower - r.tolerance && est.mean <= upper + r.tolerance;
  r.time_limit = 30;
  r.details = {{"estimate", estimate_json(est)},
               {"lower", lower},
               {"upper", upper}};
  return r;
}

CriterionResult posterior_oracles(const VerificationOptions&,
                                  std::uint64_t seed) {
  CriterionResult r = start(5, "closed-form posterior predictive oracles");
  Rng rng(seed);

  double bb_worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const BetaBernoulliModel model{rng.uniform(1.0, 8.0), rng.uniform(1.0, 8.0)};
    const std::size_t n = rng.index(41);
    const double p = rng.uniform();
    const auto data = bernoulli_sample(rng, n, p);
    const double t = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double got = bb_cond_pred_cdf(model, data, t);
    const double want =
        oracles::bb_predictive_quadrature(model.alpha, model.beta, data, t);
    bb_worst = std::max(bb_worst, std::abs(got - want));
  }

  constexpr std::size_t kDraws = 200000;
  double nn_worst_z = 0.0;
  for (int c = 0; c < 20; ++c) {
    const NormalNormalModel model{rng.normal(0.0, 1.0), rng.uniform(0.2, 3.0),
                                  rng.uniform(0.2, 3.0)};
    const std::size_t n = rng.index(21);
    const double mu = rng.normal(model.prior_mean, std::sqrt(model.prior_var));
    std::vector<double> data(n);
    for (auto& x : data) x = rng.normal(mu, std::sqrt(model.obs_var));
    const double t = rng.normal(mu, std::sqrt(model.obs_var));
    const double got = nn_cond_pred_cdf(model, data, t);
    const auto want =
        oracles::nn_predictive_monte_carlo(model, data, t, kDraws, rng);
    nn_worst_z = std::max(nn_worst_z, std::abs(got - want.p) / want.std_error);
  }

  r.measured = bb_worst;
  r.target = 0.0;
  r.tolerance = 1e-6;
  r.rule = "max abs error <= tol; normal-normal max |z| <= 4";
  r.passed = bb_worst <= r.tolerance && nn_worst_z <= 4.0;
  r.time_limit = 30;
  r.details = {{"bb_cases", 50},
               {"bb_max_abs_error", bb_worst},
               {"nn_cases", 20},
               {"nn_draws", kDraws},
               {"nn_max_abs_z", nn_worst_z}};
  return r;
}

CriterionResult beta_bernoulli_gaps(const VerificationOptions&,
                                    std::uint64_t seed) {
  constexpr std::size_t kTrials = 100000;
  CriterionResult r = start(6, "beta-Bernoulli truthfulness gaps");
  const BetaBernoulliModel model{2.0, 2.0};
  SimulationSetup setup{BayesianGenerator{model},
                        std::vector<std::size_t>(20, 50),
                        mechanism(LossKind::kAlg1, model), 0};
  const std::vector<std::pair<std::string, Strategy>> fabrications = {
      {"bern_half", BernHalfAugment{CountRule::absolute(1)}},
      {"bern_plugin", BernPluginAugment{CountRule::absolute(1)}}};

  bool alg1_ok = true;
  bool baseline_gamed = false;
  double min_z = INFINITY;
  Json cells = Json::array();
  for (const auto& [name, strategy] : fabrications) {
    setup.mechanism = mechanism(LossKind::kAlg1, model);
    const auto a = truthfulness_gap(setup, strategy, kTrials, seed);
    setup.mechanism = mechanism(LossKind::kMeanDiff);
    const auto b = truthfulness_gap(setup, strategy, kTrials, seed);
    alg1_ok = alg1_ok && a.gap > 3.0 * a.combined_se;
    baseline_gamed = baseline_gamed || b.gap <= 0.0;
    min_z = std::min(min_z, a.gap / a.combined_se);
    cells.push_back({{"strategy", describe(strategy)},
                     {"alg1", gap_json(a)},
                     {"mean_diff", gap_json(b)}});
  }
  r.measured = min_z;
  r.target = 3.0;
  r.tolerance = 0.0;
  r.rule = "min alg1 gap/SE > target; some mean_diff gap <= 0";
  r.passed = alg1_ok && baseline_gamed;
  r.time_limit = 60;
  r.details = {{"cells", cells}, {"mean_diff_gamed", baseline_gamed}};
  return r;
}

CriterionResult normal_normal_gaps(const VerificationOptions&,
                                   std::uint64_t seed) {
  CriterionResult r = start(7, "normal-normal truthfulness gaps");
  const NormalNormalModel model;
  SimulationSetup setup{BayesianGenerator{model},
                        std::vector<std::size_t>(20, 50),
                        mechanism(LossKind::kAlg1, model), 0};
  const auto a = truthfulness_gap(setup, MidpointInsert{}, 100000, seed);
  setup.mechanism = mechanism(LossKind::kKs);
  const auto k = truthfulness_gap(setup, MidpointInsert{}, 20000, seed);
  r.measured = a.gap / a.combined_se;
  r.target = 3.0;
  r.tolerance = 0.0;
  r.rule = "alg1 gap/SE > target; ks gap <= 0";
  r.passed = a.gap > 3.0 * a.combined_se && k.gap <= 0.0;
  r.time_limit = 60;
  r.details = {{"alg1", gap_json(a)}, {"ks", gap_json(k)}};
  return r;
}

CriterionResult mib_sensitivity(const VerificationOptions& o,
                                std::uint64_t seed) {
  CriterionResult r = start(8, "MIB curve and sensitivity closed form");
  const std::vector<std::size_t> sizes = {5, 10, 20, 40};
  const SimulationSetup setup{FrequentistGenerator{UniformDistribution{}},
                              {5, 41}, mechanism(LossKind::kAlg3), 0};
  const auto curve = mib_curve(setup, sizes, 100000, seed);
  bool monotone = true;
  Json points = Json::array();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    points.push_back({{"n", curve[i].size},
                      {"estimate", estimate_json(curve[i].estimate)}});
    if (i == 0) continue;
    const auto& prev = curve[i - 1].estimate;
    const auto& cur = curve[i].estimate;
    if (cur.mean - prev.mean > 2.0 * std::hypot(cur.std_error, prev.std_error)) {
      monotone = false;
    }
  }

  constexpr std::size_t kPairedTrials = 2000000;
  double worst = 0.0;
  Json diffs = Json::array();
  for (std::size_t n : sizes) {
    const auto d = paired_size_difference(setup, n, n + 1, kPairedTrials,
                                          derive_seed(seed, {n}));
    const double want = o.sixth * (1.0 / n - 1.0 / (n + 1));
    const double rel = std::abs(d.mean - want) / want;
    worst = std::max(worst, rel);
    diffs.push_back({{"n", n},
                     {"difference", estimate_json(d)},
                     {"closed_form", want},
                     {"relative_error", rel}});
  }
  r.measured = worst;
  r.target = 0.0;
  r.tolerance = 0.05;
  r.rule = "max relative error <= tol; curve nonincreasing beyond 2 SE";
  r.passed = monotone && worst <= r.tolerance;
  r.time_limit = 60;
  r.details = {{"curve", points}, {"monotone", monotone}, {"differences", diffs}};
  return r;
}

CriterionResult purchase_properties(const VerificationOptions&,
                                    std::uint64_t seed) {
  constexpr int kVectors = 10000;
  CriterionResult r = start(9, "budgeted purchase feasibility and IR");
  Rng rng(seed);
  std::size_t violations = 0;
  for (int v = 0; v < kVectors; ++v) {
    BudgetedPurchaseConfig cfg;
    cfg.agents = 2 + rng.index(49);
    cfg.budget = rng.uniform(0.0, 1000.0);
    std::vector<double> taus(cfg.agents);
    for (auto& t : taus) {
      const double u = rng.uniform();
      t = u < 0.05 ? 0.0 : (u > 0.95 ? 1.0 : rng.uniform());
    }
    const auto pay = purchase_payments(cfg, taus);
    double total = 0.0;
    for (double p : pay) {
      if (p < 0.0) ++violations;
      total += p;
    }
    if (total > cfg.budget * (1.0 + 1e-12)) ++violations;
  }
  r.measured = static_cast<double>(violations);
  r.target = 0.0;
  r.tolerance = 0.0;
  r.rule = "violations == 0";
  r.passed = violations == 0;
  r.time_limit = 1;
  r.details = {{"vectors", kVectors}};
  return r;
}

CriterionResult marketplace(const VerificationOptions&, std::uint64_t seed) {
  constexpr std::size_t kTrials = 100000;
  CriterionResult r = start(10, "marketplace alpha, buyer IR, agent optimum");
  MarketplaceConfig cfg;
  cfg.cost = 1.0;
  std::vector<double> table(51);
  for (std::size_t n = 0; n < table.size(); ++n) table[n] = 400.0 * n;
  cfg.valuation = Valuation::table(table);
  cfg.agents = 5;
  cfg.n_max = 200;
  cfg.generator = BayesianGenerator{NormalNormalModel{}};
  cfg.mechanism = mechanism(LossKind::kAlg1, NormalNormalModel{});
  cfg.trials = kTrials;
  cfg.seed = derive_seed(seed, {1});

  const auto terms = marketplace_alpha(cfg);
  const bool alpha_ok = terms.alpha > 0.0 && terms.alpha <= 1.0;

  Rng rng(derive_seed(seed, {2}));
  std::size_t charge_violations = 0;
  for (int v = 0; v < 10000; ++v) {
    std::vector<double> taus(cfg.agents);
    for (auto& t : taus) t = rng.uniform();
    const auto round = marketplace_round(terms, taus);
    if (round.buyer_charge > terms.value * (1.0 + 1e-12)) ++charge_violations;
  }

  const std::size_t share = terms.counts[0];
  const std::size_t lo = share - 3;
  const std::size_t hi = share + 3;
  const auto sweep = agent_utility_sweep(cfg, terms, 0, lo, hi, kTrials,
                                         derive_seed(seed, {3}));
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].utility > sweep[best].utility) best = i;
  }
  const auto& peak = sweep[best];
  const bool interior =
      sweep.front().utility + 2.0 * sweep.front().utility_se < peak.utility &&
      sweep.back().utility + 2.0 * sweep.back().utility_se < peak.utility;
  const double offset =
      static_cast<double>(peak.size) - static_cast<double>(share);
  Json points = Json::array();
  for (const auto& p : sweep) {
    points.push_back({{"n", p.size},
                      {"utility", p.utility},
                      {"se", p.utility_se},
                      {"loss", estimate_json(p.loss)}});
  }
  r.measured = offset;
  r.target = 0.0;
  r.tolerance = 1.0;
  r.rule = "|argmax - n*/m| <= tol; alpha in (0,1]; no charge above V(n*)";
  r.passed = alpha_ok && charge_violations == 0 && std::abs(offset) <= 1.0 &&
             interior;
  r.time_limit = 300;
  r.details = {{"n_star", terms.n_star},
               {"value", terms.value},
               {"sensitivity", estimate_json(terms.sensitivity)},
               {"alpha", terms.alpha},
               {"charge_violations", charge_violations},
               {"peak_resolved", interior},
               {"sweep", points}};
  return r;
}

CriterionResult federated(const VerificationOptions&, std::uint64_t seed) {
  CriterionResult r = start(11, "federated allocation IR and punishment");
  const BetaBernoulliModel model{2.0, 2.0};
  FederatedConfig cfg;
  cfg.valuation = Valuation::sqrt(1.0);
  cfg.generator = BayesianGenerator{model};
  cfg.mechanism = mechanism(LossKind::kAlg1, model);
  cfg.trials = 100000;
  cfg.seed = derive_seed(seed, {1});
  const std::vector<std::size_t> sizes = {324, 100, 100, 100, 100};
  const auto study = federated_study(cfg, sizes, 0);

  // Delta-method SE of the utility through the estimated alpha.
  const double k = study.alpha * study.expected_loss.mean;
  const double alpha_se = study.others_value * k *
                          study.expected_loss.std_error /
                          study.expected_loss.mean;
  const double se = std::hypot(study.utility.std_error, alpha_se);
  const bool near = std::abs(study.utility.mean - study.predicted_utility) <=
                    3.0 * se;
  const bool rational = study.utility.mean - 3.0 * se > study.own_value;

  const SimulationSetup setup{cfg.generator, sizes, cfg.mechanism, 0};
  StrategyProfile fabricated(sizes.size(), Strategy{Truthful{}});
  fabricated[0] = BernHalfAugment{CountRule::same_as_input()};
  const std::size_t others = 400;
  const auto diff = monte_carlo(
      20000, derive_seed(seed, {2}), [&](std::uint64_t trial_seed) {
        const double honest = static_cast<double>(federated_allocation_size(
            cfg.valuation, study.alpha, trial_loss(setup, {}, trial_seed),
            others));
        const double cheat = static_cast<double>(federated_allocation_size(
            cfg.valuation, study.alpha,
            trial_loss(setup, fabricated, trial_seed), others));
        return cheat - honest;
      });
  const bool punished = diff.mean < -3.0 * diff.std_error;

  r.measured = study.utility.mean;
  r.target = study.predicted_utility;
  r.tolerance = 3.0 * se;
  r.rule = "|measured - target| <= tol; measured > v(|X_i|); fabricators get less";
  r.passed = near && rational && punished;
  r.time_limit = 60;
  r.details = {{"expected_loss", estimate_json(study.expected_loss)},
               {"alpha", study.alpha},
               {"utility", estimate_json(study.utility)},
               {"combined_se", se},
               {"own_value", study.own_value},
               {"others_value", study.others_value},
               {"below_range_trials", study.below_range},
               {"fabricated_minus_truthful_allocation", estimate_json(diff)}};
  return r;
}

CriterionResult embeddings(const VerificationOptions&, std::uint64_t seed) {
  constexpr std::size_t kDim = 32;
  constexpr std::size_t kTrials = 200;
  CriterionResult r = start(12, "synthetic embedding pipeline");
  const EmbeddingFabricate fabricator{std::vector<double>(8, 0.5), 1.0,
                                      CountRule::same_as_input()};
  const std::vector<LossKind> kinds = {LossKind::kAlg3, LossKind::kCvm,
                                       LossKind::kKs, LossKind::kMeanDiff};
  bool all = true;
  double min_z = INFINITY;
  Json cells = Json::array();
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto run_seed = derive_seed(seed, {s});
    for (auto kind : kinds) {
      MechanismConfig m = mechanism(kind);
      m.features = FeatureBank::coordinates(kDim);
      const SimulationSetup setup{EmbeddingGenerator{kDim, 1.0, 1.0},
                                  std::vector<std::size_t>(10, 200), m, 0};
      const auto g = truthfulness_gap(setup, fabricator, kTrials, run_seed);
      all = all && g.gap > 0.0;
      min_z = std::min(min_z, g.gap / g.combined_se);
      cells.push_back({{"seed", s}, {"method", to_string(kind)}, {"gap", gap_json(g)}});
    }
  }
  r.measured = min_z;
  r.target = 0.0;
  r.tolerance = 0.0;
  r.rule = "every gap > 0 (measured is the smallest gap/SE)";
  r.passed = all;
  r.time_limit = 120;
  r.details = {{"cells", cells}};
  return r;
}

CriterionResult determinism(const VerificationOptions& o) {
  CriterionResult r = start(13, "byte-identical reruns");
  const std::vector<int> ids = {1, 3, 5, 9};
  std::size_t mismatches = 0;
  Json checked = Json::array();
  for (int id : ids) {
    const auto a = to_json(run_criterion(id, o), false).dump();
    const auto b = to_json(run_criterion(id, o), false).dump();
    if (a != b) ++mismatches;
    checked.push_back({{"criterion", id}, {"bytes", a.size()}, {"identical", a == b}});
  }
  r.measured = static_cast<double>(mismatches);
  r.target = 0.0;
  r.tolerance = 0.0;
  r.rule = "mismatches == 0";
  r.passed = mismatches == 0;
  r.time_limit = 60;
  r.details = {{"reruns", checked}};
  return r;
}

}  // namespace

VerifyLevel parse_verify_level(std::string_view name) {
  if (name == "fast") return VerifyLevel::kFast;
  if (name == "full") return VerifyLevel::kFull;
  throw ValidationError("unknown verification level '" + std::string(name) +
                        "' (expected fast or full)");
}

std::vector<int> criteria_for(VerifyLevel level) {
  if (level == VerifyLevel::kFast) return {1, 2, 3, 4, 5, 9, 13};
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
}

CriterionResult run_criterion(int id, const VerificationOptions& options) {
  using Fn = std::function<CriterionResult(const VerificationOptions&,
                                           std::uint64_t)>;
  static const std::map<int, Fn> table = {
      {1, one_sample_identity}, {2, two_sample_identity},
      {3, prior_free_truthful}, {4, bayesian_bounds},
      {5, posterior_oracles},   {6, beta_bernoulli_gaps},
      {7, normal_normal_gaps},  {8, mib_sensitivity},
      {9, purchase_properties}, {10, marketplace},
      {11, federated},          {12, embeddings},
  };
  const auto start = std::chrono::steady_clock::now();
  CriterionResult result;
  if (id == 13) {
    result = determinism(options);
  } else {
    const auto it = table.find(id);
    if (it == table.end()) {
      throw ValidationError("no criterion " + std::to_string(id));
    }
    result = it->second(options,
                        derive_seed(options.seed, StreamTag::kOracle,
                                    static_cast<std::uint64_t>(id)));
  }
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  if (options.enforce_time && result.seconds > result.time_limit) {
    result.passed = false;
    result.details["over_time"] = true;
  }
  return result;
}

std::vector<CriterionResult> run_verification_suite(
    VerifyLevel level, const VerificationOptions& options) {
  std::vector<CriterionResult> out;
  for (int id : criteria_for(level)) out.push_back(run_criterion(id, options));
  return out;
}

nlohmann::ordered_json to_json(const CriterionResult& r, bool with_timing) {
  Json j = {{"id", r.id},
            {"name", r.name},
            {"measured", r.measured},
            {"target", r.target},
            {"tolerance", r.tolerance},
            {"rule", r.rule},
            {"passed", r.passed}};
  if (with_timing) {
    j["seconds"] = r.seconds;
    j["time_limit"] = r.time_limit;
  }
  Json details = r.details;
  if (!with_timing) details.erase("over_time");
  j["details"] = details;
  return j;
}

std::string summary_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "[%s] %2d %s: measured=%.6g target=%.6g tol=%.3g (%s) "
                "%.2fs/%gs",
                r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured,
                r.target, r.tolerance, r.rule.c_str(), r.seconds, r.time_limit);
  return buf;
}

}  // namespace cvmshare
