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
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvmshare/bayes_models.hpp"
#include "cvmshare/feature_maps.hpp"
#include "cvmshare/mechanisms.hpp"
#include "cvmshare/rng.hpp"

namespace cvmshare {

// How many fabricated points a strategy appends, relative to the input size.
struct CountRule {
  enum class Kind { kSameAsInput, kFraction, kAbsolute };

  Kind kind = Kind::kSameAsInput;
  double value = 1.0;

  static CountRule same_as_input() { return {}; }
  static CountRule fraction(double f) { return {Kind::kFraction, f}; }
  static CountRule absolute(std::size_t k) {
    return {Kind::kAbsolute, static_cast<double>(k)};
  }

  std::size_t count(std::size_t input_size) const;
  std::string describe() const;
};

struct Truthful {};
// Appends Bernoulli(1/2) draws.
struct BernHalfAugment {
  CountRule count;
};
// Appends Bernoulli(p^) draws, p^ the mean of the true data.
struct BernPluginAugment {
  CountRule count;
};
// Sorts the data and inserts the midpoint of every adjacent pair.
struct MidpointInsert {};
// Appends uniform resamples of the true data.
struct DuplicateAugment {
  CountRule count;
};
// Adds delta to every scalar.
struct ShiftAll {
  double delta = 0.0;
};
// Appends vectors drawn coordinate-wise from N(mean_j + shift_j,
// (scale * sd_j)^2), with mean_j and sd_j estimated from the true data.
// Missing shift coordinates are 0.
struct EmbeddingFabricate {
  std::vector<double> shift;
  double scale = 1.0;
  CountRule count;
};

using Strategy =
    std::variant<Truthful, BernHalfAugment, BernPluginAugment, MidpointInsert,
                 DuplicateAugment, ShiftAll, EmbeddingFabricate>;

std::string describe(const Strategy& strategy);

// The dataset an agent holding `data` submits under `strategy`.
Dataset apply_strategy(const Strategy& strategy, const Dataset& data, Rng& rng);

struct UniformDistribution {
  double a = 0.0;
  double b = 1.0;
};
struct NormalDistribution {
  double mean = 0.0;
  double var = 1.0;
};
struct BernoulliDistribution {
  double p = 0.5;
};
struct PointMass {
  double x = 0.0;
};

using FrequentistDistribution =
    std::variant<UniformDistribution, NormalDistribution, BernoulliDistribution,
                 PointMass>;

// One latent draw from the prior shared by all agents, then i.i.d. data.
struct BayesianGenerator {
  PosteriorModel model;
};
// A fixed distribution.
struct FrequentistGenerator {
  FrequentistDistribution distribution;
};
// Embedding vectors: a latent mean mu ~ N(0, latent_var I) per scenario, then
// items ~ N(mu, noise_var I).
struct EmbeddingGenerator {
  std::size_t dim = 2;
  double latent_var = 1.0;
  double noise_var = 1.0;
};

using DataGenerator =
    std::variant<BayesianGenerator, FrequentistGenerator, EmbeddingGenerator>;

void validate(const DataGenerator& generator);
std::string describe(const DataGenerator& generator);
bool generates_scalars(const DataGenerator& generator);
std::size_t data_dim(const DataGenerator& generator);

struct Scenario {
  std::vector<double> latent;
  std::vector<Dataset> datasets;
};

// Draws the latent parameters, then each agent's data from its own child
// stream, so one agent's size never changes another agent's points and a
// larger size extends a smaller one.
Scenario generate_scenario(const DataGenerator& generator,
                           std::span<const std::size_t> sizes, Rng& rng);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;

  static MonteCarloEstimate from_samples(std::span<const double> samples,
                                         std::uint64_t master_seed);
};

// Runs fn(trial_seed) for trial = 0..trials-1 with trial seeds derived from
// master_seed, aggregated in trial order.
MonteCarloEstimate monte_carlo(
    std::size_t trials, std::uint64_t master_seed,
    const std::function<double(std::uint64_t trial_seed)>& fn);

// Everything needed to simulate one agent's loss.
struct SimulationSetup {
  DataGenerator generator;
  std::vector<std::size_t> sizes;
  MechanismConfig mechanism;
  std::size_t focal = 0;

  void validate() const;
};

// Strategies per agent; empty means everybody is truthful.
using StrategyProfile = std::vector<Strategy>;

// The focal agent's loss in one trial: fresh scenario, strategies applied,
// mechanism run. All randomness comes from trial_seed.
double trial_loss(const SimulationSetup& setup, const StrategyProfile& profile,
                  std::uint64_t trial_seed);
LossReport trial_report(const SimulationSetup& setup,
                        const StrategyProfile& profile,
                        std::uint64_t trial_seed);

MonteCarloEstimate expected_loss(const SimulationSetup& setup,
                                 const StrategyProfile& profile,
                                 std::size_t trials, std::uint64_t seed);

struct GapEstimate {
  double gap = 0.0;
  double combined_se = 0.0;
  MonteCarloEstimate truthful;
  MonteCarloEstimate fabricated;
};

// E[tau | fabrication] - E[tau | truthful] for the focal agent, everyone
// else truthful. With common random numbers both arms share each trial's
// scenario and mechanism draws and the SE is that of the paired differences;
// otherwise the arms use independent seeds.
GapEstimate truthfulness_gap(const SimulationSetup& setup,
                             const Strategy& fabrication, std::size_t trials,
                             std::uint64_t seed,
                             bool common_random_numbers = true);

// E[tau(focal size a)] - E[tau(focal size b)], paired per trial.
MonteCarloEstimate paired_size_difference(const SimulationSetup& setup,
                                          std::size_t size_a,
                                          std::size_t size_b,
                                          std::size_t trials,
                                          std::uint64_t seed);

struct MibPoint {
  std::size_t size;
  MonteCarloEstimate estimate;
};

// Truthful expected loss for each focal size, with shared trial seeds.
std::vector<MibPoint> mib_curve(const SimulationSetup& setup,
                                std::span<const std::size_t> focal_sizes,
                                std::size_t trials, std::uint64_t seed);

struct WorstCase {
  std::size_t index = 0;  // into the family
  MonteCarloEstimate estimate;
  std::vector<MonteCarloEstimate> all;
};

// Largest expected loss over a finite family of generators, each evaluated
// with setup's sizes and mechanism and the same trial seeds.
WorstCase worst_case_expected_loss(const SimulationSetup& setup,
                                   std::span<const DataGenerator> family,
                                   const StrategyProfile& profile,
                                   std::size_t trials, std::uint64_t seed);

}  // namespace cvmshare
