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

#include "cvmshare/agents_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

void require_nonempty(const Dataset& data, const char* strategy) {
  if (data.empty()) {
    throw ValidationError(std::string(strategy) + " needs nonempty data");
  }
}

void require_scalar(const Dataset& data, const char* strategy) {
  if (!data.empty() && !data.is_scalar()) {
    throw ValidationError(std::string(strategy) + " needs scalar data");
  }
}

Dataset append_scalars(const Dataset& data, std::size_t k,
                       const std::function<double()>& draw) {
  std::vector<double> values(data.values().begin(), data.values().end());
  values.reserve(values.size() + k);
  for (std::size_t i = 0; i < k; ++i) values.push_back(draw());
  return Dataset::scalars(std::move(values));
}

}  // namespace

std::size_t CountRule::count(std::size_t input_size) const {
  switch (kind) {
    case Kind::kSameAsInput:
      return input_size;
    case Kind::kFraction:
      return static_cast<std::size_t>(
          std::llround(value * static_cast<double>(input_size)));
    case Kind::kAbsolute:
      return static_cast<std::size_t>(value);
  }
  return input_size;
}

std::string CountRule::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kSameAsInput: out << "same"; break;
    case Kind::kFraction: out << "fraction:" << value; break;
    case Kind::kAbsolute: out << static_cast<std::size_t>(value); break;
  }
  return out.str();
}

std::string describe(const Strategy& strategy) {
  struct Visitor {
    std::string operator()(const Truthful&) const { return "truthful"; }
    std::string operator()(const BernHalfAugment& s) const {
      return "bern_half(" + s.count.describe() + ")";
    }
    std::string operator()(const BernPluginAugment& s) const {
      return "bern_plugin(" + s.count.describe() + ")";
    }
    std::string operator()(const MidpointInsert&) const {
      return "midpoint_insert";
    }
    std::string operator()(const DuplicateAugment& s) const {
      return "duplicate(" + s.count.describe() + ")";
    }
    std::string operator()(const ShiftAll& s) const {
      std::ostringstream out;
      out << "shift_all(" << s.delta << ")";
      return out.str();
    }
    std::string operator()(const EmbeddingFabricate& s) const {
      std::ostringstream out;
      out << "embedding_fabricate(shifted=" << s.shift.size()
          << ", scale=" << s.scale << ", " << s.count.describe() << ")";
      return out.str();
    }
  };
  return std::visit(Visitor{}, strategy);
}

Dataset apply_strategy(const Strategy& strategy, const Dataset& data,
                       Rng& rng) {
  if (std::holds_alternative<Truthful>(strategy)) return data;

  if (const auto* s = std::get_if<BernHalfAugment>(&strategy)) {
    require_scalar(data, "bern_half");
    return append_scalars(data, s->count.count(data.size()),
                          [&] { return rng.bernoulli(0.5) ? 1.0 : 0.0; });
  }
  if (const auto* s = std::get_if<BernPluginAugment>(&strategy)) {
    require_nonempty(data, "bern_plugin");
    require_scalar(data, "bern_plugin");
    const Sample sample({data.values().begin(), data.values().end()});
    const double p = std::clamp(sample.mean(), 0.0, 1.0);
    return append_scalars(data, s->count.count(data.size()),
                          [&] { return rng.bernoulli(p) ? 1.0 : 0.0; });
  }
  if (std::holds_alternative<MidpointInsert>(strategy)) {
    require_nonempty(data, "midpoint_insert");
    require_scalar(data, "midpoint_insert");
    if (data.size() == 1) return data;
    std::vector<double> sorted(data.values().begin(), data.values().end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(2 * sorted.size() - 1);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i > 0) out.push_back(0.5 * (sorted[i - 1] + sorted[i]));
      out.push_back(sorted[i]);
    }
    return Dataset::scalars(std::move(out));
  }
  if (const auto* s = std::get_if<DuplicateAugment>(&strategy)) {
    require_nonempty(data, "duplicate");
    Dataset out = data;
    const std::size_t k = s->count.count(data.size());
    out.reserve(data.size() + k);
    for (std::size_t i = 0; i < k; ++i) out.append(data.item(rng.index(data.size())));
    return out;
  }
  if (const auto* s = std::get_if<ShiftAll>(&strategy)) {
    std::vector<double> values(data.values().begin(), data.values().end());
    for (auto& v : values) v += s->delta;
    if (data.is_scalar()) return Dataset::scalars(std::move(values));
    return Dataset::vectors(data.dim(), std::move(values));
  }

  const auto& s = std::get<EmbeddingFabricate>(strategy);
  require_nonempty(data, "embedding_fabricate");
  const std::size_t d = data.dim();
  if (s.shift.size() > d) {
    throw ValidationError("embedding_fabricate shift longer than dimension");
  }
  if (!(s.scale >= 0.0)) {
    throw ValidationError("embedding_fabricate scale must be >= 0");
  }
  const std::size_t n = data.size();
  std::vector<double> mean(d, 0.0);
  std::vector<double> sd(d, 0.0);
  const auto v = data.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += v[i * d + j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double e = v[i * d + j] - mean[j];
        sd[j] += e * e;
      }
    }
    for (auto& x : sd) x = std::sqrt(x / static_cast<double>(n - 1));
  }
  const std::size_t k = s.count.count(n);
  std::vector<double> out(v.begin(), v.end());
  out.reserve(out.size() + k * d);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double shift = j < s.shift.size() ? s.shift[j] : 0.0;
      const double spread = s.scale * sd[j];
      out.push_back(spread > 0.0 ? rng.normal(mean[j] + shift, spread)
                                 : mean[j] + shift);
    }
  }
  if (data.is_scalar()) return Dataset::scalars(std::move(out));
  return Dataset::vectors(d, std::move(out));
}

void validate(const DataGenerator& generator) {
  if (const auto* b = std::get_if<BayesianGenerator>(&generator)) {
    validate(b->model);
    return;
  }
  if (const auto* e = std::get_if<EmbeddingGenerator>(&generator)) {
    if (e->dim == 0) throw ValidationError("embedding dim must be >= 1");
    if (!(e->latent_var >= 0.0)) {
      throw ValidationError("embedding latent_var must be >= 0");
    }
    if (!(e->noise_var > 0.0)) {
      throw ValidationError("embedding noise_var must be > 0");
    }
    return;
  }
  const auto& dist = std::get<FrequentistGenerator>(generator).distribution;
  if (const auto* u = std::get_if<UniformDistribution>(&dist)) {
    if (!(u->a < u->b)) throw ValidationError("uniform needs a < b");
  } else if (const auto* n = std::get_if<NormalDistribution>(&dist)) {
    if (!(n->var > 0.0)) throw ValidationError("normal needs var > 0");
  } else if (const auto* b = std::get_if<BernoulliDistribution>(&dist)) {
    if (!(b->p >= 0.0 && b->p <= 1.0)) {
      throw ValidationError("bernoulli needs p in [0, 1]");
    }
  } else if (!std::isfinite(std::get<PointMass>(dist).x)) {
    throw ValidationError("point mass location must be finite");
  }
}

std::string describe(const DataGenerator& generator) {
  std::ostringstream out;
  if (const auto* b = std::get_if<BayesianGenerator>(&generator)) {
    out << "bayesian:" << describe(b->model);
  } else if (const auto* e = std::get_if<EmbeddingGenerator>(&generator)) {
    out << "embedding(dim=" << e->dim << ", latent_var=" << e->latent_var
        << ", noise_var=" << e->noise_var << ")";
  } else {
    const auto& dist = std::get<FrequentistGenerator>(generator).distribution;
    if (const auto* u = std::get_if<UniformDistribution>(&dist)) {
      out << "uniform(" << u->a << ", " << u->b << ")";
    } else if (const auto* n = std::get_if<NormalDistribution>(&dist)) {
      out << "normal(" << n->mean << ", " << n->var << ")";
    } else if (const auto* b = std::get_if<BernoulliDistribution>(&dist)) {
      out << "bernoulli(" << b->p << ")";
    } else {
      out << "point_mass(" << std::get<PointMass>(dist).x << ")";
    }
  }
  return out.str();
}

bool generates_scalars(const DataGenerator& generator) {
  return !std::holds_alternative<EmbeddingGenerator>(generator);
}

std::size_t data_dim(const DataGenerator& generator) {
  if (const auto* e = std::get_if<EmbeddingGenerator>(&generator)) return e->dim;
  return 1;
}

Scenario generate_scenario(const DataGenerator& generator,
                           std::span<const std::size_t> sizes, Rng& rng) {
  Scenario scenario;
  scenario.datasets.reserve(sizes.size());

  if (const auto* b = std::get_if<BayesianGenerator>(&generator)) {
    const double latent = draw_latent(b->model, rng);
    scenario.latent = {latent};
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      Rng agent = rng.child(StreamTag::kScenario, j);
      std::vector<double> data(sizes[j]);
      for (auto& x : data) x = draw_observation(b->model, latent, agent);
      scenario.datasets.push_back(Dataset::scalars(std::move(data)));
    }
    return scenario;
  }

  if (const auto* e = std::get_if<EmbeddingGenerator>(&generator)) {
    scenario.latent.resize(e->dim, 0.0);
    if (e->latent_var > 0.0) {
      for (auto& mu : scenario.latent) mu = rng.normal(0.0, std::sqrt(e->latent_var));
    }
    const double noise_sd = std::sqrt(e->noise_var);
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      Rng agent = rng.child(StreamTag::kScenario, j);
      std::vector<double> data(sizes[j] * e->dim);
      for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = agent.normal(scenario.latent[i % e->dim], noise_sd);
      }
      scenario.datasets.push_back(Dataset::vectors(e->dim, std::move(data)));
    }
    return scenario;
  }

  const auto& dist = std::get<FrequentistGenerator>(generator).distribution;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    Rng agent = rng.child(StreamTag::kScenario, j);
    std::vector<double> data(sizes[j]);
    for (auto& x : data) {
      if (const auto* u = std::get_if<UniformDistribution>(&dist)) {
        x = agent.uniform(u->a, u->b);
      } else if (const auto* n = std::get_if<NormalDistribution>(&dist)) {
        x = agent.normal(n->mean, std::sqrt(n->var));
      } else if (const auto* bern = std::get_if<BernoulliDistribution>(&dist)) {
        x = agent.bernoulli(bern->p) ? 1.0 : 0.0;
      } else {
        x = std::get<PointMass>(dist).x;
      }
    }
    scenario.datasets.push_back(Dataset::scalars(std::move(data)));
  }
  return scenario;
}

MonteCarloEstimate MonteCarloEstimate::from_samples(
    std::span<const double> samples, std::uint64_t master_seed) {
  if (samples.size() < 2) {
    throw ValidationError("a Monte-Carlo estimate needs at least 2 trials");
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n), samples.size(), master_seed};
}

MonteCarloEstimate monte_carlo(
    std::size_t trials, std::uint64_t master_seed,
    const std::function<double(std::uint64_t trial_seed)>& fn) {
  std::vector<double> values(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    values[t] = fn(derive_seed(master_seed, StreamTag::kTrial, t));
  }
  return MonteCarloEstimate::from_samples(values, master_seed);
}

void SimulationSetup::validate() const {
  if (sizes.size() < 2) throw ValidationError("simulation needs >= 2 agents");
  if (focal >= sizes.size()) throw ValidationError("focal agent out of range");
  cvmshare::validate(generator);
  mechanism.validate_for(generates_scalars(generator), data_dim(generator));
}

LossReport trial_report(const SimulationSetup& setup,
                        const StrategyProfile& profile,
                        std::uint64_t trial_seed) {
  if (!profile.empty() && profile.size() != setup.sizes.size()) {
    throw ValidationError("strategy profile size does not match agent count");
  }
  Rng scenario_rng(derive_seed(trial_seed, StreamTag::kScenario));
  auto scenario = generate_scenario(setup.generator, setup.sizes, scenario_rng);
  std::vector<Dataset> submissions;
  submissions.reserve(scenario.datasets.size());
  for (std::size_t j = 0; j < scenario.datasets.size(); ++j) {
    if (profile.empty() || std::holds_alternative<Truthful>(profile[j])) {
      submissions.push_back(std::move(scenario.datasets[j]));
    } else {
      Rng strategy_rng(derive_seed(trial_seed, StreamTag::kStrategy, j));
      submissions.push_back(
          apply_strategy(profile[j], scenario.datasets[j], strategy_rng));
    }
  }
  const SubmissionSet set(std::move(submissions));
  return agent_loss(setup.mechanism, set, setup.focal,
                    derive_seed(trial_seed, StreamTag::kMechanism));
}

double trial_loss(const SimulationSetup& setup, const StrategyProfile& profile,
                  std::uint64_t trial_seed) {
  return trial_report(setup, profile, trial_seed).tau;
}

MonteCarloEstimate expected_loss(const SimulationSetup& setup,
                                 const StrategyProfile& profile,
                                 std::size_t trials, std::uint64_t seed) {
  setup.validate();
  std::size_t trial = 0;
  try {
    return monte_carlo(trials, seed, [&](std::uint64_t trial_seed) {
      const double tau = trial_loss(setup, profile, trial_seed);
      ++trial;
      return tau;
    });
  } catch (const ValidationError& e) {
    throw ValidationError("trial " + std::to_string(trial) + ": " + e.what());
  }
}

GapEstimate truthfulness_gap(const SimulationSetup& setup,
                             const Strategy& fabrication, std::size_t trials,
                             std::uint64_t seed, bool common_random_numbers) {
  setup.validate();
  StrategyProfile fabricated(setup.sizes.size(), Strategy{Truthful{}});
  fabricated[setup.focal] = fabrication;

  GapEstimate out;
  if (common_random_numbers) {
    std::vector<double> truthful(trials), fab(trials), diff(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto trial_seed = derive_seed(seed, StreamTag::kTrial, t);
      truthful[t] = trial_loss(setup, {}, trial_seed);
      fab[t] = trial_loss(setup, fabricated, trial_seed);
      diff[t] = fab[t] - truthful[t];
    }
    out.truthful = MonteCarloEstimate::from_samples(truthful, seed);
    out.fabricated = MonteCarloEstimate::from_samples(fab, seed);
    const auto d = MonteCarloEstimate::from_samples(diff, seed);
    out.gap = d.mean;
    out.combined_se = d.std_error;
  } else {
    const auto fab_seed = derive_seed(seed, {0xfab});
    out.truthful = expected_loss(setup, {}, trials, seed);
    out.fabricated = expected_loss(setup, fabricated, trials, fab_seed);
    out.gap = out.fabricated.mean - out.truthful.mean;
    out.combined_se = std::hypot(out.truthful.std_error, out.fabricated.std_error);
  }
  return out;
}

MonteCarloEstimate paired_size_difference(const SimulationSetup& setup,
                                          std::size_t size_a,
                                          std::size_t size_b,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  SimulationSetup a = setup;
  SimulationSetup b = setup;
  a.sizes.at(setup.focal) = size_a;
  b.sizes.at(setup.focal) = size_b;
  a.validate();
  return monte_carlo(trials, seed, [&](std::uint64_t trial_seed) {
    return trial_loss(a, {}, trial_seed) - trial_loss(b, {}, trial_seed);
  });
}

std::vector<MibPoint> mib_curve(const SimulationSetup& setup,
                                std::span<const std::size_t> focal_sizes,
                                std::size_t trials, std::uint64_t seed) {
  std::vector<MibPoint> curve;
  curve.reserve(focal_sizes.size());
  for (std::size_t n : focal_sizes) {
    SimulationSetup s = setup;
    s.sizes.at(setup.focal) = n;
    curve.push_back({n, expected_loss(s, {}, trials, seed)});
  }
  return curve;
}

WorstCase worst_case_expected_loss(const SimulationSetup& setup,
                                   std::span<const DataGenerator> family,
                                   const StrategyProfile& profile,
                                   std::size_t trials, std::uint64_t seed) {
  if (family.empty()) throw ValidationError("empty generator family");
  WorstCase out;
  for (std::size_t g = 0; g < family.size(); ++g) {
    SimulationSetup s = setup;
    s.generator = family[g];
    out.all.push_back(expected_loss(s, profile, trials, seed));
    if (g == 0 || out.all.back().mean > out.estimate.mean) {
      out.index = g;
      out.estimate = out.all.back();
    }
  }
  return out;
}

}  // namespace cvmshare
