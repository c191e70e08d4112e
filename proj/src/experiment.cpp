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

#include "cvmshare/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cvmshare/embeddings.hpp"
#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json estimate_json(const MonteCarloEstimate& e) {
  return {{"mean", e.mean},
          {"se", e.std_error},
          {"trials", e.trials},
          {"seed", e.master_seed}};
}

Json header(ExperimentKind kind, const RunConfig& cfg) {
  Json config = Json::object();
  for (const auto& [k, v] : cfg.echo) config[k] = v;
  return {{"experiment", to_string(kind)},
          {"seed", cfg.seed},
          {"trials", cfg.trials},
          {"generator", describe(cfg.generator)},
          {"sizes", cfg.sizes},
          {"focal", cfg.focal},
          {"config", config}};
}

bool pays(LossKind kind) { return !is_baseline(kind); }

struct Cell {
  std::string method;
  LossKind kind;
  std::string scenario;
  MonteCarloEstimate truthful;
  MonteCarloEstimate untruthful;
  double gap;
  double gap_se;
};

void emit_cells(const std::vector<Cell>& cells, const RunConfig& cfg,
                ExperimentOutput& out) {
  Json rows = Json::array();
  std::string summary =
      "method,scenario,truthful_mean,truthful_se,untruthful_mean,"
      "untruthful_se,gap,gap_se\n";
  std::string normalized = "method,scenario,normalized_loss,normalized_se\n";
  std::string last_method;
  for (const auto& c : cells) {
    Json row = {{"method", c.method},
                {"scenario", c.scenario},
                {"truthful", estimate_json(c.truthful)},
                {"untruthful", estimate_json(c.untruthful)},
                {"gap", {{"mean", c.gap}, {"se", c.gap_se}}}};
    if (cfg.budget && pays(c.kind)) {
      const double share = *cfg.budget / static_cast<double>(cfg.sizes.size());
      row["expected_payment"] = {
          {"truthful", {{"mean", share * (1.0 - c.truthful.mean)},
                        {"se", share * c.truthful.std_error}}},
          {"untruthful", {{"mean", share * (1.0 - c.untruthful.mean)},
                          {"se", share * c.untruthful.std_error}}}};
    }
    rows.push_back(row);
    summary += c.method + "," + c.scenario + "," + num(c.truthful.mean) + "," +
               num(c.truthful.std_error) + "," + num(c.untruthful.mean) + "," +
               num(c.untruthful.std_error) + "," + num(c.gap) + "," +
               num(c.gap_se) + "\n";
    const double scale = c.truthful.mean;
    if (c.method != last_method) {
      normalized += c.method + ",truthful,1," +
                    num(scale > 0.0 ? c.truthful.std_error / scale : 0.0) + "\n";
      last_method = c.method;
    }
    if (scale > 0.0) {
      normalized += c.method + "," + c.scenario + "," +
                    num(c.untruthful.mean / scale) + "," +
                    num(c.untruthful.std_error / scale) + "\n";
    }
  }
  out.results["results"] = rows;
  out.summary_csv = summary;
  out.normalized_csv = normalized;
}

ExperimentOutput simulate(ExperimentKind kind, const RunConfig& cfg) {
  if (cfg.strategies.empty()) {
    throw ValidationError("strategies: at least one fabrication is needed");
  }
  ExperimentOutput out;
  out.results = header(kind, cfg);
  std::vector<Cell> cells;
  for (const auto& method : cfg.methods) {
    const SimulationSetup setup{cfg.generator, cfg.sizes, method.mechanism,
                                cfg.focal};
    for (const auto& s : cfg.strategies) {
      const auto g = truthfulness_gap(setup, s.strategy, cfg.trials, cfg.seed,
                                      cfg.common_random_numbers);
      cells.push_back({method.name, method.mechanism.kind, describe(s.strategy),
                       g.truthful, g.fabricated, g.gap, g.combined_se});
    }
  }
  emit_cells(cells, cfg, out);
  return out;
}

ExperimentOutput embed_from_file(const RunConfig& cfg) {
  const auto table = load_embeddings(cfg.embedding_file);
  const auto ids = table.agents();
  std::vector<Dataset> truthful;
  std::vector<std::uint64_t> agent_ids;
  std::vector<std::size_t> fabricators;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto d = table.dataset(ids[i], EmbeddingLabel::kTruthful);
    truthful.push_back(std::move(d));
    agent_ids.push_back(static_cast<std::uint64_t>(ids[i]));
    if (!table.dataset(ids[i], EmbeddingLabel::kFabricated).empty()) {
      fabricators.push_back(i);
    }
  }
  if (fabricators.empty()) {
    throw ValidationError(cfg.embedding_file + ": no fabricated rows");
  }

  ExperimentOutput out;
  out.results = header(ExperimentKind::kEmbed, cfg);
  out.results["sizes"] = Json::array();
  for (const auto& d : truthful) out.results["sizes"].push_back(d.size());
  out.results["dim"] = table.dim();

  const SubmissionSet honest(truthful, agent_ids);
  std::vector<Cell> cells;
  for (const auto& method : cfg.methods) {
    MechanismConfig mech = method.mechanism;
    if (cfg.echo.at("features") == "auto") {
      mech.features = FeatureBank::coordinates(table.dim());
    }
    try {
      mech.validate_for(false, table.dim());
    } catch (const ValidationError& e) {
      throw ValidationError("methods/features: " + method.name + ": " + e.what());
    }
    std::vector<double> t_losses, f_losses, diffs;
    for (std::size_t a : fabricators) {
      auto submissions = truthful;
      submissions[a].append(table.dataset(ids[a], EmbeddingLabel::kFabricated));
      const SubmissionSet cheat(std::move(submissions), agent_ids);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto seed = derive_seed(cfg.seed, StreamTag::kTrial, t);
        const double x = agent_loss(mech, honest, a, seed).tau;
        const double y = agent_loss(mech, cheat, a, seed).tau;
        t_losses.push_back(x);
        f_losses.push_back(y);
        diffs.push_back(y - x);
      }
    }
    const auto d = MonteCarloEstimate::from_samples(diffs, cfg.seed);
    cells.push_back({method.name, mech.kind, "file_fabrications",
                     MonteCarloEstimate::from_samples(t_losses, cfg.seed),
                     MonteCarloEstimate::from_samples(f_losses, cfg.seed),
                     d.mean, d.std_error});
  }
  emit_cells(cells, cfg, out);
  return out;
}

const MethodSpec& single_method(const RunConfig& cfg) {
  if (cfg.methods.size() != 1) {
    throw ValidationError("methods: this experiment takes exactly one method");
  }
  return cfg.methods.front();
}

ExperimentOutput market(const RunConfig& cfg) {
  MarketplaceConfig m;
  m.cost = cfg.market_cost;
  m.valuation = cfg.market_valuation;
  m.agents = cfg.sizes.size();
  m.n_max = cfg.market_n_max;
  m.generator = cfg.generator;
  m.mechanism = single_method(cfg).mechanism;
  m.trials = cfg.trials;
  m.seed = cfg.seed;

  const auto terms = marketplace_alpha(m);
  const std::size_t share = terms.counts.at(cfg.focal);
  const std::size_t lo = share > cfg.market_sweep ? share - cfg.market_sweep : 1;
  const auto sweep = agent_utility_sweep(m, terms, cfg.focal, std::max<std::size_t>(lo, 1),
                                         share + cfg.market_sweep, cfg.trials,
                                         derive_seed(cfg.seed, {1}));

  Rng rng(derive_seed(cfg.seed, StreamTag::kScenario));
  auto scenario = generate_scenario(m.generator, terms.counts, rng);
  const SubmissionSet set(std::move(scenario.datasets));
  const auto reports =
      run_mechanism(m.mechanism, set, derive_seed(cfg.seed, StreamTag::kMechanism));
  const auto round = marketplace_round(terms, std::span<const LossReport>(reports));

  ExperimentOutput out;
  out.results = header(ExperimentKind::kMarketplace, cfg);
  out.results["valuation"] = m.valuation.describe();
  out.results["n_star"] = terms.n_star;
  out.results["counts"] = terms.counts;
  out.results["value"] = terms.value;
  out.results["sensitivity"] = estimate_json(terms.sensitivity);
  out.results["alpha"] = terms.alpha;
  out.results["alpha_se"] =
      terms.alpha * terms.sensitivity.std_error / std::abs(terms.sensitivity.mean);
  Json points = Json::array();
  std::string summary = "size,expected_loss,loss_se,utility,utility_se\n";
  for (const auto& p : sweep) {
    points.push_back({{"size", p.size},
                      {"loss", estimate_json(p.loss)},
                      {"utility", p.utility},
                      {"utility_se", p.utility_se}});
    summary += std::to_string(p.size) + "," + num(p.loss.mean) + "," +
               num(p.loss.std_error) + "," + num(p.utility) + "," +
               num(p.utility_se) + "\n";
  }
  out.results["sweep"] = points;
  Json realized = Json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    realized.push_back({{"agent", i},
                        {"tau", reports[i].tau},
                        {"payment", round.payments[i]}});
  }
  out.results["round"] = {{"agents", realized},
                          {"buyer_charge", round.buyer_charge}};
  out.summary_csv = summary;
  return out;
}

ExperimentOutput federate(const RunConfig& cfg) {
  FederatedConfig f;
  f.valuation = cfg.federated_valuation;
  f.generator = cfg.generator;
  f.mechanism = single_method(cfg).mechanism;
  f.trials = cfg.trials;
  f.seed = cfg.seed;
  const auto study = federated_study(f, cfg.sizes, cfg.focal);

  std::size_t others = 0;
  for (std::size_t j = 0; j < cfg.sizes.size(); ++j) {
    if (j != cfg.focal) others += cfg.sizes[j];
  }
  const SimulationSetup setup{f.generator, cfg.sizes, f.mechanism, cfg.focal};

  ExperimentOutput out;
  out.results = header(ExperimentKind::kFederated, cfg);
  out.results["valuation"] = f.valuation.describe();
  out.results["expected_loss"] = estimate_json(study.expected_loss);
  const double alpha_se = study.alpha * study.expected_loss.std_error /
                          study.expected_loss.mean;
  out.results["alpha"] = study.alpha;
  out.results["alpha_se"] = alpha_se;
  out.results["utility"] = estimate_json(study.utility);
  out.results["predicted_utility"] = study.predicted_utility;
  out.results["own_value"] = study.own_value;
  out.results["others_value"] = study.others_value;
  out.results["below_range_trials"] = study.below_range;

  std::string summary = "quantity,value,se\n";
  summary += "expected_loss," + num(study.expected_loss.mean) + "," +
             num(study.expected_loss.std_error) + "\n";
  summary += "alpha," + num(study.alpha) + "," + num(alpha_se) + "\n";
  summary += "truthful_utility," + num(study.utility.mean) + "," +
             num(study.utility.std_error) + "\n";
  summary += "predicted_utility," + num(study.predicted_utility) + ",0\n";
  summary += "standalone_utility," + num(study.own_value) + ",0\n";

  Json fabrications = Json::array();
  for (const auto& s : cfg.strategies) {
    StrategyProfile profile(cfg.sizes.size(), Strategy{Truthful{}});
    profile[cfg.focal] = s.strategy;
    const auto diff = monte_carlo(
        cfg.trials, derive_seed(cfg.seed, {3}), [&](std::uint64_t trial_seed) {
          const auto honest = federated_allocation_size(
              f.valuation, study.alpha, trial_loss(setup, {}, trial_seed), others);
          const auto cheat = federated_allocation_size(
              f.valuation, study.alpha, trial_loss(setup, profile, trial_seed),
              others);
          return static_cast<double>(cheat) - static_cast<double>(honest);
        });
    fabrications.push_back({{"strategy", describe(s.strategy)},
                            {"allocation_change", estimate_json(diff)}});
    summary += "allocation_change:" + describe(s.strategy) + "," +
               num(diff.mean) + "," + num(diff.std_error) + "\n";
  }
  out.results["fabrications"] = fabrications;
  out.summary_csv = summary;
  return out;
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "simulate") return ExperimentKind::kSimulate;
  if (name == "embed" || name == "embed-run") return ExperimentKind::kEmbed;
  if (name == "marketplace") return ExperimentKind::kMarketplace;
  if (name == "federated") return ExperimentKind::kFederated;
  throw ValidationError("unknown experiment '" + std::string(name) + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kEmbed: return "embed";
    case ExperimentKind::kMarketplace: return "marketplace";
    case ExperimentKind::kFederated: return "federated";
  }
  return "?";
}

ExperimentOutput run_experiment(ExperimentKind kind, const RunConfig& cfg) {
  switch (kind) {
    case ExperimentKind::kSimulate:
      if (!cfg.embedding_file.empty()) {
        throw ValidationError("embedding.file: use embed-run for file input");
      }
      return simulate(kind, cfg);
    case ExperimentKind::kEmbed:
      if (!cfg.embedding_file.empty()) return embed_from_file(cfg);
      if (generates_scalars(cfg.generator)) {
        throw ValidationError("generator: embed-run needs embedding data");
      }
      return simulate(kind, cfg);
    case ExperimentKind::kMarketplace:
      if (!cfg.embedding_file.empty()) {
        throw ValidationError("embedding.file: not used by marketplace");
      }
      return market(cfg);
    case ExperimentKind::kFederated:
      if (!cfg.embedding_file.empty()) {
        throw ValidationError("embedding.file: not used by federated");
      }
      return federate(cfg);
  }
  throw ValidationError("unknown experiment");
}

void write_outputs(const ExperimentOutput& output,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (out_dir / name).string());
    f << text;
  };
  write("results.json", output.results.dump(2) + "\n");
  write("summary.csv", output.summary_csv);
  if (!output.normalized_csv.empty()) {
    write("normalized.csv", output.normalized_csv);
  }
}

}  // namespace cvmshare
