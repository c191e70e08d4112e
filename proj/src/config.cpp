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

#include "cvmshare/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "seed", "trials", "out_dir",
    "generator", "prior.mean", "prior.var", "obs.var", "prior.alpha",
    "prior.beta", "uniform.a", "uniform.b", "normal.mean", "normal.var",
    "bernoulli.p", "point_mass.x", "embedding.dim", "embedding.latent_var",
    "embedding.noise_var", "embedding.file",
    "agents", "size", "sizes", "focal",
    "methods", "model", "kappa", "features",
    "strategies", "strategy.count", "strategy.delta", "fabricate.shift",
    "fabricate.coords", "fabricate.scale", "crn",
    "purchase.budget",
    "market.cost", "market.valuation", "market.n_max", "market.sweep",
    "federated.valuation",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ValidationError("expected a finite number, got '" +
                          std::string(text) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError("expected a nonnegative integer, got '" +
                          std::string(text) + "'");
  }
  return v;
}

// Hands out values by key, remembering which keys were read so leftovers
// can be reported.
class KeyValues {
 public:
  KeyValues(std::string_view text, std::string_view origin,
            const ConfigOverrides& overrides) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) {
        s = s.substr(0, hash);
      }
      s = trim(s);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      const std::string where =
          std::string(origin) + ":" + std::to_string(line) + ": ";
      if (eq == std::string_view::npos) {
        throw ValidationError(where + "expected 'key = value'");
      }
      const std::string key(trim(s.substr(0, eq)));
      const std::string value(trim(s.substr(eq + 1)));
      if (!kKnownKeys.contains(key)) {
        throw ValidationError(where + "unknown key '" + key + "'");
      }
      if (values_.contains(key)) {
        throw ValidationError(where + "duplicate key '" + key + "'");
      }
      if (value.empty()) {
        throw ValidationError(where + "key '" + key + "' has no value");
      }
      values_[key] = value;
    }
    for (const auto& [key, value] : overrides) {
      if (!kKnownKeys.contains(key)) {
        throw ValidationError("unknown key '" + key + "'");
      }
      values_[key] = value;
    }
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? fallback : it->second;
    echo[key] = v;
    return v;
  }

  template <typename Fn>
  auto parse(const std::string& key, const std::string& fallback, Fn fn) {
    const std::string v = str(key, fallback);
    try {
      return fn(std::string_view(v));
    } catch (const ValidationError& e) {
      throw ValidationError(key + ": " + e.what());
    }
  }

  double real(const std::string& key, double fallback) {
    std::ostringstream f;
    f << fallback;
    return parse(key, f.str(), to_double);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    return parse(key, std::to_string(fallback),
                 [](std::string_view s) { return std::size_t(to_uint(s)); });
  }

  void check_all_used() const {
    for (const auto& [key, value] : values_) {
      if (!used_.contains(key)) {
        throw ValidationError(key + ": key does not apply to this configuration");
      }
    }
  }

  std::map<std::string, std::string> echo;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

NormalNormalModel read_nn(KeyValues& kv) {
  NormalNormalModel m{kv.real("prior.mean", 0.0), kv.real("prior.var", 1.0),
                      kv.real("obs.var", 1.0)};
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("prior.var/obs.var: ") + e.what());
  }
  return m;
}

BetaBernoulliModel read_bb(KeyValues& kv) {
  BetaBernoulliModel m{kv.real("prior.alpha", 1.0), kv.real("prior.beta", 1.0)};
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("prior.alpha/prior.beta: ") + e.what());
  }
  return m;
}

FeatureBank parse_features(std::string_view text, bool scalar, std::size_t dim) {
  if (text == "auto") {
    return scalar ? FeatureBank::identity() : FeatureBank::coordinates(dim);
  }
  if (text == "identity") return FeatureBank::identity();
  if (text == "coordinates") return FeatureBank::coordinates(dim);
  if (text.starts_with("coordinate:")) {
    std::vector<FeatureMap> maps;
    for (auto part : split(text.substr(11), ',')) {
      maps.emplace_back(CoordinateMap{static_cast<std::size_t>(to_uint(part))});
    }
    return FeatureBank(std::move(maps));
  }
  throw ValidationError("expected auto, identity, coordinates or coordinate:<i>,...");
}

Strategy parse_strategy(std::string_view name, KeyValues& kv, bool scalar,
                        std::size_t dim) {
  auto count = [&] {
    return kv.parse("strategy.count", "same", parse_count_rule);
  };
  auto scalar_only = [&] {
    if (!scalar) {
      throw ValidationError("strategies: " + std::string(name) +
                            " needs scalar data");
    }
  };
  if (name == "bern_half") {
    scalar_only();
    return BernHalfAugment{count()};
  }
  if (name == "bern_plugin") {
    scalar_only();
    return BernPluginAugment{count()};
  }
  if (name == "midpoint_insert") {
    scalar_only();
    return MidpointInsert{};
  }
  if (name == "duplicate") return DuplicateAugment{count()};
  if (name == "shift_all") return ShiftAll{kv.real("strategy.delta", 0.5)};
  if (name == "embedding_fabricate") {
    const double shift = kv.real("fabricate.shift", 0.5);
    const std::size_t coords =
        kv.count("fabricate.coords", std::min<std::size_t>(8, dim));
    if (dim != 0 && coords > dim) {
      throw ValidationError("fabricate.coords: exceeds the data dimension");
    }
    const double scale = kv.real("fabricate.scale", 1.0);
    if (!(scale >= 0.0)) throw ValidationError("fabricate.scale: must be >= 0");
    return EmbeddingFabricate{std::vector<double>(coords, shift), scale,
                              count()};
  }
  throw ValidationError("strategies: unknown strategy '" + std::string(name) +
                        "'");
}

}  // namespace

Valuation parse_valuation(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("expected <family>:<parameters>, e.g. sqrt:10");
  }
  const auto family = text.substr(0, colon);
  const auto params = split(text.substr(colon + 1), ':');
  if (family == "sqrt" && params.size() == 1) {
    return Valuation::sqrt(to_double(params[0]));
  }
  if (family == "log" && params.size() == 1) {
    return Valuation::log(to_double(params[0]));
  }
  if (family == "linear" && params.size() == 1) {
    return Valuation::linear(to_double(params[0]));
  }
  if (family == "linear" && params.size() == 2) {
    // gamma * min(n, cap), stored as a table.
    const double gamma = to_double(params[0]);
    const std::size_t cap = to_uint(params[1]);
    std::vector<double> values(cap + 1);
    for (std::size_t n = 0; n <= cap; ++n) values[n] = gamma * static_cast<double>(n);
    return Valuation::table(std::move(values));
  }
  if (family == "table" && params.size() == 1) {
    std::vector<double> values;
    for (auto v : split(params[0], ',')) values.push_back(to_double(v));
    return Valuation::table(std::move(values));
  }
  throw ValidationError("unknown valuation '" + std::string(text) +
                        "' (sqrt:g, log:g, linear:g, linear:g:cap, table:v0,v1,...)");
}

SplitMap parse_split_map(std::string_view text) {
  if (text == "zero") return SplitMap::zero();
  if (text == "balance") return SplitMap::balance();
  std::map<std::size_t, std::size_t> entries;
  for (auto part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("expected zero, balance or n=k,n=k,...");
    }
    entries[to_uint(trim(part.substr(0, eq)))] = to_uint(trim(part.substr(eq + 1)));
  }
  return SplitMap::table(std::move(entries));
}

CountRule parse_count_rule(std::string_view text) {
  if (text == "same") return CountRule::same_as_input();
  if (text.starts_with("fraction:")) {
    const double f = to_double(text.substr(9));
    if (!(f >= 0.0)) throw ValidationError("fraction must be >= 0");
    return CountRule::fraction(f);
  }
  return CountRule::absolute(to_uint(text));
}

RunConfig parse_config(std::string_view text, std::string_view origin,
                       const ConfigOverrides& overrides) {
  KeyValues kv(text, origin, overrides);
  RunConfig cfg;

  if (!kv.has("seed")) throw ValidationError("seed: missing required key");
  cfg.seed = kv.parse("seed", "", to_uint);
  cfg.trials = kv.count("trials", cfg.trials);
  if (cfg.trials < 2) throw ValidationError("trials: must be >= 2");
  cfg.out_dir = kv.str("out_dir", cfg.out_dir);

  cfg.generator_name = kv.str("generator", "normal_normal");
  const auto& g = cfg.generator_name;
  std::optional<PosteriorModel> generator_model;
  if (g == "normal_normal") {
    generator_model = read_nn(kv);
    cfg.generator = BayesianGenerator{*generator_model};
  } else if (g == "beta_bernoulli") {
    generator_model = read_bb(kv);
    cfg.generator = BayesianGenerator{*generator_model};
  } else if (g == "uniform") {
    cfg.generator = FrequentistGenerator{
        UniformDistribution{kv.real("uniform.a", 0.0), kv.real("uniform.b", 1.0)}};
  } else if (g == "normal") {
    cfg.generator = FrequentistGenerator{NormalDistribution{
        kv.real("normal.mean", 0.0), kv.real("normal.var", 1.0)}};
  } else if (g == "bernoulli") {
    cfg.generator =
        FrequentistGenerator{BernoulliDistribution{kv.real("bernoulli.p", 0.5)}};
  } else if (g == "point_mass") {
    cfg.generator = FrequentistGenerator{PointMass{kv.real("point_mass.x", 0.0)}};
  } else if (g == "embedding") {
    if (kv.has("embedding.file")) {
      cfg.embedding_file = kv.str("embedding.file", "");
      cfg.generator = EmbeddingGenerator{};
    } else {
      cfg.generator = EmbeddingGenerator{kv.count("embedding.dim", 32),
                                         kv.real("embedding.latent_var", 1.0),
                                         kv.real("embedding.noise_var", 1.0)};
    }
  } else {
    throw ValidationError("generator: unknown generator '" + g + "'");
  }
  try {
    validate(cfg.generator);
  } catch (const ValidationError& e) {
    throw ValidationError("generator: " + std::string(e.what()));
  }
  const bool from_file = !cfg.embedding_file.empty();
  const bool scalar = generates_scalars(cfg.generator);
  const std::size_t dim = from_file ? 0 : data_dim(cfg.generator);

  if (kv.has("sizes")) {
    if (kv.has("agents") || kv.has("size")) {
      throw ValidationError("sizes: cannot be combined with agents/size");
    }
    cfg.sizes = kv.parse("sizes", "", [](std::string_view s) {
      std::vector<std::size_t> out;
      for (auto part : split(s, ',')) out.push_back(to_uint(part));
      return out;
    });
  } else if (!from_file) {
    cfg.sizes.assign(kv.count("agents", 2), kv.count("size", 50));
  }
  if (!from_file && cfg.sizes.size() < 2) {
    throw ValidationError("agents: need at least 2 agents");
  }
  cfg.focal = kv.count("focal", 0);
  if (!from_file && cfg.focal >= cfg.sizes.size()) {
    throw ValidationError("focal: agent index out of range");
  }

  // Model used by alg1/alg2.
  std::optional<PosteriorModel> model;
  const std::string model_name = kv.str("model", "auto");
  if (model_name == "auto") {
    model = generator_model;
  } else if (model_name == "normal_normal") {
    model = generator_model && std::holds_alternative<NormalNormalModel>(*generator_model)
                ? generator_model
                : std::optional<PosteriorModel>(read_nn(kv));
  } else if (model_name == "beta_bernoulli") {
    model = generator_model && std::holds_alternative<BetaBernoulliModel>(*generator_model)
                ? generator_model
                : std::optional<PosteriorModel>(read_bb(kv));
  } else {
    throw ValidationError("model: unknown model '" + model_name + "'");
  }
  if (model && std::holds_alternative<BetaBernoulliModel>(*model) &&
      g != "beta_bernoulli" && g != "bernoulli") {
    throw ValidationError("model: beta_bernoulli needs binary data");
  }

  const auto kappa = kv.parse("kappa", "zero", parse_split_map);
  const auto features = kv.parse(
      "features", "auto", [&](std::string_view s) {
        return from_file && s == "auto" ? FeatureBank::identity()
                                        : parse_features(s, scalar, dim);
      });
  const bool bayesian = generator_model.has_value();
  const std::string methods =
      kv.str("methods", bayesian ? "alg1" : "alg3");
  for (auto name : split(methods, ',')) {
    MethodSpec spec;
    spec.name = std::string(name);
    try {
      spec.mechanism.kind = parse_loss_kind(name);
    } catch (const ValidationError& e) {
      throw ValidationError("methods: " + std::string(e.what()));
    }
    const auto kind = spec.mechanism.kind;
    if ((kind == LossKind::kAlg1 || kind == LossKind::kAlg2) && !scalar) {
      throw ValidationError("methods: " + spec.name + " requires scalar data");
    }
    if ((kind == LossKind::kAlg1 || kind == LossKind::kAlg2) && !model) {
      throw ValidationError("methods: " + spec.name +
                            " requires a Bayesian model (set model)");
    }
    spec.mechanism.model = model;
    spec.mechanism.features = features;
    spec.mechanism.kappa = kappa;
    if (!from_file) {
      try {
        spec.mechanism.validate_for(scalar, dim);
      } catch (const ValidationError& e) {
        throw ValidationError("methods/features: " + spec.name + ": " + e.what());
      }
    }
    cfg.methods.push_back(std::move(spec));
  }

  if (kv.has("strategies")) {
    const std::string strategies = kv.str("strategies", "");
    for (auto name : split(strategies, ',')) {
      cfg.strategies.push_back(
          {std::string(name), parse_strategy(name, kv, scalar, dim)});
    }
  }
  cfg.common_random_numbers = kv.parse("crn", "true", [](std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ValidationError("expected true or false");
  });

  if (kv.has("purchase.budget")) {
    cfg.budget = kv.real("purchase.budget", 0.0);
    if (!(*cfg.budget >= 0.0)) throw ValidationError("purchase.budget: must be >= 0");
  }

  cfg.market_cost = kv.real("market.cost", cfg.market_cost);
  if (!(cfg.market_cost > 0.0)) throw ValidationError("market.cost: must be > 0");
  cfg.market_valuation = kv.parse("market.valuation", "sqrt:10", parse_valuation);
  cfg.market_n_max = kv.count("market.n_max", cfg.market_n_max);
  if (cfg.market_n_max < 1) throw ValidationError("market.n_max: must be >= 1");
  cfg.market_sweep = kv.count("market.sweep", cfg.market_sweep);
  cfg.federated_valuation =
      kv.parse("federated.valuation", "sqrt:1", parse_valuation);
  if (!cfg.federated_valuation.strictly_increasing()) {
    throw ValidationError("federated.valuation: must be strictly increasing");
  }

  kv.check_all_used();
  cfg.echo = std::move(kv.echo);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), overrides);
}

}  // namespace cvmshare
