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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvmshare/agents_sim.hpp"
#include "cvmshare/applications.hpp"
#include "cvmshare/mechanisms.hpp"

namespace cvmshare {

struct MethodSpec {
  std::string name;
  MechanismConfig mechanism;
};

struct StrategySpec {
  std::string name;
  Strategy strategy;
};

// A parsed run configuration. See docs/config.md for the grammar and keys.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::string out_dir = "results";

  DataGenerator generator = BayesianGenerator{NormalNormalModel{}};
  std::string generator_name = "normal_normal";
  std::string embedding_file;  // when set, embed runs read items from here
  std::vector<std::size_t> sizes = {50, 50};
  std::size_t focal = 0;

  std::vector<MethodSpec> methods;
  std::vector<StrategySpec> strategies;  // fabrications; truthful is implicit
  bool common_random_numbers = true;

  // Budgeted purchase, reported alongside simulate results when set.
  std::optional<double> budget;

  double market_cost = 1.0;
  Valuation market_valuation = Valuation::sqrt(10.0);
  std::size_t market_n_max = 1000;
  std::size_t market_sweep = 3;

  Valuation federated_valuation = Valuation::sqrt(1.0);

  // Every key as given (after defaults), for the config echo in reports.
  std::map<std::string, std::string> echo;
};

using ConfigOverrides = std::map<std::string, std::string>;

// Parses the key = value format. Overrides replace or add keys before
// validation. Errors name the offending key or line.
RunConfig parse_config(std::string_view text,
                       std::string_view origin = "<config>",
                       const ConfigOverrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const ConfigOverrides& overrides = {});

// Parsers for individual values, shared with the command line.
Valuation parse_valuation(std::string_view text);
SplitMap parse_split_map(std::string_view text);
CountRule parse_count_rule(std::string_view text);

}  // namespace cvmshare
