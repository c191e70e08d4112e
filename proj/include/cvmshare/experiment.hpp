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

#include <filesystem>
#include <string>
#include <string_view>

#include "cvmshare/config.hpp"
#include "json.hpp"

namespace cvmshare {

enum class ExperimentKind { kSimulate, kEmbed, kMarketplace, kFederated };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string to_string(ExperimentKind kind);

struct ExperimentOutput {
  nlohmann::ordered_json results;
  std::string summary_csv;
  std::string normalized_csv;  // empty when the experiment has none
};

// Runs one experiment. The output is a pure function of (kind, cfg).
ExperimentOutput run_experiment(ExperimentKind kind, const RunConfig& cfg);

// Writes results.json, summary.csv and (when present) normalized.csv into
// out_dir, creating it if needed.
void write_outputs(const ExperimentOutput& output,
                   const std::filesystem::path& out_dir);

}  // namespace cvmshare
