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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cvmshare/config.hpp"
#include "cvmshare/error.hpp"
#include "cvmshare/experiment.hpp"
#include "cvmshare/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kCriterion = 2;
constexpr int kRuntime = 3;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> trials;
};

int run(cvmshare::ExperimentKind kind, const Globals& g) {
  if (g.config.empty()) {
    std::cerr << "error: --config is required for this command\n";
    return kValidation;
  }
  cvmshare::ConfigOverrides overrides;
  if (g.seed) overrides["seed"] = std::to_string(*g.seed);
  if (g.trials) overrides["trials"] = std::to_string(*g.trials);
  if (g.out_dir) overrides["out_dir"] = *g.out_dir;
  const auto cfg = cvmshare::load_config(g.config, overrides);
  const auto output = cvmshare::run_experiment(kind, cfg);
  cvmshare::write_outputs(output, cfg.out_dir);
  std::cout << output.summary_csv;
  std::cout << "wrote " << cfg.out_dir << "/results.json\n";
  return kOk;
}

int verify(const std::string& level, const Globals& g, bool no_time) {
  cvmshare::VerificationOptions options;
  if (g.seed) options.seed = *g.seed;
  options.enforce_time = !no_time;
  const auto results =
      cvmshare::run_verification_suite(cvmshare::parse_verify_level(level), options);
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::cout << cvmshare::summary_line(r) << std::endl;
    report.push_back(cvmshare::to_json(r));
    ok = ok && r.passed;
  }
  if (g.out_dir) {
    std::filesystem::create_directories(*g.out_dir);
    std::ofstream(std::filesystem::path(*g.out_dir) / "verification.json")
        << report.dump(2) << "\n";
  }
  return ok ? kOk : kCriterion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo simulator for ECDF-based truthful data-sharing mechanisms"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "run configuration file");
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--out-dir", g.out_dir, "output directory (overrides the config)");
  app.add_option("--trials", g.trials, "Monte-Carlo trials (overrides the config)");

  auto* simulate = app.add_subcommand("simulate", "truthful vs fabricated losses");
  auto* embed = app.add_subcommand("embed-run", "the same over embedding vectors");
  auto* market = app.add_subcommand("marketplace", "data-collection marketplace");
  auto* federated = app.add_subcommand("federated", "federated allocation");
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks");
  std::string level = "fast";
  bool no_time = false;
  verify_cmd->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_flag("--no-time-limits", no_time,
                       "do not fail criteria that exceed their time budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*simulate) return run(cvmshare::ExperimentKind::kSimulate, g);
    if (*embed) return run(cvmshare::ExperimentKind::kEmbed, g);
    if (*market) return run(cvmshare::ExperimentKind::kMarketplace, g);
    if (*federated) return run(cvmshare::ExperimentKind::kFederated, g);
    return verify(level, g, no_time);
  } catch (const cvmshare::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const cvmshare::InfeasibleMarketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const cvmshare::SensitivityUnresolvedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}
