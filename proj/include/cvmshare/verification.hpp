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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cvmshare {

enum class VerifyLevel { kFast, kFull };

VerifyLevel parse_verify_level(std::string_view name);

struct VerificationOptions {
  std::uint64_t seed = 20261015;
  // Constants of the closed forms the suite checks against. Exposed so a
  // deliberately wrong value can be shown to fail.
  double sixth = 1.0 / 6.0;
  double quarter = 0.25;
  bool enforce_time = true;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string rule;  // how measured, target and tolerance are compared
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

// Criteria run at each level; kFull is 1..13.
std::vector<int> criteria_for(VerifyLevel level);

CriterionResult run_criterion(int id, const VerificationOptions& options);

std::vector<CriterionResult> run_verification_suite(
    VerifyLevel level, const VerificationOptions& options);

// Timing is left out when with_timing is false, so the result is a pure
// function of the options.
nlohmann::ordered_json to_json(const CriterionResult& result,
                               bool with_timing = true);

// "[PASS] 3 prior-free truthful loss: measured=... target=... tol=..."
std::string summary_line(const CriterionResult& result);

}  // namespace cvmshare
