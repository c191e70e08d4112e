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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvmshare/bayes_models.hpp"
#include "cvmshare/core_stats.hpp"
#include "cvmshare/feature_maps.hpp"
#include "cvmshare/rng.hpp"

namespace cvmshare {

// The augment split map kappa: how many pooled points go to the augmentation
// set W given the pooled size n. Always kappa(n) <= n - 2.
class SplitMap {
 public:
  enum class Kind { kZero, kBalance, kTable };

  static SplitMap zero() { return SplitMap(Kind::kZero, {}); }
  // floor((n - 1) / 2): W and Z of (nearly) equal size.
  static SplitMap balance() { return SplitMap(Kind::kBalance, {}); }
  // Explicit values; sizes missing from the table map to 0.
  static SplitMap table(std::map<std::size_t, std::size_t> entries);

  std::size_t operator()(std::size_t n) const;

  Kind kind() const { return kind_; }
  const std::map<std::size_t, std::size_t>& entries() const { return entries_; }
  std::string describe() const;

 private:
  SplitMap(Kind kind, std::map<std::size_t, std::size_t> entries)
      : kind_(kind), entries_(std::move(entries)) {}

  Kind kind_;
  std::map<std::size_t, std::size_t> entries_;
};

// Which loss is computed for each agent. The last three are the two-sample
// baselines, applied per feature between Y_i and Y_{-i} and averaged.
enum class LossKind { kAlg1, kAlg2, kAlg3, kCvm, kKs, kMeanDiff };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);
bool is_baseline(LossKind kind);

struct MechanismConfig {
  LossKind kind = LossKind::kAlg3;
  std::optional<PosteriorModel> model;
  FeatureBank features = FeatureBank::identity();
  SplitMap kappa = SplitMap::zero();

  // Checks internal consistency against the data representation.
  void validate_for(bool scalar_data, std::size_t dim) const;
};

// Per-feature diagnostics. `predicted` is the conditional expectation (alg1,
// alg2) or F_{Y u W}(T) (alg3); `observed` is F_Z(T).
struct FeatureLoss {
  std::size_t feature = 0;
  double tau = 0.0;
  double eval_value = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
};

struct LossReport {
  static constexpr std::size_t kNoEvalPoint = static_cast<std::size_t>(-1);

  std::size_t agent = 0;
  double tau = 0.0;
  std::vector<FeatureLoss> per_feature;
  // Index of T within the agent's pooled-others dataset (agents by id).
  std::size_t eval_index = kNoEvalPoint;
  std::vector<double> eval_point;
  std::size_t submission_size = 0;
  std::size_t augment_size = 0;
  std::size_t compare_size = 0;
};

// The datasets submitted by m >= 2 agents, with stable agent identifiers.
class SubmissionSet {
 public:
  explicit SubmissionSet(std::vector<Dataset> per_agent,
                         std::vector<std::uint64_t> agent_ids = {});

  std::size_t agents() const { return per_agent_.size(); }
  const Dataset& operator[](std::size_t i) const { return per_agent_.at(i); }
  std::uint64_t agent_id(std::size_t i) const { return agent_ids_.at(i); }

  // Y_{-i}: all other agents' submissions in ascending agent-id order.
  Dataset pooled_others(std::size_t agent) const;

 private:
  std::vector<Dataset> per_agent_;
  std::vector<std::uint64_t> agent_ids_;
  std::vector<std::size_t> order_;  // positions sorted by agent id
};

struct EvalSelection {
  std::size_t eval_index;
  Dataset eval;  // one item
  Dataset rest;
};

// Uniformly selects T from the pooled multiset; rest is the pool without that
// one occurrence. Requires |pooled| >= 2.
EvalSelection select_eval_point(const Dataset& pooled, Rng& rng);

struct PooledSplit {
  std::size_t eval_index;
  Dataset eval;  // one item
  Dataset augment;
  Dataset compare;
};

// Uniform random partition of the pool into {T}, W (|W| = kappa(n)) and Z.
// Requires n >= 2 + kappa(n).
PooledSplit split_pooled(const Dataset& pooled, const SplitMap& kappa,
                         Rng& rng);

// Single-variable Bayesian loss:
//   (E[F_Z(T) | X = submission, T] - F_Z(T))^2.
LossReport loss_alg1(const PosteriorModel& model, const Sample& submission,
                     const Sample& pooled, Rng& rng);

// Feature-based Bayesian loss, one T shared across features. Supports scalar
// data with order-preserving maps, where the conditional expectation of
// F_{Z^k}(T^k) is exactly the model's predictive CDF at T.
LossReport loss_alg2(const PosteriorModel& model, const FeatureBank& bank,
                     const SubmissionSet& submissions, std::size_t agent,
                     Rng& rng);

// Prior-free loss: (F_{Y u W}(T^k) - F_Z(T^k))^2 averaged over features.
LossReport loss_alg3(const FeatureBank& bank, const SplitMap& kappa,
                     const SubmissionSet& submissions, std::size_t agent,
                     Rng& rng);

// Two-sample baseline statistic between Y_i and Y_{-i}, per feature, averaged.
LossReport baseline_loss(LossKind kind, const FeatureBank& bank,
                         const SubmissionSet& submissions, std::size_t agent);

// Loss of one agent using that agent's derived stream of `master_seed`; equal
// to the corresponding entry of run_mechanism.
LossReport agent_loss(const MechanismConfig& config,
                      const SubmissionSet& submissions, std::size_t agent,
                      std::uint64_t master_seed);

// One report per agent. Agent i draws from the stream derived from
// (master_seed, agent_id(i)), so results do not depend on evaluation order.
std::vector<LossReport> run_mechanism(const MechanismConfig& config,
                                      const SubmissionSet& submissions,
                                      std::uint64_t master_seed);

}  // namespace cvmshare
