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

#include "cvmshare/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {

SplitMap SplitMap::table(std::map<std::size_t, std::size_t> entries) {
  for (const auto& [n, w] : entries) {
    if (n < 2 || w + 1 >= n) {
      throw ValidationError("split map must satisfy kappa(n) < n-1; got kappa(" +
                            std::to_string(n) + ") = " + std::to_string(w));
    }
  }
  return SplitMap(Kind::kTable, std::move(entries));
}

std::size_t SplitMap::operator()(std::size_t n) const {
  switch (kind_) {
    case Kind::kZero:
      return 0;
    case Kind::kBalance:
      return n < 1 ? 0 : (n - 1) / 2;
    case Kind::kTable: {
      const auto it = entries_.find(n);
      return it == entries_.end() ? 0 : it->second;
    }
  }
  return 0;
}

std::string SplitMap::describe() const {
  switch (kind_) {
    case Kind::kZero:
      return "zero";
    case Kind::kBalance:
      return "balance";
    case Kind::kTable: {
      std::ostringstream out;
      out << "table:";
      bool first = true;
      for (const auto& [n, w] : entries_) {
        out << (first ? "" : ",") << n << "=" << w;
        first = false;
      }
      return out.str();
    }
  }
  return "unknown";
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kAlg1: return "alg1";
    case LossKind::kAlg2: return "alg2";
    case LossKind::kAlg3: return "alg3";
    case LossKind::kCvm: return "cvm";
    case LossKind::kKs: return "ks";
    case LossKind::kMeanDiff: return "mean_diff";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  for (auto kind : {LossKind::kAlg1, LossKind::kAlg2, LossKind::kAlg3,
                    LossKind::kCvm, LossKind::kKs, LossKind::kMeanDiff}) {
    if (name == to_string(kind)) return kind;
  }
  throw ValidationError("unknown loss kind '" + std::string(name) + "'");
}

bool is_baseline(LossKind kind) {
  return kind == LossKind::kCvm || kind == LossKind::kKs ||
         kind == LossKind::kMeanDiff;
}

void MechanismConfig::validate_for(bool scalar_data, std::size_t dim) const {
  switch (kind) {
    case LossKind::kAlg1:
    case LossKind::kAlg2:
      if (!model) {
        throw ValidationError(to_string(kind) + " requires a posterior model");
      }
      validate(*model);
      if (!scalar_data) {
        throw ValidationError(to_string(kind) + " requires scalar data");
      }
      if (kind == LossKind::kAlg2 && !features.order_preserving_on_scalars()) {
        throw ValidationError(
            "alg2 supports identity or increasing affine feature maps only");
      }
      break;
    default:
      features.validate_for(scalar_data, dim);
      break;
  }
}

SubmissionSet::SubmissionSet(std::vector<Dataset> per_agent,
                             std::vector<std::uint64_t> agent_ids)
    : per_agent_(std::move(per_agent)), agent_ids_(std::move(agent_ids)) {
  if (per_agent_.size() < 2) {
    throw ValidationError("a submission set needs at least two agents");
  }
  if (agent_ids_.empty()) {
    agent_ids_.resize(per_agent_.size());
    std::iota(agent_ids_.begin(), agent_ids_.end(), 0);
  }
  if (agent_ids_.size() != per_agent_.size()) {
    throw ValidationError("agent id count does not match agent count");
  }
  order_.resize(per_agent_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return agent_ids_[a] < agent_ids_[b];
  });
  for (std::size_t k = 1; k < order_.size(); ++k) {
    if (agent_ids_[order_[k]] == agent_ids_[order_[k - 1]]) {
      throw ValidationError("duplicate agent id " +
                            std::to_string(agent_ids_[order_[k]]));
    }
  }
  const Dataset* reference = nullptr;
  for (const auto& d : per_agent_) {
    if (d.empty()) continue;
    if (reference != nullptr && !reference->compatible_with(d)) {
      throw ValidationError("agents submitted items of different representation");
    }
    reference = &d;
  }
}

Dataset SubmissionSet::pooled_others(std::size_t agent) const {
  if (agent >= per_agent_.size()) throw ValidationError("agent out of range");
  Dataset out;
  std::size_t total = 0;
  for (std::size_t j = 0; j < per_agent_.size(); ++j) {
    if (j != agent) total += per_agent_[j].size();
  }
  for (std::size_t j : order_) {
    if (j == agent || per_agent_[j].empty()) continue;
    if (out.empty()) {
      out = Dataset::empty_like(per_agent_[j]);
      out.reserve(total);
    }
    out.append(per_agent_[j]);
  }
  return out;
}

EvalSelection select_eval_point(const Dataset& pooled, Rng& rng) {
  const std::size_t n = pooled.size();
  if (n < 2) {
    throw ValidationError("pooled data of size " + std::to_string(n) +
                          " is too small; at least 2 points are required");
  }
  const std::size_t j = rng.index(n);
  std::vector<std::size_t> rest(n - 1);
  std::iota(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(j), 0);
  std::iota(rest.begin() + static_cast<std::ptrdiff_t>(j), rest.end(), j + 1);
  const std::size_t eval[] = {j};
  return {j, pooled.select(eval), pooled.select(rest)};
}

PooledSplit split_pooled(const Dataset& pooled, const SplitMap& kappa,
                         Rng& rng) {
  const std::size_t n = pooled.size();
  const std::size_t w = kappa(n);
  if (n < 2 + w) {
    throw ValidationError("pooled data of size " + std::to_string(n) +
                          " is too small; at least " + std::to_string(2 + w) +
                          " points are required");
  }
  // Partial Fisher-Yates: position 0 is T, positions 1..w are W.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i <= w; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  const std::span<const std::size_t> all(idx);
  return {idx[0], pooled.select(all.subspan(0, 1)),
          pooled.select(all.subspan(1, w)), pooled.select(all.subspan(w + 1))};
}

namespace {

double ecdf_or_throw(std::span<const double> points, double t,
                     const char* message) {
  if (points.empty()) throw ValidationError(message);
  return ecdf_at(points, t);
}

LossReport finish(LossReport report) {
  double sum = 0.0;
  for (const auto& f : report.per_feature) sum += f.tau;
  report.tau = sum / static_cast<double>(report.per_feature.size());
  return report;
}

}  // namespace

LossReport loss_alg1(const PosteriorModel& model, const Sample& submission,
                     const Sample& pooled, Rng& rng) {
  validate(model);
  const auto pooled_data =
      Dataset::scalars({pooled.points().begin(), pooled.points().end()});
  auto selection = select_eval_point(pooled_data, rng);
  const double t = selection.eval.values()[0];
  const double predicted = cond_pred_cdf(model, submission.points(), t);
  const double observed = ecdf_at(selection.rest.values(), t);
  const double diff = predicted - observed;

  LossReport report;
  report.per_feature.push_back({0, diff * diff, t, predicted, observed});
  report.eval_index = selection.eval_index;
  report.eval_point = {t};
  report.submission_size = submission.size();
  report.compare_size = selection.rest.size();
  return finish(std::move(report));
}

LossReport loss_alg2(const PosteriorModel& model, const FeatureBank& bank,
                     const SubmissionSet& submissions, std::size_t agent,
                     Rng& rng) {
  validate(model);
  const Dataset& own = submissions[agent];
  const Dataset pooled = submissions.pooled_others(agent);
  if (!own.empty() && !own.is_scalar()) {
    throw ValidationError("alg2 requires scalar data");
  }
  if (!pooled.is_scalar()) throw ValidationError("alg2 requires scalar data");
  if (!bank.order_preserving_on_scalars()) {
    throw ValidationError(
        "alg2 supports identity or increasing affine feature maps only");
  }
  auto selection = select_eval_point(pooled, rng);
  const double t = selection.eval.values()[0];
  // Order-preserving maps give F_{Z^k}(T^k) = F_Z(T), whose conditional
  // expectation given the raw submission is the predictive CDF at T.
  const double predicted = cond_pred_cdf(model, own.values(), t);

  LossReport report;
  report.agent = agent;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const double tk = apply_feature(bank, k, selection.eval.item(0));
    const auto zk = featurize(bank, k, selection.rest);
    const double observed = ecdf_at(zk, tk);
    const double diff = predicted - observed;
    report.per_feature.push_back({k, diff * diff, tk, predicted, observed});
  }
  report.eval_index = selection.eval_index;
  report.eval_point = {t};
  report.submission_size = own.size();
  report.compare_size = selection.rest.size();
  return finish(std::move(report));
}

LossReport loss_alg3(const FeatureBank& bank, const SplitMap& kappa,
                     const SubmissionSet& submissions, std::size_t agent,
                     Rng& rng) {
  const Dataset& own = submissions[agent];
  const Dataset pooled = submissions.pooled_others(agent);
  if (!own.compatible_with(pooled)) {
    throw ValidationError("submission and pooled data differ in representation");
  }
  bank.validate_for(pooled.empty() ? own : pooled);
  auto split = split_pooled(pooled, kappa, rng);

  const std::vector<Dataset> parts = {own, split.augment};
  const Dataset augmented = pool(parts);
  if (augmented.empty()) {
    throw ValidationError(
        "undefined ECDF; supply kappa>0 or nonempty submission");
  }

  LossReport report;
  report.agent = agent;
  const auto eval_item = split.eval.item(0);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const double tk = apply_feature(bank, k, eval_item);
    const auto yk = featurize(bank, k, augmented);
    const auto zk = featurize(bank, k, split.compare);
    const double predicted = ecdf_or_throw(
        yk, tk, "undefined ECDF; supply kappa>0 or nonempty submission");
    const double observed = ecdf_at(zk, tk);
    const double diff = predicted - observed;
    report.per_feature.push_back({k, diff * diff, tk, predicted, observed});
  }
  report.eval_index = split.eval_index;
  report.eval_point.assign(eval_item.coords.begin(), eval_item.coords.end());
  report.submission_size = own.size();
  report.augment_size = split.augment.size();
  report.compare_size = split.compare.size();
  return finish(std::move(report));
}

LossReport baseline_loss(LossKind kind, const FeatureBank& bank,
                         const SubmissionSet& submissions, std::size_t agent) {
  if (!is_baseline(kind)) {
    throw ValidationError(to_string(kind) + " is not a baseline statistic");
  }
  const Dataset& own = submissions[agent];
  const Dataset pooled = submissions.pooled_others(agent);
  if (own.empty() || pooled.empty()) {
    throw ValidationError(to_string(kind) + " requires nonempty samples");
  }
  bank.validate_for(pooled);

  LossReport report;
  report.agent = agent;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto yk = featurize(bank, k, own);
    const auto ok = featurize(bank, k, pooled);
    double value = 0.0;
    switch (kind) {
      case LossKind::kCvm: value = cvm_two_sample(yk, ok); break;
      case LossKind::kKs: value = ks_statistic(yk, ok); break;
      default: value = mean_diff(yk, ok); break;
    }
    report.per_feature.push_back({k, value, 0.0, 0.0, 0.0});
  }
  report.submission_size = own.size();
  report.compare_size = pooled.size();
  return finish(std::move(report));
}

LossReport agent_loss(const MechanismConfig& config,
                      const SubmissionSet& submissions, std::size_t agent,
                      std::uint64_t master_seed) {
  Rng rng(derive_seed(master_seed, StreamTag::kMechanism,
                      submissions.agent_id(agent)));
  LossReport report;
  switch (config.kind) {
    case LossKind::kAlg1: {
      if (!config.model) throw ValidationError("alg1 requires a posterior model");
      const Dataset& own = submissions[agent];
      const Dataset pooled = submissions.pooled_others(agent);
      if ((!own.empty() && !own.is_scalar()) || !pooled.is_scalar()) {
        throw ValidationError("alg1 requires scalar data");
      }
      report = loss_alg1(*config.model,
                         Sample({own.values().begin(), own.values().end()}),
                         Sample({pooled.values().begin(), pooled.values().end()}),
                         rng);
      break;
    }
    case LossKind::kAlg2:
      if (!config.model) throw ValidationError("alg2 requires a posterior model");
      report = loss_alg2(*config.model, config.features, submissions, agent, rng);
      break;
    case LossKind::kAlg3:
      report = loss_alg3(config.features, config.kappa, submissions, agent, rng);
      break;
    default:
      report = baseline_loss(config.kind, config.features, submissions, agent);
      break;
  }
  report.agent = agent;
  return report;
}

std::vector<LossReport> run_mechanism(const MechanismConfig& config,
                                      const SubmissionSet& submissions,
                                      std::uint64_t master_seed) {
  std::vector<LossReport> reports;
  reports.reserve(submissions.agents());
  for (std::size_t i = 0; i < submissions.agents(); ++i) {
    try {
      reports.push_back(agent_loss(config, submissions, i, master_seed));
    } catch (const ValidationError& e) {
      throw ValidationError("agent " + std::to_string(i) + ": " + e.what());
    }
  }
  return reports;
}

}  // namespace cvmshare
