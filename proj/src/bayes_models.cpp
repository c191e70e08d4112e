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

#include "cvmshare/bayes_models.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "cvmshare/error.hpp"

namespace cvmshare {

void NormalNormalModel::validate() const {
  if (!std::isfinite(prior_mean)) {
    throw ValidationError("normal-normal prior_mean must be finite");
  }
  if (!(prior_var > 0.0) || !std::isfinite(prior_var)) {
    throw ValidationError("normal-normal prior_var must be > 0");
  }
  if (!(obs_var > 0.0) || !std::isfinite(obs_var)) {
    throw ValidationError("normal-normal obs_var must be > 0");
  }
}

void BetaBernoulliModel::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("beta-bernoulli alpha must be > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("beta-bernoulli beta must be > 0");
  }
}

void validate(const PosteriorModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

std::string describe(const PosteriorModel& model) {
  std::ostringstream out;
  if (const auto* nn = std::get_if<NormalNormalModel>(&model)) {
    out << "normal_normal(prior_mean=" << nn->prior_mean
        << ", prior_var=" << nn->prior_var << ", obs_var=" << nn->obs_var
        << ")";
  } else {
    const auto& bb = std::get<BetaBernoulliModel>(model);
    out << "beta_bernoulli(alpha=" << bb.alpha << ", beta=" << bb.beta << ")";
  }
  return out.str();
}

SufficientStats SufficientStats::of(std::span<const double> data) {
  return {data.size(), std::accumulate(data.begin(), data.end(), 0.0)};
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

NormalPosterior nn_posterior_params(const NormalNormalModel& model,
                                    SufficientStats conditioning) {
  const double k = static_cast<double>(conditioning.count);
  const double precision = 1.0 / model.prior_var + k / model.obs_var;
  const double mean =
      (model.prior_mean / model.prior_var + conditioning.sum / model.obs_var) /
      precision;
  return {mean, 1.0 / precision};
}

NormalPosterior nn_posterior_params(const NormalNormalModel& model,
                                    std::span<const double> conditioning) {
  return nn_posterior_params(model, SufficientStats::of(conditioning));
}

double nn_cond_pred_cdf(const NormalNormalModel& model, SufficientStats data,
                        double t) {
  const auto post =
      nn_posterior_params(model, SufficientStats{data.count + 1, data.sum + t});
  return std_normal_cdf((t - post.mean) / std::sqrt(model.obs_var + post.var));
}

double nn_cond_pred_cdf(const NormalNormalModel& model,
                        std::span<const double> data, double t) {
  return nn_cond_pred_cdf(model, SufficientStats::of(data), t);
}

double snap_binary(double x) {
  constexpr double kTol = 1e-12;
  if (std::abs(x) <= kTol) return 0.0;
  if (std::abs(x - 1.0) <= kTol) return 1.0;
  throw ValidationError("beta-bernoulli data must be 0/1, got " +
                        std::to_string(x));
}

double bb_cond_pred_cdf(const BetaBernoulliModel& model, SufficientStats data,
                        double t) {
  t = snap_binary(t);
  if (t == 1.0) return 1.0;
  const double n1 = static_cast<double>(data.count) + 1.0;
  return (model.beta + n1 - data.sum) / (model.alpha + model.beta + n1);
}

double bb_cond_pred_cdf(const BetaBernoulliModel& model,
                        std::span<const double> data, double t) {
  double sum = 0.0;
  for (double x : data) sum += snap_binary(x);
  return bb_cond_pred_cdf(model, SufficientStats{data.size(), sum}, t);
}

double cond_pred_cdf(const PosteriorModel& model, std::span<const double> data,
                     double t) {
  if (const auto* nn = std::get_if<NormalNormalModel>(&model)) {
    return nn_cond_pred_cdf(*nn, data, t);
  }
  return bb_cond_pred_cdf(std::get<BetaBernoulliModel>(model), data, t);
}

double cond_pred_cdf(const PosteriorModel& model, SufficientStats data,
                     double t) {
  if (const auto* nn = std::get_if<NormalNormalModel>(&model)) {
    return nn_cond_pred_cdf(*nn, data, t);
  }
  return bb_cond_pred_cdf(std::get<BetaBernoulliModel>(model), data, t);
}

double draw_latent(const PosteriorModel& model, Rng& rng) {
  if (const auto* nn = std::get_if<NormalNormalModel>(&model)) {
    return rng.normal(nn->prior_mean, std::sqrt(nn->prior_var));
  }
  const auto& bb = std::get<BetaBernoulliModel>(model);
  return rng.beta(bb.alpha, bb.beta);
}

double draw_observation(const PosteriorModel& model, double latent, Rng& rng) {
  if (const auto* nn = std::get_if<NormalNormalModel>(&model)) {
    return rng.normal(latent, std::sqrt(nn->obs_var));
  }
  return rng.bernoulli(latent) ? 1.0 : 0.0;
}

std::pair<double, Sample> sample_prior_then_data(const PosteriorModel& model,
                                                 std::size_t n, Rng& rng) {
  validate(model);
  const double latent = draw_latent(model, rng);
  std::vector<double> data(n);
  for (auto& x : data) x = draw_observation(model, latent, rng);
  return {latent, Sample(std::move(data))};
}

}  // namespace cvmshare
