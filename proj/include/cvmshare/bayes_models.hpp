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
#include <span>
#include <string>
#include <utility>
#include <variant>

#include "cvmshare/core_stats.hpp"
#include "cvmshare/rng.hpp"

namespace cvmshare {

// mu ~ N(prior_mean, prior_var), then X | mu ~ N(mu, obs_var) i.i.d.
struct NormalNormalModel {
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double obs_var = 1.0;

  void validate() const;
};

// p ~ Beta(alpha, beta), then X | p ~ Bernoulli(p) i.i.d.
struct BetaBernoulliModel {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
};

// A prior with a closed-form posterior predictive. New conjugate families are
// added as further alternatives.
using PosteriorModel = std::variant<NormalNormalModel, BetaBernoulliModel>;

void validate(const PosteriorModel& model);
std::string describe(const PosteriorModel& model);

// Count and sum of a scalar dataset; the shipped models depend on the data
// only through these.
struct SufficientStats {
  std::size_t count = 0;
  double sum = 0.0;

  static SufficientStats of(std::span<const double> data);
};

struct NormalPosterior {
  double mean;
  double var;
};

// Standard normal CDF, absolute error below 1e-12 on |z| <= 8.
double std_normal_cdf(double z);

// Posterior of mu after observing `conditioning` (possibly empty). Callers
// that condition on the evaluation point include it themselves.
NormalPosterior nn_posterior_params(const NormalNormalModel& model,
                                    std::span<const double> conditioning);
NormalPosterior nn_posterior_params(const NormalNormalModel& model,
                                    SufficientStats conditioning);

// P(Z <= t | data, t) for a fresh draw Z: Phi((t - mu~) / sqrt(obs_var + var~))
// with the posterior computed from data u {t}.
double nn_cond_pred_cdf(const NormalNormalModel& model,
                        std::span<const double> data, double t);
double nn_cond_pred_cdf(const NormalNormalModel& model, SufficientStats data,
                        double t);

// t + (1 - t) (beta + (n+1) - sum(data)) / (alpha + beta + (n+1)).
// Data and t must be 0/1; values within 1e-12 of 0 or 1 are snapped.
double bb_cond_pred_cdf(const BetaBernoulliModel& model,
                        std::span<const double> data, double t);
double bb_cond_pred_cdf(const BetaBernoulliModel& model, SufficientStats data,
                        double t);

// Dispatches to the model's conditional predictive CDF.
double cond_pred_cdf(const PosteriorModel& model, std::span<const double> data,
                     double t);
double cond_pred_cdf(const PosteriorModel& model, SufficientStats data,
                     double t);

// Snaps a value to {0, 1} or throws.
double snap_binary(double x);

// Draws the latent parameter (mu or p) from the prior.
double draw_latent(const PosteriorModel& model, Rng& rng);
// Draws one observation given the latent parameter.
double draw_observation(const PosteriorModel& model, double latent, Rng& rng);

// P ~ prior, then n i.i.d. draws from P.
std::pair<double, Sample> sample_prior_then_data(const PosteriorModel& model,
                                                 std::size_t n, Rng& rng);

}  // namespace cvmshare
