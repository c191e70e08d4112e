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

#include "cvmshare/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cvmshare/error.hpp"

namespace cvmshare::oracles {

double bb_predictive_quadrature(double alpha, double beta,
                                std::span<const double> data, double t,
                                std::size_t grid) {
  if (alpha < 1.0 || beta < 1.0) {
    throw ValidationError("quadrature oracle needs alpha, beta >= 1");
  }
  if (grid < 2) throw ValidationError("quadrature grid too small");
  double ones = t;
  double zeros = 1.0 - t;
  for (double x : data) {
    ones += x;
    zeros += 1.0 - x;
  }
  const double a = alpha + ones - 1.0;
  const double b = beta + zeros - 1.0;
  const double h = 1.0 / static_cast<double>(grid);

  // Log-density peak, to keep the exponentials in range.
  const double mode = (a + b) > 0.0 ? a / (a + b) : 0.5;
  const double m = std::clamp(mode, h / 2, 1.0 - h / 2);
  const double log_peak = a * std::log(m) + b * std::log1p(-m);

  double mass = 0.0;
  double mass_times_q = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double p = (static_cast<double>(i) + 0.5) * h;
    const double w = std::exp(a * std::log(p) + b * std::log1p(-p) - log_peak);
    mass += w;
    mass_times_q += w * (1.0 - p);
  }
  const double prob_zero = mass_times_q / mass;
  return t >= 0.5 ? 1.0 : prob_zero;
}

Proportion nn_predictive_monte_carlo(const NormalNormalModel& model,
                                     std::span<const double> data, double t,
                                     std::size_t draws, Rng& rng) {
  if (draws < 2) throw ValidationError("need at least 2 draws");
  double mean = model.prior_mean;
  double var = model.prior_var;
  auto observe = [&](double x) {
    const double gain = var / (var + model.obs_var);
    mean += gain * (x - mean);
    var *= 1.0 - gain;
  };
  for (double x : data) observe(x);
  observe(t);

  const double sd = std::sqrt(var);
  const double obs_sd = std::sqrt(model.obs_var);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double mu = rng.normal(mean, sd);
    if (rng.normal(mu, obs_sd) <= t) ++hits;
  }
  Proportion out;
  const double n = static_cast<double>(draws);
  out.p = static_cast<double>(hits) / n;
  out.std_error = std::sqrt(std::max(out.p * (1.0 - out.p), 1.0 / n) / n);
  return out;
}

}  // namespace cvmshare::oracles
