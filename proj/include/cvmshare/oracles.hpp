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

#include "cvmshare/bayes_models.hpp"
#include "cvmshare/rng.hpp"

// Reference computations that share no code with the closed forms they check.
namespace cvmshare::oracles {

// P(Z <= t | data u {t}) for Z ~ Bernoulli(p), p ~ Beta(alpha, beta), by
// midpoint quadrature of the unnormalized posterior over `grid` cells.
// Requires alpha, beta >= 1 so the integrand stays bounded.
double bb_predictive_quadrature(double alpha, double beta,
                                std::span<const double> data, double t,
                                std::size_t grid = 200000);

struct Proportion {
  double p = 0.0;
  double std_error = 0.0;
};

// P(Z <= t | data u {t}) for the normal-normal model, estimated by drawing
// mu from a posterior built one observation at a time and then Z | mu.
Proportion nn_predictive_monte_carlo(const NormalNormalModel& model,
                                     std::span<const double> data, double t,
                                     std::size_t draws, Rng& rng);

}  // namespace cvmshare::oracles
