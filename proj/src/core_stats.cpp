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

#include "cvmshare/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

void require_finite(std::span<const double> points) {
  for (double p : points) {
    if (!std::isfinite(p)) {
      throw ValidationError("sample contains a non-finite value");
    }
  }
}

void require_nonempty(std::span<const double> x, std::span<const double> y,
                      const char* what) {
  if (x.empty() || y.empty()) {
    throw ValidationError(std::string(what) + " requires two nonempty samples");
  }
}

std::vector<double> sorted_copy(std::span<const double> points) {
  std::vector<double> out(points.begin(), points.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_le(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(
      std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

}  // namespace

Sample::Sample(std::vector<double> points) : points_(std::move(points)) {
  require_finite(points_);
}

double Sample::sum() const {
  return std::accumulate(points_.begin(), points_.end(), 0.0);
}

double Sample::mean() const {
  if (points_.empty()) throw ValidationError("mean of an empty sample");
  return sum() / static_cast<double>(points_.size());
}

Ecdf::Ecdf(std::span<const double> points) {
  if (points.empty()) {
    throw ValidationError("ECDF of an empty sample is undefined");
  }
  require_finite(points);
  sorted_ = sorted_copy(points);
}

std::size_t Ecdf::count_at_most(double t) const { return count_le(sorted_, t); }

double Ecdf::operator()(double t) const {
  return static_cast<double>(count_at_most(t)) /
         static_cast<double>(sorted_.size());
}

double ecdf_eval(const Ecdf& ecdf, double t) { return ecdf(t); }

double ecdf_at(std::span<const double> points, double t) {
  if (points.empty()) {
    throw ValidationError("ECDF of an empty sample is undefined");
  }
  std::size_t count = 0;
  for (double p : points) count += (p <= t) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(points.size());
}

double cvm_two_sample(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, y, "cvm_two_sample");
  require_finite(x);
  require_finite(y);
  const auto xs = sorted_copy(x);
  const auto ys = sorted_copy(y);
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  double total = 0.0;
  auto accumulate = [&](const std::vector<double>& source) {
    for (double t : source) {
      const double d = static_cast<double>(count_le(xs, t)) / n -
                       static_cast<double>(count_le(ys, t)) / m;
      total += d * d;
    }
  };
  accumulate(xs);
  accumulate(ys);
  return n * m / ((n + m) * (n + m)) * total;
}

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, y, "ks_statistic");
  require_finite(x);
  require_finite(y);
  const auto xs = sorted_copy(x);
  const auto ys = sorted_copy(y);
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  // Both ECDFs are step functions jumping only at data points, so the
  // supremum is attained on the union.
  double best = 0.0;
  auto scan = [&](const std::vector<double>& source) {
    for (double t : source) {
      const double d = std::abs(static_cast<double>(count_le(xs, t)) / n -
                                static_cast<double>(count_le(ys, t)) / m);
      best = std::max(best, d);
    }
  };
  scan(xs);
  scan(ys);
  return best;
}

double mean_diff(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, y, "mean_diff");
  require_finite(x);
  require_finite(y);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) /
                    static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) /
                    static_cast<double>(y.size());
  return std::abs(mx - my);
}

}  // namespace cvmshare
