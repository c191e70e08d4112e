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
#include <initializer_list>
#include <span>
#include <vector>

namespace cvmshare {

// A finite multiset of real numbers. Construction rejects NaN and infinities;
// nothing computed from a Sample depends on the order of its points.
class Sample {
 public:
  Sample() = default;
  explicit Sample(std::vector<double> points);
  Sample(std::initializer_list<double> points)
      : Sample(std::vector<double>(points)) {}

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double sum() const;
  // Requires a nonempty sample.
  double mean() const;

 private:
  std::vector<double> points_;
};

// Empirical CDF F(t) = #{x <= t} / n over a nonempty multiset.
class Ecdf {
 public:
  explicit Ecdf(std::span<const double> points);
  explicit Ecdf(const Sample& sample) : Ecdf(sample.points()) {}

  double operator()(double t) const;

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted_points() const { return sorted_; }

  // Number of points <= t.
  std::size_t count_at_most(double t) const;

 private:
  std::vector<double> sorted_;
};

double ecdf_eval(const Ecdf& ecdf, double t);

// Fraction of points <= t, by a single linear scan. Requires nonempty input.
double ecdf_at(std::span<const double> points, double t);

// Two-sample Cramer-von Mises statistic
//   nm/(n+m)^2 * sum_{t in x u y} (F_x(t) - F_y(t))^2
// with the sum over the multiset union.
double cvm_two_sample(std::span<const double> x, std::span<const double> y);
inline double cvm_two_sample(const Sample& x, const Sample& y) {
  return cvm_two_sample(x.points(), y.points());
}

// Kolmogorov-Smirnov distance sup_t |F_x(t) - F_y(t)|.
double ks_statistic(std::span<const double> x, std::span<const double> y);
inline double ks_statistic(const Sample& x, const Sample& y) {
  return ks_statistic(x.points(), y.points());
}

// |mean(x) - mean(y)|.
double mean_diff(std::span<const double> x, std::span<const double> y);
inline double mean_diff(const Sample& x, const Sample& y) {
  return mean_diff(x.points(), y.points());
}

}  // namespace cvmshare
