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
#include <initializer_list>
#include <random>

namespace cvmshare {

// Tags used to derive independent sub-streams from a seed.
enum class StreamTag : std::uint64_t {
  kTrial = 0x7472,
  kScenario = 0x7363,
  kStrategy = 0x7374,
  kMechanism = 0x6d65,
  kAllocation = 0x616c,
  kOracle = 0x6f72,
};

// splitmix64 finalizer; a bijective mixer of 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Combines a parent seed with a path of identifiers into a child seed.
std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag,
                                 std::uint64_t id = 0) {
  return derive_seed(parent, {static_cast<std::uint64_t>(tag), id});
}

// xoshiro256** with its state filled by splitmix64; cheap to seed, which
// matters because every trial derives several streams.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// A seeded random stream. Every source of randomness in the library takes an
// explicit Rng; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Child stream keyed by (this stream's seed, tag, id). Does not consume
  // state from this stream.
  Rng child(StreamTag tag, std::uint64_t id = 0) const {
    return Rng(derive_seed(seed_, tag, id));
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(engine_);
  }
  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }
  // Uniform index in [0, n). Requires n > 0.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  Xoshiro256& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  Xoshiro256 engine_;
};

}  // namespace cvmshare
