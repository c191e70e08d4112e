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

#include <stdexcept>
#include <string>

namespace cvmshare {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs: empty samples, non-finite values, bad parameters, malformed
// config or embedding files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The marketplace feasibility condition (V(n*)/m) * (-dE[tau]/dn) >= c fails.
class InfeasibleMarketError : public Error {
 public:
  InfeasibleMarketError(double expected_gain, double cost)
      : Error("infeasible market: (V(n*)/m) * (-dE[tau]/dn) = " +
              std::to_string(expected_gain) + " < cost " +
              std::to_string(cost)),
        expected_gain_(expected_gain),
        cost_(cost) {}

  double expected_gain() const { return expected_gain_; }
  double cost() const { return cost_; }

 private:
  double expected_gain_;
  double cost_;
};

// A Monte-Carlo sensitivity estimate whose sign is not resolved.
class SensitivityUnresolvedError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvmshare
