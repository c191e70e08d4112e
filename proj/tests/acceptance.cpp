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

#include <cstdlib>
#include <exception>
#include <iostream>

#include "cvmshare/verification.hpp"

int main() {
  using namespace cvmshare;
  try {
    const auto results = run_verification_suite(VerifyLevel::kFull, VerificationOptions{});
    int failed = 0;
    for (const auto& r : results) {
      std::cout << summary_line(r) << std::endl;
      if (!r.passed) ++failed;
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
}
