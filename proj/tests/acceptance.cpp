// Copyright 2026 The qcompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the acceptance criteria and prints one pass/fail line for each.

#include <iostream>

#include "qcompat/acceptance.hpp"

int main() {
    const auto results = qcompat::run_acceptance();
    bool all = true;
    for (const auto &r : results) {
        std::cout << qcompat::format_criterion(r) << "  [" << qcompat::detail::fixed(r.seconds, 3) << " s";
        if (r.limit_seconds > 0.0) std::cout << " of " << r.limit_seconds << " s";
        std::cout << "]\n";
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
