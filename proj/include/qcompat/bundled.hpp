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

/**
 * @file bundled.hpp
 * Example models shipped with the library. The same text lives in models/.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcompat {

/// (name, JSON text) for every bundled model.
inline const std::vector<std::pair<std::string_view, std::string_view>> &bundled_models() {
    static const std::vector<std::pair<std::string_view, std::string_view>> models = {
        {"qubit", R"json({
  "algebra": "pauli",
  "convention": "paper-pauli",
  "params": ["theta", "phi", "r"],
  "beta": ["r*sin(theta)*cos(phi)", "r*sin(theta)*sin(phi)", "r*cos(theta)"],
  "points": [[1.1, 0.4, 0.6], [0.5, 2.0, 0.3]],
  "region": [[0.3, 2.8], [0.0, 6.2], [0.2, 0.95]],
  "seed": 1
}
)json"},
        {"qubit_z", R"json({
  "algebra": "pauli",
  "convention": "paper-pauli",
  "params": ["r"],
  "beta": ["0", "0", "r"],
  "povm": [
    [[1, 0], [0, 0]],
    [[0, 0], [0, 1]]
  ],
  "points": [[0.5]],
  "region": [[-0.9, 0.9]],
  "seed": 1
}
)json"},
        {"xstate", R"json({
  "algebra": "xstate2q",
  "convention": "paper-xstate",
  "params": ["b1", "b2", "b3", "b4", "b5", "b6", "b7"],
  "beta": ["b1", "b2", "b3", "b4", "b5", "b6", "b7"],
  "points": [[0.06, -0.14, 0.04, 0.1, -0.02, 0.08, 0.12]],
  "region": [[-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2]],
  "seed": 7
}
)json"},
        {"xstate_b1", R"json({
  "algebra": "xstate2q",
  "convention": "paper-xstate",
  "params": ["x1", "x2", "x3"],
  "beta": ["x1", "-x1", "0", "x2", "x3", "-x3", "x2"],
  "points": [[0.1, 0.1, 0.1]],
  "region": [[0.05, 0.2], [0.05, 0.2], [0.05, 0.2]],
  "seed": 3
}
)json"},
        {"diagonal", R"json({
  "algebra": {"preset": "xstate2q", "subset": [1, 2, 3], "name": "xstate-diagonal"},
  "convention": "paper-xstate",
  "params": ["a", "b", "c"],
  "beta": ["a", "b", "c"],
  "strata": [{"index": 0, "rank": 0, "dimension": 3}],
  "points": [[0.1, 0.2, 0.1]],
  "region": [[-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2]],
  "seed": 5
}
)json"},
    };
    return models;
}

inline std::optional<std::string_view> bundled_model(std::string_view name) {
    for (const auto &[n, text] : bundled_models()) {
        if (n == name) return text;
    }
    return std::nullopt;
}

}  // namespace qcompat
