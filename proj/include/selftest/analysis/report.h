// Copyright 2026 The selftest Authors
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

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "selftest/analysis/model.h"

namespace selftest::analysis {

inline constexpr int report_version = 1;

struct AnalysisOptions {
    ModelSpec model;
    ModelConfig config;
    // Key draws for the key-averaged gamma/eps estimate; 0 skips it.
    std::size_t key_samples = 32;
    std::uint64_t seed = 1;
};

struct AnalysisResult {
    nlohmann::json report;
    // Names of failed checks, in report order.
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// Builds the model, runs every analysis that applies to its protocol and
// collects the checks. Self-test models get gamma/eps, the bound suite,
// the sigma and zeta/chi lemmas, swap identities, soundness distances and
// commutator diagnostics; dimension-test models get eps and the dimension
// certificate.
AnalysisResult analyze(const AnalysisOptions &options);

}  // namespace selftest::analysis
