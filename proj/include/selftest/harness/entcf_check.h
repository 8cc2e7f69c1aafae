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
#include <vector>

#include <json.hpp>

#include "selftest/entcf/entcf.h"

namespace selftest::harness {

struct EntcfCheckConfig {
    entcf::Backend backend = entcf::Backend::Ideal;
    std::uint32_t max_w = 4;  // checks every w in [1, max_w]
    std::size_t keys_per_family = 4;
    std::uint64_t seed = 1;
    // Toy-LWE: m = w + 2 unless set, modulus and noise bound as given.
    std::uint32_t lwe_m = 0;
    std::uint32_t lwe_modulus = 64;
    std::uint32_t lwe_noise = 1;

    entcf::EntcfParams params(std::uint32_t w) const;
};

struct PropertyResult {
    std::string name;
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    std::string first_failure;
};

struct EntcfCheckReport {
    std::vector<PropertyResult> properties;
    bool ok() const;
    nlohmann::json to_json() const;
};

// Enumerates every image of every generated key and checks the claw, range,
// CHK and decoding properties against the supports read off the public
// forward distributions.
EntcfCheckReport run_entcf_check(const EntcfCheckConfig &config);

}  // namespace selftest::harness
