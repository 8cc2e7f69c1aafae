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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "selftest/harness/session.h"

namespace selftest::harness {

inline constexpr double wilson_z95 = 1.959963984540054;

struct Interval {
    double low = 0;
    double high = 0;
};

// Wilson score interval for `successes` out of `trials` (two-sided 95%).
// An empty sample gives [0, 1].
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = wilson_z95);

struct Rate {
    std::uint64_t events = 0;
    std::uint64_t trials = 0;
    double estimate = 0;
    Interval ci;

    static Rate of(std::uint64_t events, std::uint64_t trials);
};

// One (theta, round, q) cell; q is absent for preimage rounds and aborts
// before the question.
struct Stratum {
    std::string theta;
    std::string round;
    std::optional<int> q;
    std::uint64_t sessions = 0;
    std::uint64_t accepted = 0;
    friend auto operator<=>(const Stratum &a, const Stratum &b) {
        return std::tie(a.theta, a.round, a.q) <=> std::tie(b.theta, b.round, b.q);
    }
};

struct SessionStats {
    ProtocolKind kind = ProtocolKind::SelfTest;
    std::uint32_t n = 1;
    std::uint64_t sessions = 0;
    std::uint64_t accepted = 0;
    Rate acceptance;
    Rate eps_p;               // preimage-round rejections
    std::vector<Rate> eps_h;  // Hadamard-round rejections per question
    double eps = 0;           // recomposed from eps_p and eps_h
    Interval eps_ci;          // recomposed from the per-clause intervals
    std::vector<Stratum> strata;
    std::map<std::string, std::uint64_t> reasons;
    std::uint64_t transport_failures = 0;

    // Upper bounds on the gammas implied by the upper ends of the eps
    // intervals (self-test only).
    std::map<std::string, double> gamma_upper_bounds() const;
    nlohmann::json to_json() const;
};

// Sessions aborted before the round was chosen count in the totals and the
// reason histogram only.
SessionStats aggregate(ProtocolKind kind, std::uint32_t n, std::span<const Transcript> transcripts);

}  // namespace selftest::harness
