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

#include <optional>
#include <string>
#include <vector>

#include "selftest/core/rng.h"
#include "selftest/entcf/entcf.h"
#include "selftest/protocol/types.h"
#include "selftest/protocol/verdict.h"

namespace selftest::protocol {

struct VerifierConfig {
    ProtocolKind kind = ProtocolKind::SelfTest;
    std::uint32_t n = 1;
    entcf::EntcfParams entcf;

    std::size_t coordinates() const { return coordinate_count(kind, n); }
    void validate() const;
};

enum class Phase : std::uint8_t { Start, AwaitImages, AwaitPreimage, AwaitD, AwaitAnswer, Done };

const char *to_string(Phase phase);

// Full verifier state. Trapdoors stay here and are never placed in an
// outgoing message.
struct VerifierState {
    VerifierConfig config;
    Phase phase = Phase::Start;
    Theta theta = Theta::zero();
    std::vector<entcf::PublicKey> keys;
    std::vector<entcf::Trapdoor> trapdoors;
    std::vector<entcf::Image> y;
    std::optional<RoundType> round;
    std::vector<std::uint32_t> d;
    std::optional<int> q;
    std::optional<BitString> v;
    Decodings decodings;
    std::optional<Verdict> verdict;
    std::string error;

    static VerifierState initial(VerifierConfig config);
};

struct StepResult {
    VerifierState state;
    std::optional<Message> outgoing;
};

// Pure transition function. Start + nothing emits the keys; every later
// phase consumes exactly one prover message. A message that does not fit the
// phase ends the session with a "protocol" reject verdict.
StepResult verifier_step(VerifierState state, const std::optional<Message> &incoming, Rng &rng);

// Draws theta and the key tuple. Exposed so analysis code can reproduce the
// verifier's key sampling.
Theta sample_theta(ProtocolKind kind, std::uint32_t n, Rng &rng);
std::vector<entcf::KeyPair> sample_keys(ProtocolKind kind, std::uint32_t n, Theta theta,
                                        const entcf::EntcfParams &params, Rng &rng);

}  // namespace selftest::protocol
