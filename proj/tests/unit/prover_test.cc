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

#include <doctest.h>

#include <cmath>

#include "selftest/core/error.h"
#include "selftest/harness/run.h"
#include "selftest/prover/device.h"
#include "selftest/protocol/verifier.h"

using namespace selftest;
using namespace selftest::prover;
using protocol::ProtocolKind;
using protocol::Theta;

namespace {

harness::RunConfig run_config(const std::string &prover, std::uint64_t sessions) {
    harness::RunConfig c;
    c.n = 1;
    c.w = 3;
    c.prover = harness::ProverSpec::parse(prover);
    c.sessions = sessions;
    c.seed = 77;
    return c;
}

std::vector<entcf::PublicKey> fixed_keys(ProtocolKind kind, std::uint32_t n, Theta theta, std::uint32_t w,
                                         std::uint64_t seed) {
    Rng rng(seed);
    std::vector<entcf::PublicKey> keys;
    for (auto &pair : protocol::sample_keys(kind, n, theta, entcf::EntcfParams::ideal(w), rng)) {
        keys.push_back(pair.key);
    }
    return keys;
}

}  // namespace

TEST_CASE("hadamard positions per question") {
    CHECK(hadamard_positions(ProtocolKind::SelfTest, 2, 0) == std::vector<bool>(4, false));
    CHECK(hadamard_positions(ProtocolKind::SelfTest, 2, 1) == std::vector<bool>(4, true));
    CHECK(hadamard_positions(ProtocolKind::SelfTest, 2, 2) == std::vector<bool>{false, false, true, true});
    CHECK(hadamard_positions(ProtocolKind::SelfTest, 2, 3) == std::vector<bool>{true, true, false, false});
    CHECK(hadamard_positions(ProtocolKind::DimTest, 3, 1) == std::vector<bool>(3, true));
}

TEST_CASE("callbacks out of order throw") {
    HonestProver p(ProtocolKind::SelfTest, 1, 3);
    CHECK_THROWS_AS(p.on_question(0), ContractError);
    const auto keys = fixed_keys(ProtocolKind::SelfTest, 1, Theta::zero(), 2, 4);
    p.on_keys(keys);
    CHECK_THROWS_AS(p.on_question(0), ContractError);
    p.on_hadamard();
    CHECK_THROWS_AS(p.on_preimage(), ContractError);
}

TEST_CASE("honest preimage answers pass CHK") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto keys = fixed_keys(ProtocolKind::SelfTest, 2, Theta::coordinate(1 + s % 4), 3, s);
        HonestProver p(ProtocolKind::SelfTest, 2, s);
        const auto y = p.on_keys(keys);
        const auto ans = p.on_preimage();
        CHECK(entcf::chk(keys, y, ans.b, ans.x) == 0);
    }
}

TEST_CASE("logical state is normalized") {
    const auto keys = fixed_keys(ProtocolKind::SelfTest, 1, Theta::diamond(), 2, 9);
    HonestProver p(ProtocolKind::SelfTest, 1, 10);
    p.on_keys(keys);
    p.on_hadamard();
    CHECK(p.logical_state().norm() == doctest::Approx(1));
    CHECK(p.logical_state().size() == 4);
}

TEST_CASE("collapsed and full simulation agree exactly") {
    for (auto theta : {Theta::zero(), Theta::coordinate(1), Theta::coordinate(2), Theta::diamond()}) {
        const auto keys = fixed_keys(ProtocolKind::SelfTest, 1, theta, 2, 31);
        for (int q = 0; q < 4; ++q) {
            const auto a = exact_outcomes(SimMode::Collapsed, ProtocolKind::SelfTest, 1, keys, q);
            const auto b = exact_outcomes(SimMode::FullSim, ProtocolKind::SelfTest, 1, keys, q);
            REQUIRE(a.size() == b.size());
            double total = 0;
            for (const auto &[o, p] : a) {
                REQUIRE(b.count(o) == 1);
                CHECK(std::abs(p - b.at(o)) < 1e-12);
                total += p;
            }
            CHECK(total == doctest::Approx(1));
        }
    }
}

TEST_CASE("bitflip with p = 0 reproduces the honest transcripts") {
    const auto honest = harness::run_sessions(run_config("honest", 300));
    const auto flip0 = harness::run_sessions(run_config("bitflip=0", 300));
    REQUIRE(honest.transcripts.size() == flip0.transcripts.size());
    for (std::size_t i = 0; i < honest.transcripts.size(); ++i) {
        auto a = honest.transcripts[i].to_json();
        auto b = flip0.transcripts[i].to_json();
        CHECK(a == b);
    }
}

TEST_CASE("bitflip with p = 1 fails every theta = 0, q = 0 check") {
    const auto run = harness::run_sessions(run_config("bitflip=1", 600));
    int seen = 0;
    for (const auto &t : run.transcripts) {
        if (t.theta == Theta::zero() && t.q == 0) {
            ++seen;
            CHECK(!t.verdict.accept);
            CHECK(t.verdict.reason == "C.q0.bits.mismatch");
        }
    }
    CHECK(seen > 10);
}

TEST_CASE("classical guesser passes preimage rounds and fails Hadamard checks") {
    const auto run = harness::run_sessions(run_config("classical", 600));
    CHECK(run.stats.eps_p.events == 0);
    CHECK(run.stats.eps_h[1].estimate > 0.1);
}

TEST_CASE("wrong-basis prover fails theta = 0, q = 0") {
    const auto run = harness::run_sessions(run_config("wrongbasis", 600));
    int failures = 0, seen = 0;
    for (const auto &t : run.transcripts) {
        if (t.theta == Theta::zero() && t.q == 0) {
            ++seen;
            failures += !t.verdict.accept;
        }
    }
    REQUIRE(seen > 10);
    CHECK(failures > seen / 4);
}
