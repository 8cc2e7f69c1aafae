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

#include "selftest/core/error.h"
#include "selftest/prover/device.h"
#include "selftest/protocol/verifier.h"

using namespace selftest;
using namespace selftest::protocol;

namespace {

VerifierConfig config(ProtocolKind kind, std::uint32_t n, std::uint32_t w) {
    VerifierConfig c;
    c.kind = kind;
    c.n = n;
    c.entcf = entcf::EntcfParams::ideal(w);
    return c;
}

// Drives one session against a device and returns the final state.
VerifierState drive(const VerifierConfig &cfg, prover::Device &device, std::uint64_t seed) {
    Rng rng(seed);
    auto step = verifier_step(VerifierState::initial(cfg), std::nullopt, rng);
    while (step.state.phase != Phase::Done) {
        const Message &out = *step.outgoing;
        Message reply;
        if (const auto *k = std::get_if<KeysMsg>(&out)) {
            reply = ImagesMsg{device.on_keys(k->keys)};
        } else if (const auto *r = std::get_if<RoundTypeMsg>(&out)) {
            if (r->round == RoundType::Preimage) {
                reply = device.on_preimage();
            } else {
                reply = HadamardDMsg{device.on_hadamard()};
            }
        } else if (const auto *q = std::get_if<QuestionMsg>(&out)) {
            reply = FinalAnswerMsg{device.on_question(q->q)};
        }
        step = verifier_step(std::move(step.state), reply, rng);
    }
    return step.state;
}

Decodings decodings(std::size_t c) {
    Decodings d;
    d.bhat.assign(c, std::nullopt);
    d.hhat.assign(c, std::nullopt);
    return d;
}

}  // namespace

TEST_CASE("theta text form") {
    CHECK(Theta::parse("0") == Theta::zero());
    CHECK(Theta::parse("diamond") == Theta::diamond());
    CHECK(Theta::parse("3").index() == 3);
    CHECK(Theta::parse("3").slot() == 2);
    CHECK_THROWS_AS(Theta::parse("-1"), ProtocolError);
    CHECK_THROWS_AS(Theta::parse("1x"), ProtocolError);
    CHECK(Theta::all_selftest(2).size() == 6);
    CHECK(Theta::all_dimtest(3).size() == 4);
}

TEST_CASE("key families follow theta") {
    using entcf::Family;
    auto f = key_families(ProtocolKind::SelfTest, 2, Theta::coordinate(3));
    CHECK(f == std::vector<Family>{Family::G, Family::G, Family::F, Family::G});
    CHECK(key_families(ProtocolKind::SelfTest, 2, Theta::zero()) == std::vector<Family>(4, Family::G));
    CHECK(key_families(ProtocolKind::SelfTest, 1, Theta::diamond()) == std::vector<Family>(2, Family::F));
    CHECK(key_families(ProtocolKind::DimTest, 2, Theta::coordinate(1)) ==
          std::vector<Family>{Family::F, Family::G});
}

TEST_CASE("self-test verdict clauses") {
    const std::uint32_t n = 1;
    auto dec = decodings(2);
    dec.bhat = {1, 0};
    const auto v10 = BitString::from_string("10");
    const auto v11 = BitString::from_string("11");
    // Case C: q=0 checks every bit, q=1 always accepts.
    CHECK(selftest_hadamard_verdict(n, Theta::zero(), 0, dec, v10).accept);
    CHECK(selftest_hadamard_verdict(n, Theta::zero(), 0, dec, v11).reason == "C.q0.bits.mismatch");
    CHECK(selftest_hadamard_verdict(n, Theta::zero(), 1, dec, v11).reason == "C.q1.accept");
    // Case A with theta=1: q=1 needs hhat_1 xor bhat_2 == v_1.
    auto a = decodings(2);
    a.hhat[0] = 1;
    a.bhat[1] = 0;
    CHECK(selftest_hadamard_verdict(n, Theta::coordinate(1), 1, a, v10).accept);
    CHECK(selftest_hadamard_verdict(n, Theta::coordinate(1), 1, a, BitString::from_string("01")).reason ==
          "A.q1.equation.mismatch");
    a.hhat[0] = std::nullopt;
    CHECK(selftest_hadamard_verdict(n, Theta::coordinate(1), 1, a, v10).reason == "A.q1.equation.undefined");
    // Diamond: q=1 always accepts; q=2 needs v_1 xor v_2 == hhat_2.
    auto d = decodings(2);
    d.hhat = {0, 1};
    CHECK(selftest_hadamard_verdict(n, Theta::diamond(), 1, d, v11).accept);
    CHECK(selftest_hadamard_verdict(n, Theta::diamond(), 2, d, v10).accept);
    CHECK(selftest_hadamard_verdict(n, Theta::diamond(), 2, d, v11).reason == "D.q2.equation.mismatch");
    CHECK(!selftest_hadamard_verdict(n, Theta::diamond(), 3, d, v10).accept);
    CHECK_THROWS_AS(selftest_hadamard_verdict(n, Theta::zero(), 4, dec, v10), ProtocolError);
    CHECK_THROWS_AS(selftest_hadamard_verdict(n, Theta::zero(), 0, dec, BitString::from_string("1")), ProtocolError);
}

TEST_CASE("dimension-test verdict clauses") {
    auto dec = decodings(2);
    dec.bhat = {1, 1};
    CHECK(dimtest_hadamard_verdict(2, Theta::zero(), 0, dec, BitString::from_string("11")).accept);
    CHECK(dimtest_hadamard_verdict(2, Theta::zero(), 1, dec, BitString::from_string("00")).accept);
    auto b = decodings(2);
    b.bhat[1] = 0;
    b.hhat[0] = std::nullopt;
    CHECK(dimtest_hadamard_verdict(2, Theta::coordinate(1), 1, b, BitString::from_string("00")).reason ==
          "B.q1.equation.undefined");
    b.hhat[0] = 0;
    CHECK(dimtest_hadamard_verdict(2, Theta::coordinate(1), 1, b, BitString::from_string("00")).accept);
}

TEST_CASE("sigma label agrees with membership") {
    auto dec = decodings(2);
    dec.hhat[0] = 1;
    dec.bhat[1] = 1;
    const auto label = sigma_label(1, Theta::coordinate(1), dec);
    REQUIRE(label.has_value());
    for (const char *text : {"00", "01", "10", "11"}) {
        const auto v = BitString::from_string(text);
        CHECK(sigma_set_membership(1, Theta::coordinate(1), v, dec) == (v == *label));
    }
    dec.bhat[1] = std::nullopt;
    CHECK(!sigma_label(1, Theta::coordinate(1), dec).has_value());
}

TEST_CASE("honest device is accepted by the state machine") {
    for (auto kind : {ProtocolKind::SelfTest, ProtocolKind::DimTest}) {
        const auto cfg = config(kind, 1, 3);
        int accepted = 0;
        for (std::uint64_t s = 0; s < 200; ++s) {
            prover::HonestProver device(kind, 1, 1000 + s);
            const auto state = drive(cfg, device, s);
            REQUIRE(state.verdict.has_value());
            accepted += state.verdict->accept;
            if (!state.verdict->accept) {
                // Honest rejections only come from undefined decodings.
                CHECK(state.verdict->reason.ends_with("undefined"));
            }
        }
        CHECK(accepted >= 180);
    }
}

TEST_CASE("out-of-order messages end in a protocol reject") {
    const auto cfg = config(ProtocolKind::SelfTest, 1, 2);
    Rng rng(5);
    auto step = verifier_step(VerifierState::initial(cfg), std::nullopt, rng);
    REQUIRE(std::holds_alternative<KeysMsg>(*step.outgoing));
    step = verifier_step(std::move(step.state), Message{FinalAnswerMsg{BitString::from_string("00")}}, rng);
    CHECK(step.state.phase == Phase::Done);
    REQUIRE(step.state.verdict.has_value());
    CHECK(!step.state.verdict->accept);
    CHECK(step.state.verdict->reason == reason_protocol);
    CHECK_THROWS_AS(verifier_step(step.state, std::nullopt, rng), ProtocolError);

    Rng rng2(5);
    auto early = verifier_step(VerifierState::initial(cfg), Message{QuestionMsg{0}}, rng2);
    CHECK(early.state.verdict->reason == reason_protocol);

    Rng rng3(6);
    auto s = verifier_step(VerifierState::initial(cfg), std::nullopt, rng3);
    s = verifier_step(std::move(s.state), Message{ImagesMsg{{entcf::Image{0}}}}, rng3);
    CHECK(s.state.verdict->reason == reason_protocol);
}

TEST_CASE("keys never carry the trapdoor") {
    const auto cfg = config(ProtocolKind::SelfTest, 1, 3);
    Rng rng(7);
    auto step = verifier_step(VerifierState::initial(cfg), std::nullopt, rng);
    const auto &keys = std::get<KeysMsg>(*step.outgoing).keys;
    REQUIRE(keys.size() == step.state.trapdoors.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        CHECK(keys[i] == step.state.trapdoors[i].key());
        // Public key encodings have the same length for F and G keys.
        CHECK(keys[i].encode().size() == keys[0].encode().size());
    }
}
