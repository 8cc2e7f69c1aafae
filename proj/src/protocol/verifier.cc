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

#include "selftest/protocol/verifier.h"

#include "selftest/core/error.h"

namespace selftest::protocol {

void VerifierConfig::validate() const {
    if (n < 1) {
        throw ParameterError("N must be at least 1");
    }
    if (coordinates() > BitString::max_size) {
        throw ParameterError("too many coordinates for a 64-bit answer string");
    }
    entcf.validate();
}

const char *to_string(Phase phase) {
    static constexpr const char *names[] = {"start", "await_images", "await_preimage", "await_d", "await_answer",
                                            "done"};
    return names[static_cast<int>(phase)];
}

VerifierState VerifierState::initial(VerifierConfig config) {
    config.validate();
    VerifierState s;
    s.config = config;
    return s;
}

Theta sample_theta(ProtocolKind kind, std::uint32_t n, Rng &rng) {
    auto all = kind == ProtocolKind::SelfTest ? Theta::all_selftest(n) : Theta::all_dimtest(n);
    return all[rng.below(all.size())];
}

std::vector<entcf::KeyPair> sample_keys(ProtocolKind kind, std::uint32_t n, Theta theta,
                                        const entcf::EntcfParams &params, Rng &rng) {
    std::vector<entcf::KeyPair> out;
    for (auto family : key_families(kind, n, theta)) {
        out.push_back(entcf::gen_keypair(family, params, rng));
    }
    return out;
}

namespace {

StepResult reject_protocol(VerifierState state, const std::string &why) {
    state.phase = Phase::Done;
    state.error = why;
    state.verdict = Verdict{false, reason_protocol};
    return {std::move(state), Message{VerdictMsg{false, reason_protocol}}};
}

StepResult conclude(VerifierState state, Verdict verdict) {
    state.phase = Phase::Done;
    state.verdict = verdict;
    VerdictMsg msg{verdict.accept, verdict.reason};
    return {std::move(state), Message{std::move(msg)}};
}

}  // namespace

StepResult verifier_step(VerifierState state, const std::optional<Message> &incoming, Rng &rng) {
    const auto &cfg = state.config;
    const std::size_t count = cfg.coordinates();
    switch (state.phase) {
        case Phase::Start: {
            if (incoming) {
                return reject_protocol(std::move(state), "prover spoke before receiving keys");
            }
            state.theta = sample_theta(cfg.kind, cfg.n, rng);
            KeysMsg keys;
            for (auto &pair : sample_keys(cfg.kind, cfg.n, state.theta, cfg.entcf, rng)) {
                keys.keys.push_back(pair.key);
                state.keys.push_back(std::move(pair.key));
                state.trapdoors.push_back(std::move(pair.trapdoor));
            }
            state.phase = Phase::AwaitImages;
            return {std::move(state), Message{std::move(keys)}};
        }
        case Phase::AwaitImages: {
            const auto *msg = incoming ? std::get_if<ImagesMsg>(&*incoming) : nullptr;
            if (!msg) {
                return reject_protocol(std::move(state), "expected images");
            }
            if (msg->y.size() != count) {
                return reject_protocol(std::move(state), "image tuple has the wrong length");
            }
            state.y = msg->y;
            state.round = rng.bit() ? RoundType::Hadamard : RoundType::Preimage;
            state.phase = *state.round == RoundType::Preimage ? Phase::AwaitPreimage : Phase::AwaitD;
            return {std::move(state), Message{RoundTypeMsg{*state.round}}};
        }
        case Phase::AwaitPreimage: {
            const auto *msg = incoming ? std::get_if<PreimageAnswerMsg>(&*incoming) : nullptr;
            if (!msg) {
                return reject_protocol(std::move(state), "expected a preimage answer");
            }
            if (msg->b.size() != count || msg->x.size() != count) {
                return reject_protocol(std::move(state), "preimage answer has the wrong length");
            }
            int result = entcf::chk(state.keys, state.y, msg->b, msg->x);
            return conclude(std::move(state), preimage_verdict(result));
        }
        case Phase::AwaitD: {
            const auto *msg = incoming ? std::get_if<HadamardDMsg>(&*incoming) : nullptr;
            if (!msg) {
                return reject_protocol(std::move(state), "expected d");
            }
            if (msg->d.size() != count) {
                return reject_protocol(std::move(state), "d tuple has the wrong length");
            }
            for (auto di : msg->d) {
                if (di >= cfg.entcf.domain_size()) {
                    return reject_protocol(std::move(state), "d coordinate longer than w bits");
                }
            }
            state.d = msg->d;
            state.decodings = decode_all(state.trapdoors, state.y, state.d);
            state.q = static_cast<int>(rng.below(cfg.kind == ProtocolKind::SelfTest ? 4 : 2));
            state.phase = Phase::AwaitAnswer;
            return {std::move(state), Message{QuestionMsg{*state.q}}};
        }
        case Phase::AwaitAnswer: {
            const auto *msg = incoming ? std::get_if<FinalAnswerMsg>(&*incoming) : nullptr;
            if (!msg) {
                return reject_protocol(std::move(state), "expected the final answer");
            }
            if (msg->v.size() != count) {
                return reject_protocol(std::move(state), "answer has the wrong length");
            }
            state.v = msg->v;
            Verdict verdict = cfg.kind == ProtocolKind::SelfTest
                                  ? selftest_hadamard_verdict(cfg.n, state.theta, *state.q, state.decodings, msg->v)
                                  : dimtest_hadamard_verdict(cfg.n, state.theta, *state.q, state.decodings, msg->v);
            return conclude(std::move(state), verdict);
        }
        case Phase::Done:
        default:
            throw ProtocolError("session already finished");
    }
}

}  // namespace selftest::protocol
