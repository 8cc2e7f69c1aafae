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

#include "selftest/harness/session.h"

#include <charconv>

#include "selftest/core/error.h"
#include "selftest/core/rng.h"
#include "selftest/transport/wire.h"

namespace selftest::harness {

using nlohmann::json;
using protocol::Theta;
using protocol::Verdict;

ProverSpec ProverSpec::parse(const std::string &text) {
    ProverSpec spec;
    if (text == "honest") {
        return spec;
    }
    if (text == "classical") {
        spec.kind = Kind::Classical;
        return spec;
    }
    if (text == "wrongbasis") {
        spec.kind = Kind::WrongBasis;
        return spec;
    }
    if (text.rfind("bitflip=", 0) == 0) {
        const std::string value = text.substr(8);
        double p = 0;
        auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
        if (ec != std::errc() || end != value.data() + value.size() || !(p >= 0 && p <= 1)) {
            throw ParameterError("bitflip probability must be a number in [0, 1]");
        }
        spec.kind = Kind::BitFlip;
        spec.flip_probability = p;
        return spec;
    }
    throw ParameterError("unknown prover '" + text + "'");
}

std::string ProverSpec::to_string() const {
    switch (kind) {
        case Kind::Honest:
            return "honest";
        case Kind::Classical:
            return "classical";
        case Kind::WrongBasis:
            return "wrongbasis";
        case Kind::BitFlip:
        default: {
            std::string p = json(flip_probability).dump();
            return "bitflip=" + p;
        }
    }
}

std::unique_ptr<prover::Device> make_device(const ProverSpec &spec, ProtocolKind kind, std::uint32_t n,
                                            std::uint64_t seed, prover::HonestOptions options) {
    using prover::AdversaryKind;
    switch (spec.kind) {
        case ProverSpec::Kind::Honest:
            return std::make_unique<prover::HonestProver>(kind, n, seed, options);
        case ProverSpec::Kind::Classical:
            return prover::make_adversary({AdversaryKind::ClassicalGuess, 0}, kind, n, seed, options);
        case ProverSpec::Kind::BitFlip:
            return prover::make_adversary({AdversaryKind::BitFlip, spec.flip_probability}, kind, n, seed, options);
        case ProverSpec::Kind::WrongBasis:
        default:
            return prover::make_adversary({AdversaryKind::WrongBasis, 0}, kind, n, seed, options);
    }
}

std::uint64_t session_seed(std::uint64_t master, std::uint64_t index) {
    return derive_seed(master, index);
}

std::uint64_t verifier_seed(std::uint64_t session) {
    return derive_seed(session, 1);
}

std::uint64_t device_seed(std::uint64_t session) {
    return derive_seed(session, 2);
}

std::uint64_t seed_from_session_id(const transport::SessionId &sid) {
    return ByteReader(std::span<const std::uint8_t>(sid.data(), 8)).u64();
}

namespace {

const char *party_name(Party p) {
    return p == Party::Verifier ? "verifier" : "prover";
}

json optional_bits(const std::vector<std::optional<int>> &bits) {
    json out = json::array();
    for (const auto &b : bits) {
        out.push_back(b ? json(*b) : json(nullptr));
    }
    return out;
}

std::vector<std::optional<int>> read_optional_bits(const json &j) {
    std::vector<std::optional<int>> out;
    for (const auto &b : j) {
        out.push_back(b.is_null() ? std::nullopt : std::optional<int>(b.get<int>()));
    }
    return out;
}

}  // namespace

json Transcript::to_json() const {
    json msgs = json::array();
    for (std::size_t t = 0; t < messages.size(); ++t) {
        const auto &m = messages[t];
        msgs.push_back({{"t", t},
                        {"from", party_name(m.from)},
                        {"type", protocol::message_name(m.message)},
                        {"type_byte", protocol::message_type(m.message)},
                        {"payload", transport::to_json(m.message)}});
    }
    json j = {
        {"index", index},
        {"session", transport::to_hex(session)},
        {"protocol", protocol::to_string(kind)},
        {"seed", seed},
        {"theta", theta.to_string()},
        {"round", round ? json(protocol::to_string(*round)) : json(nullptr)},
        {"q", q ? json(*q) : json(nullptr)},
        {"messages", msgs},
        {"verdict", {{"accept", verdict.accept}, {"reason", verdict.reason}}},
        {"decoded", {{"bhat", optional_bits(decodings.bhat)}, {"hhat", optional_bits(decodings.hhat)}}},
    };
    if (!error.empty()) {
        j["error"] = error;
    }
    return j;
}

Transcript Transcript::from_json(const json &j) {
    try {
        Transcript t;
        t.index = j.at("index").get<std::uint64_t>();
        const auto sid = from_hex(j.at("session").get<std::string>());
        if (sid.size() != t.session.size()) {
            throw ProtocolError("session id must be 16 bytes");
        }
        std::copy(sid.begin(), sid.end(), t.session.begin());
        const auto kind = j.at("protocol").get<std::string>();
        if (kind == protocol::to_string(ProtocolKind::SelfTest)) {
            t.kind = ProtocolKind::SelfTest;
        } else if (kind == protocol::to_string(ProtocolKind::DimTest)) {
            t.kind = ProtocolKind::DimTest;
        } else {
            throw ProtocolError("unknown protocol '" + kind + "'");
        }
        t.seed = j.at("seed").get<std::uint64_t>();
        t.theta = Theta::parse(j.at("theta").get<std::string>());
        if (!j.at("round").is_null()) {
            t.round = j.at("round") == protocol::to_string(protocol::RoundType::Hadamard)
                          ? protocol::RoundType::Hadamard
                          : protocol::RoundType::Preimage;
        }
        if (!j.at("q").is_null()) {
            t.q = j.at("q").get<int>();
        }
        for (const auto &m : j.at("messages")) {
            TranscriptEntry e;
            e.from = m.at("from") == "verifier" ? Party::Verifier : Party::Prover;
            e.message = transport::from_json(m.at("type_byte").get<std::uint8_t>(), m.at("payload"));
            t.messages.push_back(std::move(e));
        }
        t.verdict = {j.at("verdict").at("accept").get<bool>(), j.at("verdict").at("reason").get<std::string>()};
        t.decodings.bhat = read_optional_bits(j.at("decoded").at("bhat"));
        t.decodings.hhat = read_optional_bits(j.at("decoded").at("hhat"));
        if (j.contains("error")) {
            t.error = j.at("error").get<std::string>();
        }
        return t;
    } catch (const json::exception &e) {
        throw ProtocolError(std::string("malformed transcript: ") + e.what());
    }
}

std::optional<Message> ProverSession::handle(const Message &incoming) {
    if (finished_) {
        throw ProtocolError("message after the verdict");
    }
    if (const auto *keys = std::get_if<protocol::KeysMsg>(&incoming)) {
        return protocol::ImagesMsg{device_->on_keys(keys->keys)};
    }
    if (const auto *round = std::get_if<protocol::RoundTypeMsg>(&incoming)) {
        if (round->round == protocol::RoundType::Preimage) {
            return device_->on_preimage();
        }
        return protocol::HadamardDMsg{device_->on_hadamard()};
    }
    if (const auto *question = std::get_if<protocol::QuestionMsg>(&incoming)) {
        return protocol::FinalAnswerMsg{device_->on_question(question->q)};
    }
    if (std::holds_alternative<protocol::VerdictMsg>(incoming)) {
        finished_ = true;
        return std::nullopt;
    }
    throw ProtocolError(std::string("prover cannot handle ") + protocol::message_name(incoming));
}

Transcript run_verifier_session(std::uint64_t index, std::uint64_t seed, const protocol::VerifierConfig &config,
                                transport::Endpoint &link, transport::Timeout timeout,
                                const std::function<void()> &after_send) {
    Transcript t;
    t.index = index;
    t.session = link.session();
    t.kind = config.kind;
    t.seed = seed;
    Rng rng(verifier_seed(seed));
    auto state = protocol::VerifierState::initial(config);
    std::optional<Message> incoming;
    for (;;) {
        auto step = protocol::verifier_step(std::move(state), incoming, rng);
        state = std::move(step.state);
        if (step.outgoing) {
            t.messages.push_back({Party::Verifier, *step.outgoing});
            try {
                link.send(*step.outgoing);
                if (after_send) {
                    after_send();
                }
            } catch (const TransportError &e) {
                // A peer that leaves after the verdict does not change it.
                if (state.phase != protocol::Phase::Done) {
                    state.phase = protocol::Phase::Done;
                    state.verdict = Verdict{false, protocol::reason_transport};
                    t.error = e.what();
                }
            }
        }
        if (state.phase == protocol::Phase::Done) {
            break;
        }
        try {
            incoming = link.recv(timeout);
        } catch (const TransportError &e) {
            state.phase = protocol::Phase::Done;
            state.verdict = Verdict{false, protocol::reason_transport};
            t.error = e.what();
            break;
        } catch (const ProtocolError &e) {
            state.phase = protocol::Phase::Done;
            state.verdict = Verdict{false, protocol::reason_protocol};
            t.error = e.what();
            break;
        }
        t.messages.push_back({Party::Prover, *incoming});
    }
    if (t.error.empty()) {
        t.error = state.error;
    }
    t.theta = state.theta;
    t.round = state.round;
    t.q = state.q;
    t.verdict = *state.verdict;
    t.decodings = state.decodings;
    return t;
}

void serve_prover(transport::Channel &channel, const DeviceFactory &factory, transport::Timeout timeout) {
    std::unique_ptr<ProverSession> session;
    try {
        for (;;) {
            auto frame = transport::decode_frame(channel.recv(timeout));
            if (!session) {
                session = std::make_unique<ProverSession>(factory(frame.session));
            }
            auto reply = session->handle(frame.message);
            if (!reply) {
                return;
            }
            channel.send(transport::encode_frame(frame.session, *reply));
        }
    } catch (const std::exception &) {
        // Dropping the connection is how the prover side reports failure;
        // the verifier records it as a transport reject.
    }
}

void InProcProver::pump() {
    try {
        auto frame = transport::decode_frame(channel_->recv(transport::Timeout(0)));
        if (!session_) {
            session_ = std::make_unique<ProverSession>(factory_(frame.session));
        }
        if (auto reply = session_->handle(frame.message)) {
            channel_->send(transport::encode_frame(frame.session, *reply));
        }
    } catch (const std::exception &) {
        channel_.reset();
    }
}

ReplayResult replay_transcript(const Transcript &transcript, const protocol::VerifierConfig &config) {
    ReplayResult out;
    Rng rng(verifier_seed(transcript.seed));
    auto state = protocol::VerifierState::initial(config);
    std::optional<Message> incoming;
    std::size_t at = 0;
    auto fail = [&](std::string why) {
        out.match = false;
        out.mismatch = std::move(why);
        return out;
    };
    for (;;) {
        auto step = protocol::verifier_step(std::move(state), incoming, rng);
        state = std::move(step.state);
        if (step.outgoing) {
            if (at >= transcript.messages.size() || transcript.messages[at].from != Party::Verifier ||
                transcript.messages[at].message != *step.outgoing) {
                return fail("verifier message " + std::to_string(at) + " differs from the record");
            }
            ++at;
        }
        if (state.phase == protocol::Phase::Done) {
            break;
        }
        if (at == transcript.messages.size()) {
            // The recorded session was cut off here; only an abort verdict
            // is consistent with that.
            const auto &reason = transcript.verdict.reason;
            out.verdict = transcript.verdict;
            if (transcript.verdict.accept ||
                (reason != protocol::reason_transport && reason != protocol::reason_protocol)) {
                return fail("record ends before a verdict");
            }
            out.match = true;
            return out;
        }
        if (transcript.messages[at].from != Party::Prover) {
            return fail("expected a prover message at " + std::to_string(at));
        }
        incoming = transcript.messages[at++].message;
    }
    out.verdict = *state.verdict;
    if (at != transcript.messages.size()) {
        return fail("record continues after the verdict");
    }
    if (out.verdict.accept != transcript.verdict.accept || out.verdict.reason != transcript.verdict.reason) {
        return fail("verdict " + out.verdict.reason + " differs from recorded " + transcript.verdict.reason);
    }
    out.match = true;
    return out;
}

}  // namespace selftest::harness
