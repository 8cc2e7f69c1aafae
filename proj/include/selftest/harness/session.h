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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selftest/protocol/verdict.h"
#include "selftest/protocol/verifier.h"
#include "selftest/prover/device.h"
#include "selftest/transport/channel.h"

namespace selftest::harness {

using protocol::Message;
using protocol::ProtocolKind;

struct ProverSpec {
    enum class Kind { Honest, Classical, BitFlip, WrongBasis };
    Kind kind = Kind::Honest;
    double flip_probability = 0;

    // "honest", "classical", "bitflip=P", "wrongbasis". Throws ParameterError.
    static ProverSpec parse(const std::string &text);
    std::string to_string() const;
};

std::unique_ptr<prover::Device> make_device(const ProverSpec &spec, ProtocolKind kind, std::uint32_t n,
                                            std::uint64_t seed, prover::HonestOptions options = {});

// Per-session seeds. The verifier and the device get disjoint child streams.
std::uint64_t session_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t verifier_seed(std::uint64_t session);
std::uint64_t device_seed(std::uint64_t session);
// Inverse of transport::session_id_from_seed for the first 8 bytes.
std::uint64_t seed_from_session_id(const transport::SessionId &sid);

enum class Party { Verifier, Prover };

struct TranscriptEntry {
    Party from = Party::Verifier;
    Message message;
};

struct Transcript {
    std::uint64_t index = 0;
    transport::SessionId session{};
    ProtocolKind kind = ProtocolKind::SelfTest;
    std::uint64_t seed = 0;
    protocol::Theta theta = protocol::Theta::zero();
    std::optional<protocol::RoundType> round;
    std::optional<int> q;
    std::vector<TranscriptEntry> messages;
    protocol::Verdict verdict;
    protocol::Decodings decodings;
    // Diagnostic for protocol and transport aborts; empty otherwise.
    std::string error;

    // Message entries carry a logical timestamp "t" (their position), so
    // transcripts are reproducible byte for byte.
    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json &j);
};

// Prover side of one session: turns each verifier message into the reply.
class ProverSession {
   public:
    explicit ProverSession(std::unique_ptr<prover::Device> device) : device_(std::move(device)) {}
    // nullopt after the verdict.
    std::optional<Message> handle(const Message &incoming);
    bool finished() const { return finished_; }

   private:
    std::unique_ptr<prover::Device> device_;
    bool finished_ = false;
};

// Verifier side of one session over an endpoint. `after_send` runs after
// every outgoing message (the in-process driver uses it to let the prover
// answer on the same thread). Transport failures end the session with a
// "transport" reject, undecodable prover frames with a "protocol" reject.
Transcript run_verifier_session(std::uint64_t index, std::uint64_t seed, const protocol::VerifierConfig &config,
                                transport::Endpoint &link, transport::Timeout timeout,
                                const std::function<void()> &after_send = {});

// Reads frames from the channel and answers them until the verdict arrives
// or the channel fails. The device is created from the first frame's session
// id.
using DeviceFactory = std::function<std::unique_ptr<prover::Device>(const transport::SessionId &)>;
void serve_prover(transport::Channel &channel, const DeviceFactory &factory, transport::Timeout timeout);

// Answers exactly one pending frame; used by the in-process driver.
class InProcProver {
   public:
    InProcProver(std::unique_ptr<transport::Channel> channel, DeviceFactory factory)
        : channel_(std::move(channel)), factory_(std::move(factory)) {}
    void pump();

   private:
    std::unique_ptr<transport::Channel> channel_;
    DeviceFactory factory_;
    std::unique_ptr<ProverSession> session_;
};

// Replays the recorded prover messages through a fresh verifier with the
// same seed. The audit passes when every verifier message and the verdict
// match the record.
struct ReplayResult {
    bool match = false;
    protocol::Verdict verdict;
    std::string mismatch;
};

ReplayResult replay_transcript(const Transcript &transcript, const protocol::VerifierConfig &config);

}  // namespace selftest::harness
