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
#include <memory>
#include <string>
#include <vector>

#include "selftest/core/bits.h"
#include "selftest/core/rng.h"
#include "selftest/entcf/entcf.h"
#include "selftest/protocol/types.h"
#include "selftest/qsim/state_vector.h"

namespace selftest::prover {

// Prover side of one session. Callbacks must be invoked in protocol order:
// on_keys, then on_preimage or (on_hadamard, on_question). Violations throw
// ContractError.
class Device {
   public:
    virtual ~Device() = default;
    virtual std::vector<entcf::Image> on_keys(const std::vector<entcf::PublicKey> &keys) = 0;
    virtual protocol::PreimageAnswerMsg on_preimage() = 0;
    virtual std::vector<std::uint32_t> on_hadamard() = 0;
    virtual BitString on_question(int q) = 0;
};

enum class SimMode { Collapsed, FullSim };

// Basis of each logical qubit for question q. true = Hadamard basis.
// Self-test: q=0 all computational, q=1 all Hadamard, q=2 first half
// computational and second half Hadamard, q=3 the reverse. Dimension test:
// q=0 computational, q=1 Hadamard.
std::vector<bool> hadamard_positions(protocol::ProtocolKind kind, std::uint32_t n, int q);

// Tracks callback order for all device implementations.
class CallOrder {
   public:
    enum class Step { Keys, Preimage, Hadamard, Question };
    void advance(Step step);

   private:
    int stage_ = 0;  // 0 fresh, 1 keys, 2 preimage, 3 hadamard, 4 question
};

// Exact joint distribution of (y, d, v) for an honest Hadamard-round
// session with fixed keys and question q.
struct Outcome {
    std::vector<entcf::Image> y;
    std::vector<std::uint32_t> d;
    BitString v;
    friend auto operator<=>(const Outcome &, const Outcome &) = default;
};
using OutcomeDistribution = std::map<Outcome, double>;

struct HonestOptions {
    SimMode mode = SimMode::Collapsed;
    // FullSim: per-coordinate limit on 2^(1+w) * |reachable Y|.
    std::uint64_t fullsim_budget = std::uint64_t{1} << 12;
    // FullSim: limit on the total simulated qubits.
    std::size_t fullsim_max_qubits = 22;
};

OutcomeDistribution exact_outcomes(SimMode mode, protocol::ProtocolKind kind, std::uint32_t n,
                                   const std::vector<entcf::PublicKey> &keys, int q, HonestOptions options = {});

// Honest prover. Collapsed mode tracks, per coordinate, the post-y
// superposition over (b, x) and then a single logical qubit; FullSim mode
// keeps every b, x and y register in one state vector.
class HonestProver : public Device {
   public:
    HonestProver(protocol::ProtocolKind kind, std::uint32_t n, std::uint64_t seed, HonestOptions options = {});
    ~HonestProver() override;

    std::vector<entcf::Image> on_keys(const std::vector<entcf::PublicKey> &keys) override;
    protocol::PreimageAnswerMsg on_preimage() override;
    std::vector<std::uint32_t> on_hadamard() override;
    BitString on_question(int q) override;

    // 2N-qubit (N for the dimension test) state right before the question
    // measurement, qubit i = coordinate i. Available after on_hadamard.
    qsim::Vector logical_state() const;

   private:
    class Engine;
    class CollapsedEngine;
    class FullSimEngine;
    friend OutcomeDistribution exact_outcomes(SimMode, protocol::ProtocolKind, std::uint32_t,
                                              const std::vector<entcf::PublicKey> &, int, HonestOptions);

    protocol::ProtocolKind kind_;
    std::uint32_t n_;
    HonestOptions options_;
    Rng rng_;
    CallOrder order_;
    std::unique_ptr<Engine> engine_;
};

// Scripted adversaries.
enum class AdversaryKind { ClassicalGuess, BitFlip, WrongBasis };

struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::ClassicalGuess;
    double flip_probability = 0;  // BitFlip only
};

std::unique_ptr<Device> make_adversary(AdversarySpec spec, protocol::ProtocolKind kind, std::uint32_t n,
                                       std::uint64_t seed, HonestOptions options = {});

// Picks (b, x) itself, answers preimage rounds perfectly, sends a uniformly
// random nonzero d and guesses every bit it cannot know.
class ClassicalGuessProver : public Device {
   public:
    ClassicalGuessProver(protocol::ProtocolKind kind, std::uint32_t n, std::uint64_t seed);

    std::vector<entcf::Image> on_keys(const std::vector<entcf::PublicKey> &keys) override;
    protocol::PreimageAnswerMsg on_preimage() override;
    std::vector<std::uint32_t> on_hadamard() override;
    BitString on_question(int q) override;

   private:
    protocol::ProtocolKind kind_;
    std::uint32_t n_;
    Rng rng_;
    CallOrder order_;
    std::vector<entcf::PublicKey> keys_;
    BitString b_;
    std::vector<std::uint32_t> x_;
};

// Honest prover whose answer bits are each flipped with probability p. The
// flips use their own stream, so p = 0 reproduces the honest transcript.
class BitFlipProver : public Device {
   public:
    BitFlipProver(double p, protocol::ProtocolKind kind, std::uint32_t n, std::uint64_t seed,
                  HonestOptions options = {});

    std::vector<entcf::Image> on_keys(const std::vector<entcf::PublicKey> &keys) override;
    protocol::PreimageAnswerMsg on_preimage() override;
    std::vector<std::uint32_t> on_hadamard() override;
    BitString on_question(int q) override;

   private:
    double p_;
    HonestProver honest_;
    Rng flips_;
};

// Honest prover that measures in the q=1 bases when asked q=0 and vice versa.
class WrongBasisProver : public Device {
   public:
    WrongBasisProver(protocol::ProtocolKind kind, std::uint32_t n, std::uint64_t seed, HonestOptions options = {});

    std::vector<entcf::Image> on_keys(const std::vector<entcf::PublicKey> &keys) override;
    protocol::PreimageAnswerMsg on_preimage() override;
    std::vector<std::uint32_t> on_hadamard() override;
    BitString on_question(int q) override;

   private:
    HonestProver honest_;
};

}  // namespace selftest::prover
