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

#include "selftest/core/error.h"
#include "selftest/prover/device.h"

namespace selftest::prover {

using entcf::Image;
using entcf::PublicKey;
using protocol::ProtocolKind;

ClassicalGuessProver::ClassicalGuessProver(ProtocolKind kind, std::uint32_t n, std::uint64_t seed)
    : kind_(kind), n_(n), rng_(seed) {
}

std::vector<Image> ClassicalGuessProver::on_keys(const std::vector<PublicKey> &keys) {
    order_.advance(CallOrder::Step::Keys);
    if (keys.size() != protocol::coordinate_count(kind_, n_)) {
        throw ContractError("key tuple has the wrong length");
    }
    keys_ = keys;
    b_ = BitString(keys.size());
    std::vector<Image> y;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        b_.set(i, rng_.bit());
        x_.push_back(static_cast<std::uint32_t>(rng_.below(keys[i].params().domain_size())));
        y.push_back(keys[i].sample(b_[i] ? 1 : 0, x_.back(), rng_));
    }
    return y;
}

protocol::PreimageAnswerMsg ClassicalGuessProver::on_preimage() {
    order_.advance(CallOrder::Step::Preimage);
    return {b_, x_};
}

std::vector<std::uint32_t> ClassicalGuessProver::on_hadamard() {
    order_.advance(CallOrder::Step::Hadamard);
    std::vector<std::uint32_t> d;
    for (const auto &key : keys_) {
        d.push_back(static_cast<std::uint32_t>(1 + rng_.below(key.params().domain_size() - 1)));
    }
    return d;
}

BitString ClassicalGuessProver::on_question(int q) {
    order_.advance(CallOrder::Step::Question);
    auto had = hadamard_positions(kind_, n_, q);
    BitString v(had.size());
    for (std::size_t i = 0; i < had.size(); ++i) {
        v.set(i, had[i] ? rng_.bit() : b_[i]);
    }
    return v;
}

BitFlipProver::BitFlipProver(double p, ProtocolKind kind, std::uint32_t n, std::uint64_t seed, HonestOptions options)
    : p_(p), honest_(kind, n, seed, options), flips_(derive_seed(seed, 0xf11b)) {
    if (!(p >= 0 && p <= 1)) {
        throw ParameterError("flip probability must be in [0, 1]");
    }
}

std::vector<Image> BitFlipProver::on_keys(const std::vector<PublicKey> &keys) {
    return honest_.on_keys(keys);
}

protocol::PreimageAnswerMsg BitFlipProver::on_preimage() {
    return honest_.on_preimage();
}

std::vector<std::uint32_t> BitFlipProver::on_hadamard() {
    return honest_.on_hadamard();
}

BitString BitFlipProver::on_question(int q) {
    BitString v = honest_.on_question(q);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (flips_.bernoulli(p_)) {
            v.flip(i);
        }
    }
    return v;
}

WrongBasisProver::WrongBasisProver(ProtocolKind kind, std::uint32_t n, std::uint64_t seed, HonestOptions options)
    : honest_(kind, n, seed, options) {
}

std::vector<Image> WrongBasisProver::on_keys(const std::vector<PublicKey> &keys) {
    return honest_.on_keys(keys);
}

protocol::PreimageAnswerMsg WrongBasisProver::on_preimage() {
    return honest_.on_preimage();
}

std::vector<std::uint32_t> WrongBasisProver::on_hadamard() {
    return honest_.on_hadamard();
}

BitString WrongBasisProver::on_question(int q) {
    return honest_.on_question(q == 0 ? 1 : q == 1 ? 0 : q);
}

std::unique_ptr<Device> make_adversary(AdversarySpec spec, ProtocolKind kind, std::uint32_t n, std::uint64_t seed,
                                       HonestOptions options) {
    switch (spec.kind) {
        case AdversaryKind::ClassicalGuess:
            return std::make_unique<ClassicalGuessProver>(kind, n, seed);
        case AdversaryKind::BitFlip:
            return std::make_unique<BitFlipProver>(spec.flip_probability, kind, n, seed, options);
        case AdversaryKind::WrongBasis:
            return std::make_unique<WrongBasisProver>(kind, n, seed, options);
    }
    throw ParameterError("unknown adversary kind");
}

}  // namespace selftest::prover
