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

#include "selftest/protocol/types.h"

#include <charconv>

#include "selftest/core/error.h"

namespace selftest::protocol {

const char *to_string(ProtocolKind kind) {
    return kind == ProtocolKind::SelfTest ? "selftest" : "dimtest";
}

const char *to_string(RoundType round) {
    return round == RoundType::Preimage ? "preimage" : "hadamard";
}

Theta Theta::coordinate(std::uint32_t index) {
    if (index == 0) {
        throw DomainError("coordinate theta is 1-based");
    }
    return Theta(Kind::Coordinate, index);
}

Theta Theta::parse(const std::string &text) {
    if (text == "0") {
        return zero();
    }
    if (text == "diamond") {
        return diamond();
    }
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
        throw ProtocolError("malformed theta '" + text + "'");
    }
    return coordinate(value);
}

std::string Theta::to_string() const {
    switch (kind_) {
        case Kind::Zero:
            return "0";
        case Kind::Diamond:
            return "diamond";
        default:
            return std::to_string(index_);
    }
}

std::vector<Theta> Theta::all_selftest(std::uint32_t n) {
    std::vector<Theta> out;
    for (std::uint32_t i = 1; i <= 2 * n; ++i) {
        out.push_back(coordinate(i));
    }
    out.push_back(zero());
    out.push_back(diamond());
    return out;
}

std::vector<Theta> Theta::all_dimtest(std::uint32_t n) {
    std::vector<Theta> out{zero()};
    for (std::uint32_t i = 1; i <= n; ++i) {
        out.push_back(coordinate(i));
    }
    return out;
}

std::vector<entcf::Family> key_families(ProtocolKind kind, std::uint32_t n, Theta theta) {
    const std::size_t count = coordinate_count(kind, n);
    std::vector<entcf::Family> out(count, entcf::Family::G);
    switch (theta.kind()) {
        case Theta::Kind::Zero:
            break;
        case Theta::Kind::Diamond:
            if (kind == ProtocolKind::DimTest) {
                throw DomainError("the dimension test has no diamond theta");
            }
            out.assign(count, entcf::Family::F);
            break;
        case Theta::Kind::Coordinate:
            if (theta.index() > count) {
                throw DomainError("theta coordinate out of range");
            }
            out[theta.slot()] = entcf::Family::F;
            break;
    }
    return out;
}

std::uint8_t message_type(const Message &msg) {
    return static_cast<std::uint8_t>(msg.index() + 1);
}

const char *message_name(const Message &msg) {
    static constexpr const char *names[] = {"keys",     "images",   "round_type",   "preimage_answer",
                                            "hadamard_d", "question", "final_answer", "verdict"};
    return names[msg.index()];
}

std::vector<std::optional<int>> decode_bits(std::span<const entcf::Trapdoor> trapdoors,
                                            std::span<const entcf::Image> y) {
    if (trapdoors.size() != y.size()) {
        throw ProtocolError("image tuple length does not match the key tuple");
    }
    std::vector<std::optional<int>> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (trapdoors[i].family() == entcf::Family::G) {
            out[i] = entcf::decode_b(trapdoors[i], y[i]);
        }
    }
    return out;
}

Decodings decode_all(std::span<const entcf::Trapdoor> trapdoors, std::span<const entcf::Image> y,
                     std::span<const std::uint32_t> d) {
    if (d.size() != y.size()) {
        throw ProtocolError("d tuple length does not match the image tuple");
    }
    Decodings dec;
    dec.bhat = decode_bits(trapdoors, y);
    dec.hhat.assign(y.size(), std::nullopt);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (trapdoors[i].family() == entcf::Family::F) {
            if (d[i] >= trapdoors[i].key().params().domain_size()) {
                throw ProtocolError("d coordinate longer than w bits");
            }
            dec.hhat[i] = entcf::decode_h(trapdoors[i], y[i], d[i]);
        }
    }
    return dec;
}

}  // namespace selftest::protocol
