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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selftest/core/bits.h"
#include "selftest/entcf/entcf.h"

namespace selftest::protocol {

enum class ProtocolKind : std::uint8_t { SelfTest, DimTest };
enum class RoundType : std::uint8_t { Preimage = 0, Hadamard = 1 };

const char *to_string(ProtocolKind kind);
const char *to_string(RoundType round);

// The verifier's hidden choice. Coordinate thetas are 1-based, matching the
// coordinate numbering used in reason codes and transcripts.
class Theta {
   public:
    enum class Kind : std::uint8_t { Coordinate, Zero, Diamond };

    static Theta coordinate(std::uint32_t index);
    static Theta zero() { return Theta(Kind::Zero, 0); }
    static Theta diamond() { return Theta(Kind::Diamond, 0); }
    // "0", "diamond", or the decimal coordinate.
    static Theta parse(const std::string &text);

    Kind kind() const { return kind_; }
    bool is_coordinate() const { return kind_ == Kind::Coordinate; }
    std::uint32_t index() const { return index_; }
    // 0-based coordinate slot; only for coordinate thetas.
    std::size_t slot() const { return index_ - 1; }
    std::string to_string() const;

    // All self-test thetas in canonical order: 1..2N, 0, diamond.
    static std::vector<Theta> all_selftest(std::uint32_t n);
    // Dimension-test thetas 0..N.
    static std::vector<Theta> all_dimtest(std::uint32_t n);

    friend auto operator<=>(const Theta &, const Theta &) = default;

   private:
    Theta(Kind kind, std::uint32_t index) : kind_(kind), index_(index) {}
    Kind kind_ = Kind::Zero;
    std::uint32_t index_ = 0;
};

// Key family of each coordinate for a given theta.
std::vector<entcf::Family> key_families(ProtocolKind kind, std::uint32_t n, Theta theta);

// Number of protocol coordinates: 2N for the self-test, N for the dimension test.
inline std::size_t coordinate_count(ProtocolKind kind, std::uint32_t n) {
    return kind == ProtocolKind::SelfTest ? 2 * std::size_t{n} : n;
}

// Partner coordinate (0-based): i + N for i < N, i - N otherwise.
inline std::size_t partner(std::size_t slot, std::uint32_t n) {
    return slot < n ? slot + n : slot - n;
}

// Wire vocabulary.
struct KeysMsg {
    std::vector<entcf::PublicKey> keys;
    friend bool operator==(const KeysMsg &, const KeysMsg &) = default;
};
struct ImagesMsg {
    std::vector<entcf::Image> y;
    friend bool operator==(const ImagesMsg &, const ImagesMsg &) = default;
};
struct RoundTypeMsg {
    RoundType round = RoundType::Preimage;
    friend bool operator==(const RoundTypeMsg &, const RoundTypeMsg &) = default;
};
struct PreimageAnswerMsg {
    BitString b;
    std::vector<std::uint32_t> x;
    friend bool operator==(const PreimageAnswerMsg &, const PreimageAnswerMsg &) = default;
};
struct HadamardDMsg {
    std::vector<std::uint32_t> d;
    friend bool operator==(const HadamardDMsg &, const HadamardDMsg &) = default;
};
struct QuestionMsg {
    int q = 0;
    friend bool operator==(const QuestionMsg &, const QuestionMsg &) = default;
};
struct FinalAnswerMsg {
    BitString v;
    friend bool operator==(const FinalAnswerMsg &, const FinalAnswerMsg &) = default;
};
struct VerdictMsg {
    bool accept = false;
    std::string reason;
    friend bool operator==(const VerdictMsg &, const VerdictMsg &) = default;
};

using Message = std::variant<KeysMsg, ImagesMsg, RoundTypeMsg, PreimageAnswerMsg, HadamardDMsg, QuestionMsg,
                             FinalAnswerMsg, VerdictMsg>;

// Wire type byte of each variant (1-based, in declaration order).
std::uint8_t message_type(const Message &msg);
const char *message_name(const Message &msg);

// Decoded values of one Hadamard-round transcript. bhat is set on G
// coordinates, hhat on F coordinates; nullopt is the undefined symbol.
struct Decodings {
    std::vector<std::optional<int>> bhat;
    std::vector<std::optional<int>> hhat;
};

Decodings decode_all(std::span<const entcf::Trapdoor> trapdoors, std::span<const entcf::Image> y,
                     std::span<const std::uint32_t> d);
// b-hat only (preimage-independent); d is not needed for G coordinates.
std::vector<std::optional<int>> decode_bits(std::span<const entcf::Trapdoor> trapdoors,
                                            std::span<const entcf::Image> y);

}  // namespace selftest::protocol
