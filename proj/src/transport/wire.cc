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

#include "selftest/transport/wire.h"

#include <stdexcept>

#include "selftest/core/error.h"
#include "selftest/core/rng.h"

namespace selftest::transport {

using nlohmann::json;
using namespace protocol;

SessionId session_id_from_seed(std::uint64_t seed) {
    std::vector<std::uint8_t> bytes;
    put_u64(bytes, seed);
    put_u64(bytes, mix64(seed));
    SessionId sid{};
    std::copy(bytes.begin(), bytes.end(), sid.begin());
    return sid;
}

std::string to_hex(const SessionId &sid) {
    return selftest::to_hex(sid);
}

namespace {

json u32_array(const std::vector<std::uint32_t> &values) {
    json out = json::array();
    for (auto v : values) {
        out.push_back(v);
    }
    return out;
}

std::string image_hex(entcf::Image y) {
    return u64_to_hex(y.value, 16);
}

[[noreturn]] void malformed(const std::string &what) {
    throw ProtocolError("malformed payload: " + what);
}

const json &field(const json &payload, const char *name) {
    if (!payload.is_object() || payload.size() != 1 || !payload.contains(name)) {
        malformed(std::string("expected exactly the field '") + name + "'");
    }
    return payload.at(name);
}

std::vector<std::uint32_t> read_u32_array(const json &value, const char *name) {
    if (!value.is_array()) {
        malformed(std::string(name) + " is not an array");
    }
    std::vector<std::uint32_t> out;
    for (const auto &v : value) {
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xffffffffu) {
            malformed(std::string(name) + " holds a non-u32 entry");
        }
        out.push_back(v.get<std::uint32_t>());
    }
    return out;
}

BitString read_bits(const json &value, const char *name) {
    if (!value.is_string()) {
        malformed(std::string(name) + " is not a string");
    }
    const auto &text = value.get_ref<const std::string &>();
    if (text.size() > BitString::max_size || text.find_first_not_of("01") != std::string::npos) {
        malformed(std::string(name) + " is not a bit string");
    }
    return BitString::from_string(text);
}

std::vector<std::uint8_t> read_hex(const json &value) {
    if (!value.is_string()) {
        malformed("hex field is not a string");
    }
    const auto &text = value.get_ref<const std::string &>();
    if (text.size() % 2 != 0 || text.find_first_not_of("0123456789abcdef") != std::string::npos) {
        malformed("not lowercase hex");
    }
    return from_hex(text);
}

}  // namespace

json to_json(const Message &msg) {
    return std::visit(
        [](const auto &m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KeysMsg>) {
                json keys = json::array();
                for (const auto &k : m.keys) {
                    keys.push_back(selftest::to_hex(k.encode()));
                }
                return {{"keys", keys}};
            } else if constexpr (std::is_same_v<T, ImagesMsg>) {
                json y = json::array();
                for (auto yi : m.y) {
                    y.push_back(image_hex(yi));
                }
                return {{"y", y}};
            } else if constexpr (std::is_same_v<T, RoundTypeMsg>) {
                return {{"round", to_string(m.round)}};
            } else if constexpr (std::is_same_v<T, PreimageAnswerMsg>) {
                return {{"b", m.b.to_string()}, {"x", u32_array(m.x)}};
            } else if constexpr (std::is_same_v<T, HadamardDMsg>) {
                return {{"d", u32_array(m.d)}};
            } else if constexpr (std::is_same_v<T, QuestionMsg>) {
                return {{"q", m.q}};
            } else if constexpr (std::is_same_v<T, FinalAnswerMsg>) {
                return {{"v", m.v.to_string()}};
            } else {
                return {{"accept", m.accept}, {"reason", m.reason}};
            }
        },
        msg);
}

Message from_json(std::uint8_t type, const json &payload) {
    switch (type) {
        case 1: {
            const auto &keys = field(payload, "keys");
            if (!keys.is_array()) {
                malformed("keys is not an array");
            }
            KeysMsg m;
            for (const auto &k : keys) {
                const auto bytes = read_hex(k);
                try {
                    m.keys.push_back(entcf::PublicKey::decode(bytes));
                } catch (const std::exception &e) {
                    malformed(std::string("bad public key: ") + e.what());
                }
            }
            return m;
        }
        case 2: {
            const auto &y = field(payload, "y");
            if (!y.is_array()) {
                malformed("y is not an array");
            }
            ImagesMsg m;
            for (const auto &yi : y) {
                if (!yi.is_string() || yi.get_ref<const std::string &>().size() != 16) {
                    malformed("image is not 16 hex digits");
                }
                const auto bytes = read_hex(yi);
                ByteReader in(bytes);
                m.y.push_back(entcf::Image{in.u64()});
            }
            return m;
        }
        case 3: {
            const auto &round = field(payload, "round");
            if (round == to_string(RoundType::Preimage)) {
                return RoundTypeMsg{RoundType::Preimage};
            }
            if (round == to_string(RoundType::Hadamard)) {
                return RoundTypeMsg{RoundType::Hadamard};
            }
            malformed("unknown round type");
        }
        case 4: {
            if (!payload.is_object() || payload.size() != 2 || !payload.contains("b") || !payload.contains("x")) {
                malformed("preimage answer needs exactly b and x");
            }
            return PreimageAnswerMsg{read_bits(payload.at("b"), "b"), read_u32_array(payload.at("x"), "x")};
        }
        case 5:
            return HadamardDMsg{read_u32_array(field(payload, "d"), "d")};
        case 6: {
            const auto &q = field(payload, "q");
            if (!q.is_number_unsigned() || q.get<std::uint64_t>() > 3) {
                malformed("q must be in {0,1,2,3}");
            }
            return QuestionMsg{q.get<int>()};
        }
        case 7:
            return FinalAnswerMsg{read_bits(field(payload, "v"), "v")};
        case 8: {
            if (!payload.is_object() || payload.size() != 2 || !payload.contains("accept") ||
                !payload.contains("reason") || !payload.at("accept").is_boolean() ||
                !payload.at("reason").is_string()) {
                malformed("verdict needs a boolean accept and a string reason");
            }
            return VerdictMsg{payload.at("accept").get<bool>(), payload.at("reason").get<std::string>()};
        }
        default:
            throw ProtocolError("unknown message type " + std::to_string(type));
    }
}

std::string canonical_payload(const Message &msg) {
    return to_json(msg).dump();
}

std::vector<std::uint8_t> encode_frame(const SessionId &session, const Message &msg) {
    const std::string payload = canonical_payload(msg);
    const std::size_t length = frame_header_size + payload.size();
    if (length > max_frame_length) {
        throw ProtocolError("message too large for one frame");
    }
    std::vector<std::uint8_t> out;
    out.reserve(4 + length);
    put_u32(out, static_cast<std::uint32_t>(length));
    put_u8(out, wire_version);
    out.insert(out.end(), session.begin(), session.end());
    put_u8(out, message_type(msg));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 + frame_header_size) {
        throw ProtocolError("truncated frame");
    }
    ByteReader in(bytes);
    const std::uint32_t length = in.u32();
    if (length != bytes.size() - 4) {
        throw ProtocolError("length prefix " + std::to_string(length) + " does not match " +
                            std::to_string(bytes.size() - 4) + " frame bytes");
    }
    if (in.u8() != wire_version) {
        throw ProtocolError("unsupported wire version");
    }
    Frame frame;
    const auto sid = in.take(frame.session.size());
    std::copy(sid.begin(), sid.end(), frame.session.begin());
    const std::uint8_t type = in.u8();
    const auto body = in.take(in.remaining());
    const std::string text(body.begin(), body.end());
    json payload = json::parse(text, nullptr, false);
    if (payload.is_discarded()) {
        throw ProtocolError("payload is not valid JSON");
    }
    frame.message = transport::from_json(type, payload);
    if (canonical_payload(frame.message) != text) {
        throw ProtocolError("payload is not in canonical form");
    }
    return frame;
}

}  // namespace selftest::transport
