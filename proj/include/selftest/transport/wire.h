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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "selftest/protocol/types.h"

namespace selftest::transport {

inline constexpr std::uint8_t wire_version = 0x01;
// Bytes after the length prefix that precede the payload.
inline constexpr std::size_t frame_header_size = 1 + 16 + 1;
// Upper bound on the length prefix accepted by readers.
inline constexpr std::uint32_t max_frame_length = 1u << 26;

using SessionId = std::array<std::uint8_t, 16>;

// Session id derived from a session seed: the seed and its mix64, both
// big-endian.
SessionId session_id_from_seed(std::uint64_t seed);
std::string to_hex(const SessionId &sid);

// Payload object of a message. Keys and images are lowercase hex strings,
// bit strings their '0'/'1' text form.
nlohmann::json to_json(const protocol::Message &msg);
// Throws ProtocolError when the payload does not describe a message of the
// given type.
protocol::Message from_json(std::uint8_t type, const nlohmann::json &payload);

// Sorted keys, no insignificant whitespace.
std::string canonical_payload(const protocol::Message &msg);

struct Frame {
    SessionId session{};
    protocol::Message message;
};

// [u32 BE length][version][session id][type][payload].
std::vector<std::uint8_t> encode_frame(const SessionId &session, const protocol::Message &msg);
// Decodes one complete frame including its length prefix. Throws
// ProtocolError on truncation, trailing bytes, an unknown version or type,
// or a payload that does not parse.
Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace selftest::transport
