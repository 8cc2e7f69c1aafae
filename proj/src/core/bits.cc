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

#include "selftest/core/bits.h"

#include "selftest/core/error.h"

namespace selftest {

BitString::BitString(std::size_t size, std::uint64_t mask) : mask_(mask), size_(size) {
    if (size > max_size) {
        throw DomainError("bit string longer than 64 bits");
    }
    if (size < max_size && (mask >> size) != 0) {
        throw DomainError("bit string mask has bits beyond its length");
    }
}

BitString BitString::from_string(std::string_view text) {
    if (text.size() > max_size) {
        throw DomainError("bit string longer than 64 bits");
    }
    BitString out(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            out.set(i, true);
        } else if (text[i] != '0') {
            throw ProtocolError("bit string contains a character other than 0/1");
        }
    }
    return out;
}

void BitString::set(std::size_t i, bool value) {
    if (i >= size_) {
        throw DomainError("bit index out of range");
    }
    std::uint64_t bit = std::uint64_t{1} << i;
    mask_ = value ? (mask_ | bit) : (mask_ & ~bit);
}

std::string BitString::to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if ((*this)[i]) {
            out[i] = '1';
        }
    }
    return out;
}

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    return -1;
}

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view text) {
    if (text.size() % 2 != 0) {
        throw ProtocolError("hex string has odd length");
    }
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(text[2 * i]);
        int lo = hex_value(text[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw ProtocolError("hex string contains a non-lowercase-hex character");
        }
        out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return out;
}

std::string u64_to_hex(std::uint64_t value, int digits) {
    static constexpr char table[] = "0123456789abcdef";
    std::string out(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = table[value & 15];
        value >>= 4;
    }
    return out;
}

std::uint64_t u64_from_hex(std::string_view text) {
    if (text.empty() || text.size() > 16) {
        throw ProtocolError("hex integer must have 1 to 16 digits");
    }
    std::uint64_t value = 0;
    for (char c : text) {
        int v = hex_value(c);
        if (v < 0) {
            throw ProtocolError("hex string contains a non-lowercase-hex character");
        }
        value = (value << 4) | static_cast<std::uint64_t>(v);
    }
    return value;
}

void put_u8(std::vector<std::uint8_t> &out, std::uint8_t v) {
    out.push_back(v);
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
    if (remaining() < n) {
        throw ProtocolError("unexpected end of encoded data");
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() {
    return take(1)[0];
}

std::uint32_t ByteReader::u32() {
    std::uint32_t v = 0;
    for (std::uint8_t b : take(4)) {
        v = (v << 8) | b;
    }
    return v;
}

std::uint64_t ByteReader::u64() {
    std::uint64_t v = 0;
    for (std::uint8_t b : take(8)) {
        v = (v << 8) | b;
    }
    return v;
}

}  // namespace selftest
