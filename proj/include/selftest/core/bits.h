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

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selftest {

inline int parity(std::uint64_t x) {
    return std::popcount(x) & 1;
}

// Inner product mod 2 of two bit strings packed into integers.
inline int dot(std::uint64_t a, std::uint64_t b) {
    return parity(a & b);
}

// Fixed-length bit string of at most 64 bits. Position i (0-based) is the
// i-th character of the text form, so "0110" has bits 1 and 2 set.
class BitString {
   public:
    static constexpr std::size_t max_size = 64;

    BitString() = default;
    explicit BitString(std::size_t size, std::uint64_t mask = 0);
    static BitString from_string(std::string_view text);

    std::size_t size() const { return size_; }
    std::uint64_t mask() const { return mask_; }
    bool operator[](std::size_t i) const { return ((mask_ >> i) & 1) != 0; }
    void set(std::size_t i, bool value);
    void flip(std::size_t i) { set(i, !(*this)[i]); }
    std::string to_string() const;

    friend bool operator==(const BitString &, const BitString &) = default;
    friend auto operator<=>(const BitString &, const BitString &) = default;

   private:
    std::uint64_t mask_ = 0;
    std::size_t size_ = 0;
};

// Lowercase hex encoding helpers shared by the key codec and the wire format.
std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view text);
std::string u64_to_hex(std::uint64_t value, int digits);
std::uint64_t u64_from_hex(std::string_view text);

// Big-endian fixed-width integer append/read helpers.
void put_u8(std::vector<std::uint8_t> &out, std::uint8_t v);
void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v);

class ByteReader {
   public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::span<const std::uint8_t> take(std::size_t n);
    std::size_t remaining() const { return data_.size() - pos_; }

   private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace selftest
