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

#include <doctest.h>

#include <set>

#include "selftest/core/bits.h"
#include "selftest/core/error.h"
#include "selftest/core/rng.h"

using namespace selftest;

TEST_CASE("bit string text form is position ordered") {
    auto b = BitString::from_string("0110");
    CHECK(b.size() == 4);
    CHECK(!b[0]);
    CHECK(b[1]);
    CHECK(b[2]);
    CHECK(!b[3]);
    CHECK(b.mask() == 0b0110);
    CHECK(b.to_string() == "0110");
    b.flip(0);
    CHECK(b.to_string() == "1110");
}

TEST_CASE("parity and dot") {
    CHECK(parity(0) == 0);
    CHECK(parity(0b1011) == 1);
    CHECK(dot(0b1100, 0b0110) == 1);
    CHECK(dot(0b1100, 0b0011) == 0);
}

TEST_CASE("hex helpers round trip") {
    std::vector<std::uint8_t> bytes{0x00, 0x0f, 0xa5, 0xff};
    CHECK(to_hex(bytes) == "000fa5ff");
    CHECK(from_hex("000fa5ff") == bytes);
    CHECK(u64_to_hex(0xabc, 6) == "000abc");
    CHECK(u64_from_hex("000abc") == 0xabc);
}

TEST_CASE("big-endian writers and reader agree") {
    std::vector<std::uint8_t> out;
    put_u8(out, 7);
    put_u32(out, 0x01020304);
    put_u64(out, 0x1122334455667788ull);
    CHECK(out.size() == 13);
    CHECK(out[1] == 0x01);
    CHECK(out[4] == 0x04);
    ByteReader in(out);
    CHECK(in.u8() == 7);
    CHECK(in.u32() == 0x01020304u);
    CHECK(in.u64() == 0x1122334455667788ull);
    CHECK(in.remaining() == 0);
}

TEST_CASE("rng streams are reproducible and split") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) == derive_seed(1, 1));
    Rng c(42);
    auto child = c.fork(3);
    Rng d(42);
    CHECK(c.next() == d.next());  // fork does not advance the parent
    (void)child;
}

TEST_CASE("below is uniform enough on a small range") {
    Rng r(7);
    std::vector<int> counts(6);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        ++counts[r.below(6)];
    }
    for (int c : counts) {
        CHECK(std::abs(c - draws / 6) < 400);  // about 4 sigma
    }
}
