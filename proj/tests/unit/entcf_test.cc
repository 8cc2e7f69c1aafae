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

#include <map>
#include <set>

#include "selftest/core/error.h"
#include "selftest/entcf/entcf.h"
#include "selftest/harness/entcf_check.h"

using namespace selftest;
using namespace selftest::entcf;

namespace {

// Centered distance of a - b in Z_q.
std::uint32_t zq_distance(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    const std::uint32_t d = (a + q - b) % q;
    return std::min(d, q - d);
}

}  // namespace

TEST_CASE("ideal parameters") {
    auto p = EntcfParams::ideal(3);
    CHECK(p.domain_size() == 8);
    CHECK(p.image_space_size == 16 + 4);
    CHECK_THROWS_AS(EntcfParams::ideal(0), ParameterError);
    CHECK_THROWS_AS(EntcfParams::ideal(3, 10), ParameterError);
}

TEST_CASE("ideal F keys are claw pairs with the recorded shift") {
    Rng rng(11);
    const auto params = EntcfParams::ideal(4);
    for (int k = 0; k < 8; ++k) {
        const auto pair = gen_keypair(Family::F, params, rng);
        const auto &t = *pair.key.ideal();
        const auto s = pair.trapdoor.secret();
        REQUIRE(s != 0);
        std::set<std::uint64_t> r0(t.f0.begin(), t.f0.end()), r1(t.f1.begin(), t.f1.end());
        CHECK(r0 == r1);
        CHECK(r0.size() == 16);  // f0 injective
        for (std::uint32_t x = 0; x < 16; ++x) {
            CHECK(t.f1[x] == t.f0[x ^ s]);
            // h-hat against a claw found by scanning the tables.
            std::uint32_t x0 = 99, x1 = 99;
            for (std::uint32_t z = 0; z < 16; ++z) {
                x0 = t.f0[z] == t.f0[x] ? z : x0;
                x1 = t.f1[z] == t.f0[x] ? z : x1;
            }
            for (std::uint32_t d = 1; d < 16; ++d) {
                CHECK(decode_h(pair.trapdoor, Image{t.f0[x]}, d) == dot(d, x0 ^ x1));
            }
            CHECK(!decode_h(pair.trapdoor, Image{t.f0[x]}, 0).has_value());
        }
    }
}

TEST_CASE("ideal G keys have disjoint ranges and invert") {
    Rng rng(12);
    const auto params = EntcfParams::ideal(3);
    const auto pair = gen_keypair(Family::G, params, rng);
    const auto &t = *pair.key.ideal();
    std::set<std::uint64_t> r0(t.f0.begin(), t.f0.end()), r1(t.f1.begin(), t.f1.end());
    for (auto y : r0) {
        CHECK(r1.count(y) == 0);
    }
    for (std::uint32_t x = 0; x < 8; ++x) {
        CHECK(decode_b(pair.trapdoor, Image{t.f0[x]}) == 0);
        CHECK(decode_b(pair.trapdoor, Image{t.f1[x]}) == 1);
        CHECK(decode_x(1, pair.trapdoor, Image{t.f1[x]}) == x);
        CHECK(!decode_x(0, pair.trapdoor, Image{t.f1[x]}).has_value());
    }
    CHECK_THROWS_AS(decode_h(pair.trapdoor, Image{t.f0[0]}, 1), FamilyError);
}

TEST_CASE("toy-LWE support matches the infinity-norm ball") {
    const auto params = EntcfParams::toy_lwe({2, 3, 16, 1});
    Rng rng(13);
    for (auto family : {Family::F, Family::G}) {
        const auto pair = gen_keypair(family, params, rng);
        const auto &m = *pair.key.lwe();
        for (int b = 0; b < 2; ++b) {
            for (std::uint32_t x = 0; x < 4; ++x) {
                const auto support = pair.key.support(b, x);
                CHECK(support.size() == 27);
                std::vector<std::uint32_t> centre(3);
                for (std::uint32_t j = 0; j < 3; ++j) {
                    std::uint32_t acc = b ? m.u[j] : 0;
                    for (std::uint32_t k = 0; k < 2; ++k) {
                        acc += m.a[j * 2 + k] * ((x >> k) & 1);
                    }
                    centre[j] = acc % 16;
                }
                // Every image in Z_16^3 is in the support iff within B of the centre.
                for (std::uint64_t yv = 0; yv < 16 * 16 * 16; ++yv) {
                    const auto coords = unpack_image(params, Image{yv});
                    bool near = true;
                    for (std::uint32_t j = 0; j < 3; ++j) {
                        near = near && zq_distance(coords[j], centre[j], 16) <= 1;
                    }
                    CHECK(pair.key.in_support(Image{yv}, b, x) == near);
                }
            }
        }
    }
}

TEST_CASE("toy-LWE decoding agrees with exhaustive search") {
    const auto params = EntcfParams::toy_lwe({2, 3, 16, 1});
    Rng rng(14);
    const auto f = gen_keypair(Family::F, params, rng);
    const auto g = gen_keypair(Family::G, params, rng);
    for (std::uint64_t yv = 0; yv < 16 * 16 * 16; ++yv) {
        const Image y{yv};
        std::map<int, std::vector<std::uint32_t>> pre_g, pre_f;
        for (int b = 0; b < 2; ++b) {
            for (std::uint32_t x = 0; x < 4; ++x) {
                if (g.key.in_support(y, b, x)) {
                    pre_g[b].push_back(x);
                }
                if (f.key.in_support(y, b, x)) {
                    pre_f[b].push_back(x);
                }
            }
        }
        CHECK(!(pre_g.count(0) && pre_g.count(1)));
        if (pre_g.empty()) {
            CHECK(!decode_b(g.trapdoor, y).has_value());
        } else {
            const int b = pre_g.begin()->first;
            CHECK(decode_b(g.trapdoor, y) == b);
            CHECK(decode_x(b, g.trapdoor, y) == pre_g[b].front());
        }
        CHECK(pre_f.count(0) == pre_f.count(1));
        if (pre_f.count(0)) {
            const auto x0 = pre_f[0].front(), x1 = pre_f[1].front();
            CHECK((x0 ^ x1) == f.trapdoor.secret());
            for (std::uint32_t d = 1; d < 4; ++d) {
                CHECK(decode_h(f.trapdoor, y, d) == dot(d, x0 ^ x1));
            }
        } else {
            CHECK(!decode_h(f.trapdoor, y, 1).has_value());
        }
    }
}

TEST_CASE("toy-LWE parameter invariants") {
    CHECK_THROWS_AS(EntcfParams::toy_lwe({2, 3, 6, 1}), ParameterError);   // 2Bm >= q
    CHECK_THROWS_AS(EntcfParams::toy_lwe({3, 3, 64, 1}), ParameterError);  // m <= n
    CHECK_THROWS_AS(EntcfParams::toy_lwe({2, 3, 17, 1}), ParameterError);  // odd q
}

TEST_CASE("chk checks every coordinate") {
    Rng rng(15);
    const auto params = EntcfParams::ideal(2);
    const auto a = gen_keypair(Family::G, params, rng);
    const auto b = gen_keypair(Family::F, params, rng);
    std::vector<PublicKey> keys{a.key, b.key};
    std::vector<Image> y{Image{a.key.ideal()->f1[2]}, Image{b.key.ideal()->f0[1]}};
    CHECK(chk(keys, y, BitString::from_string("10"), std::vector<std::uint32_t>{2, 1}) == 0);
    CHECK(chk(keys, y, BitString::from_string("00"), std::vector<std::uint32_t>{2, 1}) == 1);
    CHECK(chk(keys, y, BitString::from_string("11"), std::vector<std::uint32_t>{2, 1 ^ static_cast<std::uint32_t>(b.trapdoor.secret())}) == 0);
    CHECK_THROWS_AS(chk(keys, y, BitString::from_string("1"), std::vector<std::uint32_t>{2}), ProtocolError);
}

TEST_CASE("key codecs round trip") {
    Rng rng(16);
    for (auto params : {EntcfParams::ideal(3), EntcfParams::toy_lwe({3, 5, 32, 1})}) {
        for (auto family : {Family::F, Family::G}) {
            const auto pair = gen_keypair(family, params, rng);
            CHECK(PublicKey::decode(pair.key.encode()) == pair.key);
            const auto td = Trapdoor::decode(pair.trapdoor.encode());
            CHECK(td.family() == family);
            CHECK(td.secret() == pair.trapdoor.secret());
        }
    }
    CHECK_THROWS_AS(PublicKey::decode(std::vector<std::uint8_t>{0xee}), ProtocolError);
}

TEST_CASE("property suite is green on both backends at small w") {
    for (auto backend : {Backend::Ideal, Backend::ToyLwe}) {
        harness::EntcfCheckConfig c;
        c.backend = backend;
        c.max_w = 3;
        c.keys_per_family = 2;
        const auto report = harness::run_entcf_check(c);
        CHECK(report.ok());
        CHECK(report.properties.size() >= 10);
    }
}
