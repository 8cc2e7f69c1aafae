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

#include "selftest/protocol/verdict.h"

#include <functional>

#include "selftest/core/error.h"

namespace selftest::protocol {

namespace {

using Clause = std::optional<const char *>;

Clause check_bits(const Decodings &dec, const BitString &v, const std::function<bool(std::size_t)> &required) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!required(i)) {
            continue;
        }
        if (!dec.bhat[i]) {
            return "bits.undefined";
        }
        if (*dec.bhat[i] != static_cast<int>(v[i])) {
            return "bits.mismatch";
        }
    }
    return std::nullopt;
}

// hhat XOR bhat(other) == v_slot; `other` may be absent (dimension test).
Clause check_equation(const Decodings &dec, const BitString &v, std::size_t slot, std::optional<std::size_t> other) {
    const auto &h = dec.hhat[slot];
    std::optional<int> lhs = h;
    if (other) {
        const auto &b = dec.bhat[*other];
        lhs = (h && b) ? std::optional<int>(*h ^ *b) : std::nullopt;
    }
    if (!lhs) {
        return "equation.undefined";
    }
    if (*lhs != static_cast<int>(v[slot])) {
        return "equation.mismatch";
    }
    return std::nullopt;
}

// v_i xor v_{N+i} == hhat(source(i)) for all i in [N].
Clause check_bell(const Decodings &dec, const BitString &v, std::uint32_t n, bool use_upper) {
    for (std::size_t i = 0; i < n; ++i) {
        const auto &h = dec.hhat[use_upper ? i + n : i];
        if (!h) {
            return "equation.undefined";
        }
        if ((static_cast<int>(v[i]) ^ static_cast<int>(v[i + n])) != *h) {
            return "equation.mismatch";
        }
    }
    return std::nullopt;
}

Verdict finish(char letter, int q, Clause failed) {
    std::string prefix = std::string(1, letter) + ".q" + std::to_string(q) + ".";
    if (failed) {
        return {false, prefix + *failed};
    }
    return {true, prefix + "accept"};
}

void check_shape(std::size_t count, const Decodings &dec, const BitString &v) {
    if (v.size() != count || dec.bhat.size() != count || dec.hhat.size() != count) {
        throw ProtocolError("answer length does not match the number of coordinates");
    }
}

}  // namespace

char selftest_case(std::uint32_t n, Theta theta) {
    switch (theta.kind()) {
        case Theta::Kind::Zero:
            return 'C';
        case Theta::Kind::Diamond:
            return 'D';
        default:
            return theta.index() <= n ? 'A' : 'B';
    }
}

char dimtest_case(Theta theta) {
    return theta.kind() == Theta::Kind::Zero ? 'A' : 'B';
}

Verdict preimage_verdict(int chk_result) {
    return chk_result == 0 ? Verdict{true, "P.accept"} : Verdict{false, "P.chk"};
}

Verdict selftest_hadamard_verdict(std::uint32_t n, Theta theta, int q, const Decodings &dec, const BitString &v) {
    check_shape(2 * std::size_t{n}, dec, v);
    if (q < 0 || q > 3) {
        throw ProtocolError("self-test question must be in {0,1,2,3}");
    }
    const char letter = selftest_case(n, theta);
    auto lower = [n](std::size_t i) { return i < n; };
    auto upper = [n](std::size_t i) { return i >= n; };
    Clause failed;
    if (letter == 'A' || letter == 'B') {
        const std::size_t t = theta.slot();
        const std::size_t p = partner(t, n);
        auto not_theta = [t](std::size_t i) { return i != t; };
        switch (q) {
            case 0:
                failed = check_bits(dec, v, not_theta);
                break;
            case 1:
                failed = check_equation(dec, v, t, p);
                break;
            case 2:
                if (letter == 'A') {
                    failed = check_bits(dec, v, [&](std::size_t i) { return lower(i) && i != t; });
                } else {
                    failed = check_bits(dec, v, lower);
                    if (!failed) {
                        failed = check_equation(dec, v, t, p);
                    }
                }
                break;
            default:
                if (letter == 'A') {
                    failed = check_bits(dec, v, upper);
                    if (!failed) {
                        failed = check_equation(dec, v, t, p);
                    }
                } else {
                    failed = check_bits(dec, v, [&](std::size_t i) { return upper(i) && i != t; });
                }
                break;
        }
    } else if (letter == 'C') {
        switch (q) {
            case 0:
                failed = check_bits(dec, v, [](std::size_t) { return true; });
                break;
            case 1:
                break;
            case 2:
                failed = check_bits(dec, v, lower);
                break;
            default:
                failed = check_bits(dec, v, upper);
                break;
        }
    } else {
        if (q == 2) {
            failed = check_bell(dec, v, n, true);
        } else if (q == 3) {
            failed = check_bell(dec, v, n, false);
        }
    }
    return finish(letter, q, failed);
}

Verdict dimtest_hadamard_verdict(std::uint32_t n, Theta theta, int q, const Decodings &dec, const BitString &v) {
    check_shape(n, dec, v);
    if (q < 0 || q > 1) {
        throw ProtocolError("dimension-test question must be in {0,1}");
    }
    const char letter = dimtest_case(theta);
    Clause failed;
    if (letter == 'A') {
        if (q == 0) {
            failed = check_bits(dec, v, [](std::size_t) { return true; });
        }
    } else {
        const std::size_t t = theta.slot();
        if (q == 0) {
            failed = check_bits(dec, v, [t](std::size_t i) { return i != t; });
        } else {
            failed = check_equation(dec, v, t, std::nullopt);
        }
    }
    return finish(letter, q, failed);
}

std::optional<BitString> sigma_label(std::uint32_t n, Theta theta, const Decodings &dec) {
    const std::size_t count = dec.bhat.size();
    BitString v(count);
    switch (theta.kind()) {
        case Theta::Kind::Zero:
            for (std::size_t i = 0; i < count; ++i) {
                if (!dec.bhat[i]) {
                    return std::nullopt;
                }
                v.set(i, *dec.bhat[i] != 0);
            }
            return v;
        case Theta::Kind::Diamond:
            for (std::size_t i = 0; i < count; ++i) {
                if (!dec.hhat[i]) {
                    return std::nullopt;
                }
                v.set(partner(i, n), *dec.hhat[i] != 0);
            }
            return v;
        default: {
            const std::size_t t = theta.slot();
            for (std::size_t i = 0; i < count; ++i) {
                if (i == t) {
                    continue;
                }
                if (!dec.bhat[i]) {
                    return std::nullopt;
                }
                v.set(i, *dec.bhat[i] != 0);
            }
            if (!dec.hhat[t]) {
                return std::nullopt;
            }
            v.set(t, (*dec.hhat[t] ^ static_cast<int>(v[partner(t, n)])) != 0);
            return v;
        }
    }
}

bool sigma_set_membership(std::uint32_t n, Theta theta, const BitString &v, const Decodings &dec) {
    auto label = sigma_label(n, theta, dec);
    return label && *label == v;
}

bool sigma_set_membership(std::uint32_t n, Theta theta, const BitString &v, std::span<const entcf::Image> y,
                          std::span<const std::uint32_t> d, std::span<const entcf::Trapdoor> trapdoors) {
    return sigma_set_membership(n, theta, v, decode_all(trapdoors, y, d));
}

}  // namespace selftest::protocol
