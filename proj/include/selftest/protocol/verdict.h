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

#include <optional>
#include <string>

#include "selftest/protocol/types.h"

namespace selftest::protocol {

// Outcome of one verdict clause evaluation. Reason codes have the form
// "<case>.q<q>.accept" or "<case>.q<q>.<bits|equation>.<mismatch|undefined>",
// where "undefined" means a decoding on the failing clause was undefined.
// Preimage rounds use "P.accept" / "P.chk".
struct Verdict {
    bool accept = false;
    std::string reason;
};

inline constexpr const char *reason_protocol = "protocol";
inline constexpr const char *reason_transport = "transport";

// Case letter of the Hadamard-round verdict for theta.
char selftest_case(std::uint32_t n, Theta theta);
char dimtest_case(Theta theta);

// Hadamard-round verdicts. Undefined decodings never match a bit.
Verdict selftest_hadamard_verdict(std::uint32_t n, Theta theta, int q, const Decodings &dec, const BitString &v);
Verdict dimtest_hadamard_verdict(std::uint32_t n, Theta theta, int q, const Decodings &dec, const BitString &v);
Verdict preimage_verdict(int chk_result);

// The unique v with (y, d) in Sigma(theta, v), or nullopt when a needed
// decoding is undefined (then (y, d) is in no Sigma set).
std::optional<BitString> sigma_label(std::uint32_t n, Theta theta, const Decodings &dec);
bool sigma_set_membership(std::uint32_t n, Theta theta, const BitString &v, const Decodings &dec);
bool sigma_set_membership(std::uint32_t n, Theta theta, const BitString &v, std::span<const entcf::Image> y,
                          std::span<const std::uint32_t> d, std::span<const entcf::Trapdoor> trapdoors);

}  // namespace selftest::protocol
