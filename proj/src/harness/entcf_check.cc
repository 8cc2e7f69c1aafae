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

#include "selftest/harness/entcf_check.h"

#include <map>
#include <set>
#include <sstream>

#include "selftest/core/rng.h"

namespace selftest::harness {

using entcf::Family;
using entcf::Image;
using entcf::Preimage;
using nlohmann::json;

entcf::EntcfParams EntcfCheckConfig::params(std::uint32_t w) const {
    if (backend == entcf::Backend::Ideal) {
        return entcf::EntcfParams::ideal(w);
    }
    return entcf::EntcfParams::toy_lwe({w, lwe_m == 0 ? w + 2 : lwe_m, lwe_modulus, lwe_noise});
}

bool EntcfCheckReport::ok() const {
    for (const auto &p : properties) {
        if (p.failures != 0 || p.cases == 0) {
            return false;
        }
    }
    return true;
}

json EntcfCheckReport::to_json() const {
    json rows = json::array();
    for (const auto &p : properties) {
        json row = {{"property", p.name}, {"cases", p.cases}, {"failures", p.failures}};
        if (p.failures) {
            row["first_failure"] = p.first_failure;
        }
        rows.push_back(row);
    }
    return {{"properties", rows}, {"ok", ok()}};
}

namespace {

class Tally {
   public:
    void check(const std::string &property, bool pass, const std::string &context) {
        auto &r = results_[property];
        r.name = property;
        ++r.cases;
        if (!pass && r.failures++ == 0) {
            r.first_failure = context;
        }
    }
    std::vector<PropertyResult> take() {
        std::vector<PropertyResult> out;
        for (auto &[name, r] : results_) {
            out.push_back(std::move(r));
        }
        return out;
    }

   private:
    std::map<std::string, PropertyResult> results_;
};

struct Oracle {
    // Every (b, x) whose forward distribution puts mass on y.
    std::map<std::uint64_t, std::set<Preimage>> preimages;
    // Support of f_{k,b}(x) with probabilities, indexed [b][x].
    std::vector<std::vector<std::map<std::uint64_t, double>>> supports;
};

Oracle build_oracle(const entcf::PublicKey &key) {
    const std::uint64_t domain = key.params().domain_size();
    Oracle o;
    o.supports.assign(2, std::vector<std::map<std::uint64_t, double>>(domain));
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < domain; ++x) {
            for (const auto &wi : key.distribution(b, x)) {
                if (wi.probability > 0) {
                    o.supports[b][x][wi.image.value] += wi.probability;
                    o.preimages[wi.image.value].insert(Preimage{b, x});
                }
            }
        }
    }
    return o;
}

bool has_b(const std::set<Preimage> &pre, int b) {
    for (const auto &p : pre) {
        if (p.b == b) {
            return true;
        }
    }
    return false;
}

std::optional<std::uint32_t> x_for(const std::set<Preimage> &pre, int b) {
    std::optional<std::uint32_t> out;
    for (const auto &p : pre) {
        if (p.b == b) {
            if (out) {
                return std::nullopt;
            }
            out = p.x;
        }
    }
    return out;
}

// Images to probe: the whole space when small, otherwise the range plus
// uniform samples from the image space.
std::vector<std::uint64_t> probe_images(const entcf::EntcfParams &params, const Oracle &o, Rng &rng) {
    std::vector<std::uint64_t> out;
    constexpr std::uint64_t exhaustive_limit = 1 << 12;
    if (params.image_space_size <= exhaustive_limit) {
        for (std::uint64_t y = 0; y < params.image_space_size; ++y) {
            out.push_back(y);
        }
        return out;
    }
    for (const auto &[y, pre] : o.preimages) {
        out.push_back(y);
    }
    for (int k = 0; k < 512; ++k) {
        out.push_back(rng.below(params.image_space_size));
    }
    return out;
}

void check_key(const entcf::KeyPair &pair, Family family, Rng &rng, const std::string &label, Tally &tally) {
    const auto &key = pair.key;
    const auto &td = pair.trapdoor;
    const auto &params = key.params();
    const std::uint64_t domain = params.domain_size();
    const Oracle o = build_oracle(key);

    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < domain; ++x) {
            double total = 0;
            for (const auto &[y, p] : o.supports[b][x]) {
                total += p;
            }
            tally.check("distribution normalized", std::abs(total - 1) < 1e-12,
                        label + " b=" + std::to_string(b) + " x=" + std::to_string(x));
        }
    }

    if (family == Family::F) {
        tally.check("claw shift nonzero", td.secret() != 0 && td.secret() < domain, label);
        for (std::uint32_t x = 0; x < domain; ++x) {
            const auto x1 = static_cast<std::uint32_t>(x ^ td.secret());
            tally.check("claw matching", o.supports[0][x] == o.supports[1][x1],
                        label + " x0=" + std::to_string(x) + " x1=" + std::to_string(x1));
        }
        for (const auto &[y, pre] : o.preimages) {
            tally.check("range equality (F)", has_b(pre, 0) && has_b(pre, 1), label + " y=" + std::to_string(y));
            const auto x0 = x_for(pre, 0);
            const auto x1 = x_for(pre, 1);
            tally.check("unique claw per image (F)", x0 && x1 && pre.size() == 2, label + " y=" + std::to_string(y));
        }
    } else {
        for (const auto &[y, pre] : o.preimages) {
            tally.check("range disjointness (G)", has_b(pre, 0) != has_b(pre, 1), label + " y=" + std::to_string(y));
            tally.check("injective (G)", pre.size() == 1, label + " y=" + std::to_string(y));
        }
    }

    const std::vector<entcf::PublicKey> keys{key};
    for (const std::uint64_t yv : probe_images(params, o, rng)) {
        const Image y{yv};
        const auto it = o.preimages.find(yv);
        const std::set<Preimage> empty;
        const auto &pre = it == o.preimages.end() ? empty : it->second;
        const std::string ctx = label + " y=" + std::to_string(yv);

        for (int b = 0; b < 2; ++b) {
            for (std::uint32_t x = 0; x < domain; ++x) {
                BitString bs(1, static_cast<std::uint64_t>(b));
                const std::vector<std::uint32_t> xs{x};
                const bool member = pre.count(Preimage{b, x}) != 0;
                tally.check("CHK == support membership", (entcf::chk(keys, std::vector<Image>{y}, bs, xs) == 0) == member,
                            ctx + " b=" + std::to_string(b) + " x=" + std::to_string(x));
            }
            const auto expected = x_for(pre, b);
            tally.check("decode_x inverts f_b", entcf::decode_x(b, td, y) == expected, ctx + " b=" + std::to_string(b));
        }
        tally.check("decode_x of undefined b", !entcf::decode_x(std::nullopt, td, y).has_value(), ctx);
        tally.check("valid image == in range", entcf::is_valid_image(td, y) == !pre.empty(), ctx);

        if (family == Family::G) {
            std::optional<int> expected;
            if (!pre.empty()) {
                expected = pre.begin()->b;
            }
            tally.check("decode_b inverts G", entcf::decode_b(td, y) == expected, ctx);
        } else {
            const auto x0 = x_for(pre, 0);
            const auto x1 = x_for(pre, 1);
            for (std::uint32_t d = 0; d < domain; ++d) {
                std::optional<int> expected;
                if (d != 0 && x0 && x1) {
                    expected = dot(d, *x0 ^ *x1);
                }
                tally.check("hhat == d.(x0 xor x1)", entcf::decode_h(td, y, d) == expected,
                            ctx + " d=" + std::to_string(d));
                if (expected) {
                    tally.check("hhat == d.s", *expected == dot(d, td.secret()), ctx + " d=" + std::to_string(d));
                }
            }
        }
    }

    const auto key_bytes = key.encode();
    tally.check("public key codec round trip", entcf::PublicKey::decode(key_bytes) == key, label);
    const auto td_copy = entcf::Trapdoor::decode(td.encode());
    tally.check("trapdoor codec round trip",
                td_copy.family() == td.family() && td_copy.secret() == td.secret() && td_copy.key() == td.key(), label);
}

}  // namespace

EntcfCheckReport run_entcf_check(const EntcfCheckConfig &config) {
    Tally tally;
    Rng rng(config.seed);
    for (std::uint32_t w = 1; w <= config.max_w; ++w) {
        const auto params = config.params(w);
        for (Family family : {Family::F, Family::G}) {
            for (std::size_t k = 0; k < config.keys_per_family; ++k) {
                const auto pair = entcf::gen_keypair(family, params, rng);
                std::ostringstream label;
                label << entcf::to_string(config.backend) << " w=" << w << " " << entcf::to_string(family) << "#"
                      << k;
                check_key(pair, family, rng, label.str(), tally);
            }
        }
    }
    return {tally.take()};
}

}  // namespace selftest::harness
