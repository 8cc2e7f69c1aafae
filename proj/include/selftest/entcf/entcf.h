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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "selftest/core/bits.h"
#include "selftest/core/rng.h"

namespace selftest::entcf {

enum class Backend : std::uint8_t { Ideal = 0, ToyLwe = 1 };
enum class Family : std::uint8_t { F = 0, G = 1 };

const char *to_string(Backend backend);
const char *to_string(Family family);

struct LweDims {
    std::uint32_t n = 0;            // secret / preimage length in bits
    std::uint32_t m = 0;            // number of samples (image coordinates)
    std::uint32_t modulus = 0;      // q, even
    std::uint32_t noise_bound = 0;  // B, noise is uniform on [-B, B]^m

    friend bool operator==(const LweDims &, const LweDims &) = default;
};

struct EntcfParams {
    Backend backend = Backend::Ideal;
    std::uint32_t preimage_bits = 0;     // w, with |X| = 2^w
    std::uint64_t image_space_size = 0;  // |Y| for the ideal backend
    LweDims lwe;                         // toy-LWE backend only

    // Ideal parameters with image space 2^(w+1) + 2^(w-1), so that images
    // outside both ranges exist.
    static EntcfParams ideal(std::uint32_t w);
    static EntcfParams ideal(std::uint32_t w, std::uint64_t image_space_size);
    static EntcfParams toy_lwe(LweDims dims);

    std::uint64_t domain_size() const { return std::uint64_t{1} << preimage_bits; }
    // Throws ParameterError when an invariant is violated.
    void validate() const;

    friend bool operator==(const EntcfParams &, const EntcfParams &) = default;
};

// An element of Y. Toy-LWE images pack their m coordinates in base q,
// coordinate 0 least significant.
struct Image {
    std::uint64_t value = 0;
    friend auto operator<=>(const Image &, const Image &) = default;
};

struct Preimage {
    int b = 0;
    std::uint32_t x = 0;
    friend auto operator<=>(const Preimage &, const Preimage &) = default;
};

// Support point with its probability under f_{k,b}(x).
struct WeightedImage {
    Image image;
    double probability = 0;
};

// Public key. The encoding length depends only on the parameters; F and G
// keys share one layout.
class PublicKey {
   public:
    struct IdealTables {
        std::vector<std::uint64_t> f0, f1;
        friend bool operator==(const IdealTables &, const IdealTables &) = default;
    };
    struct LweMatrix {
        std::vector<std::uint32_t> a;  // m x n, row major, entries in Z_q
        std::vector<std::uint32_t> u;  // m entries in Z_q
        friend bool operator==(const LweMatrix &, const LweMatrix &) = default;
    };

    PublicKey() = default;
    PublicKey(EntcfParams params, IdealTables tables);
    PublicKey(EntcfParams params, LweMatrix matrix);

    const EntcfParams &params() const { return params_; }
    const IdealTables *ideal() const { return std::get_if<IdealTables>(&payload_); }
    const LweMatrix *lwe() const { return std::get_if<LweMatrix>(&payload_); }

    // Supp(f_{k,b}(x)) with probabilities. Throws DomainError for x outside X.
    std::vector<WeightedImage> distribution(int b, std::uint32_t x) const;
    std::vector<Image> support(int b, std::uint32_t x) const;
    bool in_support(Image y, int b, std::uint32_t x) const;
    double probability(Image y, int b, std::uint32_t x) const;
    Image sample(int b, std::uint32_t x, Rng &rng) const;
    // All (b, x) with y in Supp(f_{k,b}(x)), found by search over the public key.
    std::vector<Preimage> preimages(Image y) const;
    // Whether y could be an image at all for these parameters.
    bool in_image_space(Image y) const;

    std::vector<std::uint8_t> encode() const;
    static PublicKey decode(std::span<const std::uint8_t> bytes);

    friend bool operator==(const PublicKey &, const PublicKey &) = default;

   private:
    void check_preimage(int b, std::uint32_t x) const;
    std::vector<std::uint32_t> lwe_center(int b, std::uint32_t x) const;

    EntcfParams params_;
    std::variant<IdealTables, LweMatrix> payload_;
};

// Secret trapdoor. Never leaves the verifier.
class Trapdoor {
   public:
    Trapdoor() = default;
    Trapdoor(Family family, PublicKey key, std::uint64_t secret);

    Family family() const { return family_; }
    const PublicKey &key() const { return key_; }
    // F: the claw shift s with f_{k,1}(x) = f_{k,0}(x xor s).
    // G (toy-LWE): the offset vector c outside the column space of A.
    std::uint64_t secret() const { return secret_; }

    // Ideal backend inverse tables.
    std::optional<std::uint32_t> inverse(int b, Image y) const;

    std::vector<std::uint8_t> encode() const;
    static Trapdoor decode(std::span<const std::uint8_t> bytes);

   private:
    Family family_ = Family::G;
    PublicKey key_;
    std::uint64_t secret_ = 0;
    std::unordered_map<std::uint64_t, std::uint32_t> inverse0_, inverse1_;
};

struct KeyPair {
    PublicKey key;
    Trapdoor trapdoor;
};

// Gen_F / Gen_G. Deterministic given (family, params, rng state).
KeyPair gen_keypair(Family family, const EntcfParams &params, Rng &rng);

// CHK over tuples: 0 iff y_i in Supp(f_{k_i,b_i}(x_i)) for every i.
// Throws ProtocolError on length mismatch.
int chk(std::span<const PublicKey> keys, std::span<const Image> y, const BitString &b,
        std::span<const std::uint32_t> x);

// b-hat: G keys only; nullopt is the undefined symbol.
std::optional<int> decode_b(const Trapdoor &trapdoor, Image y);
// x-hat(b, k, y); nullopt when b is undefined or y is outside the range of f_{k,b}.
std::optional<std::uint32_t> decode_x(std::optional<int> b, const Trapdoor &trapdoor, Image y);
// h-hat: F keys only. d . (x0 xor x1) if y is in the range of f_{k,0} and d != 0.
std::optional<int> decode_h(const Trapdoor &trapdoor, Image y, std::uint32_t d);
// y in the union of both ranges.
bool is_valid_image(const Trapdoor &trapdoor, Image y);

// Toy-LWE helpers exposed for tests.
std::vector<std::uint32_t> unpack_image(const EntcfParams &params, Image y);
Image pack_image(const EntcfParams &params, std::span<const std::uint32_t> coords);

}  // namespace selftest::entcf
