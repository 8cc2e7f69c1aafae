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

#include "selftest/entcf/entcf.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "selftest/core/error.h"

namespace selftest::entcf {

namespace {

constexpr std::uint8_t key_format_version = 1;
constexpr std::uint32_t max_preimage_bits = 20;
constexpr std::uint64_t max_ideal_image_space = std::uint64_t{1} << 26;
constexpr std::uint64_t max_lwe_support = std::uint64_t{1} << 20;

std::uint64_t ipow_checked(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t out = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (out > std::numeric_limits<std::uint64_t>::max() / base) {
            return 0;
        }
        out *= base;
    }
    return out;
}

// Reduced basis of a GF(2) span, used for column-space membership.
class Gf2Span {
   public:
    bool add(std::uint64_t v) {
        v = reduce(v);
        if (v == 0) {
            return false;
        }
        basis_.push_back(v);
        std::sort(basis_.begin(), basis_.end(), std::greater<>());
        return true;
    }
    bool contains(std::uint64_t v) const { return reduce(v) == 0; }

   private:
    std::uint64_t reduce(std::uint64_t v) const {
        for (std::uint64_t b : basis_) {
            v = std::min(v, v ^ b);
        }
        return v;
    }
    std::vector<std::uint64_t> basis_;
};

std::int64_t centered(std::int64_t value, std::int64_t modulus) {
    std::int64_t r = ((value % modulus) + modulus) % modulus;
    if (r > modulus / 2) {
        r -= modulus;
    }
    return r;
}

}  // namespace

const char *to_string(Backend backend) {
    return backend == Backend::Ideal ? "ideal" : "toylwe";
}

const char *to_string(Family family) {
    return family == Family::F ? "F" : "G";
}

EntcfParams EntcfParams::ideal(std::uint32_t w) {
    std::uint64_t slack = w >= 1 ? (std::uint64_t{1} << (w - 1)) : 1;
    return ideal(w, (std::uint64_t{1} << (w + 1)) + slack);
}

EntcfParams EntcfParams::ideal(std::uint32_t w, std::uint64_t image_space_size) {
    EntcfParams p;
    p.backend = Backend::Ideal;
    p.preimage_bits = w;
    p.image_space_size = image_space_size;
    p.validate();
    return p;
}

EntcfParams EntcfParams::toy_lwe(LweDims dims) {
    EntcfParams p;
    p.backend = Backend::ToyLwe;
    p.preimage_bits = dims.n;
    p.lwe = dims;
    p.image_space_size = ipow_checked(dims.modulus, dims.m);
    p.validate();
    return p;
}

void EntcfParams::validate() const {
    if (preimage_bits < 1 || preimage_bits > max_preimage_bits) {
        throw ParameterError("preimage_bits must be in [1, " + std::to_string(max_preimage_bits) + "]");
    }
    if (image_space_size < domain_size()) {
        throw ParameterError("image_space_size must be at least 2^w");
    }
    if (backend == Backend::Ideal) {
        if (image_space_size < (domain_size() << 1)) {
            throw ParameterError("ideal backend needs image_space_size >= 2^(w+1)");
        }
        if (image_space_size > max_ideal_image_space) {
            throw ParameterError("ideal image space too large for table-based keys");
        }
        return;
    }
    const LweDims &d = lwe;
    if (d.n != preimage_bits) {
        throw ParameterError("toy-LWE preimage length must equal n");
    }
    if (d.m <= d.n || d.m > 64) {
        throw ParameterError("toy-LWE needs n < m <= 64");
    }
    if (d.modulus < 4 || d.modulus % 2 != 0) {
        throw ParameterError("toy-LWE modulus must be even and at least 4");
    }
    if (std::uint64_t{2} * d.noise_bound * d.m >= d.modulus) {
        throw ParameterError("toy-LWE requires 2*B*m < q");
    }
    std::uint64_t space = ipow_checked(d.modulus, d.m);
    if (space == 0) {
        throw ParameterError("toy-LWE image q^m does not fit in 64 bits");
    }
    if (image_space_size != space) {
        throw ParameterError("toy-LWE image_space_size must equal q^m");
    }
    std::uint64_t support = ipow_checked(2 * std::uint64_t{d.noise_bound} + 1, d.m);
    if (support == 0 || support > max_lwe_support) {
        throw ParameterError("toy-LWE noise support (2B+1)^m too large to enumerate");
    }
}

std::vector<std::uint32_t> unpack_image(const EntcfParams &params, Image y) {
    std::vector<std::uint32_t> out(params.lwe.m);
    std::uint64_t v = y.value;
    for (auto &c : out) {
        c = static_cast<std::uint32_t>(v % params.lwe.modulus);
        v /= params.lwe.modulus;
    }
    return out;
}

Image pack_image(const EntcfParams &params, std::span<const std::uint32_t> coords) {
    std::uint64_t v = 0;
    for (std::size_t j = coords.size(); j-- > 0;) {
        v = v * params.lwe.modulus + coords[j];
    }
    return Image{v};
}

PublicKey::PublicKey(EntcfParams params, IdealTables tables) : params_(params), payload_(std::move(tables)) {
    const auto &t = std::get<IdealTables>(payload_);
    if (params_.backend != Backend::Ideal || t.f0.size() != params_.domain_size() ||
        t.f1.size() != params_.domain_size()) {
        throw ParameterError("ideal key tables do not match parameters");
    }
}

PublicKey::PublicKey(EntcfParams params, LweMatrix matrix) : params_(params), payload_(std::move(matrix)) {
    const auto &mat = std::get<LweMatrix>(payload_);
    if (params_.backend != Backend::ToyLwe || mat.a.size() != std::size_t{params_.lwe.m} * params_.lwe.n ||
        mat.u.size() != params_.lwe.m) {
        throw ParameterError("toy-LWE key matrix does not match parameters");
    }
}

void PublicKey::check_preimage(int b, std::uint32_t x) const {
    if (b != 0 && b != 1) {
        throw DomainError("b must be a bit");
    }
    if (x >= params_.domain_size()) {
        throw DomainError("preimage outside X");
    }
}

std::vector<std::uint32_t> PublicKey::lwe_center(int b, std::uint32_t x) const {
    const auto &mat = std::get<LweMatrix>(payload_);
    const auto &d = params_.lwe;
    std::vector<std::uint32_t> center(d.m);
    for (std::uint32_t j = 0; j < d.m; ++j) {
        std::uint64_t acc = b ? mat.u[j] : 0;
        for (std::uint32_t k = 0; k < d.n; ++k) {
            if ((x >> k) & 1) {
                acc += mat.a[std::size_t{j} * d.n + k];
            }
        }
        center[j] = static_cast<std::uint32_t>(acc % d.modulus);
    }
    return center;
}

std::vector<WeightedImage> PublicKey::distribution(int b, std::uint32_t x) const {
    check_preimage(b, x);
    if (const auto *t = ideal()) {
        return {{Image{(b ? t->f1 : t->f0)[x]}, 1.0}};
    }
    const auto &d = params_.lwe;
    auto center = lwe_center(b, x);
    const std::int64_t width = 2 * std::int64_t{d.noise_bound} + 1;
    std::uint64_t count = 1;
    for (std::uint32_t j = 0; j < d.m; ++j) {
        count *= static_cast<std::uint64_t>(width);
    }
    const double p = 1.0 / static_cast<double>(count);
    std::vector<WeightedImage> out;
    out.reserve(count);
    std::vector<std::uint32_t> coords(d.m);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        std::uint64_t rest = idx;
        for (std::uint32_t j = 0; j < d.m; ++j) {
            std::int64_t e = static_cast<std::int64_t>(rest % width) - d.noise_bound;
            rest /= width;
            std::int64_t v = (static_cast<std::int64_t>(center[j]) + e) % d.modulus;
            coords[j] = static_cast<std::uint32_t>((v + d.modulus) % d.modulus);
        }
        out.push_back({pack_image(params_, coords), p});
    }
    std::sort(out.begin(), out.end(), [](const auto &l, const auto &r) { return l.image < r.image; });
    return out;
}

std::vector<Image> PublicKey::support(int b, std::uint32_t x) const {
    std::vector<Image> out;
    for (const auto &wi : distribution(b, x)) {
        out.push_back(wi.image);
    }
    return out;
}

bool PublicKey::in_support(Image y, int b, std::uint32_t x) const {
    check_preimage(b, x);
    if (const auto *t = ideal()) {
        return (b ? t->f1 : t->f0)[x] == y.value;
    }
    if (!in_image_space(y)) {
        return false;
    }
    const auto &d = params_.lwe;
    auto center = lwe_center(b, x);
    auto coords = unpack_image(params_, y);
    for (std::uint32_t j = 0; j < d.m; ++j) {
        std::int64_t diff = centered(static_cast<std::int64_t>(coords[j]) - center[j], d.modulus);
        if (diff > static_cast<std::int64_t>(d.noise_bound) || -diff > static_cast<std::int64_t>(d.noise_bound)) {
            return false;
        }
    }
    return true;
}

double PublicKey::probability(Image y, int b, std::uint32_t x) const {
    if (!in_support(y, b, x)) {
        return 0;
    }
    if (ideal()) {
        return 1;
    }
    double count = 1;
    for (std::uint32_t j = 0; j < params_.lwe.m; ++j) {
        count *= 2.0 * params_.lwe.noise_bound + 1;
    }
    return 1.0 / count;
}

Image PublicKey::sample(int b, std::uint32_t x, Rng &rng) const {
    check_preimage(b, x);
    if (const auto *t = ideal()) {
        return Image{(b ? t->f1 : t->f0)[x]};
    }
    const auto &d = params_.lwe;
    auto coords = lwe_center(b, x);
    for (auto &c : coords) {
        std::int64_t e = static_cast<std::int64_t>(rng.below(2 * std::uint64_t{d.noise_bound} + 1)) - d.noise_bound;
        std::int64_t v = (static_cast<std::int64_t>(c) + e) % d.modulus;
        c = static_cast<std::uint32_t>((v + d.modulus) % d.modulus);
    }
    return pack_image(params_, coords);
}

std::vector<Preimage> PublicKey::preimages(Image y) const {
    std::vector<Preimage> out;
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < params_.domain_size(); ++x) {
            if (in_support(y, b, x)) {
                out.push_back({b, x});
            }
        }
    }
    return out;
}

bool PublicKey::in_image_space(Image y) const {
    return y.value < params_.image_space_size;
}

std::vector<std::uint8_t> PublicKey::encode() const {
    std::vector<std::uint8_t> out;
    put_u8(out, key_format_version);
    put_u8(out, static_cast<std::uint8_t>(params_.backend));
    put_u32(out, params_.preimage_bits);
    put_u64(out, params_.image_space_size);
    put_u32(out, params_.lwe.n);
    put_u32(out, params_.lwe.m);
    put_u32(out, params_.lwe.modulus);
    put_u32(out, params_.lwe.noise_bound);
    if (const auto *t = ideal()) {
        for (auto v : t->f0) {
            put_u64(out, v);
        }
        for (auto v : t->f1) {
            put_u64(out, v);
        }
    } else {
        const auto &mat = std::get<LweMatrix>(payload_);
        for (auto v : mat.a) {
            put_u32(out, v);
        }
        for (auto v : mat.u) {
            put_u32(out, v);
        }
    }
    return out;
}

PublicKey PublicKey::decode(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (in.u8() != key_format_version) {
        throw ProtocolError("unsupported public key format version");
    }
    EntcfParams p;
    std::uint8_t backend = in.u8();
    if (backend > 1) {
        throw ProtocolError("unknown ENTCF backend tag");
    }
    p.backend = static_cast<Backend>(backend);
    p.preimage_bits = in.u32();
    p.image_space_size = in.u64();
    p.lwe.n = in.u32();
    p.lwe.m = in.u32();
    p.lwe.modulus = in.u32();
    p.lwe.noise_bound = in.u32();
    try {
        p.validate();
    } catch (const ParameterError &e) {
        throw ProtocolError(std::string("encoded key has invalid parameters: ") + e.what());
    }
    PublicKey key;
    if (p.backend == Backend::Ideal) {
        IdealTables t;
        t.f0.resize(p.domain_size());
        t.f1.resize(p.domain_size());
        for (auto &v : t.f0) {
            v = in.u64();
        }
        for (auto &v : t.f1) {
            v = in.u64();
        }
        for (const auto *table : {&t.f0, &t.f1}) {
            for (auto v : *table) {
                if (v >= p.image_space_size) {
                    throw ProtocolError("encoded key table entry outside image space");
                }
            }
        }
        key = PublicKey(p, std::move(t));
    } else {
        LweMatrix mat;
        mat.a.resize(std::size_t{p.lwe.m} * p.lwe.n);
        mat.u.resize(p.lwe.m);
        for (auto &v : mat.a) {
            v = in.u32();
        }
        for (auto &v : mat.u) {
            v = in.u32();
        }
        for (const auto *vec : {&mat.a, &mat.u}) {
            for (auto v : *vec) {
                if (v >= p.lwe.modulus) {
                    throw ProtocolError("encoded key entry outside Z_q");
                }
            }
        }
        key = PublicKey(p, std::move(mat));
    }
    if (in.remaining() != 0) {
        throw ProtocolError("trailing bytes after public key");
    }
    return key;
}

Trapdoor::Trapdoor(Family family, PublicKey key, std::uint64_t secret)
    : family_(family), key_(std::move(key)), secret_(secret) {
    if (const auto *t = key_.ideal()) {
        for (std::uint32_t x = 0; x < t->f0.size(); ++x) {
            inverse0_.emplace(t->f0[x], x);
            inverse1_.emplace(t->f1[x], x);
        }
    }
}

std::optional<std::uint32_t> Trapdoor::inverse(int b, Image y) const {
    const auto &table = b ? inverse1_ : inverse0_;
    auto it = table.find(y.value);
    if (it == table.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::uint8_t> Trapdoor::encode() const {
    std::vector<std::uint8_t> out;
    put_u8(out, key_format_version);
    put_u8(out, static_cast<std::uint8_t>(family_));
    put_u64(out, secret_);
    auto key_bytes = key_.encode();
    put_u32(out, static_cast<std::uint32_t>(key_bytes.size()));
    out.insert(out.end(), key_bytes.begin(), key_bytes.end());
    return out;
}

Trapdoor Trapdoor::decode(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (in.u8() != key_format_version) {
        throw ProtocolError("unsupported trapdoor format version");
    }
    std::uint8_t family = in.u8();
    if (family > 1) {
        throw ProtocolError("unknown family tag");
    }
    std::uint64_t secret = in.u64();
    std::uint32_t len = in.u32();
    PublicKey key = PublicKey::decode(in.take(len));
    if (in.remaining() != 0) {
        throw ProtocolError("trailing bytes after trapdoor");
    }
    return Trapdoor(static_cast<Family>(family), std::move(key), secret);
}

namespace {

KeyPair gen_ideal(Family family, const EntcfParams &params, Rng &rng) {
    const std::uint64_t domain = params.domain_size();
    const std::uint64_t needed = family == Family::F ? domain : 2 * domain;
    std::vector<std::uint64_t> images(params.image_space_size);
    std::iota(images.begin(), images.end(), std::uint64_t{0});
    for (std::uint64_t i = 0; i < needed; ++i) {
        std::uint64_t j = i + rng.below(images.size() - i);
        std::swap(images[i], images[j]);
    }
    PublicKey::IdealTables t;
    t.f0.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(domain));
    std::uint64_t secret = 0;
    if (family == Family::F) {
        secret = 1 + rng.below(domain - 1);
        t.f1.resize(domain);
        for (std::uint64_t x = 0; x < domain; ++x) {
            t.f1[x] = t.f0[x ^ secret];
        }
    } else {
        t.f1.assign(images.begin() + static_cast<std::ptrdiff_t>(domain),
                    images.begin() + static_cast<std::ptrdiff_t>(2 * domain));
    }
    PublicKey key(params, std::move(t));
    return {key, Trapdoor(family, key, secret)};
}

// A = (q/2) A2 with A2 binary of full column rank, so x -> A x mod q is
// XOR-linear on binary x. F: u = (q/2) A2 s gives exact claws
// f_{k,1}(x) = f_{k,0}(x xor s). G: u = (q/2) c with c outside the column
// space of A2; since 2B < q/2 the two ranges are disjoint.
KeyPair gen_toy_lwe(Family family, const EntcfParams &params, Rng &rng) {
    const auto &d = params.lwe;
    const std::uint32_t half = d.modulus / 2;
    std::vector<std::uint64_t> columns(d.n);
    Gf2Span span;
    while (true) {
        span = Gf2Span();
        bool full_rank = true;
        for (auto &col : columns) {
            col = rng.next() & ((d.m == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << d.m) - 1));
            if (!span.add(col)) {
                full_rank = false;
                break;
            }
        }
        if (full_rank) {
            break;
        }
    }
    PublicKey::LweMatrix mat;
    mat.a.assign(std::size_t{d.m} * d.n, 0);
    for (std::uint32_t k = 0; k < d.n; ++k) {
        for (std::uint32_t j = 0; j < d.m; ++j) {
            if ((columns[k] >> j) & 1) {
                mat.a[std::size_t{j} * d.n + k] = half;
            }
        }
    }
    std::uint64_t secret = 0;
    std::uint64_t offset = 0;
    if (family == Family::F) {
        secret = 1 + rng.below(params.domain_size() - 1);
        for (std::uint32_t k = 0; k < d.n; ++k) {
            if ((secret >> k) & 1) {
                offset ^= columns[k];
            }
        }
    } else {
        const std::uint64_t mask = (d.m == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << d.m) - 1);
        do {
            offset = rng.next() & mask;
        } while (span.contains(offset));
        secret = offset;
    }
    mat.u.assign(d.m, 0);
    for (std::uint32_t j = 0; j < d.m; ++j) {
        if ((offset >> j) & 1) {
            mat.u[j] = half;
        }
    }
    PublicKey key(params, std::move(mat));
    return {key, Trapdoor(family, key, secret)};
}

}  // namespace

KeyPair gen_keypair(Family family, const EntcfParams &params, Rng &rng) {
    params.validate();
    return params.backend == Backend::Ideal ? gen_ideal(family, params, rng) : gen_toy_lwe(family, params, rng);
}

int chk(std::span<const PublicKey> keys, std::span<const Image> y, const BitString &b,
        std::span<const std::uint32_t> x) {
    if (keys.empty() || y.size() != keys.size() || b.size() != keys.size() || x.size() != keys.size()) {
        throw ProtocolError("CHK tuple lengths differ");
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (x[i] >= keys[i].params().domain_size() || !keys[i].in_support(y[i], b[i] ? 1 : 0, x[i])) {
            return 1;
        }
    }
    return 0;
}

std::optional<int> decode_b(const Trapdoor &trapdoor, Image y) {
    if (trapdoor.family() != Family::G) {
        throw FamilyError("decode_b is defined for injective (G) keys only");
    }
    const PublicKey &key = trapdoor.key();
    if (key.ideal()) {
        for (int b = 0; b < 2; ++b) {
            if (trapdoor.inverse(b, y)) {
                return b;
            }
        }
        return std::nullopt;
    }
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < key.params().domain_size(); ++x) {
            if (key.in_support(y, b, x)) {
                return b;
            }
        }
    }
    return std::nullopt;
}

std::optional<std::uint32_t> decode_x(std::optional<int> b, const Trapdoor &trapdoor, Image y) {
    if (!b) {
        return std::nullopt;
    }
    if (*b != 0 && *b != 1) {
        throw DomainError("b must be a bit");
    }
    const PublicKey &key = trapdoor.key();
    if (key.ideal()) {
        return trapdoor.inverse(*b, y);
    }
    for (std::uint32_t x = 0; x < key.params().domain_size(); ++x) {
        if (key.in_support(y, *b, x)) {
            return x;
        }
    }
    return std::nullopt;
}

std::optional<int> decode_h(const Trapdoor &trapdoor, Image y, std::uint32_t d) {
    if (trapdoor.family() != Family::F) {
        throw FamilyError("decode_h is defined for claw-free (F) keys only");
    }
    if (d >= trapdoor.key().params().domain_size()) {
        throw DomainError("d longer than w bits");
    }
    if (d == 0) {
        return std::nullopt;
    }
    if (trapdoor.key().ideal()) {
        if (!trapdoor.inverse(0, y)) {
            return std::nullopt;
        }
        return dot(d, trapdoor.secret());
    }
    auto x0 = decode_x(0, trapdoor, y);
    if (!x0) {
        return std::nullopt;
    }
    auto x1 = decode_x(1, trapdoor, y);
    if (!x1) {
        return std::nullopt;
    }
    return dot(d, *x0 ^ *x1);
}

bool is_valid_image(const Trapdoor &trapdoor, Image y) {
    const PublicKey &key = trapdoor.key();
    if (key.ideal()) {
        return trapdoor.inverse(0, y).has_value() || trapdoor.inverse(1, y).has_value();
    }
    return !key.preimages(y).empty();
}

}  // namespace selftest::entcf
