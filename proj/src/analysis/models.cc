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

#include <algorithm>
#include <cmath>
#include <set>

#include "selftest/analysis/model.h"
#include "selftest/core/error.h"
#include "selftest/core/rng.h"
#include "selftest/prover/device.h"

namespace selftest::analysis {

using entcf::Image;

namespace {

struct Branch {
    int b = 0;
    std::uint32_t x = 0;
    double amplitude = 0;
};

// Images reachable from a uniform (b, x) and, for each, the weighted
// preimage branches.
std::map<Image, std::vector<Branch>> image_branches(const entcf::PublicKey &key, std::uint32_t w) {
    std::map<Image, std::vector<Branch>> out;
    const double prior = std::pow(2.0, -static_cast<double>(w + 1));
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < (std::uint32_t{1} << w); ++x) {
            for (const auto &wi : key.distribution(b, x)) {
                out[wi.image].push_back({b, x, std::sqrt(wi.probability * prior)});
            }
        }
    }
    return out;
}

// Calls visit(y, branches) for every tuple in the product of per-coordinate
// image maps, tuples in lexicographic order.
template <typename Visit>
void for_each_tuple(const std::vector<std::map<Image, std::vector<Branch>>> &maps, Visit &&visit) {
    const std::size_t c = maps.size();
    std::vector<std::map<Image, std::vector<Branch>>::const_iterator> it(c);
    for (std::size_t i = 0; i < c; ++i) {
        it[i] = maps[i].begin();
        if (it[i] == maps[i].end()) {
            return;
        }
    }
    std::vector<Image> y(c);
    std::vector<const std::vector<Branch> *> branches(c);
    while (true) {
        for (std::size_t i = 0; i < c; ++i) {
            y[i] = it[i]->first;
            branches[i] = &it[i]->second;
        }
        visit(y, branches);
        std::size_t k = c;
        while (k > 0) {
            --k;
            if (++it[k] != maps[k].end()) {
                break;
            }
            it[k] = maps[k].begin();
            if (k == 0) {
                return;
            }
        }
    }
}

void require_ideal(const ModelConfig &config) {
    if (config.w == 0 || config.w > 8) {
        throw ParameterError("analysis models need 1 <= w <= 8");
    }
}

// Honest device, optionally with bit-flip coins or exchanged q=0/q=1 bases.
class HonestModel : public DeviceModel {
   public:
    HonestModel(const ModelConfig &config, std::optional<double> flip, bool swap_bases)
        : DeviceModel(config.kind, config.n, entcf::EntcfParams::ideal(config.w), config.key_seed),
          c_(coordinates()),
          w_(config.w),
          flip_(flip),
          swap_(swap_bases) {
        coin_bits_ = flip_ ? c_ : 0;
        const std::size_t bits = c_ + c_ * w_ + coin_bits_;
        if (bits > 24 || (std::size_t{1} << bits) > config.max_dim) {
            throw BudgetError("honest model dimension 2^" + std::to_string(bits) + " exceeds the budget");
        }
        dim_ = std::size_t{1} << bits;
        build_measurements();
    }

    std::string name() const override {
        if (flip_) {
            ModelSpec spec;
            spec.kind = ModelSpec::Kind::BitFlip;
            spec.flip_probability = *flip_;
            return spec.to_string();
        }
        return swap_ ? "wrongbasis" : "honest";
    }
    std::size_t dim() const override { return dim_; }

    std::vector<StateBlock> states(Theta theta) const override {
        std::vector<std::map<Image, std::vector<Branch>>> maps;
        for (const auto &key : keys(theta)) {
            maps.push_back(image_branches(key, w_));
        }
        Vector coins = coin_state();
        std::vector<StateBlock> out;
        for_each_tuple(maps, [&](const std::vector<Image> &y, const std::vector<const std::vector<Branch> *> &br) {
            Vector logical = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << (c_ + c_ * w_)));
            std::vector<std::size_t> pick(c_, 0);
            while (true) {
                double amp = 1;
                std::size_t b_index = 0;
                std::size_t x_index = 0;
                std::uint64_t b_mask = 0;
                for (std::size_t i = 0; i < c_; ++i) {
                    const Branch &branch = (*br[i])[pick[i]];
                    amp *= branch.amplitude;
                    b_index = (b_index << 1) | static_cast<std::size_t>(branch.b);
                    x_index = (x_index << w_) | branch.x;
                    b_mask |= std::uint64_t(branch.b) << i;
                }
                if (kind() == ProtocolKind::SelfTest) {
                    for (std::size_t i = 0; i < n(); ++i) {
                        if (((b_mask >> i) & 1) && ((b_mask >> (i + n())) & 1)) {
                            amp = -amp;
                        }
                    }
                }
                logical(static_cast<Eigen::Index>((b_index << (c_ * w_)) | x_index)) += amp;
                std::size_t k = c_;
                bool done = true;
                while (k > 0) {
                    --k;
                    if (++pick[k] < br[k]->size()) {
                        done = false;
                        break;
                    }
                    pick[k] = 0;
                }
                if (done) {
                    break;
                }
            }
            Matrix factor(static_cast<Eigen::Index>(dim_), 1);
            if (flip_) {
                factor = qsim::kron(logical, coins);
            } else {
                factor.col(0) = logical;
            }
            out.push_back({y, std::move(factor)});
        });
        return out;
    }

    MeasurementPtr preimage_measurement(Theta, std::span<const Image>) const override { return pi_; }
    MeasurementPtr d_measurement(Theta, std::span<const Image>) const override { return m_; }
    MeasurementPtr question_measurement(Theta, std::span<const Image>, std::span<const std::uint32_t>,
                                        int q) const override {
        if (q < 0 || q >= question_count()) {
            throw DomainError("question out of range");
        }
        return questions_[static_cast<std::size_t>(q)];
    }

    std::optional<RegisterLayout> layout() const override {
        RegisterLayout out;
        for (std::size_t i = 0; i < c_; ++i) {
            out.dims.push_back(2);
            out.logical.push_back(i);
        }
        for (std::size_t i = 0; i < c_; ++i) {
            out.dims.push_back(std::size_t{1} << w_);
        }
        for (std::size_t i = 0; i < coin_bits_; ++i) {
            out.dims.push_back(2);
        }
        return out;
    }

   private:
    Vector coin_state() const {
        Vector coins = Vector::Ones(1);
        if (!flip_) {
            return coins;
        }
        Vector one(2);
        one << std::sqrt(1 - *flip_), std::sqrt(*flip_);
        for (std::size_t i = 0; i < c_; ++i) {
            coins = qsim::kron(coins, one);
        }
        return coins;
    }

    void build_measurements() {
        const OutcomeCodec cd = codec();
        const std::size_t xbits = c_ * w_;
        const std::size_t chunk = (std::size_t{1} << w_) - 1;
        auto split = [&](std::size_t j, std::size_t &b_index, std::size_t &x_index, std::size_t &coin_index) {
            coin_index = j & ((std::size_t{1} << coin_bits_) - 1);
            x_index = (j >> coin_bits_) & ((std::size_t{1} << xbits) - 1);
            b_index = j >> (coin_bits_ + xbits);
        };
        auto x_chunks = [&](std::size_t x_index) {
            std::vector<std::uint32_t> x(c_);
            for (std::size_t i = 0; i < c_; ++i) {
                x[i] = static_cast<std::uint32_t>((x_index >> ((c_ - 1 - i) * w_)) & chunk);
            }
            return x;
        };
        pi_ = BasisMeasurement::computational(dim_, [&](std::size_t j) {
            std::size_t b, x, coin;
            split(j, b, x, coin);
            return cd.pack_preimage(BitString(c_, index_to_mask(b, c_)), x_chunks(x));
        });

        const Matrix id_b = Matrix::Identity(static_cast<Eigen::Index>(std::size_t{1} << c_),
                                             static_cast<Eigen::Index>(std::size_t{1} << c_));
        const Matrix id_coin = Matrix::Identity(static_cast<Eigen::Index>(std::size_t{1} << coin_bits_),
                                                static_cast<Eigen::Index>(std::size_t{1} << coin_bits_));
        const Matrix id_x = Matrix::Identity(static_cast<Eigen::Index>(std::size_t{1} << xbits),
                                             static_cast<Eigen::Index>(std::size_t{1} << xbits));
        std::vector<Outcome> d_labels(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            std::size_t b, x, coin;
            split(j, b, x, coin);
            d_labels[j] = cd.pack_d(x_chunks(x));
        }
        m_ = std::make_shared<const BasisMeasurement>(qsim::kron(qsim::kron(id_b, qsim::hadamard_n(xbits)), id_coin),
                                                      std::move(d_labels));

        for (int q = 0; q < question_count(); ++q) {
            int asked = q;
            if (swap_ && q < 2) {
                asked = 1 - q;
            }
            auto positions = prover::hadamard_positions(kind(), n(), asked);
            Matrix local = Matrix::Identity(1, 1);
            for (std::size_t i = 0; i < c_; ++i) {
                local = qsim::kron(local, positions[i] ? qsim::hadamard() : Matrix(Matrix::Identity(2, 2)));
            }
            std::vector<Outcome> labels(dim_);
            for (std::size_t j = 0; j < dim_; ++j) {
                std::size_t b, x, coin;
                split(j, b, x, coin);
                labels[j] = index_to_mask(b, c_) ^ index_to_mask(coin, coin_bits_ ? c_ : 0);
            }
            questions_.push_back(std::make_shared<const BasisMeasurement>(
                qsim::kron(qsim::kron(local, id_x), id_coin), std::move(labels)));
        }
    }

    std::size_t c_;
    std::uint32_t w_;
    std::optional<double> flip_;
    bool swap_;
    std::size_t coin_bits_ = 0;
    std::size_t dim_ = 0;
    MeasurementPtr pi_, m_;
    std::vector<MeasurementPtr> questions_;
};

class RandomModel : public DeviceModel {
   public:
    RandomModel(const ModelConfig &config, std::uint64_t seed)
        : DeviceModel(config.kind, config.n, entcf::EntcfParams::ideal(config.w), derive_seed(seed, 0x6b6579)),
          seed_(seed) {
        Rng rng(derive_seed(seed, 0x6d6f64));
        dim_ = 4 + static_cast<std::size_t>(rng.below(5));
        if (dim_ > config.max_dim) {
            throw BudgetError("random model dimension exceeds the budget");
        }
        const OutcomeCodec cd = codec();
        const std::size_t c = coordinates();
        const std::uint32_t w = config.w;
        for (auto theta : thetas()) {
            auto keys = this->keys(theta);
            const std::size_t tuples = 2 + rng.below(2);
            std::set<std::vector<Image>> seen;
            std::vector<double> mass;
            auto &entries = entries_[theta];
            while (entries.size() < tuples) {
                std::vector<Image> y(c);
                for (std::size_t i = 0; i < c; ++i) {
                    if (rng.bernoulli(0.85)) {
                        y[i] = keys[i].sample(static_cast<int>(rng.bit()),
                                              static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << w)), rng);
                    } else {
                        y[i] = Image{rng.below(params().image_space_size)};
                    }
                }
                if (!seen.insert(y).second) {
                    continue;
                }
                Entry e;
                e.y = y;
                const auto rank = static_cast<Eigen::Index>(1 + rng.below(2));
                e.factor = Matrix(static_cast<Eigen::Index>(dim_), rank);
                for (Eigen::Index i = 0; i < e.factor.rows(); ++i) {
                    for (Eigen::Index j = 0; j < rank; ++j) {
                        e.factor(i, j) = {rng.normal(), rng.normal()};
                    }
                }
                mass.push_back(0.2 + rng.uniform());

                std::vector<Outcome> pi_labels(dim_);
                for (auto &label : pi_labels) {
                    BitString b(c);
                    std::vector<std::uint32_t> x(c);
                    for (std::size_t i = 0; i < c; ++i) {
                        auto pre = keys[i].preimages(y[i]);
                        if (!pre.empty() && rng.bernoulli(0.75)) {
                            const auto &p = pre[rng.below(pre.size())];
                            b.set(i, p.b != 0);
                            x[i] = p.x;
                        } else {
                            b.set(i, rng.bit());
                            x[i] = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << w));
                        }
                    }
                    label = cd.pack_preimage(b, x);
                }
                e.pi = std::make_shared<const BasisMeasurement>(qsim::random_unitary(dim_, rng), std::move(pi_labels));

                std::vector<Outcome> d_labels(dim_);
                for (auto &label : d_labels) {
                    std::vector<std::uint32_t> d(c);
                    for (auto &di : d) {
                        di = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << w));
                    }
                    label = cd.pack_d(d);
                }
                e.m = std::make_shared<const BasisMeasurement>(qsim::random_unitary(dim_, rng), std::move(d_labels));
                for (auto o : e.m->outcomes()) {
                    auto &qs = e.questions[o];
                    for (int q = 0; q < question_count(); ++q) {
                        std::vector<Outcome> u(dim_);
                        for (auto &label : u) {
                            label = rng.below(std::uint64_t{1} << c);
                        }
                        qs.push_back(
                            std::make_shared<const BasisMeasurement>(qsim::random_unitary(dim_, rng), std::move(u)));
                    }
                }
                entries.push_back(std::move(e));
            }
            double total = 0;
            for (double m : mass) {
                total += m;
            }
            for (std::size_t k = 0; k < entries.size(); ++k) {
                auto &f = entries[k].factor;
                f *= std::sqrt(mass[k] / total) / f.norm();
            }
            std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) { return a.y < b.y; });
        }
    }

    std::string name() const override { return "random=" + std::to_string(seed_); }
    std::size_t dim() const override { return dim_; }

    std::vector<StateBlock> states(Theta theta) const override {
        std::vector<StateBlock> out;
        for (const auto &e : entries_.at(theta)) {
            out.push_back({e.y, e.factor});
        }
        return out;
    }
    MeasurementPtr preimage_measurement(Theta theta, std::span<const Image> y) const override {
        return entry(theta, y).pi;
    }
    MeasurementPtr d_measurement(Theta theta, std::span<const Image> y) const override { return entry(theta, y).m; }
    MeasurementPtr question_measurement(Theta theta, std::span<const Image> y, std::span<const std::uint32_t> d,
                                        int q) const override {
        const auto &e = entry(theta, y);
        auto it = e.questions.find(codec().pack_d(d));
        if (it == e.questions.end() || q < 0 || q >= question_count()) {
            throw DomainError("no question measurement for this transcript");
        }
        return it->second[static_cast<std::size_t>(q)];
    }

   private:
    struct Entry {
        std::vector<Image> y;
        Matrix factor;
        MeasurementPtr pi, m;
        std::map<Outcome, std::vector<MeasurementPtr>> questions;
    };

    const Entry &entry(Theta theta, std::span<const Image> y) const {
        for (const auto &e : entries_.at(theta)) {
            if (std::equal(e.y.begin(), e.y.end(), y.begin(), y.end())) {
                return e;
            }
        }
        throw DomainError("image tuple not produced by this device");
    }

    std::uint64_t seed_;
    std::size_t dim_ = 0;
    std::map<Theta, std::vector<Entry>> entries_;
};

class ClassicalModel : public DeviceModel {
   public:
    ClassicalModel(const ModelConfig &config, std::uint64_t seed)
        : DeviceModel(config.kind, config.n, entcf::EntcfParams::ideal(config.w), config.key_seed),
          seed_(seed),
          c_(coordinates()),
          w_(config.w) {
        if (c_ > 10 || (std::size_t{1} << c_) > config.max_dim) {
            throw BudgetError("classical model dimension exceeds the budget");
        }
        dim_ = std::size_t{1} << c_;
    }

    std::string name() const override { return "classical=" + std::to_string(seed_); }
    std::size_t dim() const override { return dim_; }
    std::size_t classical_dim() const override { return dim_; }

    std::vector<StateBlock> states(Theta theta) const override {
        std::vector<std::map<Image, std::vector<Branch>>> maps;
        for (const auto &key : keys(theta)) {
            maps.push_back(image_branches(key, w_));
        }
        std::vector<StateBlock> out;
        for_each_tuple(maps, [&](const std::vector<Image> &y, const std::vector<const std::vector<Branch> *> &br) {
            Matrix factor = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
            for (std::size_t j = 0; j < dim_; ++j) {
                const std::uint64_t b = index_to_mask(j, c_);
                double p = 1;
                for (std::size_t i = 0; i < c_ && p > 0; ++i) {
                    double pi = 0;
                    for (const auto &branch : *br[i]) {
                        if (branch.b == static_cast<int>((b >> i) & 1)) {
                            pi += branch.amplitude * branch.amplitude;
                        }
                    }
                    p *= pi;
                }
                factor(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::sqrt(p);
            }
            out.push_back({y, std::move(factor)});
        });
        return out;
    }

    MeasurementPtr preimage_measurement(Theta theta, std::span<const Image> y) const override {
        auto keys = this->keys(theta);
        const OutcomeCodec cd = codec();
        return BasisMeasurement::computational(dim_, [&](std::size_t j) {
            BitString b(c_, index_to_mask(j, c_));
            std::vector<std::uint32_t> x(c_, 0);
            for (std::size_t i = 0; i < c_; ++i) {
                for (const auto &pre : keys[i].preimages(y[i])) {
                    if (pre.b == static_cast<int>(b[i])) {
                        x[i] = pre.x;
                    }
                }
            }
            return cd.pack_preimage(b, x);
        });
    }

    MeasurementPtr d_measurement(Theta, std::span<const Image> y) const override {
        const OutcomeCodec cd = codec();
        return BasisMeasurement::computational(dim_, [&](std::size_t j) {
            return cd.pack_d(d_for(y, index_to_mask(j, c_)));
        });
    }

    MeasurementPtr question_measurement(Theta, std::span<const Image> y, std::span<const std::uint32_t> d,
                                        int q) const override {
        auto positions = prover::hadamard_positions(kind(), n(), q);
        return BasisMeasurement::computational(dim_, [&](std::size_t j) {
            const std::uint64_t b = index_to_mask(j, c_);
            Outcome u = 0;
            for (std::size_t i = 0; i < c_; ++i) {
                std::uint64_t bit = (b >> i) & 1;
                if (positions[i]) {
                    bit = mix64(derive_seed(seed_, 0x6775 + i) ^ y[i].value ^ (std::uint64_t{d[i]} << 40) ^
                                (bit << 60)) &
                          1;
                }
                u |= bit << i;
            }
            return u;
        });
    }

   private:
    std::vector<std::uint32_t> d_for(std::span<const Image> y, std::uint64_t b) const {
        std::vector<std::uint32_t> d(c_);
        const std::uint64_t nonzero = (std::uint64_t{1} << w_) - 1;
        for (std::size_t i = 0; i < c_; ++i) {
            const std::uint64_t h = mix64(derive_seed(seed_, i) ^ y[i].value ^ (((b >> i) & 1) << 62));
            d[i] = static_cast<std::uint32_t>(1 + h % nonzero);
        }
        return d;
    }

    std::uint64_t seed_;
    std::size_t c_;
    std::uint32_t w_;
    std::size_t dim_ = 0;
};

}  // namespace

std::unique_ptr<DeviceModel> build_honest_model(const ModelConfig &config) {
    require_ideal(config);
    return std::make_unique<HonestModel>(config, std::nullopt, false);
}

std::unique_ptr<DeviceModel> build_bitflip_model(const ModelConfig &config, double p) {
    require_ideal(config);
    if (!(p >= 0 && p <= 1)) {
        throw ParameterError("flip probability must be in [0, 1]");
    }
    return std::make_unique<HonestModel>(config, p, false);
}

std::unique_ptr<DeviceModel> build_wrong_basis_model(const ModelConfig &config) {
    require_ideal(config);
    return std::make_unique<HonestModel>(config, std::nullopt, true);
}

std::unique_ptr<DeviceModel> build_random_model(const ModelConfig &config, std::uint64_t seed) {
    require_ideal(config);
    return std::make_unique<RandomModel>(config, seed);
}

std::unique_ptr<DeviceModel> build_classical_model(const ModelConfig &config, std::uint64_t seed) {
    require_ideal(config);
    return std::make_unique<ClassicalModel>(config, seed);
}

}  // namespace selftest::analysis
