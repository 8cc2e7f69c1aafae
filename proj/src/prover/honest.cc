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

#include <cmath>
#include <set>

#include "selftest/core/error.h"
#include "selftest/prover/device.h"

namespace selftest::prover {

using entcf::Image;
using entcf::Preimage;
using entcf::PublicKey;
using protocol::ProtocolKind;
using qsim::Complex;
using qsim::StateVector;
using qsim::Vector;

std::vector<bool> hadamard_positions(ProtocolKind kind, std::uint32_t n, int q) {
    const std::size_t count = protocol::coordinate_count(kind, n);
    std::vector<bool> out(count, false);
    if (kind == ProtocolKind::DimTest) {
        if (q < 0 || q > 1) {
            throw DomainError("dimension-test question must be 0 or 1");
        }
        out.assign(count, q == 1);
        return out;
    }
    if (q < 0 || q > 3) {
        throw DomainError("self-test question must be in {0,1,2,3}");
    }
    for (std::size_t i = 0; i < count; ++i) {
        bool upper = i >= n;
        out[i] = q == 1 || (q == 2 && upper) || (q == 3 && !upper);
    }
    return out;
}

void CallOrder::advance(Step step) {
    // Stage each step requires, and the stage it moves to.
    int required = 1;
    int next = 0;
    switch (step) {
        case Step::Keys:
            required = 0;
            next = 1;
            break;
        case Step::Preimage:
            next = 2;
            break;
        case Step::Hadamard:
            next = 3;
            break;
        case Step::Question:
            required = 3;
            next = 4;
            break;
    }
    if (stage_ != required) {
        throw ContractError("device callback invoked out of order");
    }
    stage_ = next;
}

namespace {

struct Branch {
    Preimage pre;
    double amplitude = 0;
};

// Superposition over (b, x) left after observing y: amplitudes proportional
// to sqrt(Pr[f_{k,b}(x) = y]).
std::vector<Branch> post_image_branches(const PublicKey &key, Image y) {
    std::vector<Branch> out;
    double total = 0;
    for (const auto &pre : key.preimages(y)) {
        double p = key.probability(y, pre.b, pre.x);
        out.push_back({pre, std::sqrt(p)});
        total += p;
    }
    if (total <= 0) {
        throw std::logic_error("observed image has no preimage");
    }
    for (auto &br : out) {
        br.amplitude /= std::sqrt(total);
    }
    return out;
}

// Distribution of y when (b, x) is uniform.
std::map<Image, double> image_distribution(const PublicKey &key) {
    std::map<Image, double> out;
    const double weight = 1.0 / (2.0 * static_cast<double>(key.params().domain_size()));
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < key.params().domain_size(); ++x) {
            for (const auto &wi : key.distribution(b, x)) {
                out[wi.image] += weight * wi.probability;
            }
        }
    }
    return out;
}

// Unnormalized qubit left on b after the x register reads d in the Hadamard
// basis; its squared norm is Pr[d].
Vector qubit_after_d(const std::vector<Branch> &branches, std::uint32_t d, std::uint32_t w) {
    Vector c = Vector::Zero(2);
    const double scale = std::pow(2.0, -0.5 * w);
    for (const auto &br : branches) {
        c(br.pre.b) += (dot(d, br.pre.x) ? -scale : scale) * br.amplitude;
    }
    return c;
}

// Qubit i of the logical register is coordinate i.
StateVector product_state(const std::vector<Vector> &qubits) {
    const std::size_t count = qubits.size();
    Vector amps(static_cast<Eigen::Index>(std::size_t{1} << count));
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(amps.size()); ++idx) {
        Complex a = 1;
        for (std::size_t i = 0; i < count; ++i) {
            a *= qubits[i]((idx >> i) & 1);
        }
        amps(idx) = a;
    }
    return StateVector({{"logical", count}}, amps);
}

void apply_cz_layer(StateVector &state, std::uint32_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        state.controlled_z(i, i + n);
    }
}

BitString bits_of(std::uint64_t value, std::size_t count) {
    return BitString(count, count == 64 ? value : (value & ((std::uint64_t{1} << count) - 1)));
}

}  // namespace

class HonestProver::Engine {
   public:
    virtual ~Engine() = default;
    virtual std::vector<Image> images(Rng &rng) = 0;
    virtual protocol::PreimageAnswerMsg preimage(Rng &rng) = 0;
    virtual std::vector<std::uint32_t> hadamard(Rng &rng) = 0;
    virtual BitString answer(int q, Rng &rng) = 0;
    virtual Vector logical() const = 0;
};

class HonestProver::CollapsedEngine : public HonestProver::Engine {
   public:
    CollapsedEngine(ProtocolKind kind, std::uint32_t n, std::vector<PublicKey> keys)
        : kind_(kind), n_(n), keys_(std::move(keys)) {}

    std::vector<Image> images(Rng &rng) override {
        std::vector<Image> y;
        for (const auto &key : keys_) {
            int b = rng.bit() ? 1 : 0;
            auto x = static_cast<std::uint32_t>(rng.below(key.params().domain_size()));
            Image yi = key.sample(b, x, rng);
            y.push_back(yi);
            branches_.push_back(post_image_branches(key, yi));
        }
        return y;
    }

    protocol::PreimageAnswerMsg preimage(Rng &rng) override {
        protocol::PreimageAnswerMsg out;
        out.b = BitString(keys_.size());
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            const auto &brs = branches_[i];
            double u = rng.uniform();
            std::size_t pick = brs.size() - 1;
            double acc = 0;
            for (std::size_t k = 0; k < brs.size(); ++k) {
                acc += brs[k].amplitude * brs[k].amplitude;
                if (u < acc) {
                    pick = k;
                    break;
                }
            }
            out.b.set(i, brs[pick].pre.b != 0);
            out.x.push_back(brs[pick].pre.x);
        }
        return out;
    }

    std::vector<std::uint32_t> hadamard(Rng &rng) override {
        std::vector<std::uint32_t> d;
        std::vector<Vector> qubits;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            const std::uint32_t w = keys_[i].params().preimage_bits;
            const std::uint32_t domain = static_cast<std::uint32_t>(keys_[i].params().domain_size());
            double u = rng.uniform();
            double acc = 0;
            std::uint32_t pick = domain;
            Vector last;
            std::uint32_t last_d = 0;
            for (std::uint32_t di = 0; di < domain; ++di) {
                Vector c = qubit_after_d(branches_[i], di, w);
                double p = c.squaredNorm();
                if (p <= 0) {
                    continue;
                }
                last = c;
                last_d = di;
                acc += p;
                if (u < acc) {
                    pick = di;
                    qubits.push_back(c / std::sqrt(p));
                    break;
                }
            }
            if (pick == domain) {
                pick = last_d;
                qubits.push_back(last / last.norm());
            }
            d.push_back(pick);
        }
        state_ = product_state(qubits);
        if (kind_ == ProtocolKind::SelfTest) {
            apply_cz_layer(state_, n_);
        }
        return d;
    }

    BitString answer(int q, Rng &rng) override {
        StateVector s = state_;
        auto had = hadamard_positions(kind_, n_, q);
        for (std::size_t i = 0; i < had.size(); ++i) {
            if (had[i]) {
                s.apply_qubit(i, qsim::hadamard());
            }
        }
        auto m = s.measure("logical", qsim::Basis::Computational, rng);
        return bits_of(m.outcome, had.size());
    }

    Vector logical() const override { return state_.amplitudes(); }

   private:
    ProtocolKind kind_;
    std::uint32_t n_;
    std::vector<PublicKey> keys_;
    std::vector<std::vector<Branch>> branches_;
    StateVector state_;
};

namespace {

std::vector<Image> reachable_images(const PublicKey &key) {
    std::set<Image> all;
    for (int b = 0; b < 2; ++b) {
        for (std::uint32_t x = 0; x < key.params().domain_size(); ++x) {
            for (const auto &im : key.support(b, x)) {
                all.insert(im);
            }
        }
    }
    return {all.begin(), all.end()};
}

std::size_t bits_for(std::size_t count) {
    std::size_t bits = 1;
    while ((std::size_t{1} << bits) < count) {
        ++bits;
    }
    return bits;
}

}  // namespace

class HonestProver::FullSimEngine : public HonestProver::Engine {
   public:
    FullSimEngine(ProtocolKind kind, std::uint32_t n, std::vector<PublicKey> keys, const HonestOptions &options)
        : kind_(kind), n_(n), keys_(std::move(keys)) {
        bool any_lwe = false;
        for (const auto &k : keys_) {
            any_lwe = any_lwe || k.params().backend == entcf::Backend::ToyLwe;
        }
        if (any_lwe && keys_.size() > 1) {
            throw BudgetError("full simulation of the toy-LWE backend is limited to one coordinate");
        }
        std::vector<qsim::RegisterSpec> regs;
        Vector amps = Vector::Ones(1);
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            const auto &key = keys_[i];
            const std::uint32_t w = key.params().preimage_bits;
            auto ys = reachable_images(key);
            if ((std::uint64_t{2} << w) * ys.size() > options.fullsim_budget) {
                throw BudgetError("full simulation exceeds the per-coordinate budget");
            }
            const std::size_t ybits = bits_for(ys.size());
            const std::string tag = std::to_string(i);
            regs.push_back({"b" + tag, 1});
            regs.push_back({"x" + tag, w});
            regs.push_back({"y" + tag, ybits});
            // Local layout: b most significant, then x, then y.
            Vector local = Vector::Zero(static_cast<Eigen::Index>((std::size_t{2} << w) << ybits));
            const double norm = 1.0 / std::sqrt(2.0 * static_cast<double>(key.params().domain_size()));
            for (int b = 0; b < 2; ++b) {
                for (std::uint32_t x = 0; x < key.params().domain_size(); ++x) {
                    for (const auto &wi : key.distribution(b, x)) {
                        auto pos = std::lower_bound(ys.begin(), ys.end(), wi.image) - ys.begin();
                        std::size_t idx = ((static_cast<std::size_t>(b) << w | x) << ybits) | static_cast<std::size_t>(pos);
                        local(static_cast<Eigen::Index>(idx)) += norm * std::sqrt(wi.probability);
                    }
                }
            }
            amps = qsim::kron(amps, local);
            images_.push_back(std::move(ys));
        }
        std::size_t qubits = 0;
        for (const auto &r : regs) {
            qubits += r.qubits;
        }
        if (qubits > options.fullsim_max_qubits) {
            throw BudgetError("full simulation exceeds the qubit budget");
        }
        state_ = StateVector(std::move(regs), amps);
    }

    std::vector<Image> images(Rng &rng) override {
        std::vector<Image> y;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            auto m = state_.measure("y" + std::to_string(i), qsim::Basis::Computational, rng);
            state_ = std::move(m.post);
            y_index_.push_back(m.outcome);
            y.push_back(images_[i][m.outcome]);
        }
        return y;
    }

    protocol::PreimageAnswerMsg preimage(Rng &rng) override {
        protocol::PreimageAnswerMsg out;
        out.b = BitString(keys_.size());
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            const std::string tag = std::to_string(i);
            auto mb = state_.measure("b" + tag, qsim::Basis::Computational, rng);
            state_ = std::move(mb.post);
            auto mx = state_.measure("x" + tag, qsim::Basis::Computational, rng);
            state_ = std::move(mx.post);
            out.b.set(i, mb.outcome != 0);
            out.x.push_back(static_cast<std::uint32_t>(mx.outcome));
        }
        return out;
    }

    std::vector<std::uint32_t> hadamard(Rng &rng) override {
        std::vector<std::uint32_t> d;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            auto m = state_.measure("x" + std::to_string(i), qsim::Basis::Hadamard, rng);
            state_ = std::move(m.post);
            d.push_back(static_cast<std::uint32_t>(m.outcome));
        }
        d_ = d;
        if (kind_ == ProtocolKind::SelfTest) {
            for (std::size_t i = 0; i < n_; ++i) {
                state_.controlled_z(state_.qubit("b" + std::to_string(i), 0),
                                    state_.qubit("b" + std::to_string(i + n_), 0));
            }
        }
        return d;
    }

    BitString answer(int q, Rng &rng) override {
        auto had = hadamard_positions(kind_, n_, q);
        StateVector s = state_;
        for (std::size_t i = 0; i < had.size(); ++i) {
            if (had[i]) {
                s.apply_hadamard("b" + std::to_string(i));
            }
        }
        BitString v(had.size());
        for (std::size_t i = 0; i < had.size(); ++i) {
            auto m = s.measure("b" + std::to_string(i), qsim::Basis::Computational, rng);
            s = std::move(m.post);
            v.set(i, m.outcome != 0);
        }
        return v;
    }

    // Reads the b-qubit amplitudes off the collapsed x and y registers.
    Vector logical() const override {
        StateVector s = state_;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            s.apply_hadamard("x" + std::to_string(i));
        }
        const std::size_t count = keys_.size();
        Vector out = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << count));
        for (std::size_t idx = 0; idx < s.dimension(); ++idx) {
            bool matches = true;
            std::size_t logical = 0;
            for (std::size_t i = 0; i < count && matches; ++i) {
                matches = s.register_value(idx, 3 * i + 1) == d_[i] && s.register_value(idx, 3 * i + 2) == y_index_[i];
                logical |= static_cast<std::size_t>(s.register_value(idx, 3 * i)) << i;
            }
            if (matches) {
                out(static_cast<Eigen::Index>(logical)) += s.amplitudes()(static_cast<Eigen::Index>(idx));
            }
        }
        return out / out.norm();
    }

    const StateVector &state() const { return state_; }
    const std::vector<std::vector<Image>> &image_lists() const { return images_; }

   private:
    ProtocolKind kind_;
    std::uint32_t n_;
    std::vector<PublicKey> keys_;
    std::vector<std::vector<Image>> images_;
    StateVector state_;
    std::vector<std::uint64_t> y_index_;
    std::vector<std::uint32_t> d_;
};

HonestProver::HonestProver(ProtocolKind kind, std::uint32_t n, std::uint64_t seed, HonestOptions options)
    : kind_(kind), n_(n), options_(options), rng_(seed) {
    if (n < 1) {
        throw ParameterError("N must be at least 1");
    }
}

HonestProver::~HonestProver() = default;

std::vector<Image> HonestProver::on_keys(const std::vector<PublicKey> &keys) {
    order_.advance(CallOrder::Step::Keys);
    if (keys.size() != protocol::coordinate_count(kind_, n_)) {
        throw ContractError("key tuple has the wrong length");
    }
    if (options_.mode == SimMode::Collapsed) {
        engine_ = std::make_unique<CollapsedEngine>(kind_, n_, keys);
    } else {
        engine_ = std::make_unique<FullSimEngine>(kind_, n_, keys, options_);
    }
    return engine_->images(rng_);
}

protocol::PreimageAnswerMsg HonestProver::on_preimage() {
    order_.advance(CallOrder::Step::Preimage);
    return engine_->preimage(rng_);
}

std::vector<std::uint32_t> HonestProver::on_hadamard() {
    order_.advance(CallOrder::Step::Hadamard);
    return engine_->hadamard(rng_);
}

BitString HonestProver::on_question(int q) {
    order_.advance(CallOrder::Step::Question);
    return engine_->answer(q, rng_);
}

Vector HonestProver::logical_state() const {
    if (!engine_) {
        throw ContractError("no session in progress");
    }
    return engine_->logical();
}

namespace {

// Born distribution of the logical register after the question bases.
std::vector<double> answer_distribution(StateVector state, ProtocolKind kind, std::uint32_t n, int q) {
    auto had = hadamard_positions(kind, n, q);
    for (std::size_t i = 0; i < had.size(); ++i) {
        if (had[i]) {
            state.apply_qubit(i, qsim::hadamard());
        }
    }
    return state.probabilities("logical");
}

void enumerate_collapsed(ProtocolKind kind, std::uint32_t n, const std::vector<PublicKey> &keys, int q,
                         OutcomeDistribution &out) {
    struct Local {
        Image y;
        std::uint32_t d;
        double p;
        Vector qubit;
    };
    std::vector<std::vector<Local>> per_coord;
    for (const auto &key : keys) {
        std::vector<Local> locals;
        const std::uint32_t w = key.params().preimage_bits;
        for (const auto &[y, py] : image_distribution(key)) {
            auto branches = post_image_branches(key, y);
            for (std::uint32_t d = 0; d < key.params().domain_size(); ++d) {
                Vector c = qubit_after_d(branches, d, w);
                double pd = c.squaredNorm();
                if (pd > 0) {
                    locals.push_back({y, d, py * pd, c / std::sqrt(pd)});
                }
            }
        }
        per_coord.push_back(std::move(locals));
    }
    const std::size_t count = keys.size();
    std::vector<std::size_t> pick(count, 0);
    while (true) {
        double p = 1;
        std::vector<Vector> qubits;
        Outcome base;
        for (std::size_t i = 0; i < count; ++i) {
            const auto &l = per_coord[i][pick[i]];
            p *= l.p;
            qubits.push_back(l.qubit);
            base.y.push_back(l.y);
            base.d.push_back(l.d);
        }
        StateVector s = product_state(qubits);
        if (kind == ProtocolKind::SelfTest) {
            apply_cz_layer(s, n);
        }
        auto probs = answer_distribution(s, kind, n, q);
        for (std::uint64_t v = 0; v < probs.size(); ++v) {
            if (probs[v] * p > 0) {
                Outcome o = base;
                o.v = bits_of(v, count);
                out[o] += probs[v] * p;
            }
        }
        std::size_t i = 0;
        while (i < count && ++pick[i] == per_coord[i].size()) {
            pick[i] = 0;
            ++i;
        }
        if (i == count) {
            break;
        }
    }
}

// Branches on every projective outcome of the full register simulation.
void enumerate_fullsim(const StateVector &state, ProtocolKind kind, std::uint32_t n,
                       const std::vector<std::vector<Image>> &image_lists, int q, std::size_t stage, double p,
                       Outcome &partial, OutcomeDistribution &out) {
    const std::size_t count = image_lists.size();
    if (stage < count) {
        const std::string reg = "y" + std::to_string(stage);
        auto probs = state.probabilities(reg);
        for (std::uint64_t k = 0; k < probs.size(); ++k) {
            if (probs[k] <= 1e-15) {
                continue;
            }
            StateVector next = state;
            next.project(reg, k);
            partial.y.push_back(image_lists[stage][k]);
            enumerate_fullsim(next, kind, n, image_lists, q, stage + 1, p * probs[k], partial, out);
            partial.y.pop_back();
        }
        return;
    }
    if (stage < 2 * count) {
        const std::string reg = "x" + std::to_string(stage - count);
        auto probs = state.probabilities(reg, qsim::Basis::Hadamard);
        for (std::uint64_t k = 0; k < probs.size(); ++k) {
            if (probs[k] <= 1e-15) {
                continue;
            }
            StateVector next = state;
            next.project(reg, k, qsim::Basis::Hadamard);
            partial.d.push_back(static_cast<std::uint32_t>(k));
            enumerate_fullsim(next, kind, n, image_lists, q, stage + 1, p * probs[k], partial, out);
            partial.d.pop_back();
        }
        return;
    }
    StateVector s = state;
    if (kind == ProtocolKind::SelfTest) {
        for (std::size_t i = 0; i < n; ++i) {
            s.controlled_z(s.qubit("b" + std::to_string(i), 0), s.qubit("b" + std::to_string(i + n), 0));
        }
    }
    auto had = hadamard_positions(kind, n, q);
    for (std::size_t i = 0; i < had.size(); ++i) {
        if (had[i]) {
            s.apply_hadamard("b" + std::to_string(i));
        }
    }
    std::map<std::uint64_t, double> joint;
    for (std::size_t idx = 0; idx < s.dimension(); ++idx) {
        double a = std::norm(s.amplitudes()(static_cast<Eigen::Index>(idx)));
        if (a == 0) {
            continue;
        }
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < count; ++i) {
            v |= s.register_value(idx, 3 * i) << i;
        }
        joint[v] += a;
    }
    for (const auto &[v, pv] : joint) {
        if (pv * p <= 1e-15) {
            continue;
        }
        Outcome o = partial;
        o.v = bits_of(v, count);
        out[o] += pv * p;
    }
}

}  // namespace

OutcomeDistribution exact_outcomes(SimMode mode, ProtocolKind kind, std::uint32_t n, const std::vector<PublicKey> &keys,
                                   int q, HonestOptions options) {
    if (keys.size() != protocol::coordinate_count(kind, n)) {
        throw ContractError("key tuple has the wrong length");
    }
    OutcomeDistribution out;
    if (mode == SimMode::Collapsed) {
        enumerate_collapsed(kind, n, keys, q, out);
    } else {
        HonestProver::FullSimEngine engine(kind, n, keys, options);
        Outcome partial;
        enumerate_fullsim(engine.state(), kind, n, engine.image_lists(), q, 0, 1.0, partial, out);
    }
    return out;
}

}  // namespace selftest::prover
