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

#include "selftest/analysis/swap.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "selftest/core/error.h"
#include "selftest/prover/device.h"

namespace selftest::analysis {

namespace {

std::vector<Matrix> coordinate_observables(const BasisMeasurement &m, std::size_t c) {
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < c; ++i) {
        out.push_back(m.observable([i](Outcome u) { return ((u >> i) & 1) != 0 ? -1.0 : 1.0; }));
    }
    return out;
}

// Observables and isometry shared by every block with the same question
// measurements.
struct BlockOperators {
    MarginalObservables obs;
    Matrix v;
};

class OperatorCache {
   public:
    explicit OperatorCache(const DeviceModel &model) : model_(model) {}

    const BlockOperators &get(const SigmaBlock &block) {
        std::vector<const BasisMeasurement *> key;
        for (const auto &q : block.questions) {
            key.push_back(q.get());
        }
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        BlockOperators ops;
        ops.obs = marginal_observables(model_, block);
        ops.v = swap_isometry(ops.obs.z, ops.obs.x);
        keep_.insert(keep_.end(), block.questions.begin(), block.questions.end());
        return cache_.emplace(std::move(key), std::move(ops)).first->second;
    }

   private:
    const DeviceModel &model_;
    std::map<std::vector<const BasisMeasurement *>, BlockOperators> cache_;
    std::vector<MeasurementPtr> keep_;
};

// Z^{(b)} = (1 + (-1)^b Z) / 2.
Matrix projector_of(const Matrix &obs, int b) {
    return qsim::observable_projector(obs, b);
}

std::size_t ancilla_bit(std::size_t coordinate, std::size_t c) {
    return c - 1 - coordinate;
}

// (<tau| (x) 1) G for G on (2^c) (x) D.
Matrix contract(const Vector &tau, const Matrix &g, std::size_t dim) {
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(dim), g.cols());
    for (Eigen::Index a = 0; a < tau.size(); ++a) {
        if (tau(a) != qsim::Complex(0)) {
            t += std::conj(tau(a)) * g.middleRows(a * static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        }
    }
    return t;
}

// sigma-weighted squared norm ||A F||_F^2.
double weighted(const Matrix &a, const Matrix &factor) {
    return (a * factor).squaredNorm();
}

}  // namespace

MarginalObservables marginal_observables(const DeviceModel &model, const SigmaBlock &block) {
    const std::size_t c = model.coordinates();
    if (block.questions.size() < 2) {
        throw ModelError("block carries no question measurements");
    }
    MarginalObservables out;
    out.z = coordinate_observables(*block.questions[0], c);
    out.x = coordinate_observables(*block.questions[1], c);
    if (model.kind() == ProtocolKind::SelfTest) {
        const auto p2 = coordinate_observables(*block.questions[2], c);
        const auto p3 = coordinate_observables(*block.questions[3], c);
        for (std::size_t i = 0; i < c; ++i) {
            const bool lower = i < model.n();
            out.z_tilde.push_back(lower ? p2[i] : p3[i]);
            out.x_tilde.push_back(lower ? p3[i] : p2[i]);
        }
    }
    return out;
}

Matrix swap_isometry(std::span<const Matrix> z, std::span<const Matrix> x) {
    const std::size_t c = z.size();
    if (c == 0 || x.size() != c) {
        throw DomainError("swap isometry needs matching Z and X families");
    }
    const auto dim = z[0].rows();
    const std::size_t ancilla = std::size_t{1} << c;
    Matrix v = Matrix::Zero(static_cast<Eigen::Index>(ancilla) * dim, dim);
    for (std::size_t a = 0; a < ancilla; ++a) {
        const std::uint64_t u = index_to_mask(a, c);
        Matrix zs = Matrix::Identity(dim, dim);
        Matrix xs = Matrix::Identity(dim, dim);
        for (std::size_t i = 0; i < c; ++i) {
            const int ui = static_cast<int>((u >> i) & 1);
            zs = zs * projector_of(z[i], ui);
            if (ui != 0) {
                xs = xs * x[i];
            }
        }
        v.middleRows(static_cast<Eigen::Index>(a) * dim, dim) = xs * zs;
    }
    return v;
}

Matrix swap_circuit(std::span<const Matrix> z, std::span<const Matrix> x, const Matrix &inputs) {
    const std::size_t c = z.size();
    if (c == 0 || x.size() != c) {
        throw DomainError("swap circuit needs matching Z and X families");
    }
    const auto dim = z[0].rows();
    if (inputs.rows() != dim) {
        throw DomainError("swap circuit input has the wrong dimension");
    }
    const std::size_t ancilla = std::size_t{1} << c;
    Matrix state = Matrix::Zero(static_cast<Eigen::Index>(ancilla) * dim, inputs.cols());
    state.topRows(dim) = inputs;
    auto block = [&](std::size_t a) { return state.middleRows(static_cast<Eigen::Index>(a) * dim, dim); };
    auto hadamard = [&](std::size_t i) {
        const std::size_t mask = std::size_t{1} << ancilla_bit(i, c);
        const double r = 1 / std::sqrt(2.0);
        for (std::size_t a = 0; a < ancilla; ++a) {
            if ((a & mask) == 0) {
                Matrix lo = block(a);
                Matrix hi = block(a | mask);
                block(a) = r * (lo + hi);
                block(a | mask) = r * (lo - hi);
            }
        }
    };
    auto controlled = [&](std::size_t i, const Matrix &op) {
        const std::size_t mask = std::size_t{1} << ancilla_bit(i, c);
        for (std::size_t a = 0; a < ancilla; ++a) {
            if ((a & mask) != 0) {
                block(a) = op * block(a);
            }
        }
    };
    for (std::size_t i = 0; i < c; ++i) {
        hadamard(i);
        controlled(i, z[i]);
        hadamard(i);
    }
    for (std::size_t i = 0; i < c; ++i) {
        controlled(i, x[i]);
    }
    return state;
}

Vector tau_state(ProtocolKind kind, std::uint32_t n, Theta theta, const BitString &v) {
    const std::size_t c = protocol::coordinate_count(kind, n);
    if (v.size() != c) {
        throw DomainError("tau label has the wrong length");
    }
    if (theta.kind() == Theta::Kind::Diamond && kind != ProtocolKind::SelfTest) {
        throw DomainError("diamond is a self-test theta");
    }
    if (theta.is_coordinate() && theta.slot() >= c) {
        throw DomainError("theta out of range");
    }
    const std::size_t dim = std::size_t{1} << c;
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    const double r = 1 / std::sqrt(2.0);
    for (std::size_t a = 0; a < dim; ++a) {
        const std::uint64_t bits = index_to_mask(a, c);
        auto bit = [bits](std::size_t i) { return static_cast<int>((bits >> i) & 1); };
        double amp = 1;
        if (theta.kind() == Theta::Kind::Diamond) {
            for (std::size_t i = 0; i < n; ++i) {
                const int s = (bit(i) ^ static_cast<int>(v[i])) & (bit(i + n) ^ static_cast<int>(v[i + n]));
                amp *= 0.5 * (s != 0 ? -1 : 1);
            }
        } else {
            for (std::size_t i = 0; i < c; ++i) {
                if (theta.is_coordinate() && i == theta.slot()) {
                    amp *= r * ((bit(i) & static_cast<int>(v[i])) != 0 ? -1 : 1);
                } else if (bit(i) != static_cast<int>(v[i])) {
                    amp = 0;
                    break;
                }
            }
        }
        out(static_cast<Eigen::Index>(a)) = amp;
    }
    return out;
}

Vector question_state(ProtocolKind kind, std::uint32_t n, int q, const BitString &u) {
    const std::size_t c = protocol::coordinate_count(kind, n);
    if (u.size() != c) {
        throw DomainError("answer label has the wrong length");
    }
    const auto rotated = prover::hadamard_positions(kind, n, q);
    const std::size_t dim = std::size_t{1} << c;
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    const double r = 1 / std::sqrt(2.0);
    for (std::size_t a = 0; a < dim; ++a) {
        const std::uint64_t bits = index_to_mask(a, c);
        double amp = 1;
        for (std::size_t i = 0; i < c; ++i) {
            const int ai = static_cast<int>((bits >> i) & 1);
            if (rotated[i]) {
                amp *= r * ((ai & static_cast<int>(u[i])) != 0 ? -1 : 1);
            } else if (ai != static_cast<int>(u[i])) {
                amp = 0;
                break;
            }
        }
        out(static_cast<Eigen::Index>(a)) = amp;
    }
    return out;
}

namespace {

// V^dag (sigma_k (x) 1) V from the row blocks of V: sigma^X_k pairs block a
// with a xor bit_k, sigma^Z_k signs block a by bit_k.
Matrix conjugate_by_ancilla(const Matrix &v, std::size_t k, std::size_t c, bool x_type) {
    const auto dim = v.cols();
    const std::size_t ancilla = std::size_t{1} << c;
    const std::size_t mask = std::size_t{1} << ancilla_bit(k, c);
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t a = 0; a < ancilla; ++a) {
        const auto lhs = v.middleRows(static_cast<Eigen::Index>(a) * dim, dim);
        if (x_type) {
            out += lhs.adjoint() * v.middleRows(static_cast<Eigen::Index>(a ^ mask) * dim, dim);
        } else {
            const double sign = (a & mask) != 0 ? -1.0 : 1.0;
            out += sign * (lhs.adjoint() * lhs);
        }
    }
    return out;
}

}  // namespace

SwapIdentityReport check_swap_identities(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                                         std::uint64_t seed) {
    const std::size_t c = model.coordinates();
    const auto d = static_cast<Eigen::Index>(model.dim());
    Rng rng(seed);
    OperatorCache cache(model);
    // V^dag (sX_k (x) 1) V - X_k per operator set.
    std::map<const BlockOperators *, std::vector<Matrix>> x_gaps;
    SwapIdentityReport out;
    for (const auto &[theta, set] : sets) {
        std::vector<double> x_dev(c, 0.0);
        for (const auto &block : set.blocks) {
            const auto &ops = cache.get(block);
            auto it = x_gaps.find(&ops);
            if (it == x_gaps.end()) {
                it = x_gaps.emplace(&ops, std::vector<Matrix>{}).first;
                const Matrix &v = ops.v;
                ++out.blocks;
                out.isometry_defect =
                    std::max(out.isometry_defect, qsim::operator_norm(v.adjoint() * v - Matrix::Identity(d, d)));
                for (std::size_t k = 0; k < c; ++k) {
                    it->second.push_back(conjugate_by_ancilla(v, k, c, true) - ops.obs.x[k]);
                    const Matrix conj_z = conjugate_by_ancilla(v, k, c, false);
                    out.z_defect = std::max(out.z_defect, qsim::operator_norm(conj_z - ops.obs.z[k]));
                    for (std::size_t j = k + 1; j < c; ++j) {
                        const Matrix &zk = ops.obs.z[k];
                        const Matrix &zj = ops.obs.z[j];
                        const Matrix &xk = ops.obs.x[k];
                        const Matrix &xj = ops.obs.x[j];
                        out.z_commutator = std::max(out.z_commutator, qsim::operator_norm(zk * zj - zj * zk));
                        out.x_commutator = std::max(out.x_commutator, qsim::operator_norm(xk * xj - xj * xk));
                    }
                }
                Matrix inputs(d, 3);
                for (Eigen::Index col = 0; col < inputs.cols(); ++col) {
                    inputs.col(col) = qsim::random_state(model.dim(), rng);
                }
                const Matrix circuit = swap_circuit(ops.obs.z, ops.obs.x, inputs);
                out.circuit_defect = std::max(out.circuit_defect, qsim::max_abs(circuit - v * inputs));
            }
            for (std::size_t k = 0; k < c; ++k) {
                x_dev[k] += weighted(it->second[k], block.factor);
            }
        }
        double worst = 0;
        for (double e : x_dev) {
            worst = std::max(worst, std::sqrt(e));
        }
        out.x_deviation[theta.to_string()] = worst;
    }
    return out;
}

SoundnessReport soundness_distance(const DeviceModel &model, const SigmaSet &set) {
    const std::size_t c = model.coordinates();
    const std::size_t dim = model.dim();
    const std::uint64_t answers = std::uint64_t{1} << c;
    OperatorCache cache(model);
    SoundnessReport out;
    out.theta = set.theta;
    out.measured_total.assign(static_cast<std::size_t>(model.question_count()), 0.0);
    std::map<BitString, Vector> taus;
    std::vector<std::vector<Vector>> targets(static_cast<std::size_t>(model.question_count()));
    for (int q = 0; q < model.question_count(); ++q) {
        for (std::uint64_t u = 0; u < answers; ++u) {
            targets[static_cast<std::size_t>(q)].push_back(question_state(model.kind(), model.n(), q, BitString(c, u)));
        }
    }
    for (const auto &block : set.blocks) {
        if (!block.v) {
            continue;
        }
        const BitString &v = *block.v;
        auto it = taus.find(v);
        if (it == taus.end()) {
            it = taus.emplace(v, tau_state(model.kind(), model.n(), set.theta, v)).first;
        }
        const Vector &tau = it->second;
        const auto &ops = cache.get(block);
        const Matrix g = ops.v * block.factor;
        const Matrix t = contract(tau, g, dim);
        const Matrix target = qsim::kron(Matrix(tau), t);
        const double dist = qsim::factor_difference_trace_norm(g, target);
        out.per_v[v] += dist;
        out.total += dist;
        out.alpha_trace[v] += t.squaredNorm();

        for (int q = 0; q < model.question_count(); ++q) {
            const auto &measurement = *block.questions[static_cast<std::size_t>(q)];
            const auto &outcomes = measurement.outcomes();
            const auto parts = measurement.project_all(block.factor);
            for (std::uint64_t u = 0; u < answers; ++u) {
                const Vector &uq = targets[static_cast<std::size_t>(q)][u];
                const double overlap = std::abs(uq.dot(tau));
                Matrix gu = Matrix::Zero(g.rows(), 0);
                const auto at = std::lower_bound(outcomes.begin(), outcomes.end(), u);
                if (at != outcomes.end() && *at == u) {
                    gu = ops.v * parts[static_cast<std::size_t>(at - outcomes.begin())];
                }
                Matrix hu = overlap * qsim::kron(Matrix(uq), t);
                out.measured_total[static_cast<std::size_t>(q)] += qsim::factor_difference_trace_norm(gu, hu);
            }
        }
    }
    return out;
}

CommutatorReport commutator_diagnostics(const DeviceModel &model, const SigmaSet &set) {
    const std::size_t c = model.coordinates();
    OperatorCache cache(model);
    CommutatorReport out;
    out.theta = set.theta;
    out.commutator.assign(c, std::vector<double>(c, 0.0));
    out.anticommutator.assign(c, 0.0);
    for (const auto &block : set.blocks) {
        const auto &obs = cache.get(block).obs;
        // Products with the factor first, so each term costs D^2 r, not D^3.
        std::vector<Matrix> zf, xf;
        for (std::size_t i = 0; i < c; ++i) {
            zf.push_back(obs.z[i] * block.factor);
            xf.push_back(obs.x[i] * block.factor);
        }
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                out.commutator[i][j] += (obs.z[i] * xf[j] - obs.x[j] * zf[i]).squaredNorm();
            }
            out.anticommutator[i] += (obs.z[i] * xf[i] + obs.x[i] * zf[i]).squaredNorm();
        }
    }
    for (auto &row : out.commutator) {
        for (auto &e : row) {
            e = std::sqrt(e);
        }
    }
    for (auto &e : out.anticommutator) {
        e = std::sqrt(e);
    }
    return out;
}

}  // namespace selftest::analysis
