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

#include "selftest/analysis/rank.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "selftest/analysis/swap.h"
#include "selftest/core/error.h"

namespace selftest::analysis {

namespace {

constexpr double density_tol = 1e-9;
constexpr double rank_slack = 1e-9;

void require_density(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ParameterError(std::string(what) + " must be a nonempty square matrix");
    }
    if (!qsim::is_hermitian(m, density_tol)) {
        throw ParameterError(std::string(what) + " is not Hermitian");
    }
    if (std::abs(m.trace().real() - 1) > density_tol) {
        throw ParameterError(std::string(what) + " does not have unit trace");
    }
    if (qsim::hermitian_eigenvalues(m).minCoeff() < -density_tol) {
        throw ParameterError(std::string(what) + " is not positive semidefinite");
    }
}

// Positive square root, with round-off negative eigenvalues clipped.
Matrix psd_sqrt(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()));
    Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix zero_projector(std::size_t qubits) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    Matrix p = Matrix::Zero(dim, dim);
    p(0, 0) = 1;
    return p;
}

}  // namespace

RankCheck rank_bound_check(const Matrix &u, const Matrix &rho, const Matrix &alpha, std::uint32_t n) {
    if (n == 0 || n > 16) {
        throw ParameterError("qubit count must be in [1, 16]");
    }
    require_density(rho, "rho");
    require_density(alpha, "alpha");
    const Eigen::Index qubits_dim = Eigen::Index{1} << n;
    const Eigen::Index h = rho.rows();
    if (alpha.rows() != h) {
        throw ParameterError("rho and alpha act on different spaces");
    }
    if (u.rows() != qubits_dim * h || u.cols() != u.rows()) {
        throw ParameterError("U does not act on C^{2^n} (x) H");
    }
    if (qsim::operator_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) > 1e-9) {
        throw ParameterError("U is not unitary");
    }
    const Matrix identity = Matrix::Identity(qubits_dim, qubits_dim);
    const double scale = 1.0 / static_cast<double>(qubits_dim);
    const Matrix lhs = u * qsim::kron(zero_projector(n), rho) * u.adjoint();
    const Matrix target = qsim::kron(scale * identity, alpha);

    RankCheck out;
    out.epsilon = qsim::trace_norm(lhs - target);
    out.rank = qsim::numerical_rank(rho);
    out.required = (1 - out.epsilon) * static_cast<double>(qubits_dim);
    out.bound_satisfied = static_cast<double>(out.rank) >= out.required - rank_slack;

    const Vector a = qsim::vec(u * qsim::kron(zero_projector(n), psd_sqrt(rho)) * u.adjoint());
    const Vector b = qsim::vec(psd_sqrt(target));
    const auto side = static_cast<std::size_t>(u.rows());
    const Eigen::VectorXd sa = qsim::schmidt_coefficients(a, side, side);
    const Eigen::VectorXd sb = qsim::schmidt_coefficients(b, side, side);
    const double cutoff = qsim::rank_rel_tol * sa.maxCoeff();
    out.schmidt_rank = static_cast<std::size_t>((sa.array() > cutoff).count());
    out.max_schmidt = sb.maxCoeff();
    out.overlap = std::norm(a.dot(b));
    out.schmidt_satisfied =
        out.overlap <= static_cast<double>(out.schmidt_rank) * out.max_schmidt * out.max_schmidt + rank_slack;
    return out;
}

Matrix extend_isometry(const Matrix &v) {
    if (v.cols() == 0 || v.rows() % v.cols() != 0) {
        throw DomainError("isometry shape is not (k d) x d");
    }
    if (qsim::operator_norm(v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())) > 1e-9) {
        throw ModelError("map to extend is not an isometry");
    }
    Eigen::HouseholderQR<Matrix> qr(v);
    const Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), v.rows());
    Matrix u(v.rows(), v.rows());
    u.leftCols(v.cols()) = v;
    u.rightCols(v.rows() - v.cols()) = q.rightCols(v.rows() - v.cols());
    return u;
}

DimensionCertificate dimension_certificate(const DeviceModel &model, const TrapdoorTable &trapdoors) {
    if (model.kind() != ProtocolKind::DimTest) {
        throw ModelError("the dimension certificate needs a dimension-test model");
    }
    const std::uint32_t n = model.n();
    const std::size_t dim = model.dim();
    const std::size_t classes = model.classical_dim();
    const std::size_t dq = dim / classes;
    const auto qubits_dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    const double root_scale = 1 / std::sqrt(static_cast<double>(qubits_dim));
    const Matrix spread = root_scale * Matrix::Identity(qubits_dim, qubits_dim);

    const SigmaSet set = sigma_blocks(model, Theta::zero(), trapdoors);
    std::map<BitString, double> mass;
    for (const auto &b : set.blocks) {
        if (b.v) {
            mass[*b.v] += b.weight;
        }
    }
    std::erase_if(mass, [](const auto &entry) { return entry.second <= 1e-15; });
    if (mass.empty()) {
        throw ModelError("every sigma^v of the dimension test vanishes");
    }

    std::map<std::pair<const BasisMeasurement *, const BasisMeasurement *>, Matrix> isometries;
    auto isometry_of = [&](const SigmaBlock &b) -> const Matrix & {
        auto key = std::make_pair(b.questions[0].get(), b.questions[1].get());
        auto it = isometries.find(key);
        if (it == isometries.end()) {
            auto obs = marginal_observables(model, b);
            it = isometries.emplace(key, swap_isometry(obs.z, obs.x)).first;
        }
        return it->second;
    };
    // Factor of rho^v restricted to one block: the q = 1 dephased state
    // divided by Tr[sigma^v].
    auto dephased = [&](const SigmaBlock &b, double trace) {
        auto parts = b.questions[1]->project_all(b.factor);
        Eigen::Index cols = 0;
        for (const auto &p : parts) {
            cols += p.cols();
        }
        Matrix r(b.factor.rows(), cols);
        Eigen::Index at = 0;
        for (const auto &p : parts) {
            r.middleCols(at, p.cols()) = p;
            at += p.cols();
        }
        return Matrix(r / std::sqrt(trace));
    };

    DimensionCertificate out;
    out.support = mass.size();
    out.quantum_dim = dq;
    double best = std::numeric_limits<double>::infinity();
    for (const auto &[v, trace] : mass) {
        const Vector tau = tau_state(model.kind(), n, Theta::zero(), v);
        double distance = 0;
        for (const auto &b : set.blocks) {
            if (!b.v || *b.v != v) {
                continue;
            }
            const Matrix &iso = isometry_of(b);
            const Matrix r = dephased(b, trace);
            Matrix t = Matrix::Zero(static_cast<Eigen::Index>(dim), b.factor.cols());
            const Matrix g = iso * b.factor / std::sqrt(trace);
            for (Eigen::Index a = 0; a < tau.size(); ++a) {
                t += std::conj(tau(a)) * g.middleRows(a * static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            }
            distance += qsim::factor_difference_trace_norm(iso * r, qsim::kron(spread, t));
        }
        out.distances[v] = distance;
        if (distance < best) {
            best = distance;
            out.v_min = v;
        }
    }
    out.v_min_distance = best;

    // Pick the classical block with the smallest normalized distance.
    const Vector tau = tau_state(model.kind(), n, Theta::zero(), out.v_min);
    const double trace = mass.at(out.v_min);
    double best_score = std::numeric_limits<double>::infinity();
    Matrix best_v, best_r, best_t;
    for (const auto &b : set.blocks) {
        if (!b.v || *b.v != out.v_min) {
            continue;
        }
        const Matrix &iso = isometry_of(b);
        const Matrix r = dephased(b, trace);
        const Matrix g = iso * b.factor / std::sqrt(trace);
        for (std::size_t c = 0; c < classes; ++c) {
            const auto offset = static_cast<Eigen::Index>(c * dq);
            const auto q = static_cast<Eigen::Index>(dq);
            Matrix vc(qubits_dim * q, q);
            Matrix tc = Matrix::Zero(q, b.factor.cols());
            for (Eigen::Index a = 0; a < qubits_dim; ++a) {
                const Eigen::Index row = a * static_cast<Eigen::Index>(dim) + offset;
                vc.middleRows(a * q, q) = iso.block(row, offset, q, q);
                tc += std::conj(tau(a)) * g.middleRows(row, q);
            }
            const Matrix rc = r.middleRows(offset, q);
            const double tr = rc.squaredNorm();
            if (tr <= 1e-12) {
                continue;
            }
            const double score = qsim::factor_difference_trace_norm(vc * rc, qsim::kron(spread, tc)) / tr;
            if (score < best_score) {
                best_score = score;
                best_v = vc;
                best_r = rc;
                best_t = tc;
                out.y_star = b.y;
                out.d_star = b.d;
                out.classical_star = c;
            }
        }
    }
    const double tr_r = best_r.squaredNorm();
    const Matrix rho = best_r * best_r.adjoint() / tr_r;
    const double tr_t = best_t.squaredNorm();
    const auto q = static_cast<Eigen::Index>(dq);
    const Matrix alpha = tr_t > 1e-12 ? Matrix(best_t * best_t.adjoint() / tr_t)
                                      : Matrix(Matrix::Identity(q, q) / static_cast<double>(dq));
    out.check = rank_bound_check(extend_isometry(best_v), rho, alpha, n);
    out.bound = std::max(0.0, 1 - out.check.epsilon) * static_cast<double>(qubits_dim);
    out.consistent = dq >= out.check.rank && static_cast<double>(out.check.rank) >= out.bound - rank_slack;
    return out;
}

}  // namespace selftest::analysis
