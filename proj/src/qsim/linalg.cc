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

#include "selftest/qsim/linalg.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selftest/core/error.h"

namespace selftest::qsim {

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix hadamard() {
    Matrix m(2, 2);
    const double r = std::numbers::sqrt2 / 2;
    m << r, r, r, -r;
    return m;
}

Matrix hadamard_n(std::size_t qubits) {
    const std::size_t dim = std::size_t{1} << qubits;
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(qubits));
    Matrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            m(i, j) = (std::popcount(i & j) & 1) ? -scale : scale;
        }
    }
    return m;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto &f : factors) {
        out = kron(out, f);
    }
    return out;
}

Matrix outer(const Vector &a, const Vector &b) {
    return a * b.adjoint();
}

Vector basis_vector(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw DomainError("basis index out of range");
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1;
    return v;
}

double max_abs(const Matrix &a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix &a, double tol) {
    return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

bool is_unitary(const Matrix &u, double tol) {
    return u.rows() == u.cols() && max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

bool is_projector(const Matrix &p, double tol) {
    return is_hermitian(p, tol) && max_abs(p * p - p) <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix &a) {
    if (a.rows() != a.cols()) {
        throw DomainError("eigenvalues of a non-square matrix");
    }
    if (a.size() == 0) {
        return {};
    }
    Matrix h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double trace_norm(const Matrix &a) {
    if (a.size() == 0) {
        return 0;
    }
    double scale = std::max(1.0, max_abs(a));
    if (a.rows() == a.cols() && max_abs(a - a.adjoint()) <= 1e-12 * scale) {
        return hermitian_eigenvalues(a).cwiseAbs().sum();
    }
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double operator_norm(const Matrix &a) {
    if (a.size() == 0) {
        return 0;
    }
    if (a.rows() == a.cols() && max_abs(a - a.adjoint()) == 0) {
        return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
    }
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double state_dep_norm(const Matrix &a, const Matrix &psi) {
    if (a.cols() != psi.rows() || psi.rows() != psi.cols()) {
        throw DomainError("state-dependent norm: dimension mismatch");
    }
    double v = (a.adjoint() * a * psi).trace().real();
    return std::sqrt(std::max(0.0, v));
}

double factor_difference_trace_norm(const Matrix &g, const Matrix &h) {
    if (g.rows() != h.rows()) {
        throw DomainError("factor difference: row mismatch");
    }
    const Eigen::Index rows = g.rows();
    const Eigen::Index cols = g.cols() + h.cols();
    if (cols == 0) {
        return 0;
    }
    if (cols >= rows) {
        return trace_norm(Matrix(g * g.adjoint() - h * h.adjoint()));
    }
    Matrix k(rows, cols);
    k << g, h;
    Eigen::HouseholderQR<Matrix> qr(k);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    Matrix gs = q.adjoint() * g;
    Matrix hs = q.adjoint() * h;
    return trace_norm(Matrix(gs * gs.adjoint() - hs * hs.adjoint()));
}

std::size_t numerical_rank(const Matrix &hermitian, double rel_tol) {
    auto ev = hermitian_eigenvalues(hermitian);
    if (ev.size() == 0) {
        return 0;
    }
    double top = ev.maxCoeff();
    if (top <= 0) {
        return 0;
    }
    return static_cast<std::size_t>((ev.array() > rel_tol * top).count());
}

Matrix orthonormal_span(const Matrix &columns, double rel_tol) {
    if (columns.cols() == 0) {
        return Matrix(columns.rows(), 0);
    }
    Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
    const auto &s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel_tol * std::max(s(0), 1e-300)) {
        ++r;
    }
    return svd.matrixU().leftCols(r);
}

Matrix observable_projector(const Matrix &observable, int b) {
    Matrix id = Matrix::Identity(observable.rows(), observable.cols());
    return (id + (b ? -1.0 : 1.0) * observable) / 2.0;
}

Vector vec(const Matrix &a) {
    Vector v(a.size());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            v(i * a.cols() + j) = a(i, j);
        }
    }
    return v;
}

Matrix unvec(const Vector &v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != rows * cols) {
        throw DomainError("unvec: size is not rows*cols");
    }
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            a(i, j) = v(i * cols + j);
        }
    }
    return a;
}

Eigen::VectorXd schmidt_coefficients(const Vector &v, std::size_t dim_a, std::size_t dim_b) {
    if (dim_a == 0 || dim_b == 0 || static_cast<std::size_t>(v.size()) != dim_a * dim_b) {
        throw DomainError("Schmidt cut does not factor the vector length");
    }
    Eigen::BDCSVD<Matrix> svd(unvec(v, dim_a, dim_b));
    return svd.singularValues();
}

Matrix partial_trace(const Matrix &rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
    std::size_t total = 1;
    for (auto d : dims) {
        total *= d;
    }
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total) {
        throw DomainError("partial_trace: subsystem dims do not match the operator");
    }
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw DomainError("partial_trace: unknown or repeated subsystem");
        }
        kept[k] = true;
    }
    std::size_t keep_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (kept[s]) {
            keep_dim *= dims[s];
        }
    }
    const std::size_t traced_dim = total / keep_dim;
    // full_index[a * traced_dim + t] for kept index a and traced index t.
    std::vector<std::size_t> full_index(total);
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t s = dims.size(); s-- > 0;) {
            digits[s] = rest % dims[s];
            rest /= dims[s];
        }
        std::size_t a = 0, t = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            if (kept[s]) {
                a = a * dims[s] + digits[s];
            } else {
                t = t * dims[s] + digits[s];
            }
        }
        full_index[a * traced_dim + t] = idx;
    }
    Matrix out = Matrix::Zero(keep_dim, keep_dim);
    for (std::size_t a = 0; a < keep_dim; ++a) {
        for (std::size_t b = 0; b < keep_dim; ++b) {
            Complex acc = 0;
            for (std::size_t t = 0; t < traced_dim; ++t) {
                acc += rho(full_index[a * traced_dim + t], full_index[b * traced_dim + t]);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            double re = rng.normal();
            double im = rng.normal();
            g(i, j) = Complex(re, im) / std::numbers::sqrt2;
        }
    }
    return g;
}

}  // namespace

Matrix random_unitary(std::size_t dim, Rng &rng) {
    Matrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        Complex d = r(i, i);
        double mag = std::abs(d);
        q.col(i) *= mag > 0 ? d / mag : Complex(1);
    }
    return q;
}

Vector random_state(std::size_t dim, Rng &rng) {
    Vector v = ginibre(dim, 1, rng).col(0);
    return v / v.norm();
}

Matrix random_density(std::size_t dim, std::size_t rank, Rng &rng) {
    if (rank == 0 || rank > dim) {
        throw DomainError("random_density: rank must be in [1, dim]");
    }
    Matrix g = ginibre(dim, rank, rng);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

DensityOperator::DensityOperator(Matrix rho) : rho_(std::move(rho)) {
    if (!is_hermitian(rho_, hermitian_tol)) {
        throw DomainError("density operator is not Hermitian");
    }
    auto ev = hermitian_eigenvalues(rho_);
    if (ev.size() > 0 && ev.minCoeff() < -psd_tol) {
        throw DomainError("density operator is not positive semidefinite");
    }
    if (trace() > 1 + psd_tol) {
        throw DomainError("density operator has trace above 1");
    }
}

void CQOperator::add(const Label &label, const Matrix &block) {
    if (static_cast<std::size_t>(block.rows()) != block_dim_ || static_cast<std::size_t>(block.cols()) != block_dim_) {
        throw DomainError("CQ block has the wrong dimension");
    }
    auto [it, inserted] = blocks_.try_emplace(label, block);
    if (!inserted) {
        it->second += block;
    }
}

const Matrix *CQOperator::find(const Label &label) const {
    auto it = blocks_.find(label);
    return it == blocks_.end() ? nullptr : &it->second;
}

double CQOperator::trace() const {
    double t = 0;
    for (const auto &[label, block] : blocks_) {
        t += block.trace().real();
    }
    return t;
}

Matrix CQOperator::classical_trace() const {
    Matrix out = Matrix::Zero(block_dim_, block_dim_);
    for (const auto &[label, block] : blocks_) {
        out += block;
    }
    return out;
}

CQOperator operator-(const CQOperator &a, const CQOperator &b) {
    if (a.block_dim_ != b.block_dim_) {
        throw DomainError("CQ operators have different block dimensions");
    }
    CQOperator out = a;
    for (const auto &[label, block] : b.blocks_) {
        out.add(label, -block);
    }
    return out;
}

double trace_norm(const CQOperator &a) {
    double total = 0;
    for (const auto &[label, block] : a.blocks()) {
        total += trace_norm(block);
    }
    return total;
}

Matrix partial_trace(const CQOperator &a, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
    return partial_trace(a.classical_trace(), dims, keep);
}

}  // namespace selftest::qsim
