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

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "selftest/core/rng.h"

namespace selftest::qsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Default tolerances.
inline constexpr double hermitian_tol = 1e-10;
inline constexpr double psd_tol = 1e-9;
inline constexpr double rank_rel_tol = 1e-8;

Matrix pauli_x();
Matrix pauli_z();
Matrix hadamard();
// H^{(x)k} on k qubits.
Matrix hadamard_n(std::size_t qubits);
Matrix kron(const Matrix &a, const Matrix &b);
Matrix kron_all(std::span<const Matrix> factors);
// |index><index| style outer product helper.
Matrix outer(const Vector &a, const Vector &b);
Vector basis_vector(std::size_t dim, std::size_t index);

bool is_hermitian(const Matrix &a, double tol = hermitian_tol);
bool is_unitary(const Matrix &u, double tol = 1e-9);
bool is_projector(const Matrix &p, double tol = hermitian_tol);
// Largest entrywise modulus; used for the infinity-style identity checks.
double max_abs(const Matrix &a);

// Schatten norms.
double trace_norm(const Matrix &a);
double operator_norm(const Matrix &a);
// ||A||_psi = sqrt(Tr[A^dag A psi]).
double state_dep_norm(const Matrix &a, const Matrix &psi);
// ||G G^dag - H H^dag||_1 computed on the column span of [G H].
double factor_difference_trace_norm(const Matrix &g, const Matrix &h);

// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const Matrix &a);
// Count of eigenvalues above rel_tol times the largest one.
std::size_t numerical_rank(const Matrix &hermitian, double rel_tol = rank_rel_tol);
// Orthonormal basis of the column span (numerical rank by rel_tol on
// singular values).
Matrix orthonormal_span(const Matrix &columns, double rel_tol = 1e-12);

// (1 + (-1)^b O) / 2.
Matrix observable_projector(const Matrix &observable, int b);

// Row-major vector-operator correspondence: vec(|i><j|) = |i>|j>, so that
// (B (x) C) vec(A) = vec(B A C^T).
Vector vec(const Matrix &a);
Matrix unvec(const Vector &v, std::size_t rows, std::size_t cols);
// Singular values of v reshaped as dim_a x dim_b, nonincreasing.
Eigen::VectorXd schmidt_coefficients(const Vector &v, std::size_t dim_a, std::size_t dim_b);

// Partial trace over the subsystems not listed in `keep`. Subsystem 0 is
// the most significant tensor factor.
Matrix partial_trace(const Matrix &rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep);

// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
Matrix random_unitary(std::size_t dim, Rng &rng);
Vector random_state(std::size_t dim, Rng &rng);
// Random density operator of the given rank (normalized Wishart).
Matrix random_density(std::size_t dim, std::size_t rank, Rng &rng);

// Validated density operator. Sub-normalized operators are allowed.
class DensityOperator {
   public:
    explicit DensityOperator(Matrix rho);
    const Matrix &matrix() const { return rho_; }
    std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }
    double trace() const { return rho_.trace().real(); }

   private:
    Matrix rho_;
};

// Block-diagonal operator sum_label block (x) |label><label|. Labels are
// tuples of classical values; absent labels are zero blocks.
class CQOperator {
   public:
    using Label = std::vector<std::uint64_t>;

    explicit CQOperator(std::size_t block_dim = 0) : block_dim_(block_dim) {}

    std::size_t block_dim() const { return block_dim_; }
    const std::map<Label, Matrix> &blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    // Adds `block` to the block at `label`.
    void add(const Label &label, const Matrix &block);
    const Matrix *find(const Label &label) const;

    double trace() const;
    // Sum of blocks (trace over the classical register).
    Matrix classical_trace() const;

    friend CQOperator operator-(const CQOperator &a, const CQOperator &b);

   private:
    std::size_t block_dim_;
    std::map<Label, Matrix> blocks_;
};

double trace_norm(const CQOperator &a);
// Traces out the classical labels and then the quantum subsystems not kept.
Matrix partial_trace(const CQOperator &a, std::span<const std::size_t> dims, std::span<const std::size_t> keep);

}  // namespace selftest::qsim
