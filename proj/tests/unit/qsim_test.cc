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

#include <doctest.h>

#include <cmath>

#include "selftest/qsim/linalg.h"
#include "selftest/qsim/state_vector.h"

using namespace selftest;
using namespace selftest::qsim;

namespace {

Vector bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1 / std::sqrt(2.0);
    return v;
}

}  // namespace

TEST_CASE("trace norm of simple operators") {
    Matrix z = pauli_z();
    CHECK(trace_norm(z) == doctest::Approx(2));
    CHECK(operator_norm(z) == doctest::Approx(1));
    // Rank-one difference of two pure states: 2 sqrt(1 - |<a|b>|^2).
    Vector a = basis_vector(2, 0);
    Vector b = hadamard() * a;
    CHECK(trace_norm(outer(a, a) - outer(b, b)) == doctest::Approx(2 * std::sqrt(0.5)));
}

TEST_CASE("factor trace norm agrees with the dense form") {
    Rng rng(21);
    for (int k = 0; k < 5; ++k) {
        Matrix g = Matrix::Random(6, 2);
        Matrix h = Matrix::Random(6, 3);
        CHECK(factor_difference_trace_norm(g, h) ==
              doctest::Approx(trace_norm(g * g.adjoint() - h * h.adjoint())).epsilon(1e-9));
    }
}

TEST_CASE("bell state marginals and schmidt coefficients") {
    const Vector v = bell();
    const Matrix rho = outer(v, v);
    const std::size_t dims[] = {2, 2};
    const std::size_t keep0[] = {0};
    const Matrix reduced = partial_trace(rho, dims, keep0);
    CHECK(max_abs(reduced - 0.5 * Matrix::Identity(2, 2)) < 1e-12);
    const auto s = schmidt_coefficients(v, 2, 2);
    CHECK(s(0) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(s(1) == doctest::Approx(1 / std::sqrt(2.0)));
    const Vector product = kron(Matrix(basis_vector(2, 1)), Matrix(basis_vector(2, 0)));
    CHECK(schmidt_coefficients(product, 2, 2)(1) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("partial trace over the more significant factor") {
    Rng rng(22);
    const Matrix a = random_density(2, 2, rng);
    const Matrix b = random_density(3, 2, rng);
    const std::size_t dims[] = {2, 3};
    const std::size_t keep1[] = {1};
    const std::size_t keep0[] = {0};
    CHECK(max_abs(partial_trace(kron(a, b), dims, keep1) - b) < 1e-12);
    CHECK(max_abs(partial_trace(kron(a, b), dims, keep0) - a) < 1e-12);
}

TEST_CASE("vec convention") {
    Rng rng(23);
    const Matrix a = Matrix::Random(2, 3);
    const Matrix b = Matrix::Random(2, 2);
    const Matrix c = Matrix::Random(3, 3);
    CHECK((kron(b, c) * vec(a) - vec(b * a * c.transpose())).norm() < 1e-12);
    CHECK(max_abs(unvec(vec(a), 2, 3) - a) == 0);
}

TEST_CASE("random generators produce valid objects") {
    Rng rng(24);
    for (std::size_t d : {2, 3, 8}) {
        CHECK(is_unitary(random_unitary(d, rng)));
        CHECK(random_state(d, rng).norm() == doctest::Approx(1));
        const Matrix rho = random_density(d, 2, rng);
        CHECK(is_hermitian(rho));
        CHECK(rho.trace().real() == doctest::Approx(1));
        CHECK(numerical_rank(rho) == 2);
        CHECK(hermitian_eigenvalues(rho).minCoeff() > -1e-12);
    }
}

TEST_CASE("hadamard_n and observable projectors") {
    const Matrix h2 = hadamard_n(2);
    CHECK(is_unitary(h2));
    CHECK(max_abs(h2 - kron(hadamard(), hadamard())) < 1e-15);
    const Matrix p0 = observable_projector(pauli_x(), 0);
    CHECK(is_projector(p0));
    CHECK(max_abs(p0 - 0.5 * (Matrix::Identity(2, 2) + pauli_x())) < 1e-15);
}

TEST_CASE("cq operator arithmetic") {
    CQOperator a(2), b(2);
    a.add({0}, Matrix::Identity(2, 2) * 0.25);
    a.add({1}, Matrix::Identity(2, 2) * 0.25);
    b.add({0}, Matrix::Identity(2, 2) * 0.25);
    CHECK(a.trace() == doctest::Approx(1));
    CHECK(trace_norm(a - b) == doctest::Approx(0.5));
    CHECK(max_abs(a.classical_trace() - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("state vector bell preparation and measurement") {
    StateVector s({{"a", 1}, {"b", 1}});
    s.apply_hadamard("a");
    // CNOT a -> b from H on b, CZ, H on b.
    s.apply_hadamard("b");
    s.controlled_z(s.qubit("a", 0), s.qubit("b", 0));
    s.apply_hadamard("b");
    CHECK((s.amplitudes() - bell()).norm() < 1e-12);
    const auto pa = s.probabilities("a");
    CHECK(pa[0] == doctest::Approx(0.5));
    const auto px = s.probabilities("a", Basis::Hadamard);
    CHECK(px[0] == doctest::Approx(0.5));
    StateVector t = s;
    CHECK(t.project("a", 1) == doctest::Approx(0.5));
    CHECK(t.probabilities("b")[1] == doctest::Approx(1));
    Rng rng(25);
    const auto m = s.measure("a", Basis::Hadamard, rng);
    CHECK(m.post.probabilities("b", Basis::Hadamard)[m.outcome] == doctest::Approx(1));
}

TEST_CASE("density operator validation") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 1;
    CHECK_THROWS(DensityOperator(bad));
    CHECK_NOTHROW(DensityOperator(0.5 * Matrix::Identity(2, 2)));
}
