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

#include "selftest/analysis/rank.h"
#include "selftest/analysis/report.h"
#include "selftest/analysis/swap.h"
#include "selftest/core/error.h"
#include "selftest/harness/run.h"

using namespace selftest;
using namespace selftest::analysis;
using qsim::Matrix;

namespace {

ModelConfig selftest_config(std::uint32_t n, std::uint32_t w, std::uint64_t key_seed = 1) {
    ModelConfig c;
    c.kind = ProtocolKind::SelfTest;
    c.n = n;
    c.w = w;
    c.key_seed = key_seed;
    return c;
}

// Honest self-test with N = 1: a Hadamard-round check fails only when the
// F decoding it needs is undefined (d = 0 on that coordinate). q=1 is
// checked with an equation by theta in {1, 2}; q=2 and q=3 by one
// coordinate theta and by diamond; q=0 never uses an F coordinate.
std::vector<double> honest_eps_h_n1(std::uint32_t w) {
    const double undefined = std::ldexp(1.0, -static_cast<int>(w));
    return {0, 0.5 * undefined, 0.5 * undefined, 0.5 * undefined};
}

Matrix swap_gate() {
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = s(3, 3) = s(1, 2) = s(2, 1) = 1;
    return s;
}

}  // namespace

TEST_CASE("model spec text round trip") {
    for (const char *text : {"honest", "bitflip=0.25", "wrongbasis", "random=7", "classical=3"}) {
        CHECK(ModelSpec::parse(text).to_string() == text);
    }
    CHECK_THROWS_AS(ModelSpec::parse("bitflip=2"), ParameterError);
    CHECK_THROWS_AS(ModelSpec::parse("bogus"), ParameterError);
}

TEST_CASE("honest failure probabilities match the closed form") {
    for (std::uint32_t w : {2u, 3u}) {
        const auto model = build_honest_model(selftest_config(1, w));
        model->validate();
        const auto f = failure_report(*model, model->trapdoors());
        const auto expected = honest_eps_h_n1(w);
        CHECK(f.eps_p == doctest::Approx(0));
        REQUIRE(f.eps_h.size() == 4);
        for (int q = 0; q < 4; ++q) {
            CHECK(f.eps_h[q] == doctest::Approx(expected[q]).epsilon(1e-12));
        }
        CHECK(f.eps == doctest::Approx(3 * std::ldexp(1.0, -static_cast<int>(w)) / 16));
    }
}

TEST_CASE("honest model invariants") {
    const auto model = build_honest_model(selftest_config(1, 2));
    const auto trapdoors = model->trapdoors();
    const auto sets = all_sigma_blocks(*model, trapdoors);
    const auto gamma = gamma_report(*model, sets, trapdoors);
    CHECK(std::abs(gamma.gamma_p) < 1e-12);
    for (const auto &[theta, t] : gamma.t) {
        CHECK(t == doctest::Approx(gamma.t_chk.at(theta)));
    }
    const auto swap = check_swap_identities(*model, sets, 3);
    CHECK(swap.isometry_defect < 1e-10);
    CHECK(swap.z_defect < 1e-10);
    CHECK(swap.circuit_defect < 1e-10);
    for (const auto &[theta, set] : sets) {
        const auto s = soundness_distance(*model, set);
        CHECK(s.total < 1e-9);
    }
    CHECK(sigma_order_min_eigenvalue(sets) > -1e-10);
}

TEST_CASE("tau states are normalized") {
    for (auto theta : Theta::all_selftest(2)) {
        for (std::uint64_t bits = 0; bits < 16; ++bits) {
            BitString v(4);
            for (std::size_t i = 0; i < 4; ++i) {
                v.set(i, (bits >> i) & 1);
            }
            CHECK(tau_state(ProtocolKind::SelfTest, 2, theta, v).norm() == doctest::Approx(1));
        }
    }
}

TEST_CASE("swap isometry of single-qubit Paulis is the swap gate") {
    const std::vector<Matrix> z{qsim::pauli_z()};
    const std::vector<Matrix> x{qsim::pauli_x()};
    const Matrix v = swap_isometry(z, x);
    REQUIRE(v.rows() == 4);
    // Exact Paulis: V^dag (P (x) 1) V = P for P in {Z, X}.
    CHECK(qsim::max_abs(v.adjoint() * v - Matrix::Identity(2, 2)) < 1e-12);
    CHECK(qsim::max_abs(v.adjoint() * qsim::kron(qsim::pauli_z(), Matrix::Identity(2, 2)) * v - qsim::pauli_z()) <
          1e-12);
    CHECK(qsim::max_abs(v.adjoint() * qsim::kron(qsim::pauli_x(), Matrix::Identity(2, 2)) * v - qsim::pauli_x()) <
          1e-12);
}

TEST_CASE("rank bound on the swap example") {
    const Matrix zero = qsim::outer(qsim::basis_vector(2, 0), qsim::basis_vector(2, 0));
    // Maximally mixed rho: U(|0><0| (x) 1/2)U^dag = 1/2 (x) |0><0| exactly.
    const auto mixed = rank_bound_check(swap_gate(), 0.5 * Matrix::Identity(2, 2), zero, 1);
    CHECK(mixed.epsilon == doctest::Approx(0).epsilon(1e-12));
    CHECK(mixed.rank == 2);
    CHECK(mixed.bound_satisfied);
    CHECK(mixed.schmidt_satisfied);
    // Pure rho: the distance is 1, so the bound asks for nothing.
    const auto pure = rank_bound_check(swap_gate(), zero, zero, 1);
    CHECK(pure.epsilon == doctest::Approx(1));
    CHECK(pure.rank == 1);
    CHECK(pure.bound_satisfied);
}

TEST_CASE("rank check input validation") {
    const Matrix id = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(rank_bound_check(Matrix::Identity(4, 4) * 2, 0.5 * id, 0.5 * id, 1), ParameterError);
    CHECK_THROWS_AS(rank_bound_check(swap_gate(), id, 0.5 * id, 1), ParameterError);
    CHECK_THROWS_AS(rank_bound_check(swap_gate(), 0.5 * id, 0.5 * id, 2), ParameterError);
}

TEST_CASE("isometry extension") {
    Rng rng(41);
    const Matrix u = qsim::random_unitary(6, rng);
    const Matrix v = u.leftCols(2);
    const Matrix ext = extend_isometry(v);
    CHECK(qsim::is_unitary(ext));
    CHECK(qsim::max_abs(ext.leftCols(2) - v) == 0);
    CHECK_THROWS_AS(extend_isometry(Matrix::Ones(6, 2)), ModelError);
}

TEST_CASE("dimension certificate for honest and classical devices") {
    ModelConfig c;
    c.kind = ProtocolKind::DimTest;
    c.n = 1;
    c.w = 2;
    const auto honest = build_honest_model(c);
    const auto hc = dimension_certificate(*honest, honest->trapdoors());
    CHECK(hc.check.epsilon == doctest::Approx(0).epsilon(1e-9));
    CHECK(hc.check.rank == 2);
    CHECK(hc.consistent);
    const auto classical = build_classical_model(c, 1);
    const auto cc = dimension_certificate(*classical, classical->trapdoors());
    CHECK(cc.check.epsilon == doctest::Approx(1));
    CHECK(cc.bound == doctest::Approx(0));
    CHECK(cc.consistent);
}

TEST_CASE("random models are valid devices") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto model = build_random_model(selftest_config(1, 2), seed);
        CHECK_NOTHROW(model->validate());
        const auto f = failure_report(*model, model->trapdoors());
        CHECK(f.eps >= 0);
        CHECK(f.eps <= 1);
    }
}

// Two routes to the same failure probabilities: the exact device analysis
// and the harness sampling real sessions through the verifier.
TEST_CASE("analysis eps agrees with harness sampling") {
    for (const char *prover : {"honest", "bitflip=0.1"}) {
        const auto model = build_model(ModelSpec::parse(prover), selftest_config(1, 2));
        const auto exact = failure_report(*model, model->trapdoors());

        harness::RunConfig rc;
        rc.n = 1;
        rc.w = 2;
        rc.prover = harness::ProverSpec::parse(prover);
        rc.sessions = 20000;
        rc.seed = 4242;
        const auto run = harness::run_sessions(rc);
        auto within = [](const harness::Rate &rate, double p) {
            const double se = std::sqrt(std::max(p * (1 - p), 1e-4) / static_cast<double>(rate.trials));
            return std::abs(rate.estimate - p) <= 5 * se;
        };
        CHECK(within(run.stats.eps_p, exact.eps_p));
        for (int q = 0; q < 4; ++q) {
            CHECK(within(run.stats.eps_h[q], exact.eps_h[q]));
        }
    }
}

TEST_CASE("analyze report shape") {
    AnalysisOptions options;
    options.model = ModelSpec::parse("honest");
    options.config = selftest_config(1, 2);
    options.key_samples = 2;
    const auto result = analyze(options);
    const auto &r = result.report;
    CHECK(r.at("report_version") == report_version);
    CHECK(r.contains("gamma"));
    CHECK(r.contains("bounds"));
    CHECK(r.contains("key_average"));
    CHECK(r.at("checks").at("swap_isometry").at("pass") == true);
    CHECK(r.at("all_pass") == result.ok());
}
