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

#include <optional>

#include "selftest/analysis/metrics.h"

namespace selftest::analysis {

struct RankCheck {
    double epsilon = 0;  // ||U(|0><0| (x) rho)U^dag - 2^-n 1 (x) alpha||_1
    std::size_t rank = 0;
    double required = 0;  // (1 - epsilon) 2^n
    bool bound_satisfied = false;
    // |<a|b>|^2 <= R b_max^2 for a = vec(U(|0><0| (x) sqrt rho)U^dag) and
    // b = vec(sqrt(2^-n 1 (x) alpha)).
    double overlap = 0;
    std::size_t schmidt_rank = 0;
    double max_schmidt = 0;
    bool schmidt_satisfied = false;
};

// U acts on C^{2^n} (x) H with the qubits most significant. Throws
// ParameterError if U is not unitary (1e-9), the dimensions disagree or
// rho/alpha are not density operators.
RankCheck rank_bound_check(const Matrix &u, const Matrix &rho, const Matrix &alpha, std::uint32_t n);

// Unitary U on C^{2^n} (x) H with U(|0> (x) psi) = V psi, the remaining
// columns an orthonormal basis of the complement of range(V).
Matrix extend_isometry(const Matrix &v);

struct DimensionCertificate {
    std::size_t support = 0;         // |S|
    BitString v_min;
    double v_min_distance = 0;       // sum over blocks, normalized by Tr sigma^v
    std::map<BitString, double> distances;
    std::vector<entcf::Image> y_star;
    std::vector<std::uint32_t> d_star;
    std::size_t classical_star = 0;  // H_C index of the selected block
    std::size_t quantum_dim = 0;
    RankCheck check;
    double bound = 0;                // max(0, 1 - epsilon) 2^N
    bool consistent = false;         // quantum_dim >= rank >= bound
};

// Dimension-test model only. Uses the theta = 0 blocks and the q = 1
// measurement. Throws ModelError when every Tr[sigma^v] vanishes.
DimensionCertificate dimension_certificate(const DeviceModel &model, const TrapdoorTable &trapdoors);

}  // namespace selftest::analysis
