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

#include <map>
#include <string>
#include <vector>

#include "selftest/analysis/metrics.h"

namespace selftest::analysis {

// Binary observables of one (y, d) block. Z and X come from P0 and P1;
// Z-tilde and X-tilde (self-test only) from P2 and P3 by coordinate half.
struct MarginalObservables {
    std::vector<Matrix> z, x, z_tilde, x_tilde;
};

MarginalObservables marginal_observables(const DeviceModel &model, const SigmaBlock &block);

// sum_u |u> (x) X_1^{u_1} ... X_c^{u_c} Z_1^{(u_1)} ... Z_c^{(u_c)} as a
// (2^c D) x D matrix, ancilla most significant, coordinate 1 its top qubit.
Matrix swap_isometry(std::span<const Matrix> z, std::span<const Matrix> x);
// The same map realized gate by gate on input columns: ancilla |0^c>, then
// per coordinate H, controlled-Z_i, H, then the controlled-X_i layer.
Matrix swap_circuit(std::span<const Matrix> z, std::span<const Matrix> x, const Matrix &inputs);

// Target states on the c tested qubits (coordinate 1 most significant).
// tau^{theta,v}: |v> with coordinate theta rotated to |(-)^{v_theta}>; |v>
// for theta = 0; the locally rotated EPR pairs |psi^v> for diamond.
Vector tau_state(ProtocolKind kind, std::uint32_t n, Theta theta, const BitString &v);
// |u^{(q)}>: u with the q-dependent Hadamard rotations.
Vector question_state(ProtocolKind kind, std::uint32_t n, int q, const BitString &u);

// Per-block identity defects, maximized over the blocks of all thetas.
struct SwapIdentityReport {
    double isometry_defect = 0;  // ||V^dag V - 1||
    double z_defect = 0;         // max_k ||V^dag (sZ_k (x) 1) V - Z_k||
    double circuit_defect = 0;   // max entry of |circuit - formula| on random inputs
    double z_commutator = 0;     // max ||[Z_i, Z_j]||
    double x_commutator = 0;     // max ||[X_i, X_j]||
    // ||V^dag (sX_k (x) 1) V - X_k||_{sigma^theta} per theta, max over k.
    std::map<std::string, double> x_deviation;
    std::size_t blocks = 0;
};

SwapIdentityReport check_swap_identities(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                                         std::uint64_t seed);

struct SoundnessReport {
    Theta theta = Theta::zero();
    // Sum over blocks of ||V sigma V^dag - tau (x) alpha||_1 per v.
    std::map<BitString, double> per_v;
    double total = 0;
    // Post-measurement analogue per question q: sum over v and u of
    // ||V P^u sigma P^u V^dag - |<u^q|tau>|^2 |u^q><u^q| (x) alpha||_1.
    std::vector<double> measured_total;
    // Tr[alpha^{theta,v}] per v.
    std::map<BitString, double> alpha_trace;
};

SoundnessReport soundness_distance(const DeviceModel &model, const SigmaSet &set);

// sqrt(Tr[A^dag A sigma^theta]) for A = [Z_i, X_j] and {Z_i, X_i}, row i,
// column j (1-based in the text form, 0-based here).
struct CommutatorReport {
    Theta theta = Theta::zero();
    std::vector<std::vector<double>> commutator;
    std::vector<double> anticommutator;
};

CommutatorReport commutator_diagnostics(const DeviceModel &model, const SigmaSet &set);

}  // namespace selftest::analysis
