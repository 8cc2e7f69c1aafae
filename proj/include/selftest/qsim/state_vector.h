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

#include <string>
#include <vector>

#include "selftest/qsim/linalg.h"

namespace selftest::qsim {

enum class Basis { Computational, Hadamard };

struct RegisterSpec {
    std::string name;
    std::size_t qubits = 0;
};

// Dense state over named qubit registers. Register 0 is the most
// significant tensor factor; inside a register, bit k of the register value
// is its k-th qubit.
class StateVector {
   public:
    StateVector() = default;
    // |0...0>.
    explicit StateVector(std::vector<RegisterSpec> registers);
    StateVector(std::vector<RegisterSpec> registers, Vector amplitudes);

    const std::vector<RegisterSpec> &registers() const { return registers_; }
    const Vector &amplitudes() const { return amplitudes_; }
    std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
    std::size_t total_qubits() const;
    double norm() const { return amplitudes_.norm(); }
    void normalize();

    std::size_t register_index(const std::string &name) const;
    // Global qubit index of qubit `bit` of register `name`.
    std::size_t qubit(const std::string &name, std::size_t bit) const;
    // Value of register r inside basis index idx.
    std::uint64_t register_value(std::size_t idx, std::size_t r) const;

    // Applies a 2^k x 2^k unitary to a whole register.
    void apply(const std::string &name, const Matrix &unitary);
    void apply_hadamard(const std::string &name);
    // Single-qubit gates by global qubit index.
    void apply_qubit(std::size_t qubit, const Matrix &gate);
    void controlled_z(std::size_t qubit_i, std::size_t qubit_j);

    // Born probabilities of the register values in the given basis.
    std::vector<double> probabilities(const std::string &name, Basis basis = Basis::Computational) const;
    // Collapses onto register value `outcome` (in the given basis) and
    // renormalizes. Returns the branch probability. Throws std::logic_error
    // on a zero-norm branch.
    double project(const std::string &name, std::uint64_t outcome, Basis basis = Basis::Computational);

    struct Measurement;
    Measurement measure(const std::string &name, Basis basis, Rng &rng) const;

   private:
    std::size_t stride(std::size_t r) const;

    std::vector<RegisterSpec> registers_;
    Vector amplitudes_;
};

struct StateVector::Measurement {
    std::uint64_t outcome = 0;
    StateVector post;
};

}  // namespace selftest::qsim
