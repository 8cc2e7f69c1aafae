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

#include "selftest/qsim/state_vector.h"

#include <cmath>
#include <stdexcept>

#include "selftest/core/error.h"

namespace selftest::qsim {

namespace {

constexpr std::size_t max_total_qubits = 26;

std::size_t checked_dim(const std::vector<RegisterSpec> &registers) {
    std::size_t qubits = 0;
    for (const auto &r : registers) {
        if (r.qubits == 0) {
            throw DomainError("register '" + r.name + "' has no qubits");
        }
        qubits += r.qubits;
    }
    if (qubits > max_total_qubits) {
        throw BudgetError("state vector exceeds the qubit budget");
    }
    for (std::size_t i = 0; i < registers.size(); ++i) {
        for (std::size_t j = i + 1; j < registers.size(); ++j) {
            if (registers[i].name == registers[j].name) {
                throw DomainError("duplicate register name '" + registers[i].name + "'");
            }
        }
    }
    return std::size_t{1} << qubits;
}

}  // namespace

StateVector::StateVector(std::vector<RegisterSpec> registers) : registers_(std::move(registers)) {
    amplitudes_ = Vector::Zero(static_cast<Eigen::Index>(checked_dim(registers_)));
    amplitudes_(0) = 1;
}

StateVector::StateVector(std::vector<RegisterSpec> registers, Vector amplitudes)
    : registers_(std::move(registers)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != checked_dim(registers_)) {
        throw DomainError("amplitude vector does not match the register layout");
    }
}

std::size_t StateVector::total_qubits() const {
    std::size_t q = 0;
    for (const auto &r : registers_) {
        q += r.qubits;
    }
    return q;
}

void StateVector::normalize() {
    double n = norm();
    if (n == 0) {
        throw std::logic_error("cannot normalize the zero vector");
    }
    amplitudes_ /= n;
}

std::size_t StateVector::register_index(const std::string &name) const {
    for (std::size_t r = 0; r < registers_.size(); ++r) {
        if (registers_[r].name == name) {
            return r;
        }
    }
    throw DomainError("unknown register '" + name + "'");
}

std::size_t StateVector::stride(std::size_t r) const {
    std::size_t shift = 0;
    for (std::size_t s = r + 1; s < registers_.size(); ++s) {
        shift += registers_[s].qubits;
    }
    return shift;
}

std::size_t StateVector::qubit(const std::string &name, std::size_t bit) const {
    std::size_t r = register_index(name);
    if (bit >= registers_[r].qubits) {
        throw DomainError("qubit index outside register '" + name + "'");
    }
    return stride(r) + bit;
}

std::uint64_t StateVector::register_value(std::size_t idx, std::size_t r) const {
    return (idx >> stride(r)) & ((std::uint64_t{1} << registers_[r].qubits) - 1);
}

void StateVector::apply(const std::string &name, const Matrix &unitary) {
    const std::size_t r = register_index(name);
    const std::size_t k = registers_[r].qubits;
    const std::size_t local = std::size_t{1} << k;
    if (static_cast<std::size_t>(unitary.rows()) != local || static_cast<std::size_t>(unitary.cols()) != local) {
        throw DomainError("gate dimension does not match register '" + name + "'");
    }
    const std::size_t shift = stride(r);
    const std::size_t low = std::size_t{1} << shift;
    const std::size_t dim = dimension();
    Vector in(static_cast<Eigen::Index>(local));
    for (std::size_t high = 0; high < dim; high += local * low) {
        for (std::size_t l = 0; l < low; ++l) {
            for (std::size_t v = 0; v < local; ++v) {
                in(v) = amplitudes_(high + (v << shift) + l);
            }
            Vector out = unitary * in;
            for (std::size_t v = 0; v < local; ++v) {
                amplitudes_(high + (v << shift) + l) = out(v);
            }
        }
    }
}

void StateVector::apply_hadamard(const std::string &name) {
    apply(name, hadamard_n(registers_[register_index(name)].qubits));
}

void StateVector::apply_qubit(std::size_t q, const Matrix &gate) {
    if (q >= total_qubits()) {
        throw DomainError("qubit index out of range");
    }
    if (gate.rows() != 2 || gate.cols() != 2) {
        throw DomainError("single-qubit gate must be 2x2");
    }
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t idx = 0; idx < dimension(); ++idx) {
        if (idx & mask) {
            continue;
        }
        Complex a0 = amplitudes_(idx);
        Complex a1 = amplitudes_(idx | mask);
        amplitudes_(idx) = gate(0, 0) * a0 + gate(0, 1) * a1;
        amplitudes_(idx | mask) = gate(1, 0) * a0 + gate(1, 1) * a1;
    }
}

void StateVector::controlled_z(std::size_t qubit_i, std::size_t qubit_j) {
    const std::size_t n = total_qubits();
    if (qubit_i >= n || qubit_j >= n) {
        throw DomainError("controlled_z: qubit index out of range");
    }
    if (qubit_i == qubit_j) {
        throw DomainError("controlled_z needs two distinct qubits");
    }
    const std::size_t both = (std::size_t{1} << qubit_i) | (std::size_t{1} << qubit_j);
    for (std::size_t idx = 0; idx < dimension(); ++idx) {
        if ((idx & both) == both) {
            amplitudes_(idx) = -amplitudes_(idx);
        }
    }
}

std::vector<double> StateVector::probabilities(const std::string &name, Basis basis) const {
    const std::size_t r = register_index(name);
    if (basis == Basis::Hadamard) {
        StateVector rotated = *this;
        rotated.apply_hadamard(name);
        return rotated.probabilities(name, Basis::Computational);
    }
    std::vector<double> probs(std::size_t{1} << registers_[r].qubits, 0.0);
    for (std::size_t idx = 0; idx < dimension(); ++idx) {
        probs[register_value(idx, r)] += std::norm(amplitudes_(idx));
    }
    return probs;
}

double StateVector::project(const std::string &name, std::uint64_t outcome, Basis basis) {
    const std::size_t r = register_index(name);
    if (outcome >= (std::uint64_t{1} << registers_[r].qubits)) {
        throw DomainError("outcome outside register '" + name + "'");
    }
    if (basis == Basis::Hadamard) {
        apply_hadamard(name);
    }
    double p = 0;
    for (std::size_t idx = 0; idx < dimension(); ++idx) {
        if (register_value(idx, r) == outcome) {
            p += std::norm(amplitudes_(idx));
        } else {
            amplitudes_(idx) = 0;
        }
    }
    if (p <= 0) {
        throw std::logic_error("measurement selected a zero-norm branch");
    }
    amplitudes_ /= std::sqrt(p);
    if (basis == Basis::Hadamard) {
        apply_hadamard(name);
    }
    return p;
}

StateVector::Measurement StateVector::measure(const std::string &name, Basis basis, Rng &rng) const {
    auto probs = probabilities(name, basis);
    double u = rng.uniform() * norm() * norm();
    std::uint64_t outcome = 0;
    double acc = 0;
    // Last nonzero outcome absorbs rounding at the top of the range.
    std::uint64_t last_nonzero = 0;
    for (std::uint64_t v = 0; v < probs.size(); ++v) {
        if (probs[v] > 0) {
            last_nonzero = v;
        }
    }
    outcome = last_nonzero;
    for (std::uint64_t v = 0; v < probs.size(); ++v) {
        acc += probs[v];
        if (u < acc && probs[v] > 0) {
            outcome = v;
            break;
        }
    }
    Measurement m{outcome, *this};
    m.post.project(name, outcome, basis);
    return m;
}

}  // namespace selftest::qsim
