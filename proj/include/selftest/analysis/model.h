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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selftest/core/bits.h"
#include "selftest/entcf/entcf.h"
#include "selftest/protocol/types.h"
#include "selftest/qsim/linalg.h"

namespace selftest::analysis {

using protocol::ProtocolKind;
using protocol::Theta;
using qsim::Matrix;
using qsim::Vector;

// Packed classical outcome of a measurement.
using Outcome = std::uint64_t;

// Projective measurement given by an orthonormal basis and one outcome per
// basis vector: P^o = sum of w_j w_j^dag over the columns j labelled o.
// Projectivity holds by construction once the basis is unitary.
class BasisMeasurement {
   public:
    BasisMeasurement(Matrix basis, std::vector<Outcome> labels);
    // Computational basis with label(j) for basis state j.
    static std::shared_ptr<const BasisMeasurement> computational(std::size_t dim,
                                                                 const std::function<Outcome(std::size_t)> &label);

    std::size_t dim() const { return static_cast<std::size_t>(basis_.rows()); }
    const Matrix &basis() const { return basis_; }
    std::span<const Outcome> labels() const { return labels_; }
    // Distinct outcomes, ascending.
    const std::vector<Outcome> &outcomes() const { return outcomes_; }

    Matrix projector(Outcome outcome) const;
    // P^o F for every outcome, in outcomes() order.
    std::vector<Matrix> project_all(const Matrix &factor) const;
    Matrix project(Outcome outcome, const Matrix &factor) const;
    // ||P^o F||_F^2 per outcome, in outcomes() order.
    std::vector<double> weights(const Matrix &factor) const;
    // sum_o eigenvalue(o) P^o
    Matrix observable(const std::function<double(Outcome)> &eigenvalue) const;

   private:
    std::size_t index_of(Outcome outcome) const;
    Matrix project_block(std::size_t index, const Matrix &coeffs) const;

    Matrix basis_;
    std::vector<Outcome> labels_;
    std::vector<Outcome> outcomes_;
    std::vector<std::vector<Eigen::Index>> columns_;
    bool identity_ = false;
};

using MeasurementPtr = std::shared_ptr<const BasisMeasurement>;

// max ||sum_a P_a - 1|| and max ||P_a P_b - delta_ab P_a|| (operator norm).
double projective_defect(std::span<const Matrix> projectors);

// Packs (b, x) and d tuples into outcomes: b_i at bit i, x_i at bit
// c + i*w, d_i at bit i*w.
struct OutcomeCodec {
    std::size_t coordinates = 0;
    std::uint32_t w = 0;

    OutcomeCodec(std::size_t coordinates, std::uint32_t w);
    Outcome pack_preimage(const BitString &b, std::span<const std::uint32_t> x) const;
    BitString unpack_b(Outcome outcome) const;
    std::vector<std::uint32_t> unpack_x(Outcome outcome) const;
    Outcome pack_d(std::span<const std::uint32_t> d) const;
    std::vector<std::uint32_t> unpack_d(Outcome outcome) const;
};

// psi^theta_y = factor factor^dag; trace equals Pr[y].
struct StateBlock {
    std::vector<entcf::Image> y;
    Matrix factor;
};

using TrapdoorTable = std::map<Theta, std::vector<entcf::Trapdoor>>;

// Subsystem split of H_D, most significant first, and which subsystems
// hold the tested qubits (one per coordinate).
struct RegisterLayout {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> logical;
};

// White-box device D = (S, M, Pi, P) with one fixed key tuple per theta.
// The measurement accessors receive theta only as a handle for its key
// tuple; implementations may depend on the public keys, never on theta.
// H_D = H_C (x) H_Q with H_C the most significant factor; every operator of
// the device is block diagonal over H_C.
class DeviceModel {
   public:
    DeviceModel(ProtocolKind kind, std::uint32_t n, entcf::EntcfParams params, std::uint64_t key_seed);
    virtual ~DeviceModel() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::size_t classical_dim() const { return 1; }
    virtual std::vector<StateBlock> states(Theta theta) const = 0;
    virtual MeasurementPtr preimage_measurement(Theta theta, std::span<const entcf::Image> y) const = 0;
    virtual MeasurementPtr d_measurement(Theta theta, std::span<const entcf::Image> y) const = 0;
    virtual MeasurementPtr question_measurement(Theta theta, std::span<const entcf::Image> y,
                                                std::span<const std::uint32_t> d, int q) const = 0;
    virtual std::optional<RegisterLayout> layout() const { return std::nullopt; }

    ProtocolKind kind() const { return kind_; }
    std::uint32_t n() const { return n_; }
    std::size_t coordinates() const { return protocol::coordinate_count(kind_, n_); }
    int question_count() const { return kind_ == ProtocolKind::SelfTest ? 4 : 2; }
    const entcf::EntcfParams &params() const { return params_; }
    std::uint64_t key_seed() const { return key_seed_; }
    const std::vector<Theta> &thetas() const { return thetas_; }
    OutcomeCodec codec() const { return OutcomeCodec(coordinates(), params_.preimage_bits); }

    std::vector<entcf::PublicKey> keys(Theta theta) const;
    TrapdoorTable trapdoors() const;

    // Throws ModelError if a basis is not unitary, a state is not normalized
    // or an operator is not block diagonal over H_C.
    void validate() const;

   private:
    const std::vector<entcf::KeyPair> &key_pairs(Theta theta) const;

    ProtocolKind kind_;
    std::uint32_t n_;
    entcf::EntcfParams params_;
    std::uint64_t key_seed_;
    std::vector<Theta> thetas_;
    std::map<Theta, std::vector<entcf::KeyPair>> keys_;
};

struct ModelConfig {
    ProtocolKind kind = ProtocolKind::SelfTest;
    std::uint32_t n = 1;
    std::uint32_t w = 2;
    std::uint64_t key_seed = 1;
    std::size_t max_dim = std::size_t{1} << 12;
};

struct ModelSpec {
    enum class Kind { Honest, BitFlip, WrongBasis, Random, Classical };
    Kind kind = Kind::Honest;
    double flip_probability = 0;
    std::uint64_t seed = 0;

    // "honest", "bitflip=P", "wrongbasis", "random=SEED", "classical=SEED".
    static ModelSpec parse(const std::string &text);
    std::string to_string() const;
};

// Honest prover in device form: H_D = b qubits (x) x registers, the
// controlled-Z layer folded into the post-y state (it commutes with M and
// Pi), P_q measuring the b qubits in the q-dependent bases.
std::unique_ptr<DeviceModel> build_honest_model(const ModelConfig &config);
// Honest device plus one coin qubit per coordinate prepared as
// sqrt(1-p)|0> + sqrt(p)|1>; P_q reports the honest outcome xor the coins.
std::unique_ptr<DeviceModel> build_bitflip_model(const ModelConfig &config, double p);
// Honest device with the q=0 and q=1 measurements exchanged.
std::unique_ptr<DeviceModel> build_wrong_basis_model(const ModelConfig &config);
// Small random device: Haar bases with random outcome labels, Pi biased
// toward true preimages, a few image tuples per theta.
std::unique_ptr<DeviceModel> build_random_model(const ModelConfig &config, std::uint64_t seed);
// Deterministic classical device: remembers b in a classical register,
// sends a fixed nonzero d and answers Hadamard positions with fixed guesses.
std::unique_ptr<DeviceModel> build_classical_model(const ModelConfig &config, std::uint64_t seed);
std::unique_ptr<DeviceModel> build_model(const ModelSpec &spec, const ModelConfig &config);

// Index conversions between a coordinate bit mask (coordinate i at bit i)
// and a tensor index (coordinate 0 most significant).
std::size_t mask_to_index(std::uint64_t mask, std::size_t coordinates);
std::uint64_t index_to_mask(std::size_t index, std::size_t coordinates);

}  // namespace selftest::analysis
