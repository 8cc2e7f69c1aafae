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

#include "selftest/analysis/model.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "selftest/core/error.h"
#include "selftest/core/rng.h"
#include "selftest/protocol/verifier.h"

namespace selftest::analysis {

BasisMeasurement::BasisMeasurement(Matrix basis, std::vector<Outcome> labels)
    : basis_(std::move(basis)), labels_(std::move(labels)) {
    if (basis_.rows() != basis_.cols() || static_cast<std::size_t>(basis_.cols()) != labels_.size()) {
        throw ModelError("measurement basis must be square with one label per column");
    }
    outcomes_ = labels_;
    std::sort(outcomes_.begin(), outcomes_.end());
    outcomes_.erase(std::unique(outcomes_.begin(), outcomes_.end()), outcomes_.end());
    columns_.resize(outcomes_.size());
    for (std::size_t j = 0; j < labels_.size(); ++j) {
        columns_[index_of(labels_[j])].push_back(static_cast<Eigen::Index>(j));
    }
    identity_ = basis_.isIdentity(0.0);
}

std::shared_ptr<const BasisMeasurement> BasisMeasurement::computational(
    std::size_t dim, const std::function<Outcome(std::size_t)> &label) {
    std::vector<Outcome> labels(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        labels[j] = label(j);
    }
    return std::make_shared<const BasisMeasurement>(Matrix::Identity(dim, dim), std::move(labels));
}

std::size_t BasisMeasurement::index_of(Outcome outcome) const {
    auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), outcome);
    if (it == outcomes_.end() || *it != outcome) {
        throw DomainError("outcome not produced by this measurement");
    }
    return static_cast<std::size_t>(it - outcomes_.begin());
}

Matrix BasisMeasurement::projector(Outcome outcome) const {
    const auto &cols = columns_[index_of(outcome)];
    Matrix w(basis_.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        w.col(static_cast<Eigen::Index>(k)) = basis_.col(cols[k]);
    }
    return w * w.adjoint();
}

std::vector<Matrix> BasisMeasurement::project_all(const Matrix &factor) const {
    const Matrix coeffs = identity_ ? factor : Matrix(basis_.adjoint() * factor);
    std::vector<Matrix> out;
    out.reserve(outcomes_.size());
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out.push_back(project_block(i, coeffs));
    }
    return out;
}

Matrix BasisMeasurement::project(Outcome outcome, const Matrix &factor) const {
    const std::size_t i = index_of(outcome);
    if (identity_) {
        return project_block(i, factor);
    }
    Matrix basis_cols(basis_.rows(), static_cast<Eigen::Index>(columns_[i].size()));
    for (std::size_t k = 0; k < columns_[i].size(); ++k) {
        basis_cols.col(static_cast<Eigen::Index>(k)) = basis_.col(columns_[i][k]);
    }
    return basis_cols * (basis_cols.adjoint() * factor);
}

// P^o F from the basis coefficients W^dag F (or F itself for the identity basis).
Matrix BasisMeasurement::project_block(std::size_t index, const Matrix &coeffs) const {
    const auto &cols = columns_[index];
    if (identity_) {
        Matrix part = Matrix::Zero(coeffs.rows(), coeffs.cols());
        for (auto j : cols) {
            part.row(j) = coeffs.row(j);
        }
        return part;
    }
    const auto count = static_cast<Eigen::Index>(cols.size());
    Matrix basis_cols(basis_.rows(), count);
    Matrix sub(count, coeffs.cols());
    for (Eigen::Index k = 0; k < count; ++k) {
        basis_cols.col(k) = basis_.col(cols[static_cast<std::size_t>(k)]);
        sub.row(k) = coeffs.row(cols[static_cast<std::size_t>(k)]);
    }
    return basis_cols * sub;
}

std::vector<double> BasisMeasurement::weights(const Matrix &factor) const {
    Matrix coeffs = identity_ ? factor : Matrix(basis_.adjoint() * factor);
    std::vector<double> out(outcomes_.size(), 0.0);
    for (std::size_t o = 0; o < columns_.size(); ++o) {
        for (auto j : columns_[o]) {
            out[o] += coeffs.row(j).squaredNorm();
        }
    }
    return out;
}

Matrix BasisMeasurement::observable(const std::function<double(Outcome)> &eigenvalue) const {
    Eigen::VectorXcd diag(basis_.cols());
    for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
        diag(j) = eigenvalue(labels_[static_cast<std::size_t>(j)]);
    }
    return basis_ * diag.asDiagonal() * basis_.adjoint();
}

double projective_defect(std::span<const Matrix> projectors) {
    if (projectors.empty()) {
        return 0;
    }
    const auto dim = projectors.front().rows();
    Matrix sum = Matrix::Zero(dim, dim);
    double worst = 0;
    for (std::size_t a = 0; a < projectors.size(); ++a) {
        sum += projectors[a];
        for (std::size_t b = a; b < projectors.size(); ++b) {
            Matrix prod = projectors[a] * projectors[b];
            if (a == b) {
                prod -= projectors[a];
            }
            worst = std::max(worst, qsim::operator_norm(prod));
        }
    }
    sum -= Matrix::Identity(dim, dim);
    return std::max(worst, qsim::operator_norm(sum));
}

OutcomeCodec::OutcomeCodec(std::size_t coordinates, std::uint32_t w) : coordinates(coordinates), w(w) {
    if (coordinates * (1 + std::size_t{w}) > 64) {
        throw BudgetError("outcome packing needs more than 64 bits");
    }
}

Outcome OutcomeCodec::pack_preimage(const BitString &b, std::span<const std::uint32_t> x) const {
    Outcome out = b.mask();
    for (std::size_t i = 0; i < coordinates; ++i) {
        out |= Outcome{x[i]} << (coordinates + i * w);
    }
    return out;
}

BitString OutcomeCodec::unpack_b(Outcome outcome) const {
    const Outcome low = coordinates == 64 ? ~Outcome{0} : (Outcome{1} << coordinates) - 1;
    return BitString(coordinates, outcome & low);
}

std::vector<std::uint32_t> OutcomeCodec::unpack_x(Outcome outcome) const {
    std::vector<std::uint32_t> x(coordinates);
    const Outcome chunk = (Outcome{1} << w) - 1;
    for (std::size_t i = 0; i < coordinates; ++i) {
        x[i] = static_cast<std::uint32_t>((outcome >> (coordinates + i * w)) & chunk);
    }
    return x;
}

Outcome OutcomeCodec::pack_d(std::span<const std::uint32_t> d) const {
    Outcome out = 0;
    for (std::size_t i = 0; i < coordinates; ++i) {
        out |= Outcome{d[i]} << (i * w);
    }
    return out;
}

std::vector<std::uint32_t> OutcomeCodec::unpack_d(Outcome outcome) const {
    std::vector<std::uint32_t> d(coordinates);
    const Outcome chunk = (Outcome{1} << w) - 1;
    for (std::size_t i = 0; i < coordinates; ++i) {
        d[i] = static_cast<std::uint32_t>((outcome >> (i * w)) & chunk);
    }
    return d;
}

DeviceModel::DeviceModel(ProtocolKind kind, std::uint32_t n, entcf::EntcfParams params, std::uint64_t key_seed)
    : kind_(kind), n_(n), params_(std::move(params)), key_seed_(key_seed) {
    if (n_ == 0) {
        throw ParameterError("N must be positive");
    }
    params_.validate();
    thetas_ = kind_ == ProtocolKind::SelfTest ? Theta::all_selftest(n_) : Theta::all_dimtest(n_);
    for (std::size_t t = 0; t < thetas_.size(); ++t) {
        Rng rng(derive_seed(key_seed_, t));
        keys_.emplace(thetas_[t], protocol::sample_keys(kind_, n_, thetas_[t], params_, rng));
    }
}

const std::vector<entcf::KeyPair> &DeviceModel::key_pairs(Theta theta) const {
    auto it = keys_.find(theta);
    if (it == keys_.end()) {
        throw DomainError("theta " + theta.to_string() + " is not used by this protocol");
    }
    return it->second;
}

std::vector<entcf::PublicKey> DeviceModel::keys(Theta theta) const {
    std::vector<entcf::PublicKey> out;
    for (const auto &pair : key_pairs(theta)) {
        out.push_back(pair.key);
    }
    return out;
}

TrapdoorTable DeviceModel::trapdoors() const {
    TrapdoorTable out;
    for (const auto &[theta, pairs] : keys_) {
        auto &list = out[theta];
        for (const auto &pair : pairs) {
            list.push_back(pair.trapdoor);
        }
    }
    return out;
}

namespace {

void check_basis(const BasisMeasurement &m, std::size_t dim, std::size_t classical, const char *what) {
    if (m.dim() != dim) {
        throw ModelError(std::string(what) + " acts on the wrong dimension");
    }
    if (!qsim::is_unitary(m.basis(), 1e-9)) {
        throw ModelError(std::string(what) + " basis is not orthonormal");
    }
    if (classical == 1) {
        return;
    }
    const auto block = static_cast<Eigen::Index>(dim / classical);
    for (auto o : m.outcomes()) {
        Matrix p = m.projector(o);
        for (Eigen::Index a = 0; a < p.rows(); ++a) {
            for (Eigen::Index b = 0; b < p.cols(); ++b) {
                if (a / block != b / block && std::abs(p(a, b)) > 1e-10) {
                    throw ModelError(std::string(what) + " is not block diagonal over H_C");
                }
            }
        }
    }
}

}  // namespace

void DeviceModel::validate() const {
    const std::size_t d = dim();
    const std::size_t c = classical_dim();
    if (c == 0 || d % c != 0) {
        throw ModelError("classical dimension must divide the device dimension");
    }
    // Models share measurement objects across labels; check each once.
    std::set<const BasisMeasurement *> seen;
    auto check = [&](const MeasurementPtr &m, const char *what) {
        if (seen.insert(m.get()).second) {
            check_basis(*m, d, c, what);
        }
    };
    for (auto theta : thetas_) {
        double total = 0;
        for (const auto &block : states(theta)) {
            if (static_cast<std::size_t>(block.factor.rows()) != d) {
                throw ModelError("state factor has the wrong dimension");
            }
            total += block.factor.squaredNorm();
            check(preimage_measurement(theta, block.y), "preimage measurement");
            auto m = d_measurement(theta, block.y);
            check(m, "d measurement");
            for (auto o : m->outcomes()) {
                auto dv = codec().unpack_d(o);
                for (int q = 0; q < question_count(); ++q) {
                    check(question_measurement(theta, block.y, dv, q), "question measurement");
                }
            }
        }
        if (std::abs(total - 1) > 1e-9) {
            throw ModelError("state for theta " + theta.to_string() + " is not normalized");
        }
    }
}

ModelSpec ModelSpec::parse(const std::string &text) {
    ModelSpec spec;
    auto eq = text.find('=');
    std::string head = text.substr(0, eq);
    std::string arg = eq == std::string::npos ? "" : text.substr(eq + 1);
    auto need_arg = [&] {
        if (arg.empty()) {
            throw ParameterError("model '" + head + "' needs a value");
        }
    };
    if (head == "honest" && arg.empty()) {
        spec.kind = Kind::Honest;
    } else if (head == "wrongbasis" && arg.empty()) {
        spec.kind = Kind::WrongBasis;
    } else if (head == "bitflip") {
        need_arg();
        char *end = nullptr;
        spec.flip_probability = std::strtod(arg.c_str(), &end);
        if (*end != '\0' || !(spec.flip_probability >= 0 && spec.flip_probability <= 1)) {
            throw ParameterError("bitflip probability must be in [0, 1]");
        }
        spec.kind = Kind::BitFlip;
    } else if (head == "random" || head == "classical") {
        need_arg();
        char *end = nullptr;
        spec.seed = std::strtoull(arg.c_str(), &end, 10);
        if (*end != '\0') {
            throw ParameterError("model seed must be a decimal integer");
        }
        spec.kind = head == "random" ? Kind::Random : Kind::Classical;
    } else {
        throw ParameterError("unknown model '" + text + "'");
    }
    return spec;
}

std::string ModelSpec::to_string() const {
    switch (kind) {
        case Kind::Honest:
            return "honest";
        case Kind::WrongBasis:
            return "wrongbasis";
        case Kind::BitFlip: {
            std::string p = std::to_string(flip_probability);
            p.erase(p.find_last_not_of('0') + 1);
            if (p.back() == '.') {
                p.pop_back();
            }
            return "bitflip=" + p;
        }
        case Kind::Random:
            return "random=" + std::to_string(seed);
        case Kind::Classical:
            return "classical=" + std::to_string(seed);
    }
    return "?";
}

std::unique_ptr<DeviceModel> build_model(const ModelSpec &spec, const ModelConfig &config) {
    switch (spec.kind) {
        case ModelSpec::Kind::Honest:
            return build_honest_model(config);
        case ModelSpec::Kind::BitFlip:
            return build_bitflip_model(config, spec.flip_probability);
        case ModelSpec::Kind::WrongBasis:
            return build_wrong_basis_model(config);
        case ModelSpec::Kind::Random:
            return build_random_model(config, spec.seed);
        case ModelSpec::Kind::Classical:
            return build_classical_model(config, spec.seed);
    }
    throw ParameterError("unknown model kind");
}

std::size_t mask_to_index(std::uint64_t mask, std::size_t coordinates) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < coordinates; ++i) {
        index = (index << 1) | ((mask >> i) & 1);
    }
    return index;
}

std::uint64_t index_to_mask(std::size_t index, std::size_t coordinates) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < coordinates; ++i) {
        mask |= std::uint64_t{(index >> (coordinates - 1 - i)) & 1} << i;
    }
    return mask;
}

}  // namespace selftest::analysis
