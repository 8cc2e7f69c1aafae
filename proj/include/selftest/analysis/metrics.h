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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selftest/analysis/model.h"
#include "selftest/protocol/verdict.h"

namespace selftest::analysis {

// One post-d block sigma^theta_{y,d} = M^d_y psi^theta_y M^d_y, stored as a
// factor F with sigma = F F^dag.
struct SigmaBlock {
    std::vector<entcf::Image> y;
    std::vector<std::uint32_t> d;
    Matrix factor;
    double weight = 0;
    protocol::Decodings decodings;
    // The v with (y, d) in Sigma(theta, v); nullopt if (y, d) is in no set.
    std::optional<BitString> v;
    std::vector<MeasurementPtr> questions;
    // Per question: (u, Tr[P_q^u sigma]) in outcome order.
    std::vector<std::vector<std::pair<Outcome, double>>> answers;

    qsim::CQOperator::Label label() const;
};

struct SigmaSet {
    Theta theta = Theta::zero();
    std::vector<SigmaBlock> blocks;

    double total_weight() const;
    double labelled_weight() const;
};

// All nonzero post-d blocks of theta in (y, d) order. Throws DomainError if
// the trapdoors for theta are missing.
SigmaSet sigma_blocks(const DeviceModel &model, Theta theta, const TrapdoorTable &trapdoors);
std::map<Theta, SigmaSet> all_sigma_blocks(const DeviceModel &model, const TrapdoorTable &trapdoors);

// sigma^{theta,v} as CQ operators over the (y, d) labels.
std::map<BitString, qsim::CQOperator> sigma_theta_v(const SigmaSet &set);
qsim::CQOperator sigma_theta(const SigmaSet &set);

// Keyed by theta's text form and 1-based coordinate.
using CoordinateTable = std::map<std::pair<std::string, std::size_t>, double>;

struct GammaReport {
    double gamma_p = 0;
    double gamma_t0 = 0;
    double gamma_t1 = 0;
    double gamma_t0_tilde = 0;
    double gamma_t0_tilde_prime = 0;
    double gamma_t1_tilde = 0;
    double gamma_t = 0;
    double gamma_diamond0 = 0;
    double gamma_diamond1 = 0;
    double gamma_diamond = 0;

    std::map<std::string, double> t;      // INV form
    std::map<std::string, double> t_chk;  // CHK form
    CoordinateTable r, s, r_tilde, s_tilde;
    std::vector<double> r_diamond, s_diamond;  // index i-1 for i in [N]
    // Sum_v Tr[sigma^{theta,v}] per theta.
    std::map<std::string, double> labelled_mass;
};

struct FailureReport {
    ProtocolKind kind = ProtocolKind::SelfTest;
    double eps_p = 0;
    std::vector<double> eps_h;  // one entry per question
    double eps = 0;

    // eps = eps_P/2 + sum_q eps_{H,q}/8 for the self-test and
    // eps_P/2 + (eps_{H,0} + eps_{H,1})/4 for the dimension test.
    static FailureReport compose(ProtocolKind kind, double eps_p, std::vector<double> eps_h);
};

GammaReport gamma_report(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                         const TrapdoorTable &trapdoors);
GammaReport gamma_report(const DeviceModel &model, const TrapdoorTable &trapdoors);

// Exact failure probabilities of the model with its fixed keys, theta
// uniform, evaluated through the verifier's verdict functions.
FailureReport failure_report(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                             const TrapdoorTable &trapdoors);
FailureReport failure_report(const DeviceModel &model, const TrapdoorTable &trapdoors);

struct BoundCheck {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;  // rhs - lhs
    bool pass = false;
};

struct BoundsReport {
    std::vector<BoundCheck> checks;
    bool all_pass() const;
    std::string first_failure() const;
};

inline constexpr double bound_slack_tol = 1e-9;

// The gamma-versus-failure inequalities, each as stated.
BoundsReport check_gamma_bounds(std::uint32_t n, const GammaReport &gamma, const FailureReport &failure);
// Diagnostic form with the right-hand sides raised by the mass of post-d
// blocks that lie in no Sigma set (counted once per gamma on the left).
BoundsReport check_gamma_bounds_with_excluded_mass(std::uint32_t n, const GammaReport &gamma,
                                                   const FailureReport &failure, double excluded_mass);

// Largest 1 - Sum_v Tr[sigma^{theta,v}] over theta.
double excluded_mass(const std::map<Theta, SigmaSet> &sets);

// ||sigma^theta - Sum_v sigma^{theta,v}||_1 per theta, from the block
// matrices.
std::map<std::string, double> sigma_residual_norms(const std::map<Theta, SigmaSet> &sets);
// Smallest eigenvalue of sigma^theta - Sum_v sigma^{theta,v} over all blocks.
double sigma_order_min_eigenvalue(const std::map<Theta, SigmaSet> &sets);

// zeta/chi sums over v, computed from the observables as state-dependent
// norms (||A - c I||^2_sigma), independent of the gamma tables.
struct ZetaChiReport {
    CoordinateTable zeta_sum;        // theta in [2N] u {0}, i != theta
    std::map<std::string, double> chi_sum;        // theta in [2N]
    CoordinateTable zeta_tilde_sum;  // tilde ranges
    std::map<std::string, double> chi_tilde_sum;
    std::vector<double> zeta_diamond_sum, chi_diamond_sum;
    // Largest |zeta/4 - (Tr sigma - Tr[Z^{(v)} sigma])| over all terms.
    double identity_defect = 0;
};

ZetaChiReport zeta_chi(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets);

struct LemmaCheck {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    bool pass = false;
};

// Sum_v zeta <= 4 gamma_T, Sum_v chi <= 4 gamma_T and the tilde and diamond
// analogues; ||sigma^theta - Sum_v sigma^{theta,v}||_1 <= gamma_P.
std::vector<LemmaCheck> check_zeta_chi(const ZetaChiReport &report, const GammaReport &gamma);
std::vector<LemmaCheck> check_sigma_residual(const std::map<std::string, double> &residuals,
                                             const GammaReport &gamma);

// Honest-case marginal: Tr_{Y,R}[sigma^{theta,v}] on the tested qubits.
// Requires a model with a register layout.
std::map<BitString, Matrix> logical_marginals(const DeviceModel &model, const SigmaSet &set);

}  // namespace selftest::analysis
