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

#include "selftest/analysis/report.h"

#include <cmath>

#include "selftest/analysis/metrics.h"
#include "selftest/analysis/rank.h"
#include "selftest/analysis/swap.h"
#include "selftest/core/rng.h"

namespace selftest::analysis {

using nlohmann::json;

namespace {

// Exact identities are compared against this tolerance.
constexpr double identity_tol = 1e-10;

class CheckList {
   public:
    void add(const std::string &name, bool pass, json detail) {
        detail["pass"] = pass;
        checks_[name] = std::move(detail);
        if (!pass) {
            failures_.push_back(name);
        }
    }
    json take_json() { return std::move(checks_); }
    std::vector<std::string> take_failures() { return std::move(failures_); }

   private:
    json checks_ = json::object();
    std::vector<std::string> failures_;
};

json gamma_json(const GammaReport &g) {
    json out = {
        {"gamma_P", g.gamma_p},
        {"gamma_T0", g.gamma_t0},
        {"gamma_T1", g.gamma_t1},
        {"gamma_T0_tilde", g.gamma_t0_tilde},
        {"gamma_T0_tilde_prime", g.gamma_t0_tilde_prime},
        {"gamma_T1_tilde", g.gamma_t1_tilde},
        {"gamma_T", g.gamma_t},
        {"gamma_diamond0", g.gamma_diamond0},
        {"gamma_diamond1", g.gamma_diamond1},
        {"gamma_diamond", g.gamma_diamond},
        {"t", g.t},
        {"t_chk", g.t_chk},
        {"labelled_mass", g.labelled_mass},
        {"r_diamond", g.r_diamond},
        {"s_diamond", g.s_diamond},
    };
    auto table = [](const CoordinateTable &t) {
        json rows = json::array();
        for (const auto &[key, value] : t) {
            rows.push_back({{"theta", key.first}, {"i", key.second}, {"value", value}});
        }
        return rows;
    };
    out["r"] = table(g.r);
    out["s"] = table(g.s);
    out["r_tilde"] = table(g.r_tilde);
    out["s_tilde"] = table(g.s_tilde);
    return out;
}

json failure_json(const FailureReport &f) {
    return {{"eps_P", f.eps_p}, {"eps_H", f.eps_h}, {"eps", f.eps}};
}

json bounds_json(const BoundsReport &b) {
    json rows = json::array();
    for (const auto &c : b.checks) {
        rows.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}});
    }
    return rows;
}

json lemma_json(const std::vector<LemmaCheck> &checks) {
    json rows = json::array();
    for (const auto &c : checks) {
        rows.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
    }
    return rows;
}

json bits_map(const std::map<BitString, double> &m) {
    json out = json::object();
    for (const auto &[k, v] : m) {
        out[k.to_string()] = v;
    }
    return out;
}

// Key-averaged gamma and eps over fresh key tuples.
json key_average(const AnalysisOptions &options) {
    const std::size_t samples = options.key_samples;
    json sums = json::object();
    auto accumulate = [&](const std::string &name, double value) {
        sums[name] = sums.value(name, 0.0) + value / static_cast<double>(samples);
    };
    for (std::size_t k = 0; k < samples; ++k) {
        ModelConfig config = options.config;
        config.key_seed = derive_seed(options.config.key_seed, k + 1);
        const auto model = build_model(options.model, config);
        const auto trapdoors = model->trapdoors();
        const auto sets = all_sigma_blocks(*model, trapdoors);
        const auto f = failure_report(*model, sets, trapdoors);
        accumulate("eps_P", f.eps_p);
        for (std::size_t q = 0; q < f.eps_h.size(); ++q) {
            accumulate("eps_H" + std::to_string(q), f.eps_h[q]);
        }
        accumulate("eps", f.eps);
        if (model->kind() == ProtocolKind::SelfTest) {
            const auto g = gamma_report(*model, sets, trapdoors);
            accumulate("gamma_P", g.gamma_p);
            accumulate("gamma_T", g.gamma_t);
            accumulate("gamma_diamond", g.gamma_diamond);
        }
    }
    return {{"samples", samples}, {"means", sums}};
}

}  // namespace

AnalysisResult analyze(const AnalysisOptions &options) {
    const auto model = build_model(options.model, options.config);
    model->validate();
    const auto trapdoors = model->trapdoors();
    const auto sets = all_sigma_blocks(*model, trapdoors);
    const std::uint32_t n = model->n();

    CheckList checks;
    json report = {
        {"report_version", report_version},
        {"protocol", protocol::to_string(model->kind())},
        {"model", model->name()},
        {"n", n},
        {"w", options.config.w},
        {"key_seed", options.config.key_seed},
        {"dim", model->dim()},
        {"classical_dim", model->classical_dim()},
        {"alpha_extraction", "tau-projection"},
    };

    json sigma = json::object();
    for (const auto &[theta, set] : sets) {
        sigma[theta.to_string()] = {{"blocks", set.blocks.size()},
                                    {"total", set.total_weight()},
                                    {"labelled", set.labelled_weight()}};
        checks.add("sigma_trace_le_1[" + theta.to_string() + "]", set.labelled_weight() <= 1 + bound_slack_tol,
                   {{"value", set.labelled_weight()}});
    }
    report["sigma"] = sigma;
    report["excluded_mass"] = excluded_mass(sets);

    const FailureReport failure = failure_report(*model, sets, trapdoors);
    report["failure"] = failure_json(failure);

    const SwapIdentityReport swap = check_swap_identities(*model, sets, derive_seed(options.seed, 0x73776170));
    report["swap"] = {{"isometry_defect", swap.isometry_defect}, {"z_defect", swap.z_defect},
                      {"circuit_defect", swap.circuit_defect},   {"z_commutator", swap.z_commutator},
                      {"x_commutator", swap.x_commutator},       {"x_deviation", swap.x_deviation},
                      {"operator_sets", swap.blocks}};
    checks.add("swap_isometry", swap.isometry_defect <= identity_tol, {{"value", swap.isometry_defect}});
    checks.add("swap_z_identity", swap.z_defect <= identity_tol, {{"value", swap.z_defect}});
    checks.add("swap_circuit", swap.circuit_defect <= identity_tol, {{"value", swap.circuit_defect}});
    checks.add("z_commute", swap.z_commutator <= identity_tol, {{"value", swap.z_commutator}});
    checks.add("x_commute", swap.x_commutator <= identity_tol, {{"value", swap.x_commutator}});

    json soundness = json::object();
    for (const auto &[theta, set] : sets) {
        if (set.labelled_weight() == 0 && set.blocks.empty()) {
            continue;
        }
        if (model->kind() == ProtocolKind::DimTest && theta != Theta::zero()) {
            continue;
        }
        const auto s = soundness_distance(*model, set);
        soundness[theta.to_string()] = {{"total", s.total},
                                        {"per_v", bits_map(s.per_v)},
                                        {"measured_total", s.measured_total},
                                        {"alpha_trace", bits_map(s.alpha_trace)}};
    }
    report["soundness"] = soundness;

    if (model->kind() == ProtocolKind::SelfTest) {
        const GammaReport gamma = gamma_report(*model, sets, trapdoors);
        report["gamma"] = gamma_json(gamma);
        double t_gap = 0;
        for (const auto &[theta, t] : gamma.t) {
            t_gap = std::max(t_gap, std::abs(t - gamma.t_chk.at(theta)));
        }
        checks.add("t_inv_equals_t_chk", t_gap <= identity_tol, {{"value", t_gap}});

        const auto bounds = check_gamma_bounds(n, gamma, failure);
        report["bounds"] = bounds_json(bounds);
        for (const auto &c : bounds.checks) {
            checks.add("bound: " + c.name, c.pass, {{"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}});
        }
        const double x = excluded_mass(sets);
        report["bounds_with_excluded_mass"] =
            bounds_json(check_gamma_bounds_with_excluded_mass(n, gamma, failure, x));

        const auto residual = check_sigma_residual(sigma_residual_norms(sets), gamma);
        report["sigma_residual"] = lemma_json(residual);
        for (const auto &c : residual) {
            checks.add("lemma: " + c.name, c.pass, {{"lhs", c.lhs}, {"rhs", c.rhs}});
        }
        report["sigma_order_min_eigenvalue"] = sigma_order_min_eigenvalue(sets);

        const auto zc = zeta_chi(*model, sets);
        const auto zc_checks = check_zeta_chi(zc, gamma);
        report["zeta_chi"] = lemma_json(zc_checks);
        report["zeta_identity_defect"] = zc.identity_defect;
        checks.add("zeta_identity", zc.identity_defect <= identity_tol, {{"value", zc.identity_defect}});
        for (const auto &c : zc_checks) {
            checks.add("lemma: " + c.name, c.pass, {{"lhs", c.lhs}, {"rhs", c.rhs}});
        }

        json comm = json::object();
        for (const auto &[theta, set] : sets) {
            const auto cr = commutator_diagnostics(*model, set);
            comm[theta.to_string()] = {{"commutator", cr.commutator}, {"anticommutator", cr.anticommutator}};
        }
        report["commutators"] = comm;
    } else {
        const auto cert = dimension_certificate(*model, trapdoors);
        report["dimension_certificate"] = {
            {"support", cert.support},
            {"v_min", cert.v_min.to_string()},
            {"v_min_distance", cert.v_min_distance},
            {"distances", bits_map(cert.distances)},
            {"classical_index", cert.classical_star},
            {"quantum_dim", cert.quantum_dim},
            {"epsilon", cert.check.epsilon},
            {"rank", cert.check.rank},
            {"bound", cert.bound},
            {"schmidt_overlap", cert.check.overlap},
            {"schmidt_rank", cert.check.schmidt_rank},
            {"schmidt_max", cert.check.max_schmidt},
        };
        checks.add("rank_bound", cert.check.bound_satisfied, {{"rank", cert.check.rank}, {"required", cert.check.required}});
        checks.add("schmidt_overlap", cert.check.schmidt_satisfied, {{"value", cert.check.overlap}});
        checks.add("dimension_consistent", cert.consistent, {{"bound", cert.bound}, {"quantum_dim", cert.quantum_dim}});
    }

    if (options.key_samples > 0) {
        report["key_average"] = key_average(options);
    }

    AnalysisResult result;
    report["checks"] = checks.take_json();
    result.failures = checks.take_failures();
    report["all_pass"] = result.failures.empty();
    result.report = std::move(report);
    return result;
}

}  // namespace selftest::analysis
