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

#include "selftest/analysis/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "selftest/core/error.h"

namespace selftest::analysis {

using protocol::Decodings;

qsim::CQOperator::Label SigmaBlock::label() const {
    qsim::CQOperator::Label out;
    for (auto img : y) {
        out.push_back(img.value);
    }
    for (auto di : d) {
        out.push_back(di);
    }
    return out;
}

double SigmaSet::total_weight() const {
    double sum = 0;
    for (const auto &b : blocks) {
        sum += b.weight;
    }
    return sum;
}

double SigmaSet::labelled_weight() const {
    double sum = 0;
    for (const auto &b : blocks) {
        if (b.v) {
            sum += b.weight;
        }
    }
    return sum;
}

namespace {

const std::vector<entcf::Trapdoor> &trapdoors_for(const DeviceModel &model, Theta theta,
                                                  const TrapdoorTable &trapdoors) {
    auto it = trapdoors.find(theta);
    if (it == trapdoors.end()) {
        throw DomainError("missing trapdoors for theta " + theta.to_string());
    }
    if (it->second.size() != model.coordinates()) {
        throw DomainError("trapdoor tuple for theta " + theta.to_string() + " has the wrong length");
    }
    return it->second;
}

constexpr double negligible_weight = 1e-15;

int bit(Outcome u, std::size_t i) {
    return static_cast<int>((u >> i) & 1);
}

}  // namespace

SigmaSet sigma_blocks(const DeviceModel &model, Theta theta, const TrapdoorTable &trapdoors) {
    const auto &tds = trapdoors_for(model, theta, trapdoors);
    const OutcomeCodec codec = model.codec();
    const bool labelled = model.kind() == ProtocolKind::SelfTest || theta.kind() == Theta::Kind::Zero;
    SigmaSet set{theta, {}};
    for (const auto &state : model.states(theta)) {
        auto m = model.d_measurement(theta, state.y);
        auto parts = m->project_all(state.factor);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const double weight = parts[k].squaredNorm();
            if (weight <= negligible_weight) {
                continue;
            }
            SigmaBlock block;
            block.y = state.y;
            block.d = codec.unpack_d(m->outcomes()[k]);
            block.factor = std::move(parts[k]);
            block.weight = weight;
            block.decodings = protocol::decode_all(tds, block.y, block.d);
            if (labelled) {
                block.v = protocol::sigma_label(model.n(), theta, block.decodings);
            }
            for (int q = 0; q < model.question_count(); ++q) {
                auto p = model.question_measurement(theta, block.y, block.d, q);
                auto w = p->weights(block.factor);
                std::vector<std::pair<Outcome, double>> answer;
                for (std::size_t o = 0; o < w.size(); ++o) {
                    answer.emplace_back(p->outcomes()[o], w[o]);
                }
                block.questions.push_back(std::move(p));
                block.answers.push_back(std::move(answer));
            }
            set.blocks.push_back(std::move(block));
        }
    }
    std::sort(set.blocks.begin(), set.blocks.end(), [](const SigmaBlock &a, const SigmaBlock &b) {
        return std::tie(a.y, a.d) < std::tie(b.y, b.d);
    });
    return set;
}

std::map<Theta, SigmaSet> all_sigma_blocks(const DeviceModel &model, const TrapdoorTable &trapdoors) {
    std::map<Theta, SigmaSet> out;
    for (auto theta : model.thetas()) {
        out.emplace(theta, sigma_blocks(model, theta, trapdoors));
    }
    return out;
}

std::map<BitString, qsim::CQOperator> sigma_theta_v(const SigmaSet &set) {
    std::map<BitString, qsim::CQOperator> out;
    for (const auto &b : set.blocks) {
        if (!b.v) {
            continue;
        }
        auto it = out.try_emplace(*b.v, static_cast<std::size_t>(b.factor.rows())).first;
        it->second.add(b.label(), b.factor * b.factor.adjoint());
    }
    return out;
}

qsim::CQOperator sigma_theta(const SigmaSet &set) {
    qsim::CQOperator out(set.blocks.empty() ? 0 : static_cast<std::size_t>(set.blocks.front().factor.rows()));
    for (const auto &b : set.blocks) {
        out.add(b.label(), b.factor * b.factor.adjoint());
    }
    return out;
}

namespace {

// Sum over labelled blocks of Tr[P_q^u sigma] for the u accepted by keep.
double answer_mass(const SigmaSet &set, int q, const std::function<bool(Outcome, const BitString &)> &keep) {
    double sum = 0;
    for (const auto &b : set.blocks) {
        if (!b.v) {
            continue;
        }
        for (const auto &[u, p] : b.answers[static_cast<std::size_t>(q)]) {
            if (keep(u, *b.v)) {
                sum += p;
            }
        }
    }
    return sum;
}

// Tr[sum over (b, x) in INV(theta, y) of Pi^{b,x}_y psi_y]. F coordinates
// admit both bits, each with its own x-hat.
double inv_mass(const DeviceModel &model, Theta theta, const StateBlock &state,
                std::span<const entcf::Trapdoor> tds) {
    const std::size_t c = model.coordinates();
    std::vector<std::vector<entcf::Preimage>> options(c);
    for (std::size_t i = 0; i < c; ++i) {
        if (tds[i].family() == entcf::Family::G) {
            auto b = entcf::decode_b(tds[i], state.y[i]);
            auto x = entcf::decode_x(b, tds[i], state.y[i]);
            if (b && x) {
                options[i].push_back({*b, *x});
            }
        } else {
            for (int a = 0; a < 2; ++a) {
                if (auto x = entcf::decode_x(a, tds[i], state.y[i])) {
                    options[i].push_back({a, *x});
                }
            }
        }
        if (options[i].empty()) {
            return 0;
        }
    }
    auto pi = model.preimage_measurement(theta, state.y);
    auto weights = pi->weights(state.factor);
    std::map<Outcome, double> by_outcome;
    for (std::size_t o = 0; o < weights.size(); ++o) {
        by_outcome[pi->outcomes()[o]] = weights[o];
    }
    const OutcomeCodec codec = model.codec();
    double sum = 0;
    std::vector<std::size_t> pick(c, 0);
    while (true) {
        BitString b(c);
        std::vector<std::uint32_t> x(c);
        for (std::size_t i = 0; i < c; ++i) {
            b.set(i, options[i][pick[i]].b != 0);
            x[i] = options[i][pick[i]].x;
        }
        auto it = by_outcome.find(codec.pack_preimage(b, x));
        if (it != by_outcome.end()) {
            sum += it->second;
        }
        std::size_t k = c;
        while (k > 0 && ++pick[k - 1] == options[k - 1].size()) {
            pick[k - 1] = 0;
            --k;
        }
        if (k == 0) {
            return sum;
        }
    }
}

double chk_mass(const DeviceModel &model, Theta theta, const StateBlock &state,
                std::span<const entcf::PublicKey> keys, bool accepted) {
    auto pi = model.preimage_measurement(theta, state.y);
    auto weights = pi->weights(state.factor);
    const OutcomeCodec codec = model.codec();
    double sum = 0;
    for (std::size_t o = 0; o < weights.size(); ++o) {
        const Outcome out = pi->outcomes()[o];
        auto x = codec.unpack_x(out);
        bool ok;
        if (accepted) {
            ok = entcf::chk(keys, state.y, codec.unpack_b(out), x) == 0;
        } else {
            ok = !protocol::preimage_verdict(entcf::chk(keys, state.y, codec.unpack_b(out), x)).accept;
        }
        if (ok) {
            sum += weights[o];
        }
    }
    return sum;
}

double min_or_one(const std::vector<double> &values) {
    return values.empty() ? 1.0 : *std::min_element(values.begin(), values.end());
}

}  // namespace

GammaReport gamma_report(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                         const TrapdoorTable &trapdoors) {
    if (model.kind() != ProtocolKind::SelfTest) {
        throw ModelError("gamma quantities are defined for the self-test protocol");
    }
    const std::uint32_t n = model.n();
    const std::size_t c = model.coordinates();
    GammaReport g;
    std::vector<double> t_all;
    for (auto theta : model.thetas()) {
        const auto &tds = trapdoors_for(model, theta, trapdoors);
        const auto keys = model.keys(theta);
        double t_inv = 0;
        double t_chk = 0;
        for (const auto &state : model.states(theta)) {
            t_inv += inv_mass(model, theta, state, tds);
            t_chk += chk_mass(model, theta, state, keys, true);
        }
        g.t[theta.to_string()] = t_inv;
        g.t_chk[theta.to_string()] = t_chk;
        t_all.push_back(t_inv);
        g.labelled_mass[theta.to_string()] = sets.at(theta).labelled_weight();
    }
    g.gamma_p = 1 - min_or_one(t_all);

    // Z-tilde_i and X-tilde_i come from P2 for i <= N and P3 for i > N
    // (Z) and the other way round (X).
    auto z_tilde_q = [n](std::size_t i) { return i < n ? 2 : 3; };
    auto x_tilde_q = [n](std::size_t i) { return i < n ? 3 : 2; };

    std::vector<double> t0, t1, t0_tilde, t0_tilde_prime, t1_tilde;
    for (auto theta : model.thetas()) {
        if (theta.kind() == Theta::Kind::Diamond) {
            continue;
        }
        const auto &set = sets.at(theta);
        const std::string name = theta.to_string();
        const bool coordinate = theta.is_coordinate();
        const std::size_t slot = coordinate ? theta.slot() : c;
        for (std::size_t i = 0; i < c; ++i) {
            auto same = [i](Outcome u, const BitString &v) { return bit(u, i) == static_cast<int>(v[i]); };
            const double r = answer_mass(set, 0, same);
            const double s = answer_mass(set, 1, same);
            const double rt = answer_mass(set, z_tilde_q(i), same);
            const double st = answer_mass(set, x_tilde_q(i), same);
            g.r[{name, i + 1}] = r;
            g.s[{name, i + 1}] = s;
            g.r_tilde[{name, i + 1}] = rt;
            g.s_tilde[{name, i + 1}] = st;
            if (i != slot) {
                t0.push_back(r);
                const bool lower_theta = !coordinate || slot < n;
                const bool upper_theta = !coordinate || slot >= n;
                if (i < n && lower_theta) {
                    t0_tilde.push_back(rt);
                }
                if (i >= n && upper_theta) {
                    t0_tilde_prime.push_back(rt);
                }
            } else {
                t1.push_back(s);
                t1_tilde.push_back(st);
            }
        }
    }
    g.gamma_t0 = 1 - min_or_one(t0);
    g.gamma_t1 = 1 - min_or_one(t1);
    g.gamma_t0_tilde = 1 - min_or_one(t0_tilde);
    g.gamma_t0_tilde_prime = 1 - min_or_one(t0_tilde_prime);
    g.gamma_t1_tilde = 1 - min_or_one(t1_tilde);
    g.gamma_t = std::max({g.gamma_t0, g.gamma_t1, g.gamma_t0_tilde, g.gamma_t0_tilde_prime, g.gamma_t1_tilde});

    const auto &diamond = sets.at(Theta::diamond());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + n;
        g.r_diamond.push_back(answer_mass(diamond, 2, [i, j](Outcome u, const BitString &v) {
            return (bit(u, i) ^ bit(u, j)) == static_cast<int>(v[i]);
        }));
        g.s_diamond.push_back(answer_mass(diamond, 3, [i, j](Outcome u, const BitString &v) {
            return (bit(u, i) ^ bit(u, j)) == static_cast<int>(v[j]);
        }));
    }
    g.gamma_diamond0 = 1 - min_or_one(g.r_diamond);
    g.gamma_diamond1 = 1 - min_or_one(g.s_diamond);
    g.gamma_diamond = std::max(g.gamma_diamond0, g.gamma_diamond1);
    return g;
}

GammaReport gamma_report(const DeviceModel &model, const TrapdoorTable &trapdoors) {
    return gamma_report(model, all_sigma_blocks(model, trapdoors), trapdoors);
}

FailureReport FailureReport::compose(ProtocolKind kind, double eps_p, std::vector<double> eps_h) {
    FailureReport f;
    f.kind = kind;
    f.eps_p = eps_p;
    f.eps_h = std::move(eps_h);
    const std::size_t expected = kind == ProtocolKind::SelfTest ? 4 : 2;
    if (f.eps_h.size() != expected) {
        throw ParameterError("wrong number of per-question failure rates");
    }
    double sum = 0;
    for (double e : f.eps_h) {
        sum += e;
    }
    f.eps = kind == ProtocolKind::SelfTest ? eps_p / 2 + sum / 8 : eps_p / 2 + sum / 4;
    return f;
}

FailureReport failure_report(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets,
                             const TrapdoorTable &trapdoors) {
    const auto &thetas = model.thetas();
    const double share = 1.0 / static_cast<double>(thetas.size());
    double eps_p = 0;
    std::vector<double> eps_h(static_cast<std::size_t>(model.question_count()), 0.0);
    const std::size_t c = model.coordinates();
    for (auto theta : thetas) {
        trapdoors_for(model, theta, trapdoors);
        const auto keys = model.keys(theta);
        double reject_p = 0;
        for (const auto &state : model.states(theta)) {
            reject_p += chk_mass(model, theta, state, keys, false);
        }
        eps_p += share * reject_p;
        for (const auto &block : sets.at(theta).blocks) {
            for (int q = 0; q < model.question_count(); ++q) {
                double reject = 0;
                for (const auto &[u, p] : block.answers[static_cast<std::size_t>(q)]) {
                    const BitString v(c, u);
                    const auto verdict =
                        model.kind() == ProtocolKind::SelfTest
                            ? protocol::selftest_hadamard_verdict(model.n(), theta, q, block.decodings, v)
                            : protocol::dimtest_hadamard_verdict(model.n(), theta, q, block.decodings, v);
                    if (!verdict.accept) {
                        reject += p;
                    }
                }
                eps_h[static_cast<std::size_t>(q)] += share * reject;
            }
        }
    }
    return FailureReport::compose(model.kind(), eps_p, std::move(eps_h));
}

FailureReport failure_report(const DeviceModel &model, const TrapdoorTable &trapdoors) {
    return failure_report(model, all_sigma_blocks(model, trapdoors), trapdoors);
}

bool BoundsReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck &c) { return c.pass; });
}

std::string BoundsReport::first_failure() const {
    for (const auto &c : checks) {
        if (!c.pass) {
            return c.name;
        }
    }
    return {};
}

namespace {

BoundCheck make_check(std::string name, double lhs, double rhs) {
    BoundCheck c{std::move(name), lhs, rhs, rhs - lhs, false};
    c.pass = c.slack >= -bound_slack_tol;
    return c;
}

BoundsReport bounds(std::uint32_t n, const GammaReport &g, const FailureReport &f, double x) {
    if (f.kind != ProtocolKind::SelfTest || f.eps_h.size() != 4) {
        throw ParameterError("gamma bounds need self-test failure rates");
    }
    const double k = 2.0 * n + 2;
    BoundsReport r;
    r.checks.push_back(make_check("gamma_P <= (2N+2) eps_P", g.gamma_p, k * f.eps_p));
    r.checks.push_back(make_check("gamma_T0 <= (2N+2) eps_H0", g.gamma_t0, k * f.eps_h[0] + x));
    r.checks.push_back(make_check("gamma_T1 <= (2N+2) eps_H1", g.gamma_t1, k * f.eps_h[1] + x));
    r.checks.push_back(make_check("tilde sum <= (2N+2)(eps_H2 + eps_H3)",
                                  g.gamma_t0_tilde + g.gamma_t0_tilde_prime + g.gamma_t1_tilde + g.gamma_diamond0 +
                                      g.gamma_diamond1,
                                  k * (f.eps_h[2] + f.eps_h[3]) + 5 * x));
    r.checks.push_back(make_check("gamma_P <= 2(2N+2) eps", g.gamma_p, 2 * k * f.eps));
    r.checks.push_back(make_check("gamma_T <= 8(2N+2) eps", g.gamma_t, 8 * k * f.eps + x));
    r.checks.push_back(make_check("gamma_diamond <= 8(2N+2) eps", g.gamma_diamond, 8 * k * f.eps + x));
    return r;
}

}  // namespace

BoundsReport check_gamma_bounds(std::uint32_t n, const GammaReport &gamma, const FailureReport &failure) {
    return bounds(n, gamma, failure, 0);
}

BoundsReport check_gamma_bounds_with_excluded_mass(std::uint32_t n, const GammaReport &gamma,
                                                   const FailureReport &failure, double excluded) {
    return bounds(n, gamma, failure, excluded);
}

double excluded_mass(const std::map<Theta, SigmaSet> &sets) {
    double worst = 0;
    for (const auto &[theta, set] : sets) {
        worst = std::max(worst, set.total_weight() - set.labelled_weight());
    }
    return worst;
}

std::map<std::string, double> sigma_residual_norms(const std::map<Theta, SigmaSet> &sets) {
    std::map<std::string, double> out;
    for (const auto &[theta, set] : sets) {
        double sum = 0;
        for (const auto &b : set.blocks) {
            if (!b.v) {
                sum += qsim::factor_difference_trace_norm(b.factor, Matrix(b.factor.rows(), 0));
            }
        }
        out[theta.to_string()] = sum;
    }
    return out;
}

double sigma_order_min_eigenvalue(const std::map<Theta, SigmaSet> &sets) {
    double worst = 0;
    for (const auto &[theta, set] : sets) {
        for (const auto &b : set.blocks) {
            if (!b.v) {
                Matrix gram = b.factor.adjoint() * b.factor;
                worst = std::min(worst, qsim::hermitian_eigenvalues(gram).minCoeff());
            }
        }
    }
    return worst;
}

namespace {

// Per-measurement cache of the single-coordinate observables
// sum_u (-1)^{u_i} P^u.
class ObservableCache {
   public:
    explicit ObservableCache(std::size_t coordinates) : c_(coordinates) {}

    const std::vector<Matrix> &get(const MeasurementPtr &m) {
        auto it = cache_.find(m.get());
        if (it != cache_.end()) {
            return it->second;
        }
        std::vector<Matrix> obs;
        for (std::size_t i = 0; i < c_; ++i) {
            obs.push_back(m->observable([i](Outcome u) { return bit(u, i) ? -1.0 : 1.0; }));
        }
        keep_.push_back(m);
        return cache_.emplace(m.get(), std::move(obs)).first->second;
    }

   private:
    std::size_t c_;
    std::map<const BasisMeasurement *, std::vector<Matrix>> cache_;
    std::vector<MeasurementPtr> keep_;
};

// ||(A - sign I) F||_F^2 = ||A - sign I||^2_{F F^dag}.
double deviation(const Matrix &a, double sign, const Matrix &f) {
    Matrix diff = a * f - sign * f;
    return diff.squaredNorm();
}

double sign_of(bool bit_value) {
    return bit_value ? -1.0 : 1.0;
}

}  // namespace

ZetaChiReport zeta_chi(const DeviceModel &model, const std::map<Theta, SigmaSet> &sets) {
    if (model.kind() != ProtocolKind::SelfTest) {
        throw ModelError("zeta and chi are defined for the self-test protocol");
    }
    const std::uint32_t n = model.n();
    const std::size_t c = model.coordinates();
    ObservableCache cache(c);
    ZetaChiReport out;
    auto z_tilde_q = [n](std::size_t i) -> std::size_t { return i < n ? 2 : 3; };
    auto x_tilde_q = [n](std::size_t i) -> std::size_t { return i < n ? 3 : 2; };

    for (const auto &[theta, set] : sets) {
        const std::string name = theta.to_string();
        if (theta.kind() == Theta::Kind::Diamond) {
            out.zeta_diamond_sum.assign(n, 0.0);
            out.chi_diamond_sum.assign(n, 0.0);
            for (const auto &b : set.blocks) {
                if (!b.v) {
                    continue;
                }
                const auto &p2 = cache.get(b.questions[2]);
                const auto &p3 = cache.get(b.questions[3]);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t j = i + n;
                    out.zeta_diamond_sum[i] += deviation(p2[i] * p2[j], sign_of((*b.v)[i]), b.factor);
                    out.chi_diamond_sum[i] += deviation(p3[i] * p3[j], sign_of((*b.v)[j]), b.factor);
                }
            }
            continue;
        }
        const std::size_t slot = theta.is_coordinate() ? theta.slot() : c;
        for (const auto &b : set.blocks) {
            if (!b.v) {
                continue;
            }
            const auto &z = cache.get(b.questions[0]);
            const auto &x = cache.get(b.questions[1]);
            for (std::size_t i = 0; i < c; ++i) {
                const double sign = sign_of((*b.v)[i]);
                const auto &zt = cache.get(b.questions[z_tilde_q(i)]);
                const double zeta = deviation(z[i], sign, b.factor);
                // Probability route of the same quantity: 4 (Tr sigma - Tr[Z^{(v_i)} sigma]).
                double agree = 0;
                for (const auto &[u, p] : b.answers[0]) {
                    if (bit(u, i) == static_cast<int>((*b.v)[i])) {
                        agree += p;
                    }
                }
                out.identity_defect = std::max(out.identity_defect, std::abs(zeta - 4 * (b.weight - agree)));
                if (i != slot) {
                    out.zeta_sum[{name, i + 1}] += zeta;
                    out.zeta_tilde_sum[{name, i + 1}] += deviation(zt[i], sign, b.factor);
                } else {
                    const auto &xt = cache.get(b.questions[x_tilde_q(i)]);
                    out.chi_sum[name] += deviation(x[i], sign, b.factor);
                    out.chi_tilde_sum[name] += deviation(xt[i], sign, b.factor);
                }
            }
        }
        // Keep zero entries for empty sets so every (theta, i) appears.
        for (std::size_t i = 0; i < c; ++i) {
            if (i != slot) {
                out.zeta_sum.try_emplace({name, i + 1}, 0.0);
                out.zeta_tilde_sum.try_emplace({name, i + 1}, 0.0);
            } else {
                out.chi_sum.try_emplace(name, 0.0);
                out.chi_tilde_sum.try_emplace(name, 0.0);
            }
        }
    }
    return out;
}

namespace {

LemmaCheck lemma(std::string name, double lhs, double rhs) {
    return {std::move(name), lhs, rhs, lhs <= rhs + bound_slack_tol};
}

}  // namespace

std::vector<LemmaCheck> check_zeta_chi(const ZetaChiReport &report, const GammaReport &gamma) {
    // Index ranges follow the gamma definitions: zeta for i != theta with
    // theta in [2N] u {0}; zeta-tilde for i and theta on the same half (or
    // theta = 0); chi and chi-tilde for theta in [2N].
    double zeta = 0;
    double zeta_tilde = 0;
    double chi = 0;
    double chi_tilde = 0;
    double zeta_d = 0;
    double chi_d = 0;
    const std::size_t n = report.zeta_diamond_sum.size();
    for (const auto &[key, value] : report.zeta_sum) {
        zeta = std::max(zeta, value);
    }
    for (const auto &[key, value] : report.zeta_tilde_sum) {
        const auto &[theta, i] = key;
        bool in_range = theta == "0";
        if (!in_range) {
            const std::size_t t = std::stoul(theta);
            in_range = (t <= n) == (i <= n);
        }
        if (in_range) {
            zeta_tilde = std::max(zeta_tilde, value);
        }
    }
    for (const auto &[theta, value] : report.chi_sum) {
        if (theta != "0") {
            chi = std::max(chi, value);
        }
    }
    for (const auto &[theta, value] : report.chi_tilde_sum) {
        if (theta != "0") {
            chi_tilde = std::max(chi_tilde, value);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        zeta_d = std::max(zeta_d, report.zeta_diamond_sum[i]);
        chi_d = std::max(chi_d, report.chi_diamond_sum[i]);
    }
    return {
        lemma("sum_v zeta <= 4 gamma_T", zeta, 4 * gamma.gamma_t),
        lemma("sum_v chi <= 4 gamma_T", chi, 4 * gamma.gamma_t),
        lemma("sum_v zeta~ <= 4 gamma_T", zeta_tilde, 4 * gamma.gamma_t),
        lemma("sum_v chi~ <= 4 gamma_T", chi_tilde, 4 * gamma.gamma_t),
        lemma("sum_v zeta~_diamond <= 4 gamma_diamond", zeta_d, 4 * gamma.gamma_diamond),
        lemma("sum_v chi~_diamond <= 4 gamma_diamond", chi_d, 4 * gamma.gamma_diamond),
    };
}

std::vector<LemmaCheck> check_sigma_residual(const std::map<std::string, double> &residuals,
                                             const GammaReport &gamma) {
    std::vector<LemmaCheck> out;
    for (const auto &[theta, value] : residuals) {
        out.push_back(lemma("||sigma^" + theta + " - sum_v sigma^{" + theta + ",v}||_1 <= gamma_P", value,
                            gamma.gamma_p));
    }
    return out;
}

std::map<BitString, Matrix> logical_marginals(const DeviceModel &model, const SigmaSet &set) {
    auto layout = model.layout();
    if (!layout) {
        throw ModelError("model " + model.name() + " has no register layout");
    }
    std::map<BitString, Matrix> out;
    for (const auto &b : set.blocks) {
        if (!b.v) {
            continue;
        }
        Matrix rho = b.factor * b.factor.adjoint();
        Matrix reduced = qsim::partial_trace(rho, layout->dims, layout->logical);
        auto it = out.find(*b.v);
        if (it == out.end()) {
            out.emplace(*b.v, std::move(reduced));
        } else {
            it->second += reduced;
        }
    }
    return out;
}

}  // namespace selftest::analysis
