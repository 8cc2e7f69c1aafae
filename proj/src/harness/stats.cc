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

#include "selftest/harness/stats.h"

#include <cmath>
#include <tuple>

namespace selftest::harness {

using nlohmann::json;

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) {
        return {0, 1};
    }
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1 + z2 / nt;
    const double centre = (p + z2 / (2 * nt)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt)) / denom;
    // Clamp so the interval always holds the point estimate despite rounding.
    return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

Rate Rate::of(std::uint64_t events, std::uint64_t trials) {
    Rate r;
    r.events = events;
    r.trials = trials;
    r.estimate = trials == 0 ? 0 : static_cast<double>(events) / static_cast<double>(trials);
    r.ci = wilson_interval(events, trials);
    return r;
}

SessionStats aggregate(ProtocolKind kind, std::uint32_t n, std::span<const Transcript> transcripts) {
    SessionStats s;
    s.kind = kind;
    s.n = n;
    const std::size_t questions = kind == ProtocolKind::SelfTest ? 4 : 2;
    std::uint64_t p_trials = 0, p_rejects = 0;
    std::vector<std::uint64_t> h_trials(questions), h_rejects(questions);
    std::map<std::tuple<std::string, std::string, std::optional<int>>, Stratum> by_key;
    for (const auto &t : transcripts) {
        ++s.sessions;
        s.accepted += t.verdict.accept ? 1 : 0;
        ++s.reasons[t.verdict.reason];
        if (t.verdict.reason == protocol::reason_transport) {
            ++s.transport_failures;
        }
        const std::string round = t.round ? protocol::to_string(*t.round) : "none";
        auto &cell = by_key[{t.theta.to_string(), round, t.q}];
        cell.theta = t.theta.to_string();
        cell.round = round;
        cell.q = t.q;
        ++cell.sessions;
        cell.accepted += t.verdict.accept ? 1 : 0;
        if (!t.round) {
            continue;
        }
        if (*t.round == protocol::RoundType::Preimage) {
            ++p_trials;
            p_rejects += t.verdict.accept ? 0 : 1;
        } else if (t.q && static_cast<std::size_t>(*t.q) < questions) {
            ++h_trials[*t.q];
            h_rejects[*t.q] += t.verdict.accept ? 0 : 1;
        }
    }
    for (auto &[key, cell] : by_key) {
        s.strata.push_back(cell);
    }
    s.acceptance = Rate::of(s.accepted, s.sessions);
    s.eps_p = Rate::of(p_rejects, p_trials);
    for (std::size_t q = 0; q < questions; ++q) {
        s.eps_h.push_back(Rate::of(h_rejects[q], h_trials[q]));
    }
    const double weight = kind == ProtocolKind::SelfTest ? 1.0 / 8 : 1.0 / 4;
    s.eps = s.eps_p.estimate / 2;
    s.eps_ci = {s.eps_p.ci.low / 2, s.eps_p.ci.high / 2};
    for (const auto &r : s.eps_h) {
        s.eps += weight * r.estimate;
        s.eps_ci.low += weight * r.ci.low;
        s.eps_ci.high += weight * r.ci.high;
    }
    return s;
}

std::map<std::string, double> SessionStats::gamma_upper_bounds() const {
    std::map<std::string, double> out;
    if (kind != ProtocolKind::SelfTest || eps_h.size() != 4) {
        return out;
    }
    const double k = 2.0 * n + 2;
    out["gamma_P"] = std::min(k * eps_p.ci.high, 2 * k * eps_ci.high);
    out["gamma_T0"] = k * eps_h[0].ci.high;
    out["gamma_T1"] = k * eps_h[1].ci.high;
    out["tilde_sum"] = k * (eps_h[2].ci.high + eps_h[3].ci.high);
    out["gamma_T"] = 8 * k * eps_ci.high;
    out["gamma_diamond"] = 8 * k * eps_ci.high;
    return out;
}

namespace {

json rate_json(const Rate &r) {
    return {{"events", r.events}, {"trials", r.trials}, {"estimate", r.estimate}, {"ci95", {r.ci.low, r.ci.high}}};
}

}  // namespace

json SessionStats::to_json() const {
    json strata_json = json::array();
    for (const auto &c : strata) {
        strata_json.push_back({{"theta", c.theta},
                               {"round", c.round},
                               {"q", c.q ? json(*c.q) : json(nullptr)},
                               {"sessions", c.sessions},
                               {"accepted", c.accepted},
                               {"acceptance", rate_json(Rate::of(c.accepted, c.sessions))}});
    }
    json eps_h_json = json::array();
    for (const auto &r : eps_h) {
        eps_h_json.push_back(rate_json(r));
    }
    json out = {
        {"protocol", protocol::to_string(kind)},
        {"n", n},
        {"sessions", sessions},
        {"accepted", accepted},
        {"acceptance", rate_json(acceptance)},
        {"eps_P", rate_json(eps_p)},
        {"eps_H", eps_h_json},
        {"eps", eps},
        {"eps_ci95", {eps_ci.low, eps_ci.high}},
        {"strata", strata_json},
        {"reasons", reasons},
        {"transport_failures", transport_failures},
        {"ci_method", "wilson"},
    };
    if (kind == ProtocolKind::SelfTest) {
        out["gamma_upper_bounds"] = gamma_upper_bounds();
    }
    return out;
}

}  // namespace selftest::harness
