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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "selftest/core/error.h"
#include "selftest/harness/run.h"

using namespace selftest;
using namespace selftest::harness;

namespace {

RunConfig small_config(const std::string &prover, std::uint64_t sessions) {
    RunConfig c;
    c.n = 1;
    c.w = 2;
    c.sessions = sessions;
    c.seed = 17;
    c.prover = ProverSpec::parse(prover);
    return c;
}

}  // namespace

TEST_CASE("wilson interval known values") {
    // z^2 / (n + z^2) for zero successes.
    const double z2 = wilson_z95 * wilson_z95;
    auto zero = wilson_interval(0, 10);
    CHECK(zero.low == 0);
    CHECK(zero.high == doctest::Approx(z2 / (10 + z2)));
    auto half = wilson_interval(5, 10);
    CHECK(half.low == doctest::Approx(0.236593).epsilon(1e-5));
    CHECK(half.high == doctest::Approx(0.763407).epsilon(1e-5));
    auto all = wilson_interval(10, 10);
    CHECK(all.high == 1);
    CHECK(all.low == doctest::Approx(1 - z2 / (10 + z2)));
    auto empty = wilson_interval(0, 0);
    CHECK(empty.low == 0);
    CHECK(empty.high == 1);
}

TEST_CASE("spec parsing") {
    CHECK(ProverSpec::parse("bitflip=0.25").flip_probability == 0.25);
    CHECK(ProverSpec::parse("wrongbasis").to_string() == "wrongbasis");
    CHECK_THROWS_AS(ProverSpec::parse("bitflip=1.5"), ParameterError);
    CHECK_THROWS_AS(ProverSpec::parse("oracle"), ParameterError);
    CHECK(TransportSpec::parse("tcp:4000").port == 4000);
    CHECK(TransportSpec::parse("inproc").kind == TransportSpec::Kind::InProc);
    CHECK_THROWS_AS(TransportSpec::parse("tcp:99999"), ParameterError);
    CHECK_THROWS_AS(TransportSpec::parse("udp:1"), ParameterError);
}

TEST_CASE("session seeds are distinct and invertible from the id") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto s = session_seed(3, i);
        seen.insert(s);
        CHECK(verifier_seed(s) != device_seed(s));
        CHECK(seed_from_session_id(transport::session_id_from_seed(s)) == s);
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("results do not depend on the thread count") {
    auto c = small_config("bitflip=0.1", 400);
    const auto one = run_sessions(c);
    c.threads = 3;
    const auto three = run_sessions(c);
    REQUIRE(one.transcripts.size() == three.transcripts.size());
    for (std::size_t i = 0; i < one.transcripts.size(); ++i) {
        CHECK(one.transcripts[i].to_json() == three.transcripts[i].to_json());
    }
    const AuditResult audit{400, 0, {}};
    CHECK(stats_document(c, one.stats, audit) == stats_document(c, three.stats, audit));
}

TEST_CASE("replay audit accepts records and catches tampering") {
    const auto c = small_config("bitflip=0.2", 200);
    auto run = run_sessions(c);
    const auto audit = audit_transcripts(c, run.transcripts);
    CHECK(audit.ok());
    CHECK(audit.checked == 200);

    // Flip the recorded verdict of one session.
    auto tampered = run.transcripts;
    auto &t = tampered[5];
    t.verdict.accept = !t.verdict.accept;
    auto &last = std::get<protocol::VerdictMsg>(t.messages.back().message);
    last.accept = !last.accept;
    const auto bad = audit_transcripts(c, tampered);
    CHECK(bad.mismatched == 1);
    CHECK(!bad.first_mismatch.empty());

    // A prover answer changed in transit changes the replayed verdict or
    // the verifier's next message.
    for (auto &tr : tampered) {
        for (auto &e : tr.messages) {
            if (auto *d = std::get_if<protocol::HadamardDMsg>(&e.message)) {
                d->d[0] ^= 1;
            }
        }
    }
    CHECK(audit_transcripts(c, tampered).mismatched > 1);
}

TEST_CASE("transcripts round trip through jsonl") {
    const auto c = small_config("honest", 50);
    const auto run = run_sessions(c);
    const auto path = std::filesystem::temp_directory_path() / "selftest_unit_transcripts.jsonl";
    write_transcripts(path, run.transcripts);
    const auto back = read_transcripts(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == run.transcripts.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].to_json() == run.transcripts[i].to_json());
    }
}

TEST_CASE("eps is recomposed from the per-clause rates") {
    const auto run = run_sessions(small_config("bitflip=0.1", 2000));
    const auto &s = run.stats;
    double expected = s.eps_p.estimate / 2;
    double low = s.eps_p.ci.low / 2, high = s.eps_p.ci.high / 2;
    for (const auto &r : s.eps_h) {
        expected += r.estimate / 8;
        low += r.ci.low / 8;
        high += r.ci.high / 8;
    }
    CHECK(s.eps == doctest::Approx(expected));
    CHECK(s.eps_ci.low == doctest::Approx(low));
    CHECK(s.eps_ci.high == doctest::Approx(high));
    CHECK(s.sessions == 2000);
    std::uint64_t by_strata = 0;
    for (const auto &st : s.strata) {
        by_strata += st.sessions;
    }
    CHECK(by_strata == 2000);
    CHECK(s.acceptance.estimate == doctest::Approx(static_cast<double>(s.accepted) / 2000));
}

TEST_CASE("dimension-test stats use two questions") {
    auto c = small_config("honest", 300);
    c.kind = ProtocolKind::DimTest;
    c.n = 2;
    const auto run = run_sessions(c);
    CHECK(run.stats.eps_h.size() == 2);
    CHECK(run.stats.eps_p.events == 0);
    CHECK(audit_transcripts(c, run.transcripts).ok());
}

TEST_CASE("config json excludes scheduling knobs") {
    auto c = small_config("honest", 10);
    const auto a = c.to_json();
    c.threads = 8;
    c.timeout = std::chrono::milliseconds(5);
    CHECK(c.to_json() == a);
    CHECK(!a.contains("threads"));
}
