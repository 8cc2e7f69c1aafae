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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "selftest/analysis/report.h"
#include "selftest/core/error.h"
#include "selftest/harness/entcf_check.h"
#include "selftest/harness/run.h"

namespace fs = std::filesystem;
using namespace selftest;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

entcf::Backend parse_backend(const std::string &text) {
    if (text == "ideal") {
        return entcf::Backend::Ideal;
    }
    if (text == "toylwe") {
        return entcf::Backend::ToyLwe;
    }
    throw ParameterError("backend must be 'ideal' or 'toylwe'");
}

// SELFTEST_SEED wins over --seed.
std::uint64_t effective_seed(std::uint64_t flag) {
    const char *env = std::getenv("SELFTEST_SEED");
    if (!env || !*env) {
        return flag;
    }
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(env, &used, 10);
        if (used != std::string(env).size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception &) {
        throw ParameterError("SELFTEST_SEED must be a non-negative integer");
    }
}

struct RunArgs {
    std::uint32_t n = 1;
    std::uint32_t w = 4;
    std::string backend = "ideal";
    std::string prover = "honest";
    std::string mode = "collapsed";
    std::uint64_t sessions = 1000;
    std::uint64_t seed = 1;
    std::string transport = "inproc";
    std::string out = ".";
    std::size_t threads = 1;
    std::uint64_t timeout_ms = 10000;
    std::uint32_t lwe_m = 0;
    std::uint32_t lwe_q = 64;
    std::uint32_t lwe_b = 1;
};

void add_run_options(CLI::App &cmd, RunArgs &a) {
    cmd.add_option("--n", a.n, "N (the self-test uses 2N coordinates)")->check(CLI::Range(1u, 32u));
    cmd.add_option("--w", a.w, "preimage bits")->check(CLI::Range(1u, 20u));
    cmd.add_option("--backend", a.backend, "ideal | toylwe")->check(CLI::IsMember({"ideal", "toylwe"}));
    cmd.add_option("--prover", a.prover, "honest | classical | bitflip=P | wrongbasis");
    cmd.add_option("--mode", a.mode, "honest simulator: collapsed | fullsim")
        ->check(CLI::IsMember({"collapsed", "fullsim"}));
    cmd.add_option("--sessions", a.sessions, "number of sessions");
    cmd.add_option("--seed", a.seed, "master seed (SELFTEST_SEED overrides)");
    cmd.add_option("--transport", a.transport, "inproc | tcp:PORT");
    cmd.add_option("--out", a.out, "output directory for stats.json and transcripts.jsonl");
    cmd.add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd.add_option("--timeout-ms", a.timeout_ms, "per-message receive timeout");
    cmd.add_option("--lwe-m", a.lwe_m, "toy-LWE samples m (default w + 2)");
    cmd.add_option("--lwe-q", a.lwe_q, "toy-LWE modulus");
    cmd.add_option("--lwe-b", a.lwe_b, "toy-LWE noise bound");
}

harness::RunConfig run_config(protocol::ProtocolKind kind, const RunArgs &a) {
    harness::RunConfig c;
    c.kind = kind;
    c.n = a.n;
    c.w = a.w;
    c.backend = parse_backend(a.backend);
    c.lwe_m = a.lwe_m;
    c.lwe_modulus = a.lwe_q;
    c.lwe_noise = a.lwe_b;
    c.prover = harness::ProverSpec::parse(a.prover);
    c.mode = a.mode == "fullsim" ? prover::SimMode::FullSim : prover::SimMode::Collapsed;
    c.sessions = a.sessions;
    c.seed = effective_seed(a.seed);
    c.transport = harness::TransportSpec::parse(a.transport);
    c.threads = a.threads;
    c.timeout = transport::Timeout(a.timeout_ms);
    c.validate();
    return c;
}

int do_run(protocol::ProtocolKind kind, const RunArgs &args) {
    const auto config = run_config(kind, args);
    const auto result = harness::run_sessions(config);
    const auto audit = harness::audit_transcripts(config, result.transcripts);
    const fs::path dir(args.out);
    fs::create_directories(dir);
    const std::string doc = harness::stats_document(config, result.stats, audit);
    {
        std::ofstream out(dir / "stats.json", std::ios::binary | std::ios::trunc);
        out << doc;
        if (!out) {
            throw ParameterError("cannot write " + (dir / "stats.json").string());
        }
    }
    harness::write_transcripts(dir / "transcripts.jsonl", result.transcripts);

    const auto &s = result.stats;
    std::cout << protocol::to_string(kind) << " " << config.prover.to_string() << ": " << s.accepted << "/"
              << s.sessions << " accepted (" << s.acceptance.estimate << ", 95% CI [" << s.acceptance.ci.low << ", "
              << s.acceptance.ci.high << "])\n";
    std::cout << "eps_P=" << s.eps_p.estimate;
    for (std::size_t q = 0; q < s.eps_h.size(); ++q) {
        std::cout << " eps_H" << q << "=" << s.eps_h[q].estimate;
    }
    std::cout << " eps=" << s.eps << "\n";
    std::cout << "replay audit: " << audit.checked - audit.mismatched << "/" << audit.checked << " match\n";
    std::cout << "wrote " << (dir / "stats.json").string() << " and " << (dir / "transcripts.jsonl").string() << "\n";
    if (!audit.ok()) {
        std::cerr << "replay audit failed: " << audit.first_mismatch << "\n";
        return exit_failure;
    }
    return exit_ok;
}

struct AnalyzeArgs {
    std::string protocol = "selftest";
    std::uint32_t n = 1;
    std::uint32_t w = 2;
    std::string model = "honest";
    std::string report;
    std::uint64_t key_seed = 1;
    std::size_t key_samples = 32;
    std::uint64_t seed = 1;
};

int do_analyze(const AnalyzeArgs &a) {
    analysis::AnalysisOptions options;
    options.model = analysis::ModelSpec::parse(a.model);
    options.config.kind = a.protocol == "dimtest" ? protocol::ProtocolKind::DimTest : protocol::ProtocolKind::SelfTest;
    options.config.n = a.n;
    options.config.w = a.w;
    options.config.key_seed = a.key_seed;
    options.key_samples = a.key_samples;
    options.seed = effective_seed(a.seed);
    const auto result = analysis::analyze(options);
    const std::string text = result.report.dump(2) + "\n";
    if (a.report.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(a.report, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) {
            throw ParameterError("cannot write " + a.report);
        }
        std::cout << "wrote " << a.report << "\n";
    }
    const auto &checks = result.report.at("checks");
    std::cerr << (checks.size() - result.failures.size()) << "/" << checks.size() << " checks pass\n";
    for (const auto &name : result.failures) {
        std::cerr << "FAIL " << name << " " << checks.at(name).dump() << "\n";
    }
    return result.ok() ? exit_ok : exit_failure;
}

struct EntcfArgs {
    std::string backend = "ideal";
    std::uint32_t w = 4;
    std::size_t keys = 4;
    std::uint64_t seed = 1;
};

int do_entcf_check(const EntcfArgs &a) {
    harness::EntcfCheckConfig c;
    c.backend = parse_backend(a.backend);
    c.max_w = a.w;
    c.keys_per_family = a.keys;
    c.seed = effective_seed(a.seed);
    const auto report = harness::run_entcf_check(c);
    for (const auto &p : report.properties) {
        std::cout << (p.failures == 0 && p.cases > 0 ? "ok   " : "FAIL ") << p.name << " (" << p.cases << " cases";
        if (p.failures) {
            std::cout << ", " << p.failures << " failures, first: " << p.first_failure;
        }
        std::cout << ")\n";
    }
    return report.ok() ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Self-testing and dimension-test protocol simulator"};
    app.require_subcommand(1);

    RunArgs self_args, dim_args;
    auto *self_cmd = app.add_subcommand("selftest", "self-testing protocol");
    self_cmd->require_subcommand(1);
    auto *self_run = self_cmd->add_subcommand("run", "run sessions and write stats and transcripts");
    add_run_options(*self_run, self_args);

    auto *dim_cmd = app.add_subcommand("dimtest", "dimension test protocol");
    dim_cmd->require_subcommand(1);
    auto *dim_run = dim_cmd->add_subcommand("run", "run sessions and write stats and transcripts");
    dim_args.n = 2;
    add_run_options(*dim_run, dim_args);

    AnalyzeArgs analyze_args;
    auto *analyze_cmd = app.add_subcommand("analyze", "white-box analysis of a device model");
    analyze_cmd->add_option("--protocol", analyze_args.protocol, "selftest | dimtest")
        ->check(CLI::IsMember({"selftest", "dimtest"}));
    analyze_cmd->add_option("--n", analyze_args.n, "N")->check(CLI::Range(1u, 4u));
    analyze_cmd->add_option("--w", analyze_args.w, "preimage bits")->check(CLI::Range(1u, 8u));
    analyze_cmd->add_option("--model", analyze_args.model, "honest | bitflip=P | wrongbasis | random=SEED | classical=SEED");
    analyze_cmd->add_option("--report", analyze_args.report, "write the JSON report here instead of stdout");
    analyze_cmd->add_option("--key-seed", analyze_args.key_seed, "seed of the fixed key tuple");
    analyze_cmd->add_option("--key-samples", analyze_args.key_samples, "key draws for the averaged estimate");
    analyze_cmd->add_option("--seed", analyze_args.seed, "seed for randomized identity probes");

    EntcfArgs entcf_args;
    auto *entcf_cmd = app.add_subcommand("entcf-check", "exhaustive ENTCF property suite");
    entcf_cmd->add_option("--backend", entcf_args.backend, "ideal | toylwe")->check(CLI::IsMember({"ideal", "toylwe"}));
    entcf_cmd->add_option("--w", entcf_args.w, "largest w to check")->check(CLI::Range(1u, 8u));
    entcf_cmd->add_option("--keys", entcf_args.keys, "keys per family and w")->check(CLI::PositiveNumber);
    entcf_cmd->add_option("--seed", entcf_args.seed, "key generation seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (self_run->parsed()) {
            return do_run(protocol::ProtocolKind::SelfTest, self_args);
        }
        if (dim_run->parsed()) {
            return do_run(protocol::ProtocolKind::DimTest, dim_args);
        }
        if (analyze_cmd->parsed()) {
            return do_analyze(analyze_args);
        }
        if (entcf_cmd->parsed()) {
            return do_entcf_check(entcf_args);
        }
    } catch (const ParameterError &e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    std::cerr << app.help();
    return exit_usage;
}
