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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selftest/harness/session.h"
#include "selftest/harness/stats.h"

namespace selftest::harness {

struct TransportSpec {
    enum class Kind { InProc, Tcp };
    Kind kind = Kind::InProc;
    std::uint16_t port = 0;  // 0 picks a free port

    // "inproc" or "tcp:PORT". Throws ParameterError.
    static TransportSpec parse(const std::string &text);
    std::string to_string() const;
};

struct RunConfig {
    ProtocolKind kind = ProtocolKind::SelfTest;
    std::uint32_t n = 1;
    std::uint32_t w = 2;
    entcf::Backend backend = entcf::Backend::Ideal;
    // Toy-LWE dimensions besides n = w.
    std::uint32_t lwe_m = 0;  // 0: w + 2
    std::uint32_t lwe_modulus = 64;
    std::uint32_t lwe_noise = 1;
    ProverSpec prover;
    prover::SimMode mode = prover::SimMode::Collapsed;
    std::uint64_t sessions = 1000;
    std::uint64_t seed = 1;
    TransportSpec transport;
    // Worker threads; results do not depend on it.
    std::size_t threads = 1;
    transport::Timeout timeout{10000};

    protocol::VerifierConfig verifier_config() const;
    void validate() const;
    // Everything that determines the output; excludes threads and timeout.
    nlohmann::json to_json() const;
};

struct RunResult {
    std::vector<Transcript> transcripts;  // session index order
    SessionStats stats;
};

// Runs config.sessions sessions. Session i uses session_seed(seed, i)
// regardless of scheduling, so the result is a function of the config.
RunResult run_sessions(const RunConfig &config);

struct AuditResult {
    std::uint64_t checked = 0;
    std::uint64_t mismatched = 0;
    std::string first_mismatch;
    bool ok() const { return mismatched == 0; }
};

AuditResult audit_transcripts(const RunConfig &config, std::span<const Transcript> transcripts);

// stats.json: {"config": ..., "stats": ..., "audit": ...}, one trailing
// newline. transcripts.jsonl: one canonical JSON object per line.
std::string stats_document(const RunConfig &config, const SessionStats &stats, const AuditResult &audit);
void write_transcripts(const std::filesystem::path &path, std::span<const Transcript> transcripts);
std::vector<Transcript> read_transcripts(const std::filesystem::path &path);

}  // namespace selftest::harness
