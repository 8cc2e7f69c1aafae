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

#include "selftest/harness/run.h"

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "selftest/core/error.h"

namespace selftest::harness {

using nlohmann::json;

TransportSpec TransportSpec::parse(const std::string &text) {
    TransportSpec spec;
    if (text == "inproc") {
        return spec;
    }
    if (text.rfind("tcp:", 0) == 0) {
        const std::string digits = text.substr(4);
        unsigned port = 0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
        if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size() || port > 65535) {
            throw ParameterError("tcp port must be an integer in [0, 65535]");
        }
        spec.kind = Kind::Tcp;
        spec.port = static_cast<std::uint16_t>(port);
        return spec;
    }
    throw ParameterError("transport must be 'inproc' or 'tcp:PORT'");
}

std::string TransportSpec::to_string() const {
    return kind == Kind::InProc ? "inproc" : "tcp:" + std::to_string(port);
}

protocol::VerifierConfig RunConfig::verifier_config() const {
    protocol::VerifierConfig c;
    c.kind = kind;
    c.n = n;
    if (backend == entcf::Backend::Ideal) {
        c.entcf = entcf::EntcfParams::ideal(w);
    } else {
        c.entcf = entcf::EntcfParams::toy_lwe({w, lwe_m == 0 ? w + 2 : lwe_m, lwe_modulus, lwe_noise});
    }
    return c;
}

void RunConfig::validate() const {
    verifier_config().validate();
    if (threads == 0) {
        throw ParameterError("threads must be positive");
    }
}

json RunConfig::to_json() const {
    json j = {
        {"protocol", protocol::to_string(kind)},
        {"n", n},
        {"w", w},
        {"backend", entcf::to_string(backend)},
        {"prover", prover.to_string()},
        {"mode", mode == prover::SimMode::Collapsed ? "collapsed" : "fullsim"},
        {"sessions", sessions},
        {"seed", seed},
        {"transport", transport.kind == TransportSpec::Kind::InProc ? "inproc" : "tcp"},
    };
    if (backend == entcf::Backend::ToyLwe) {
        const auto lwe = verifier_config().entcf.lwe;
        j["lwe"] = {{"n", lwe.n}, {"m", lwe.m}, {"q", lwe.modulus}, {"B", lwe.noise_bound}};
    }
    return j;
}

namespace {

DeviceFactory device_factory(const RunConfig &config) {
    prover::HonestOptions options;
    options.mode = config.mode;
    return [config, options](const transport::SessionId &sid) {
        const std::uint64_t seed = seed_from_session_id(sid);
        if (transport::session_id_from_seed(seed) != sid) {
            throw ProtocolError("session id is not derived from a session seed");
        }
        return make_device(config.prover, config.kind, config.n, device_seed(seed), options);
    };
}

Transcript run_inproc(const RunConfig &config, const protocol::VerifierConfig &vc, std::uint64_t index) {
    const std::uint64_t seed = session_seed(config.seed, index);
    const auto sid = transport::session_id_from_seed(seed);
    auto [verifier_end, prover_end] = transport::make_inproc_pair();
    InProcProver prover(std::move(prover_end), device_factory(config));
    transport::Endpoint link(std::move(verifier_end), sid);
    return run_verifier_session(index, seed, vc, link, config.timeout, [&] { prover.pump(); });
}

// Loopback prover service for TCP runs: one handler thread per connection.
class LocalProverServer {
   public:
    LocalProverServer(const RunConfig &config)
        : listener_(config.transport.port), factory_(device_factory(config)), timeout_(config.timeout) {
        acceptor_ = std::thread([this] { accept_loop(); });
    }
    ~LocalProverServer() {
        stop_ = true;
        acceptor_.join();
        std::unique_lock lock(mutex_);
        idle_.wait(lock, [&] { return active_ == 0; });
    }
    std::uint16_t port() const { return listener_.port(); }

   private:
    void accept_loop() {
        while (!stop_) {
            auto channel = listener_.accept(transport::Timeout(50));
            if (!channel) {
                continue;
            }
            {
                std::lock_guard lock(mutex_);
                ++active_;
            }
            std::thread([this, ch = std::move(channel)]() mutable {
                serve_prover(*ch, factory_, timeout_);
                ch.reset();
                std::lock_guard lock(mutex_);
                if (--active_ == 0) {
                    idle_.notify_all();
                }
            }).detach();
        }
        listener_.close();
    }

    transport::TcpListener listener_;
    DeviceFactory factory_;
    transport::Timeout timeout_;
    std::atomic<bool> stop_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::condition_variable idle_;
    std::size_t active_ = 0;
};

Transcript run_tcp(const RunConfig &config, const protocol::VerifierConfig &vc, std::uint64_t index,
                   std::uint16_t port) {
    const std::uint64_t seed = session_seed(config.seed, index);
    const auto sid = transport::session_id_from_seed(seed);
    std::unique_ptr<transport::Channel> channel;
    try {
        channel = transport::tcp_connect("127.0.0.1", port, config.timeout);
    } catch (const TransportError &e) {
        // No channel at all: the verifier never gets to send its keys.
        Transcript t;
        t.index = index;
        t.session = sid;
        t.kind = config.kind;
        t.seed = seed;
        t.verdict = {false, protocol::reason_transport};
        t.error = e.what();
        return t;
    }
    transport::Endpoint link(std::move(channel), sid);
    return run_verifier_session(index, seed, vc, link, config.timeout);
}

}  // namespace

RunResult run_sessions(const RunConfig &config) {
    config.validate();
    const auto vc = config.verifier_config();
    RunResult result;
    result.transcripts.resize(config.sessions);

    std::unique_ptr<LocalProverServer> server;
    if (config.transport.kind == TransportSpec::Kind::Tcp) {
        server = std::make_unique<LocalProverServer>(config);
    }
    std::atomic<std::uint64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        try {
            for (std::uint64_t i = next++; i < config.sessions; i = next++) {
                result.transcripts[i] = server ? run_tcp(config, vc, i, server->port()) : run_inproc(config, vc, i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) {
                error = std::current_exception();
            }
            next = config.sessions;
        }
    };
    const std::size_t workers = std::min<std::size_t>(config.threads, std::max<std::uint64_t>(1, config.sessions));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < workers; ++k) {
            pool.emplace_back(worker);
        }
    }
    server.reset();
    if (error) {
        std::rethrow_exception(error);
    }
    result.stats = aggregate(config.kind, config.n, result.transcripts);
    return result;
}

AuditResult audit_transcripts(const RunConfig &config, std::span<const Transcript> transcripts) {
    const auto vc = config.verifier_config();
    AuditResult out;
    for (const auto &t : transcripts) {
        ++out.checked;
        auto replay = replay_transcript(t, vc);
        if (!replay.match) {
            if (out.mismatched++ == 0) {
                out.first_mismatch = "session " + std::to_string(t.index) + ": " + replay.mismatch;
            }
        }
    }
    return out;
}

std::string stats_document(const RunConfig &config, const SessionStats &stats, const AuditResult &audit) {
    json audit_json = {{"checked", audit.checked}, {"mismatched", audit.mismatched}};
    if (!audit.ok()) {
        audit_json["first_mismatch"] = audit.first_mismatch;
    }
    json doc = {{"config", config.to_json()}, {"stats", stats.to_json()}, {"replay_audit", audit_json}};
    return doc.dump(2) + "\n";
}

void write_transcripts(const std::filesystem::path &path, std::span<const Transcript> transcripts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParameterError("cannot write " + path.string());
    }
    for (const auto &t : transcripts) {
        out << t.to_json().dump() << '\n';
    }
    if (!out) {
        throw ParameterError("write to " + path.string() + " failed");
    }
}

std::vector<Transcript> read_transcripts(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParameterError("cannot read " + path.string());
    }
    std::vector<Transcript> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ProtocolError("transcript line " + std::to_string(out.size() + 1) + " is not JSON");
        }
        out.push_back(Transcript::from_json(j));
    }
    return out;
}

}  // namespace selftest::harness
