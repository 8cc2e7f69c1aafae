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

#include <thread>

#include "selftest/core/error.h"
#include "selftest/harness/run.h"
#include "selftest/transport/channel.h"
#include "selftest/transport/wire.h"

using namespace selftest;
using namespace selftest::transport;
using namespace std::chrono_literals;
using protocol::Message;

namespace {

std::vector<Message> sample_messages() {
    Rng rng(51);
    auto pair = entcf::gen_keypair(entcf::Family::F, entcf::EntcfParams::toy_lwe({2, 4, 32, 1}), rng);
    return {
        protocol::KeysMsg{{pair.key}},
        protocol::ImagesMsg{{entcf::Image{0}, entcf::Image{0xdeadbeefULL}}},
        protocol::RoundTypeMsg{protocol::RoundType::Hadamard},
        protocol::PreimageAnswerMsg{BitString::from_string("101"), {1, 2, 3}},
        protocol::HadamardDMsg{{0, 7}},
        protocol::QuestionMsg{3},
        protocol::FinalAnswerMsg{BitString::from_string("0110")},
        protocol::VerdictMsg{false, "A.q1.equation.undefined"},
    };
}

}  // namespace

TEST_CASE("frames round trip") {
    const auto sid = session_id_from_seed(99);
    for (const auto &msg : sample_messages()) {
        const auto bytes = encode_frame(sid, msg);
        const auto frame = decode_frame(bytes);
        CHECK(frame.session == sid);
        CHECK(frame.message == msg);
        // Length prefix covers everything after itself.
        const std::uint32_t length = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                                     (std::uint32_t{bytes[2]} << 8) | bytes[3];
        CHECK(length + 4 == bytes.size());
        CHECK(bytes[4] == wire_version);
        CHECK(bytes[21] == protocol::message_type(msg));
    }
}

TEST_CASE("session id layout") {
    const auto sid = session_id_from_seed(0x0102030405060708ULL);
    CHECK(sid[0] == 1);
    CHECK(sid[7] == 8);
    CHECK(to_hex(sid).size() == 32);
    CHECK(to_hex(sid).starts_with("0102030405060708"));
}

TEST_CASE("malformed frames are rejected") {
    const auto sid = session_id_from_seed(1);
    const auto good = encode_frame(sid, Message{protocol::QuestionMsg{1}});

    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_frame(truncated), ProtocolError);

    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_frame(trailing), ProtocolError);

    auto version = good;
    version[4] = 0x02;
    CHECK_THROWS_AS(decode_frame(version), ProtocolError);

    auto type = good;
    type[21] = 0x42;
    CHECK_THROWS_AS(decode_frame(type), ProtocolError);

    CHECK_THROWS_AS(decode_frame(std::vector<std::uint8_t>{0, 0}), ProtocolError);
}

TEST_CASE("payload validation") {
    using nlohmann::json;
    CHECK_THROWS_AS(transport::from_json(6, json::parse(R"({"q":4})")), ProtocolError);
    CHECK_THROWS_AS(transport::from_json(6, json::parse(R"({"q":"1"})")), ProtocolError);
    CHECK_THROWS_AS(transport::from_json(7, json::parse(R"({"v":"012"})")), ProtocolError);
    CHECK_THROWS_AS(transport::from_json(2, json::parse(R"({"y":["zz"]})")), ProtocolError);
    CHECK_THROWS_AS(transport::from_json(9, json::object()), ProtocolError);
    CHECK(std::get<protocol::QuestionMsg>(transport::from_json(6, json::parse(R"({"q":2})"))).q == 2);
}

TEST_CASE("canonical payload has sorted keys and no whitespace") {
    const auto text = canonical_payload(Message{protocol::VerdictMsg{true, "C.q1.accept"}});
    CHECK(text == R"({"accept":true,"reason":"C.q1.accept"})");
}

TEST_CASE("in-process channel") {
    auto [a, b] = make_inproc_pair();
    a->send({1, 2, 3});
    CHECK(b->recv(100ms) == Bytes{1, 2, 3});
    CHECK_THROWS_AS(b->recv(10ms), TransportError);
    a.reset();
    CHECK_THROWS_AS(b->recv(100ms), TransportError);
}

TEST_CASE("tcp channel carries frames and times out") {
    TcpListener listener(0);
    REQUIRE(listener.port() != 0);
    std::unique_ptr<TcpChannel> server;
    std::thread accept_thread([&] { server = listener.accept(2000ms); });
    auto client = tcp_connect("127.0.0.1", listener.port(), 2000ms);
    accept_thread.join();
    REQUIRE(server);
    const auto sid = session_id_from_seed(5);
    for (const auto &msg : sample_messages()) {
        client->send(encode_frame(sid, msg));
        CHECK(decode_frame(server->recv(1000ms)).message == msg);
    }
    CHECK_THROWS_AS(server->recv(50ms), TransportError);
    client.reset();
    CHECK_THROWS_AS(server->recv(500ms), TransportError);
}

TEST_CASE("endpoint rejects frames of another session") {
    auto [a, b] = make_inproc_pair();
    Endpoint left(std::move(a), session_id_from_seed(1));
    Endpoint right(std::move(b), session_id_from_seed(2));
    left.send(Message{protocol::QuestionMsg{0}});
    CHECK_THROWS_AS(right.recv(100ms), ProtocolError);
}

TEST_CASE("in-process and tcp runs give identical transcripts") {
    harness::RunConfig c;
    c.n = 1;
    c.w = 3;
    c.sessions = 60;
    c.seed = 8;
    c.prover = harness::ProverSpec::parse("bitflip=0.2");
    const auto inproc = harness::run_sessions(c);
    c.transport = harness::TransportSpec::parse("tcp:0");
    c.threads = 2;
    const auto tcp = harness::run_sessions(c);
    REQUIRE(inproc.transcripts.size() == tcp.transcripts.size());
    for (std::size_t i = 0; i < inproc.transcripts.size(); ++i) {
        CHECK(inproc.transcripts[i].to_json() == tcp.transcripts[i].to_json());
    }
    CHECK(tcp.stats.transport_failures == 0);
}
