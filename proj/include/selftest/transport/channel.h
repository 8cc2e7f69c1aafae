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

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selftest/transport/wire.h"

namespace selftest::transport {

using Bytes = std::vector<std::uint8_t>;
using Timeout = std::chrono::milliseconds;

// One end of a reliable, ordered frame stream. Frames are whole encoded
// frames including the length prefix. recv throws TransportError on timeout
// or when the peer is gone.
class Channel {
   public:
    virtual ~Channel() = default;
    virtual void send(const Bytes &frame) = 0;
    virtual Bytes recv(Timeout timeout) = 0;
};

// Two connected in-process ends.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

// Framed TCP stream over a connected socket; owns the descriptor.
class TcpChannel : public Channel {
   public:
    explicit TcpChannel(int fd);
    ~TcpChannel() override;
    TcpChannel(const TcpChannel &) = delete;
    TcpChannel &operator=(const TcpChannel &) = delete;

    void send(const Bytes &frame) override;
    Bytes recv(Timeout timeout) override;

   private:
    void read_exact(std::uint8_t *out, std::size_t size, std::chrono::steady_clock::time_point deadline);
    int fd_;
};

std::unique_ptr<TcpChannel> tcp_connect(const std::string &host, std::uint16_t port, Timeout timeout);

// Listening socket on the loopback interface. Port 0 picks a free port.
class TcpListener {
   public:
    explicit TcpListener(std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener &) = delete;
    TcpListener &operator=(const TcpListener &) = delete;

    std::uint16_t port() const { return port_; }
    // Null when nothing arrives within the timeout.
    std::unique_ptr<TcpChannel> accept(Timeout timeout);
    void close();

   private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Message-level view of a channel bound to one session id.
class Endpoint {
   public:
    Endpoint(std::unique_ptr<Channel> channel, SessionId session)
        : channel_(std::move(channel)), session_(session) {}

    void send(const protocol::Message &msg) { channel_->send(encode_frame(session_, msg)); }
    // Throws ProtocolError for a frame of another session.
    protocol::Message recv(Timeout timeout);
    const SessionId &session() const { return session_; }

   private:
    std::unique_ptr<Channel> channel_;
    SessionId session_;
};

}  // namespace selftest::transport
