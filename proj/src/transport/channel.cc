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

#include "selftest/transport/channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "selftest/core/bits.h"
#include "selftest/core/error.h"

namespace selftest::transport {

namespace {

struct Queue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<Bytes> frames;
    bool closed = false;
};

class InProcChannel : public Channel {
   public:
    InProcChannel(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
    ~InProcChannel() override {
        std::lock_guard lock(out_->mutex);
        out_->closed = true;
        out_->ready.notify_all();
    }

    void send(const Bytes &frame) override {
        std::lock_guard lock(out_->mutex);
        if (out_->closed) {
            throw TransportError("in-process peer closed");
        }
        out_->frames.push_back(frame);
        out_->ready.notify_one();
    }

    Bytes recv(Timeout timeout) override {
        std::unique_lock lock(in_->mutex);
        if (!in_->ready.wait_for(lock, timeout, [&] { return !in_->frames.empty() || in_->closed; })) {
            throw TransportError("receive timed out");
        }
        if (in_->frames.empty()) {
            throw TransportError("in-process peer closed");
        }
        Bytes frame = std::move(in_->frames.front());
        in_->frames.pop_front();
        return frame;
    }

   private:
    std::shared_ptr<Queue> in_, out_;
};

std::string errno_text(const char *what) {
    return std::string(what) + ": " + std::strerror(errno);
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return static_cast<int>(std::max<std::int64_t>(0, left.count()));
}

// Waits for `events` on fd; false on timeout.
bool wait_fd(int fd, short events, int timeout_ms) {
    pollfd p{fd, events, 0};
    for (;;) {
        int r = ::poll(&p, 1, timeout_ms);
        if (r < 0 && errno == EINTR) {
            continue;
        }
        if (r < 0) {
            throw TransportError(errno_text("poll"));
        }
        return r > 0;
    }
}

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
    auto a = std::make_shared<Queue>();
    auto b = std::make_shared<Queue>();
    return {std::make_unique<InProcChannel>(a, b), std::make_unique<InProcChannel>(b, a)};
}

TcpChannel::TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void TcpChannel::send(const Bytes &frame) {
    std::size_t sent = 0;
    while (sent < frame.size()) {
        ssize_t r = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
        if (r < 0 && errno == EINTR) {
            continue;
        }
        if (r <= 0) {
            throw TransportError(errno_text("send"));
        }
        sent += static_cast<std::size_t>(r);
    }
}

void TcpChannel::read_exact(std::uint8_t *out, std::size_t size, std::chrono::steady_clock::time_point deadline) {
    std::size_t got = 0;
    while (got < size) {
        if (!wait_fd(fd_, POLLIN, remaining_ms(deadline))) {
            throw TransportError("receive timed out");
        }
        ssize_t r = ::recv(fd_, out + got, size - got, 0);
        if (r < 0 && errno == EINTR) {
            continue;
        }
        if (r < 0) {
            throw TransportError(errno_text("recv"));
        }
        if (r == 0) {
            throw TransportError(got == 0 ? "peer closed the connection" : "connection closed mid-frame");
        }
        got += static_cast<std::size_t>(r);
    }
}

Bytes TcpChannel::recv(Timeout timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    Bytes frame(4);
    read_exact(frame.data(), 4, deadline);
    const std::uint32_t length = ByteReader(frame).u32();
    if (length < frame_header_size || length > max_frame_length) {
        throw ProtocolError("frame length " + std::to_string(length) + " out of range");
    }
    frame.resize(4 + length);
    read_exact(frame.data() + 4, length, deadline);
    return frame;
}

std::unique_ptr<TcpChannel> tcp_connect(const std::string &host, std::uint16_t port, Timeout timeout) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *found = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found); rc != 0) {
        throw TransportError(std::string("resolve ") + host + ": " + ::gai_strerror(rc));
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, &::freeaddrinfo);
    int fd = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
    if (fd < 0) {
        throw TransportError(errno_text("socket"));
    }
    auto channel = std::make_unique<TcpChannel>(fd);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (::connect(fd, found->ai_addr, found->ai_addrlen) == 0) {
            return channel;
        }
        if (errno != ECONNREFUSED && errno != EINTR) {
            throw TransportError(errno_text("connect"));
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            throw TransportError("connect timed out");
        }
        // A refused connect leaves the socket unusable; start over.
        ::usleep(10000);
        fd = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
        if (fd < 0) {
            throw TransportError(errno_text("socket"));
        }
        channel = std::make_unique<TcpChannel>(fd);
    }
}

TcpListener::TcpListener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        throw TransportError(errno_text("socket"));
    }
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
        std::string why = errno_text("bind/listen");
        close();
        throw TransportError(why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr *>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    close();
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<TcpChannel> TcpListener::accept(Timeout timeout) {
    if (fd_ < 0 || !wait_fd(fd_, POLLIN, static_cast<int>(timeout.count()))) {
        return nullptr;
    }
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        throw TransportError(errno_text("accept"));
    }
    return std::make_unique<TcpChannel>(fd);
}

protocol::Message Endpoint::recv(Timeout timeout) {
    Frame frame = decode_frame(channel_->recv(timeout));
    if (frame.session != session_) {
        throw ProtocolError("frame for session " + to_hex(frame.session) + " on channel of " + to_hex(session_));
    }
    return std::move(frame.message);
}

}  // namespace selftest::transport
