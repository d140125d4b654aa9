/*****************************************************************************
*  Copyright 2026 the stackprobe authors
*
*  Licensed under the Apache License, Version 2.0 (the "License");
*  you may not use this file except in compliance with the License.
*  You may obtain a copy of the License at
*
* http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* *****************************************************************************/

#include "stackprobe/net.hpp"

#include <arpa/inet.h>
#include <errno.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <string.h>
#include <sys/socket.h>
#include <unistd.h>

#include <stdexcept>

#include "stackprobe/errors.hpp"

namespace stackprobe::net {

namespace {

struct AddrInfoHolder {
  addrinfo* res = nullptr;
  ~AddrInfoHolder() {
    if (res) ::freeaddrinfo(res);
  }
};

// Resolves host:port for TCP. Throws HostUnresolvableError.
AddrInfoHolder resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  AddrInfoHolder holder;
  const std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &holder.res);
  if (rc != 0 || holder.res == nullptr) {
    throw HostUnresolvableError("cannot resolve host '" + host +
                                "': " + ::gai_strerror(rc));
  }
  return holder;
}

void set_timeout_opt(int fd, int opt, Millis timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, opt, &tv, sizeof(tv));
}

// Non-blocking connect with a deadline. Returns errno (0 on success).
int connect_with_timeout(int fd, const sockaddr* addr, socklen_t len,
                         Millis timeout) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd, addr, len);
  int err = 0;
  if (rc != 0) {
    if (errno != EINPROGRESS) {
      err = errno;
    } else {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 0) {
        err = ETIMEDOUT;
      } else if (rc < 0) {
        err = errno;
      } else {
        socklen_t elen = sizeof(err);
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &elen);
      }
    }
  }
  ::fcntl(fd, F_SETFL, flags);
  return err;
}

}  // namespace

HostPort HostPort::parse(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    throw Error("expected host:port, got '" + text + "'");
  }
  HostPort hp;
  if (colon > 0) hp.host = text.substr(0, colon);
  const std::string port_text = text.substr(colon + 1);
  try {
    unsigned long v = std::stoul(port_text);
    if (v > 65535) throw std::out_of_range("port");
    hp.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw Error("bad port in '" + text + "'");
  }
  return hp;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::set_recv_timeout(Millis timeout) {
  if (fd_ >= 0) set_timeout_opt(fd_, SO_RCVTIMEO, timeout);
}

Socket::RecvStatus Socket::recv_some(std::string& out, std::size_t max) {
  if (fd_ < 0) return RecvStatus::closed;
  std::string buf(max, '\0');
  ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n > 0) {
    out.append(buf.data(), static_cast<std::size_t>(n));
    return RecvStatus::data;
  }
  if (n == 0) return RecvStatus::closed;
  if (errno == EAGAIN || errno == EWOULDBLOCK) return RecvStatus::timeout;
  if (errno == ECONNRESET || errno == EPIPE) return RecvStatus::reset;
  return RecvStatus::reset;
}

bool Socket::send_all(std::string_view data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent,
                       MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

void Socket::shutdown_send() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::string Socket::peer() const {
  if (fd_ < 0) return {};
  sockaddr_storage ss{};
  socklen_t len = sizeof(ss);
  if (::getpeername(fd_, reinterpret_cast<sockaddr*>(&ss), &len) != 0) {
    return {};
  }
  char host[NI_MAXHOST];
  char serv[NI_MAXSERV];
  if (::getnameinfo(reinterpret_cast<sockaddr*>(&ss), len, host, sizeof(host),
                    serv, sizeof(serv), NI_NUMERICHOST | NI_NUMERICSERV) != 0) {
    return {};
  }
  return std::string(host) + ":" + serv;
}

Socket connect_to(const std::string& host, std::uint16_t port, Millis timeout) {
  AddrInfoHolder ai = resolve(host, port);
  int last_err = ECONNREFUSED;
  for (addrinfo* p = ai.res; p != nullptr; p = p->ai_next) {
    int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    int err = connect_with_timeout(fd, p->ai_addr, p->ai_addrlen, timeout);
    if (err == 0) {
      Socket s(fd);
      s.set_recv_timeout(timeout);
      return s;
    }
    last_err = err;
    ::close(fd);
  }
  throw TargetUnreachableError("connect to " + host + ":" +
                               std::to_string(port) + " failed: " +
                               ::strerror(last_err));
}

ProbeResult probe_connect(const std::string& host, std::uint16_t port,
                          Millis timeout) {
  AddrInfoHolder ai = resolve(host, port);
  int last_err = ETIMEDOUT;
  for (addrinfo* p = ai.res; p != nullptr; p = p->ai_next) {
    int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    int err = connect_with_timeout(fd, p->ai_addr, p->ai_addrlen, timeout);
    ::close(fd);
    if (err == 0) return ProbeResult::open;
    last_err = err;
  }
  if (last_err == ECONNREFUSED) return ProbeResult::closed;
  return ProbeResult::filtered;
}

Listener::Listener(const std::string& host, std::uint16_t port) {
  AddrInfoHolder ai = [&] {
    try {
      return resolve(host, port);
    } catch (const HostUnresolvableError& e) {
      throw BindFailureError(e.what());
    }
  }();
  int err = EADDRNOTAVAIL;
  for (addrinfo* p = ai.res; p != nullptr; p = p->ai_next) {
    int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      fd_ = fd;
      sockaddr_storage ss{};
      socklen_t len = sizeof(ss);
      if (::getsockname(fd, reinterpret_cast<sockaddr*>(&ss), &len) == 0) {
        if (ss.ss_family == AF_INET) {
          port_ = ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
        } else if (ss.ss_family == AF_INET6) {
          port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
        }
      }
      return;
    }
    err = errno;
    ::close(fd);
  }
  throw BindFailureError("cannot bind " + host + ":" + std::to_string(port) +
                         ": " + ::strerror(err));
}

std::optional<Socket> Listener::accept(const std::atomic<bool>& stop,
                                       Millis poll_interval) {
  while (!stop.load(std::memory_order_relaxed)) {
    if (fd_ < 0) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(poll_interval.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return std::nullopt;
    }
    if (rc == 0) continue;
    int cfd = ::accept(fd_, nullptr, nullptr);
    if (cfd < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return std::nullopt;
    }
    return Socket(cfd);
  }
  return std::nullopt;
}

void Listener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

}  // namespace stackprobe::net
