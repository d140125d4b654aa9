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

#ifndef STACKPROBE_NET_HPP
#define STACKPROBE_NET_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace stackprobe::net {

using Millis = std::chrono::milliseconds;

/// "host:port" pair. parse() accepts "127.0.0.1:8080" or ":8080".
struct HostPort {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  static HostPort parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Thin RAII wrapper over a connected TCP socket. Move-only.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void set_recv_timeout(Millis timeout);

  enum class RecvStatus { data, closed, timeout, reset };

  /// Appends up to max bytes to out. Uses the configured receive timeout.
  RecvStatus recv_some(std::string& out, std::size_t max = 16384);

  /// Sends the whole buffer; returns false if the peer went away.
  bool send_all(std::string_view data);

  /// Half-close: no more data will be sent from this side.
  void shutdown_send();

  void close();

  /// Peer address as "host:port" (empty when unavailable).
  std::string peer() const;

 private:
  int fd_ = -1;
};

/// Connects with a timeout. Throws TargetUnreachableError on failure.
Socket connect_to(const std::string& host, std::uint16_t port,
                  Millis timeout = Millis(5000));

/// Recon probe outcome for one port.
enum class ProbeResult { open, closed, filtered };

/// TCP connect scan of a single port. Throws HostUnresolvableError when the
/// host does not resolve; network outcomes are returned, never thrown.
ProbeResult probe_connect(const std::string& host, std::uint16_t port,
                          Millis timeout);

/// Listening TCP socket. Binding port 0 picks an ephemeral port.
class Listener {
 public:
  Listener(const std::string& host, std::uint16_t port);
  Listener(Listener&&) = default;
  ~Listener() { close(); }

  std::uint16_t port() const { return port_; }

  /// Polls for a connection until one arrives or stop becomes true.
  std::optional<Socket> accept(const std::atomic<bool>& stop,
                               Millis poll_interval = Millis(50));

  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace stackprobe::net

#endif  // STACKPROBE_NET_HPP
