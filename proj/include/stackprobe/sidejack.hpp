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

// Session sidejacking: harvest session cookies out of cleartext HTTP byte
// streams, persist them to a line-based store, and replay them against the
// target without any other credentials.
//
// Byte acquisition is file- or proxy-based. The transparent proxy tap
// forwards traffic unmodified in both directions while copying every chunk
// to a capture file and/or a live analyzer.
//
// Session store format: one record per line, tab separated:
//   ISO-8601 timestamp, client host:port, URL, cookie name, cookie value.
// File-based harvests have no wall clock to draw on (capture frames carry
// none), so they stamp records with the epoch plus the record ordinal,
// which keeps repeated harvests byte-identical.

#ifndef STACKPROBE_SIDEJACK_HPP
#define STACKPROBE_SIDEJACK_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "stackprobe/capture.hpp"
#include "stackprobe/http.hpp"
#include "stackprobe/net.hpp"

namespace stackprobe::sidejack {

struct CapturedSession {
  std::string url;
  std::string cookie_name;
  std::string cookie_value;
  std::string observed_at;    // ISO-8601 UTC
  std::string source_client;  // host:port, or "-" when unknown

  bool operator==(const CapturedSession&) const = default;
};

inline constexpr const char* kDefaultCookieName = "sessionid";

/// Scans an interleaved request/response frame sequence for cookies named
/// `cookie_name`. Set-Cookie responses are attributed to the URL of the
/// most recent request; Cookie request headers to their own request URL.
std::vector<CapturedSession> harvest_frames(
    const std::vector<capture::Frame>& frames,
    const std::string& cookie_name = kDefaultCookieName,
    const std::string& source_client = "-");

/// Harvests a capture file. Throws CaptureOpenError.
std::vector<CapturedSession> harvest_capture(
    const std::string& capture_path,
    const std::string& cookie_name = kDefaultCookieName);

/// Session store I/O.
std::string session_store_line(const CapturedSession& session);
void save_session_store(const std::string& path,
                        const std::vector<CapturedSession>& sessions);
/// Throws StoreParseError(line) on a malformed line, Error when unreadable.
std::vector<CapturedSession> load_session_store(const std::string& path);

struct HijackAttempt {
  CapturedSession session;
  std::string requested_url;
  int status = 0;
  bool body_marker_found = false;

  bool success() const { return status == 200 && body_marker_found; }
};

/// GETs `url` presenting only the captured cookie.
/// Throws TargetUnreachableError.
HijackAttempt replay(const CapturedSession& session, const std::string& url,
                     const std::string& marker,
                     net::Millis timeout = net::Millis(5000));

/// Splits "http://host:port/path" into (host, port, path).
struct ParsedUrl {
  std::string host;
  std::uint16_t port = 80;
  std::string path = "/";
};
ParsedUrl parse_url(const std::string& url);

/// Inline transparent TCP proxy. Bytes pass through unmodified; copies go
/// to an optional capture file and an optional live session callback.
class ProxyTap {
 public:
  struct Options {
    std::string listen_host = "127.0.0.1";
    std::uint16_t listen_port = 0;
    std::string upstream_host = "127.0.0.1";
    std::uint16_t upstream_port = 0;
    std::string capture_path;  // empty: no capture file
    std::string cookie_name = kDefaultCookieName;
    std::function<void(const CapturedSession&)> on_session;  // may be empty
  };

  explicit ProxyTap(Options options);
  ~ProxyTap();

  /// Binds the listen port and starts accepting. Throws BindFailureError.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  std::uint64_t connections_handled() const { return connections_.load(); }

 private:
  Options options_;
  std::uint16_t port_ = 0;
  std::optional<net::Listener> listener_;
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> connections_{0};

  std::mutex sink_mutex_;
  std::unique_ptr<capture::CaptureWriter> writer_;

  void pump(net::Socket client);
  void record(capture::Direction dir, std::string_view bytes);
};

}  // namespace stackprobe::sidejack

#endif  // STACKPROBE_SIDEJACK_HPP
