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

// Mock cloud-management target. Everything about it is deliberate: traffic
// is cleartext HTTP/1.1, session cookies travel unencrypted, a volume-type
// whose name is exactly 255 characters long survives its own successful
// delete, and a seedable token generator keeps runs reproducible.
//
// Endpoints:
//   POST   /login              form fields username/password; success sets
//                              'Set-Cookie: <cookie>=<32 hex chars>'
//   POST   /logout             invalidates the caller's session
//   GET    /restricted/<page>  valid session required; body carries the
//                              page's marker string
//   POST   /types              create volume type, form field 'name'
//   DELETE /types/<name>       name percent-encoded in the path
//   GET    /types              JSON array of names, sorted

#ifndef STACKPROBE_VICTIM_HPP
#define STACKPROBE_VICTIM_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "stackprobe/http.hpp"
#include "stackprobe/net.hpp"

namespace stackprobe::victim {

/// Returns a configured status when the fuzzed element exceeds a length
/// threshold. `element` names either a header (value length checked) or a
/// request method (request-target length checked).
struct FaultRule {
  std::string element;
  std::size_t threshold = 0;
  int status = 500;
};

/// FaultRule from "element:threshold:status".
FaultRule parse_fault_rule(const std::string& text);

struct UserEntry {
  std::string username;
  std::string password;
  /// Restricted page name -> marker string served in the page body.
  std::map<std::string, std::string> page_markers;
};

struct VictimConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  std::string session_cookie_name = "sessionid";
  bool rotate_on_logout = true;   // false emulates the unpatched service
  bool always_200 = false;        // reply 200 to everything except faults
  bool type_delete_bug = true;    // the 255-character delete failure
  std::size_t uri_length_limit = 8192;
  std::vector<FaultRule> fault_rules;
  std::vector<UserEntry> users;   // empty -> default_users()
  std::uint64_t seed = 1;

  static std::vector<UserEntry> default_users();
};

/// Marker text a user's restricted page carries by default.
std::string default_page_marker(const std::string& page,
                                const std::string& username);

/// Human page title, mirroring a dashboard's section names.
std::string page_title(const std::string& page);

class VictimServer {
 public:
  explicit VictimServer(VictimConfig config);
  ~VictimServer();

  VictimServer(const VictimServer&) = delete;
  VictimServer& operator=(const VictimServer&) = delete;

  /// Binds and starts serving on a background thread.
  /// Throws BindFailureError.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  const VictimConfig& config() const { return config_; }

  /// Volume-type names currently present, sorted.
  std::vector<std::string> type_names() const;

  /// True while the token maps to a logged-in session.
  bool session_valid(const std::string& token) const;

  /// Routing logic, exposed so tests can drive it without sockets.
  http::Response handle(const http::Request& request, bool malformed);

 private:
  struct SessionInfo {
    std::string username;
    std::uint64_t issued_seq = 0;
    bool valid = false;
  };

  VictimConfig config_;
  std::uint16_t port_ = 0;
  std::optional<net::Listener> listener_;
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::atomic<bool> stopping_{false};

  mutable std::mutex mutex_;
  std::map<std::string, SessionInfo> sessions_;
  std::map<std::string, std::uint64_t> volume_types_;  // name -> creation seq
  std::uint64_t rng_state_ = 0;
  std::uint64_t seq_ = 0;

  std::string next_token();
  const UserEntry* find_user(const std::string& username) const;
  http::Response route(const http::Request& request);
  void serve_loop();
  void handle_connection(net::Socket sock);
};

/// Writes the credential-bearing filesystem fixture under root: the
/// deployment rc file, two paste-config files and four PEM files. Returns
/// the relative paths written, in a fixed order.
std::vector<std::string> seed_credential_fixture(const std::string& root);

}  // namespace stackprobe::victim

#endif  // STACKPROBE_VICTIM_HPP
