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

#include "stackprobe/victim.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "stackprobe/errors.hpp"

namespace stackprobe::victim {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBuggedNameLength = 255;
constexpr std::size_t kMaxHeadBytes = 256 * 1024;
constexpr std::size_t kMaxBodyBytes = 1024 * 1024;

http::Response make_response(int status, std::string body,
                             std::vector<http::Header> extra = {}) {
  http::Response resp;
  resp.status = status;
  resp.reason = http::reason_phrase(status);
  resp.headers.push_back({"Content-Type", "text/plain"});
  for (auto& h : extra) resp.headers.push_back(std::move(h));
  resp.headers.push_back({"Content-Length", std::to_string(body.size())});
  resp.headers.push_back({"Connection", "close"});
  resp.body = std::move(body);
  return resp;
}

// splitmix64; good enough for reproducible opaque tokens.
std::uint64_t next_rand(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

// Cookie value for `name` out of a Cookie header like "a=1; name=v".
std::string cookie_value(const http::Request& request,
                         const std::string& name) {
  const std::string* cookie = request.header("Cookie");
  if (!cookie) return {};
  std::size_t pos = 0;
  const std::string& text = *cookie;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    std::string_view item(text.data() + pos,
                          (end == std::string::npos ? text.size() : end) - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    std::size_t eq = item.find('=');
    if (eq != std::string_view::npos &&
        http::iequals(item.substr(0, eq), name)) {
      return std::string(item.substr(eq + 1));
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return {};
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

FaultRule parse_fault_rule(const std::string& text) {
  std::size_t first = text.find(':');
  std::size_t second = first == std::string::npos
                           ? std::string::npos
                           : text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw Error("fault rule must be element:threshold:status, got '" + text +
                "'");
  }
  FaultRule rule;
  rule.element = text.substr(0, first);
  try {
    rule.threshold = std::stoull(text.substr(first + 1, second - first - 1));
    rule.status = std::stoi(text.substr(second + 1));
  } catch (const std::exception&) {
    throw Error("fault rule has non-numeric fields: '" + text + "'");
  }
  if (rule.element.empty() || rule.status < 100 || rule.status > 599) {
    throw Error("fault rule out of range: '" + text + "'");
  }
  return rule;
}

std::vector<UserEntry> VictimConfig::default_users() {
  std::vector<UserEntry> users(2);
  users[0].username = "Test_User_1";
  users[0].password = "password1";
  users[1].username = "admin";
  users[1].password = "adminpassword";
  return users;
}

std::string page_title(const std::string& page) {
  if (page == "images") return "Images & Snapshots";
  if (page == "volumes") return "Volumes & Storage";
  if (page == "instances") return "Instances & Consoles";
  return page;
}

std::string default_page_marker(const std::string& page,
                                const std::string& username) {
  return "restricted " + page + " data for " + username;
}

VictimServer::VictimServer(VictimConfig config) : config_(std::move(config)) {
  if (config_.users.empty()) config_.users = VictimConfig::default_users();
  rng_state_ = config_.seed;
}

VictimServer::~VictimServer() { stop(); }

void VictimServer::start() {
  listener_.emplace(config_.host, config_.port);
  port_ = listener_->port();
  stopping_.store(false);
  accept_thread_ = std::thread([this] { serve_loop(); });
}

void VictimServer::stop() {
  if (!listener_) return;
  stopping_.store(true);
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
  listener_->close();
  listener_.reset();
}

void VictimServer::serve_loop() {
  while (!stopping_.load()) {
    auto sock = listener_->accept(stopping_);
    if (!sock) continue;
    workers_.emplace_back(
        [this](net::Socket s) { handle_connection(std::move(s)); },
        std::move(*sock));
    // Reap finished workers opportunistically to bound the vector.
    if (workers_.size() > 128) {
      for (auto& w : workers_) {
        if (w.joinable()) w.join();
      }
      workers_.clear();
    }
  }
}

void VictimServer::handle_connection(net::Socket sock) {
  sock.set_recv_timeout(net::Millis(5000));
  std::string data;
  std::optional<std::size_t> head_end;
  while (!head_end && data.size() < kMaxHeadBytes) {
    auto status = sock.recv_some(data);
    if (status != net::Socket::RecvStatus::data) break;
    head_end = http::find_head_end(data);
  }
  if (!head_end && data.empty()) return;  // peer connected and went away

  http::Request request;
  bool malformed = true;
  if (head_end) {
    malformed = !http::parse_request_head(data.substr(0, *head_end), request);
    if (!malformed) {
      std::size_t want = http::content_length(request.headers);
      if (want > kMaxBodyBytes) want = kMaxBodyBytes;
      while (data.size() < *head_end + want) {
        auto status = sock.recv_some(data);
        if (status != net::Socket::RecvStatus::data) break;
      }
      request.body = data.substr(
          *head_end, std::min(want, data.size() - *head_end));
    }
  }
  http::Response resp = handle(request, malformed);
  sock.send_all(http::serialize_response(resp));
  sock.close();
}

std::string VictimServer::next_token() {
  return to_hex(next_rand(rng_state_)) + to_hex(next_rand(rng_state_));
}

const UserEntry* VictimServer::find_user(const std::string& username) const {
  for (const auto& u : config_.users) {
    if (u.username == username) return &u;
  }
  return nullptr;
}

http::Response VictimServer::handle(const http::Request& request,
                                    bool malformed) {
  // Fault rules run first so fuzz campaigns can provoke 5xx in any mode.
  if (!malformed) {
    for (const auto& rule : config_.fault_rules) {
      if (rule.element == request.method) {
        if (request.target.size() > rule.threshold) {
          return make_response(rule.status, "fault injected\n");
        }
        continue;
      }
      const std::string* value = request.header(rule.element);
      if (value && value->size() > rule.threshold) {
        return make_response(rule.status, "fault injected\n");
      }
    }
  }
  if (config_.always_200) return make_response(200, "ok\n");
  if (malformed) return make_response(400, "malformed request\n");
  if (request.target.size() > config_.uri_length_limit) {
    return make_response(414, "request target too long\n");
  }
  return route(request);
}

http::Response VictimServer::route(const http::Request& request) {
  const std::string& method = request.method;
  const std::string& target = request.target;
  std::lock_guard<std::mutex> lock(mutex_);

  if (method == "POST" && target == "/login") {
    auto fields = http::form_decode(request.body);
    const UserEntry* user = find_user(fields["username"]);
    if (!user || user->password != fields["password"]) {
      return make_response(401, "login failed\n");
    }
    std::string token = next_token();
    sessions_[token] = SessionInfo{user->username, ++seq_, true};
    return make_response(
        200, "welcome " + user->username + "\n",
        {{"Set-Cookie",
          config_.session_cookie_name + "=" + token + "; Path=/"}});
  }

  if (method == "POST" && target == "/logout") {
    std::string token = cookie_value(request, config_.session_cookie_name);
    auto it = sessions_.find(token);
    if (token.empty() || it == sessions_.end() || !it->second.valid) {
      return make_response(403, "no session\n");
    }
    if (config_.rotate_on_logout) {
      sessions_.erase(it);  // patched behavior: token rotated out of existence
    }
    // Unpatched behavior: the session entry survives logout and keeps
    // working, which is exactly what replay attacks exploit.
    return make_response(200, "bye\n");
  }

  if (method == "GET" && target.rfind("/restricted/", 0) == 0) {
    std::string token = cookie_value(request, config_.session_cookie_name);
    auto it = sessions_.find(token);
    if (token.empty() || it == sessions_.end() || !it->second.valid) {
      return make_response(403, "forbidden\n");
    }
    std::string page = http::url_decode(target.substr(12));
    const UserEntry* user = find_user(it->second.username);
    std::string marker;
    if (user) {
      auto mit = user->page_markers.find(page);
      marker = mit != user->page_markers.end()
                   ? mit->second
                   : default_page_marker(page, it->second.username);
    } else {
      marker = default_page_marker(page, it->second.username);
    }
    return make_response(200, page_title(page) + "\n" + marker + "\n");
  }

  if (method == "POST" && target == "/types") {
    auto fields = http::form_decode(request.body);
    auto it = fields.find("name");
    if (it == fields.end() || it->second.empty()) {
      return make_response(400, "missing name\n");
    }
    if (volume_types_.count(it->second)) {
      return make_response(409, "type exists\n");
    }
    volume_types_[it->second] = ++seq_;
    return make_response(201, "created\n");
  }

  if (method == "DELETE" && target.rfind("/types/", 0) == 0) {
    std::string name = http::url_decode(target.substr(7));
    auto it = volume_types_.find(name);
    if (it == volume_types_.end()) {
      return make_response(404, "no such type\n");
    }
    // Reports success for every existing name, but a 255-character name is
    // silently left in the store when the replicated bug is enabled.
    if (!(config_.type_delete_bug && name.size() == kBuggedNameLength)) {
      volume_types_.erase(it);
    }
    return make_response(200, "deleted\n");
  }

  if (method == "GET" && target == "/types") {
    std::string body = "[";
    bool first = true;
    for (const auto& [name, _] : volume_types_) {
      if (!first) body += ",";
      body += "\"" + json_escape(name) + "\"";
      first = false;
    }
    body += "]";
    http::Response resp = make_response(200, std::move(body));
    resp.headers[0].value = "application/json";
    return resp;
  }

  if (method == "GET" && target == "/") {
    return make_response(200, "cloud management dashboard\n");
  }

  return make_response(404, "not found\n");
}

std::vector<std::string> VictimServer::type_names() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> names;
  names.reserve(volume_types_.size());
  for (const auto& [name, _] : volume_types_) names.push_back(name);
  return names;
}

bool VictimServer::session_valid(const std::string& token) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = sessions_.find(token);
  return it != sessions_.end() && it->second.valid;
}

std::vector<std::string> seed_credential_fixture(const std::string& root) {
  const std::string rc_file =
      "# deployment settings written by the all-in-one install script\n"
      "HOST_IP=192.168.1.10\n"
      "OS_TENANT_ID=84a0eb4cab441ab9325c42f0c6f57a5\n"
      "OS_TENANT_NAME=\"admin\"\n"
      "OS_USERNAME=admin\n"
      "OS_AUTH_URL=http://192.168.1.10:5000/v2.0\n"
      "OS_PASSWORD=adminpassword\n"
      "ADMIN_PASSWORD=adminpassword\n"
      "FLAT_INTERFACE=eth1\n";

  const std::string nova_paste =
      "[DEFAULT]\n"
      "auth_strategy = keystone\n"
      "\n"
      "[filter:authtoken]\n"
      "paste.filter_factory = keystone.middleware.auth_token:filter_factory\n"
      "service_host = 192.168.1.10\n"
      "admin_tenant_name = admin\n"
      "admin_user = admin\n"
      "admin_password = adminpassword\n"
      "\n"
      "[composite:openstack_compute_api_v2]\n"
      "use = call:nova.api.auth:pipeline_factory\n"
      "# ratelimit removed from the pipeline for bulk command campaigns\n"
      "keystone = faultwrap sizelimit authtoken keystonecontext osapi_compute_app_v2\n";

  const std::string cinder_paste =
      "[DEFAULT]\n"
      "auth_strategy = keystone\n"
      "\n"
      "[filter:authtoken]\n"
      "paste.filter_factory = keystone.middleware.auth_token:filter_factory\n"
      "service_host = 192.168.1.10\n"
      "admin_tenant_name = admin\n"
      "admin_user = admin\n"
      "admin_password = adminpassword\n";

  auto pem_blob = [](const std::string& label, char filler) {
    std::string body;
    for (int line = 0; line < 6; ++line) {
      body += std::string(64, filler) + "\n";
    }
    return "-----BEGIN " + label + "-----\n" + body + "-----END " + label +
           "-----\n";
  };

  const std::vector<std::pair<std::string, std::string>> files = {
      {"devstack/localrc", rc_file},
      {"etc/nova/api-paste.ini", nova_paste},
      {"etc/cinder/api-paste.ini", cinder_paste},
      {"var/cache/cinder/cacert.pem", pem_blob("CERTIFICATE", 'M')},
      {"var/cache/cinder/signing_cert.pem", pem_blob("CERTIFICATE", 'S')},
      {"var/cache/glance/registry/cacert.pem", pem_blob("CERTIFICATE", 'G')},
      {"var/cache/glance/registry/signing_cert.pem",
       pem_blob("CERTIFICATE", 'R')},
  };

  std::vector<std::string> written;
  for (const auto& [rel, content] : files) {
    fs::path path = fs::path(root) / rel;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SinkWriteError("cannot write fixture file " + path.string());
    out << content;
    written.push_back(rel);
  }
  return written;
}

}  // namespace stackprobe::victim
