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

#include "stackprobe/http.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "stackprobe/errors.hpp"

namespace stackprobe::http {

namespace {

constexpr std::size_t kMaxScanBuffer = 4 * 1024 * 1024;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits head into lines (tolerating bare LF) and parses header lines
// after the first into out. Returns the first line.
std::string_view split_head(std::string_view head,
                            std::vector<Header>& out) {
  std::size_t pos = head.find('\n');
  std::string_view first =
      trim(pos == std::string_view::npos ? head : head.substr(0, pos));
  while (pos != std::string_view::npos && pos + 1 < head.size()) {
    std::size_t next = head.find('\n', pos + 1);
    std::string_view line = head.substr(
        pos + 1, next == std::string_view::npos ? std::string_view::npos
                                                : next - pos - 1);
    line = trim(line);
    if (!line.empty()) {
      std::size_t colon = line.find(':');
      if (colon != std::string_view::npos) {
        out.push_back(Header{std::string(trim(line.substr(0, colon))),
                             std::string(trim(line.substr(colon + 1)))});
      }
    }
    pos = next;
  }
  return first;
}

const std::string* find_header(const std::vector<Header>& headers,
                               std::string_view name) {
  for (const auto& h : headers) {
    if (iequals(h.name, name)) return &h.value;
  }
  return nullptr;
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

const std::string* Request::header(std::string_view name) const {
  return find_header(headers, name);
}

const std::string* Response::header(std::string_view name) const {
  return find_header(headers, name);
}

std::string reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 201: return "Created";
    case 204: return "No Content";
    case 302: return "Found";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 409: return "Conflict";
    case 413: return "Payload Too Large";
    case 414: return "Request-URI Too Long";
    case 500: return "Internal Server Error";
    case 501: return "Not Implemented";
    case 503: return "Service Unavailable";
    default:  return "Status";
  }
}

std::string url_encode(std::string_view raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

std::string url_decode(std::string_view encoded) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    char c = encoded[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%' && i + 2 < encoded.size() &&
               nibble(encoded[i + 1]) >= 0 && nibble(encoded[i + 2]) >= 0) {
      out += static_cast<char>(nibble(encoded[i + 1]) * 16 +
                               nibble(encoded[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::string form_encode(
    const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string out;
  for (const auto& [k, v] : fields) {
    if (!out.empty()) out += '&';
    out += url_encode(k);
    out += '=';
    out += url_encode(v);
  }
  return out;
}

std::map<std::string, std::string> form_decode(std::string_view body) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t amp = body.find('&', pos);
    std::string_view pair = body.substr(
        pos, amp == std::string_view::npos ? std::string_view::npos
                                           : amp - pos);
    if (!pair.empty()) {
      std::size_t eq = pair.find('=');
      if (eq == std::string_view::npos) {
        out[url_decode(pair)] = "";
      } else {
        out[url_decode(pair.substr(0, eq))] = url_decode(pair.substr(eq + 1));
      }
    }
    if (amp == std::string_view::npos) break;
    pos = amp + 1;
  }
  return out;
}

std::optional<std::size_t> find_head_end(std::string_view buf) {
  std::size_t crlf = buf.find("\r\n\r\n");
  std::size_t lf = buf.find("\n\n");
  if (crlf == std::string_view::npos && lf == std::string_view::npos) {
    return std::nullopt;
  }
  if (crlf == std::string_view::npos) return lf + 2;
  if (lf == std::string_view::npos) return crlf + 4;
  return crlf < lf ? crlf + 4 : lf + 2;
}

bool parse_request_head(std::string_view head, Request& out) {
  out = Request{};
  std::string_view first = split_head(head, out.headers);
  std::istringstream line{std::string(first)};
  std::string method, target, version;
  line >> method >> target >> version;
  if (method.empty() || target.empty()) return false;
  out.method = method;
  out.target = target;
  out.version = version;
  return true;
}

bool parse_response_head(std::string_view head, Response& out) {
  out = Response{};
  std::string_view first = split_head(head, out.headers);
  if (first.substr(0, 5) != "HTTP/") return false;
  std::size_t sp = first.find(' ');
  if (sp == std::string_view::npos) return false;
  std::string_view rest = trim(first.substr(sp + 1));
  int status = 0;
  std::size_t i = 0;
  while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) {
    status = status * 10 + (rest[i] - '0');
    ++i;
  }
  if (i == 0 || status < 100 || status > 599) return false;
  out.status = status;
  out.reason = std::string(trim(rest.substr(i)));
  return true;
}

std::size_t content_length(const std::vector<Header>& headers) {
  const std::string* v = find_header(headers, "Content-Length");
  if (!v) return 0;
  try {
    return static_cast<std::size_t>(std::stoull(*v));
  } catch (const std::exception&) {
    return 0;
  }
}

std::string serialize_request(const Request& r) {
  std::string out = r.method + " " + r.target + " " +
                    (r.version.empty() ? "HTTP/1.1" : r.version) + "\r\n";
  for (const auto& h : r.headers) {
    out += h.name + ": " + h.value + "\r\n";
  }
  out += "\r\n";
  out += r.body;
  return out;
}

std::string serialize_response(const Response& r) {
  std::string out = "HTTP/1.1 " + std::to_string(r.status) + " " +
                    (r.reason.empty() ? reason_phrase(r.status) : r.reason) +
                    "\r\n";
  for (const auto& h : r.headers) {
    out += h.name + ": " + h.value + "\r\n";
  }
  out += "\r\n";
  out += r.body;
  return out;
}

Response simple_request(const std::string& host, std::uint16_t port,
                        const Request& request, net::Millis timeout) {
  net::Socket sock = net::connect_to(host, port, timeout);
  Request req = request;
  if (!req.header("Host")) {
    req.headers.insert(req.headers.begin(),
                       Header{"Host", host + ":" + std::to_string(port)});
  }
  if (!req.header("Connection")) {
    req.headers.push_back(Header{"Connection", "close"});
  }
  if (!req.body.empty() && !req.header("Content-Length")) {
    req.headers.push_back(
        Header{"Content-Length", std::to_string(req.body.size())});
  }
  if (!sock.send_all(serialize_request(req))) {
    throw TargetUnreachableError("request write to " + host + " failed");
  }
  sock.shutdown_send();
  std::string data;
  while (true) {
    auto status = sock.recv_some(data);
    if (status != net::Socket::RecvStatus::data) break;
    if (data.size() > kMaxScanBuffer) break;
  }
  Response resp;
  auto head_end = find_head_end(data);
  if (!head_end || !parse_response_head(data.substr(0, *head_end), resp)) {
    throw Error("unparseable response from " + host);
  }
  resp.body = data.substr(*head_end);
  return resp;
}

void MessageScanner::drop(std::size_t n) {
  buf_.erase(0, n);
  base_offset_ += n;
}

std::optional<MessageScanner::Message> MessageScanner::next() {
  while (!buf_.empty()) {
    auto head_end = find_head_end(buf_);
    if (!head_end) {
      if (finished_ || buf_.size() > kMaxScanBuffer) {
        drop(buf_.size());  // trailing bytes that never became a message
      }
      return std::nullopt;
    }
    std::string_view head = std::string_view(buf_).substr(0, *head_end);
    Message msg;
    msg.offset = base_offset_;
    bool parsed = false;
    if (head.substr(0, 5) == "HTTP/") {
      parsed = parse_response_head(head, msg.response);
      msg.is_request = false;
    } else {
      parsed = parse_request_head(head, msg.request);
      msg.is_request = true;
    }
    if (!parsed) {
      drop(*head_end);  // skip non-HTTP block
      continue;
    }
    const auto& headers =
        msg.is_request ? msg.request.headers : msg.response.headers;
    std::size_t body_len = content_length(headers);
    bool close_delimited = !msg.is_request && !find_header(headers, "Content-Length");
    if (close_delimited && finished_) {
      body_len = buf_.size() - *head_end;
    } else if (close_delimited) {
      return std::nullopt;  // need finish() to bound the body
    }
    if (buf_.size() < *head_end + body_len) {
      if (!finished_) return std::nullopt;
      body_len = buf_.size() - *head_end;  // truncated capture
    }
    std::string body = buf_.substr(*head_end, body_len);
    if (msg.is_request) {
      msg.request.body = std::move(body);
    } else {
      msg.response.body = std::move(body);
    }
    drop(*head_end + body_len);
    return msg;
  }
  return std::nullopt;
}

}  // namespace stackprobe::http
