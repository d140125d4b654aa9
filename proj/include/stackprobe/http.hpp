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

// Minimal HTTP/1.1 framing shared by the victim service, the protocol
// fuzzer, the sidejacking tap and the capture scanners.  The fuzzer must be
// able to emit arbitrarily malformed requests and the victim must be able to
// accept them, so parsing here is deliberately lenient: a request line is
// any first line, and only the pieces a caller asks about are validated.

#ifndef STACKPROBE_HTTP_HPP
#define STACKPROBE_HTTP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stackprobe/net.hpp"

namespace stackprobe::http {

struct Header {
  std::string name;
  std::string value;
};

struct Request {
  std::string method;
  std::string target;
  std::string version;
  std::vector<Header> headers;
  std::string body;

  /// First header with the given name, case-insensitive.
  const std::string* header(std::string_view name) const;
};

struct Response {
  int status = 0;
  std::string reason;
  std::vector<Header> headers;
  std::string body;

  const std::string* header(std::string_view name) const;
};

/// Case-insensitive ASCII comparison.
bool iequals(std::string_view a, std::string_view b);

/// Reason phrase for the handful of statuses the toolkit emits or tallies.
std::string reason_phrase(int status);

std::string url_encode(std::string_view raw);
std::string url_decode(std::string_view encoded);

/// application/x-www-form-urlencoded helpers.
std::string form_encode(
    const std::vector<std::pair<std::string, std::string>>& fields);
std::map<std::string, std::string> form_decode(std::string_view body);

/// Offset just past the header terminator (CRLFCRLF, or LFLF), if present.
std::optional<std::size_t> find_head_end(std::string_view buf);

/// Parses "<method> <target> [version]" plus header lines. Returns false
/// when there are fewer than two tokens on the first line.
bool parse_request_head(std::string_view head, Request& out);

/// Parses "HTTP/x.y <status> [reason]" plus header lines.
bool parse_response_head(std::string_view head, Response& out);

/// Content-Length value, or 0 when absent/unparseable.
std::size_t content_length(const std::vector<Header>& headers);

std::string serialize_request(const Request& r);
std::string serialize_response(const Response& r);

/// Sends one well-formed request over a fresh connection and reads the
/// response until EOF. Throws TargetUnreachableError if the connect fails.
Response simple_request(const std::string& host, std::uint16_t port,
                        const Request& request,
                        net::Millis timeout = net::Millis(5000));

/// Incrementally extracts HTTP messages from one direction of a captured
/// byte stream. Bytes that do not look like an HTTP head are skipped.
/// Bodies are delimited by Content-Length; a trailing response without one
/// consumes the remainder of the stream once finish() was called.
class MessageScanner {
 public:
  struct Message {
    bool is_request = false;
    Request request;
    Response response;
    std::size_t offset = 0;  // byte offset of the head in the stream
  };

  void feed(std::string_view bytes) { buf_ += bytes; }
  void finish() { finished_ = true; }

  /// Next complete message, or nullopt when more bytes are needed.
  std::optional<Message> next();

 private:
  std::string buf_;
  std::size_t base_offset_ = 0;
  bool finished_ = false;

  void drop(std::size_t n);
};

}  // namespace stackprobe::http

#endif  // STACKPROBE_HTTP_HPP
