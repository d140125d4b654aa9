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

#include "stackprobe/http_fuzzer.hpp"

#include <algorithm>
#include <thread>

#include "stackprobe/errors.hpp"
#include "stackprobe/http.hpp"

namespace stackprobe::httpfuzz {

namespace {

constexpr std::size_t kMaxResponseBytes = 1024 * 1024;

const std::vector<int> kBedLengths = {16, 64, 256, 1024, 4096, 10024};
const std::vector<std::string> kFormatProbes = {"%s%s%s%s", "%n%n%n%n"};

bool is_method_element(const std::string& element) {
  return element == "HEAD" || element == "GET" || element == "POST";
}

// Raw request bytes for one fuzz case. Method elements take the payload in
// the request target; header elements ride on a plain GET.
std::string build_request(const HttpFuzzCampaign& campaign,
                          const std::string& element,
                          const std::string& payload, std::string& method_out) {
  const std::string host_value =
      campaign.target_host + ":" + std::to_string(campaign.target_port);
  std::string req;
  if (is_method_element(element)) {
    method_out = element;
    req = element + " /" + payload + " HTTP/1.1\r\n";
    req += "Host: " + host_value + "\r\n";
    if (element == "POST") req += "Content-Length: 0\r\n";
  } else {
    method_out = "GET";
    req = "GET / HTTP/1.1\r\n";
    if (http::iequals(element, "Host")) {
      req += "Host: " + payload + "\r\n";
    } else {
      req += "Host: " + host_value + "\r\n";
      req += element + ": " + payload + "\r\n";
    }
  }
  req += "Connection: close\r\n\r\n";
  return req;
}

// Sends raw bytes and reads until EOF/timeout, then classifies the result.
HttpExchange send_one(const HttpFuzzCampaign& campaign,
                      const std::string& element, const std::string& payload) {
  HttpExchange ex;
  ex.element = element;
  ex.payload_len = payload.size();
  ex.started_at = std::chrono::steady_clock::now();

  std::string request = build_request(campaign, element, payload, ex.method);

  auto finish = [&ex](HttpExchange::Outcome outcome, int status = 0) {
    ex.outcome = outcome;
    ex.status = status;
    ex.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - ex.started_at);
    return ex;
  };

  net::Socket sock;
  try {
    sock = net::connect_to(campaign.target_host, campaign.target_port,
                           campaign.timeout);
  } catch (const TargetUnreachableError&) {
    return finish(HttpExchange::Outcome::connection_reset);
  }
  sock.set_recv_timeout(campaign.timeout);
  if (!sock.send_all(request)) {
    return finish(HttpExchange::Outcome::connection_reset);
  }
  sock.shutdown_send();

  std::string data;
  bool timed_out = false;
  while (data.size() < kMaxResponseBytes) {
    auto status = sock.recv_some(data);
    if (status == net::Socket::RecvStatus::data) continue;
    if (status == net::Socket::RecvStatus::timeout) timed_out = true;
    break;
  }
  if (data.empty()) {
    return finish(timed_out ? HttpExchange::Outcome::timeout
                            : HttpExchange::Outcome::connection_reset);
  }
  http::Response resp;
  auto head_end = http::find_head_end(data);
  std::string_view head =
      head_end ? std::string_view(data).substr(0, *head_end)
               : std::string_view(data);
  if (!http::parse_response_head(head, resp)) {
    return finish(HttpExchange::Outcome::malformed_response);
  }
  return finish(HttpExchange::Outcome::status, resp.status);
}

// Shared campaign loop: probes the target once, then paces the payload
// schedule with the configured inter-request delay.
CampaignResult run_schedule(
    const HttpFuzzCampaign& campaign,
    const std::vector<std::pair<std::string, std::string>>& schedule) {
  CampaignResult result;
  if (schedule.empty()) return result;

  // The initial probe is the only failure that aborts a campaign.
  net::connect_to(campaign.target_host, campaign.target_port,
                  campaign.timeout);

  result.exchanges.reserve(schedule.size());
  auto next_start = std::chrono::steady_clock::now();
  for (const auto& [element, payload] : schedule) {
    std::this_thread::sleep_until(next_start);
    next_start = std::chrono::steady_clock::now() + campaign.delay;
    result.exchanges.push_back(send_one(campaign, element, payload));
  }
  result.counter = tally(result.exchanges);
  return result;
}

}  // namespace

const std::vector<std::string>& bed_default_functions() {
  static const std::vector<std::string> functions = {
      "HEAD",          "GET",  "POST",      "User-Agent",
      "Host",          "Accept", "Connection", "Referer",
      "Authorization", "From", "Charge-to", "If-Modified-Since",
      "Pragma"};
  return functions;
}

std::vector<std::string> bed_payloads(const std::string& charset) {
  std::vector<std::string> payloads;
  for (char c : charset) {
    for (int len : kBedLengths) {
      payloads.emplace_back(static_cast<std::size_t>(len), c);
    }
  }
  payloads.insert(payloads.end(), kFormatProbes.begin(), kFormatProbes.end());
  return payloads;
}

std::vector<int> sfuzz_basic_lengths(int max_payload_len) {
  std::vector<int> lengths;
  for (long long len = 1; len <= max_payload_len; len *= 2) {
    lengths.push_back(static_cast<int>(len));
  }
  if (lengths.empty() || lengths.back() != max_payload_len) {
    lengths.push_back(max_payload_len);
  }
  return lengths;
}

const char* outcome_name(HttpExchange::Outcome outcome) {
  switch (outcome) {
    case HttpExchange::Outcome::status: return "status";
    case HttpExchange::Outcome::timeout: return "timeout";
    case HttpExchange::Outcome::connection_reset: return "connection_reset";
    case HttpExchange::Outcome::malformed_response:
      return "malformed_response";
  }
  return "unknown";
}

std::uint64_t PacketCounter::class_count(int klass) const {
  std::uint64_t count = 0;
  for (const auto& [status, n] : responses_by_status) {
    if (status / 100 == klass) count += n;
  }
  return count;
}

void PacketCounter::add(const HttpExchange& exchange) {
  ++request_total;
  ++requests_by_method[exchange.method];
  if (exchange.has_status()) {
    ++response_total;
    ++responses_by_status[exchange.status];
  } else {
    ++outcomes[outcome_name(exchange.outcome)];
  }
  if (is_anomaly(exchange)) ++anomaly_count;
}

PacketCounter tally(const std::vector<HttpExchange>& exchanges) {
  PacketCounter counter;
  for (const auto& ex : exchanges) counter.add(ex);
  return counter;
}

std::string counter_to_text(const PacketCounter& counter) {
  static const char* kClassNames[] = {
      "1xx: Informational", "2xx: Success", "3xx: Redirection",
      "4xx: Client Error", "5xx: Server Error"};
  auto line = [](int indent, const std::string& topic, std::uint64_t count) {
    std::string out(static_cast<std::size_t>(indent) * 2, ' ');
    out += topic;
    if (out.size() < 44) out.resize(44, ' ');
    out += std::to_string(count);
    out += '\n';
    return out;
  };

  std::uint64_t total = counter.request_total + counter.response_total;
  std::string out;
  out += line(0, "Total HTTP Packets", total);
  out += line(1, "HTTP Request Packets", counter.request_total);
  for (const auto& [method, n] : counter.requests_by_method) {
    out += line(2, method, n);
  }
  out += line(1, "HTTP Response Packets", counter.response_total);
  std::uint64_t broken = 0;
  if (auto it = counter.outcomes.find("malformed_response");
      it != counter.outcomes.end()) {
    broken = it->second;
  }
  out += line(2, "???: broken", broken);
  for (int klass = 1; klass <= 5; ++klass) {
    out += line(2, kClassNames[klass - 1], counter.class_count(klass));
    for (const auto& [status, n] : counter.responses_by_status) {
      if (status / 100 == klass) {
        out += line(3, std::to_string(status) + " " +
                           http::reason_phrase(status),
                    n);
      }
    }
  }
  std::uint64_t other = 0;
  for (const auto& [name, n] : counter.outcomes) {
    if (name != "malformed_response") other += n;
  }
  out += line(1, "Other Outcomes (timeout/reset)", other);
  out += line(1, "Anomalies", counter.anomaly_count);
  return out;
}

std::vector<Label> classify(const HttpExchange& exchange) {
  if (!exchange.has_status()) return {Label::anomaly};
  int klass = exchange.status / 100;
  if (klass >= 1 && klass <= 3) return {Label::normal};
  if (klass == 4) return {Label::client_error};
  return {Label::server_error, Label::anomaly};
}

bool is_anomaly(const HttpExchange& exchange) {
  auto labels = classify(exchange);
  return std::find(labels.begin(), labels.end(), Label::anomaly) !=
         labels.end();
}

const char* label_name(Label label) {
  switch (label) {
    case Label::normal: return "normal";
    case Label::client_error: return "client_error";
    case Label::server_error: return "server_error";
    case Label::anomaly: return "anomaly";
  }
  return "unknown";
}

CampaignResult run_bed(const HttpFuzzCampaign& campaign) {
  std::vector<std::pair<std::string, std::string>> schedule;
  auto payloads = bed_payloads(campaign.payload_charset);
  for (const auto& fn : campaign.functions) {
    for (const auto& payload : payloads) {
      schedule.emplace_back(fn, payload);
    }
  }
  return run_schedule(campaign, schedule);
}

CampaignResult run_sfuzz_basic(const HttpFuzzCampaign& campaign) {
  static const std::vector<std::string> kMethods = {"GET", "HEAD", "POST"};
  char fill = campaign.payload_charset.empty() ? 'A'
                                               : campaign.payload_charset[0];
  std::vector<std::pair<std::string, std::string>> schedule;
  for (const auto& method : kMethods) {
    for (int len : sfuzz_basic_lengths(campaign.max_payload_len)) {
      schedule.emplace_back(method,
                            std::string(static_cast<std::size_t>(len), fill));
    }
  }
  return run_schedule(campaign, schedule);
}

}  // namespace stackprobe::httpfuzz
