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

// HTTP protocol fuzzing campaigns.
//
// Two modes:
//   bed         per-element payload sweeps over the thirteen fuzzable HTTP
//               elements (three methods, ten headers);
//   sfuzz-basic GET/HEAD/POST request-target sweeps with geometrically
//               stepped payload lengths.
//
// Requests are written to the wire as raw bytes: campaigns must be able to
// send things no well-formed client library would.  Every exchange is
// recorded; responses are tallied into a protocol-analyzer style counter.

#ifndef STACKPROBE_HTTP_FUZZER_HPP
#define STACKPROBE_HTTP_FUZZER_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stackprobe/net.hpp"

namespace stackprobe::httpfuzz {

enum class FuzzMode { bed, sfuzz_basic };

/// The thirteen HTTP elements the bed mode fuzzes by default.
const std::vector<std::string>& bed_default_functions();

/// Deterministic payload ladder for one element: one string per
/// (charset character, length) pair plus the two format-string probes.
std::vector<std::string> bed_payloads(const std::string& charset = "A");

/// Payload lengths for sfuzz-basic mode: powers of two up to max, plus
/// exactly max when it is not itself a power of two.
std::vector<int> sfuzz_basic_lengths(int max_payload_len);

struct HttpFuzzCampaign {
  FuzzMode mode = FuzzMode::bed;
  std::string target_host = "127.0.0.1";
  std::uint16_t target_port = 80;
  std::chrono::milliseconds delay{0};
  int max_payload_len = 10024;                      // sfuzz-basic mode
  std::vector<std::string> functions = bed_default_functions();  // bed mode
  std::string payload_charset = "A";
  std::chrono::milliseconds timeout{10000};
};

/// One fuzzed request/response pair.
struct HttpExchange {
  enum class Outcome { status, timeout, connection_reset, malformed_response };

  std::string element;       // which request line element or header was fuzzed
  std::string method;        // method actually sent
  std::size_t payload_len = 0;
  Outcome outcome = Outcome::status;
  int status = 0;            // valid only when outcome == status
  std::chrono::milliseconds elapsed{0};
  std::chrono::steady_clock::time_point started_at{};

  bool has_status() const { return outcome == Outcome::status; }
};

const char* outcome_name(HttpExchange::Outcome outcome);

/// Wireshark-style per-class tally of a campaign.
struct PacketCounter {
  std::uint64_t request_total = 0;
  std::uint64_t response_total = 0;
  std::map<std::string, std::uint64_t> requests_by_method;
  std::map<int, std::uint64_t> responses_by_status;
  std::map<std::string, std::uint64_t> outcomes;  // timeout/reset/broken
  std::uint64_t anomaly_count = 0;

  std::uint64_t class_count(int klass) const;  // klass in 1..5
  void add(const HttpExchange& exchange);
};

/// Builds a counter from an exchange log.
PacketCounter tally(const std::vector<HttpExchange>& exchanges);

/// Text rendering of the counter in the protocol-analyzer summary layout
/// (requests by method, responses by class with per-status breakdown).
std::string counter_to_text(const PacketCounter& counter);

/// Response classification labels. A 5xx response carries both the
/// server_error and anomaly labels; non-status outcomes are anomalies.
enum class Label { normal, client_error, server_error, anomaly };

std::vector<Label> classify(const HttpExchange& exchange);
bool is_anomaly(const HttpExchange& exchange);
const char* label_name(Label label);

struct CampaignResult {
  std::vector<HttpExchange> exchanges;
  PacketCounter counter;
};

/// Runs the per-element payload sweep. Throws TargetUnreachableError when
/// the initial probe fails; after that, per-request failures become
/// exchange outcomes and the sweep always runs to completion.
CampaignResult run_bed(const HttpFuzzCampaign& campaign);

/// Runs the GET/HEAD/POST request-target length sweep. Error behavior as
/// run_bed.
CampaignResult run_sfuzz_basic(const HttpFuzzCampaign& campaign);

}  // namespace stackprobe::httpfuzz

#endif  // STACKPROBE_HTTP_FUZZER_HPP
