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

// Port reconnaissance and the unified findings report.
//
// Severity mapping (artifact-defined, printed in the report header):
//   high    successful session hijack; cleartext admin credentials
//   medium  server errors / timeouts / resets under fuzzing, command sweep
//           anomalies, undeletable residue, non-admin credential leaks
//   info    open ports

#ifndef STACKPROBE_REPORT_HPP
#define STACKPROBE_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stackprobe/net.hpp"

namespace stackprobe::report {

enum class Pipeline { http_fuzz, cmd_fuzz, sidejack, credscan, recon };
enum class Severity { info, low, medium, high };

const char* pipeline_name(Pipeline pipeline);
const char* severity_name(Severity severity);

struct Finding {
  std::string id;  // assigned after the deterministic sort, F001...
  Pipeline pipeline = Pipeline::recon;
  Severity severity = Severity::info;
  std::string title;
  std::string evidence;  // locator into the pipeline output
  std::string details;

  bool operator==(const Finding&) const = default;
};

enum class PortState { open, closed, filtered };

const char* port_state_name(PortState state);

struct PortScanEntry {
  std::uint16_t port = 0;
  PortState state = PortState::filtered;
  std::string service;
};

/// The 19 scan targets with their service labels, ascending by port.
const std::vector<PortScanEntry>& default_port_table();

/// Service label for a port ("unknown" when not in the table).
std::string port_label(std::uint16_t port);

/// TCP connect scan. Ports probed concurrently (bounded width), results in
/// input order. Throws HostUnresolvableError.
std::vector<PortScanEntry> recon(
    const std::string& host, const std::vector<std::uint16_t>& ports,
    net::Millis timeout = net::Millis(1000), int width = 8);

/// Reads pipeline output files (JSON lines) and merges them into findings.
/// Deterministic: idempotent over duplicate records and independent of
/// input file order. Throws MalformedInputError.
std::vector<Finding> aggregate(const std::vector<std::string>& input_files);

std::string render_text(const std::vector<Finding>& findings);
std::string render_jsonl(const std::vector<Finding>& findings);

/// 0 = no findings above info, 1 = findings present.
int report_exit_code(const std::vector<Finding>& findings);

}  // namespace stackprobe::report

#endif  // STACKPROBE_REPORT_HPP
