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

#include "stackprobe/report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "stackprobe/errors.hpp"
#include "stackprobe/records.hpp"

namespace stackprobe::report {

namespace {

using Json = nlohmann::ordered_json;

bool contains_admin(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) {
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return lower.find("admin") != std::string::npos;
}

// Deterministic merge order: pipeline, then severity (high first), then
// evidence locator.
bool finding_less(const Finding& a, const Finding& b) {
  if (a.pipeline != b.pipeline) {
    return static_cast<int>(a.pipeline) < static_cast<int>(b.pipeline);
  }
  if (a.severity != b.severity) {
    return static_cast<int>(a.severity) > static_cast<int>(b.severity);
  }
  if (a.evidence != b.evidence) return a.evidence < b.evidence;
  return a.title < b.title;
}

std::optional<Finding> finding_from_record(const Json& rec) {
  const std::string type = rec.value("record", "");
  Finding f;
  if (type == "http_exchange") {
    if (!rec.value("anomaly", false)) return std::nullopt;
    f.pipeline = Pipeline::http_fuzz;
    f.severity = Severity::medium;
    const std::string outcome = rec.value("outcome", "");
    if (outcome == "status") {
      f.title = "server error " + std::to_string(rec.value("status", 0)) +
                " under fuzzing";
    } else {
      f.title = "target " + outcome + " under fuzzing";
    }
    f.evidence = rec.value("element", "") + " payload_len=" +
                 std::to_string(rec.value("payload_len", 0));
    f.details = "fuzzed element responded abnormally";
    return f;
  }
  if (type == "execution") {
    const std::string outcome = rec.value("outcome", "");
    if (outcome != "error" && outcome != "timeout") return std::nullopt;
    f.pipeline = Pipeline::cmd_fuzz;
    f.severity = Severity::medium;
    f.title = "command " + outcome + " during sweep";
    f.evidence = "index " + std::to_string(rec.value("index", 0)) +
                 " case " + std::to_string(rec.value("case_index", 0)) +
                 " len " + std::to_string(rec.value("length", 0));
    f.details = rec.value("detail", "");
    return f;
  }
  if (type == "residue") {
    f.pipeline = Pipeline::cmd_fuzz;
    f.severity = Severity::medium;
    f.title = "resource survived a successful delete";
    f.evidence = "name length " + std::to_string(rec.value("length", 0));
    f.details = "delete reported success but the entry is still listed; "
                "tracked upstream at high priority";
    return f;
  }
  if (type == "hijack_attempt") {
    if (!rec.value("success", false)) return std::nullopt;
    f.pipeline = Pipeline::sidejack;
    f.severity = Severity::high;
    f.title = "session replay granted restricted access";
    f.evidence = rec.value("url", "");
    f.details = "captured " + rec.value("cookie_name", std::string("cookie")) +
                " replayed without credentials";
    return f;
  }
  if (type == "credential_finding") {
    f.pipeline = Pipeline::credscan;
    const std::string key = rec.value("key", "");
    const std::string value = rec.value("value", "");
    bool admin = rec.value("admin", false) || contains_admin(key) ||
                 contains_admin(value);
    f.severity = admin ? Severity::high : Severity::medium;
    f.title = std::string("cleartext ") + rec.value("kind", "credential") +
              " (" + key + ")";
    f.evidence = rec.value("origin", "") + ":" + rec.value("locator", "");
    f.details = "value " + value;
    return f;
  }
  if (type == "port") {
    if (rec.value("state", "") != "open") return std::nullopt;
    f.pipeline = Pipeline::recon;
    f.severity = Severity::info;
    f.title = "open port " + std::to_string(rec.value("port", 0)) + " (" +
              rec.value("service", "") + ")";
    f.evidence = "port " + std::to_string(rec.value("port", 0));
    f.details = "reachable service, candidate attack surface";
    return f;
  }
  // Unknown or summary records (packet_counter, finding) carry no new
  // evidence; skip them.
  return std::nullopt;
}

}  // namespace

const char* pipeline_name(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::http_fuzz: return "http_fuzz";
    case Pipeline::cmd_fuzz: return "cmd_fuzz";
    case Pipeline::sidejack: return "sidejack";
    case Pipeline::credscan: return "credscan";
    case Pipeline::recon: return "recon";
  }
  return "unknown";
}

const char* severity_name(Severity severity) {
  switch (severity) {
    case Severity::info: return "info";
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
  }
  return "unknown";
}

const char* port_state_name(PortState state) {
  switch (state) {
    case PortState::open: return "open";
    case PortState::closed: return "closed";
    case PortState::filtered: return "filtered";
  }
  return "unknown";
}

const std::vector<PortScanEntry>& default_port_table() {
  static const std::vector<PortScanEntry> table = {
      {22, PortState::filtered, "SSH"},
      {80, PortState::filtered, "HTTP"},
      {3260, PortState::filtered, "Glance API"},
      {3306, PortState::filtered, "MySQL"},
      {3333, PortState::filtered, "Nova API"},
      {4369, PortState::filtered, "EPMD"},
      {5000, PortState::filtered, "Keystone API"},
      {5672, PortState::filtered, "AMQP"},
      {5800, PortState::filtered, "X11VNC"},
      {5900, PortState::filtered, "VNC"},
      {6080, PortState::filtered, "noVNC"},
      {8080, PortState::filtered, "Swift Proxy"},
      {8773, PortState::filtered, "EC2 API"},
      {8774, PortState::filtered, "EC2 API"},
      {8775, PortState::filtered, "Nova API"},
      {8776, PortState::filtered, "Nova API"},
      {9191, PortState::filtered, "Glance API"},
      {9292, PortState::filtered, "Glance API"},
      {35357, PortState::filtered, "Keystone API"},
  };
  return table;
}

std::string port_label(std::uint16_t port) {
  for (const auto& entry : default_port_table()) {
    if (entry.port == port) return entry.service;
  }
  return "unknown";
}

std::vector<PortScanEntry> recon(const std::string& host,
                                 const std::vector<std::uint16_t>& ports,
                                 net::Millis timeout, int width) {
  if (ports.empty()) return {};
  // Resolve once up front so a bad host fails loudly instead of producing
  // nineteen 'filtered' rows.
  net::probe_connect(host, ports.front(), net::Millis(1));

  std::vector<PortScanEntry> results(ports.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= ports.size()) return;
      PortScanEntry entry;
      entry.port = ports[i];
      entry.service = port_label(ports[i]);
      switch (net::probe_connect(host, ports[i], timeout)) {
        case net::ProbeResult::open: entry.state = PortState::open; break;
        case net::ProbeResult::closed: entry.state = PortState::closed; break;
        case net::ProbeResult::filtered:
          entry.state = PortState::filtered;
          break;
      }
      results[i] = entry;
    }
  };
  int pool_size = std::max(1, std::min<int>(width, static_cast<int>(ports.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

std::vector<Finding> aggregate(const std::vector<std::string>& input_files) {
  std::vector<Finding> findings;
  for (const auto& file : input_files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw MalformedInputError(file, "cannot open");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      Json rec = Json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object() || !rec.contains("record")) {
        throw MalformedInputError(
            file, "line " + std::to_string(line_no) + " is not a record");
      }
      if (auto finding = finding_from_record(rec)) {
        findings.push_back(std::move(*finding));
      }
    }
  }
  std::sort(findings.begin(), findings.end(), finding_less);
  findings.erase(std::unique(findings.begin(), findings.end(),
                             [](const Finding& a, const Finding& b) {
                               return a.pipeline == b.pipeline &&
                                      a.severity == b.severity &&
                                      a.title == b.title &&
                                      a.evidence == b.evidence &&
                                      a.details == b.details;
                             }),
                 findings.end());
  for (std::size_t i = 0; i < findings.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "F%03zu", i + 1);
    findings[i].id = buf;
  }
  return findings;
}

std::string render_text(const std::vector<Finding>& findings) {
  std::string out;
  out += "stackprobe findings report\n";
  out += "severity mapping: high = session hijack success, cleartext admin "
         "credentials; medium = fuzzing anomalies, undeletable residue, "
         "non-admin credential leaks; info = open ports\n";
  out += "\n";
  if (findings.empty()) {
    out += "no findings\n";
    return out;
  }
  Pipeline current{};
  bool first = true;
  for (const auto& f : findings) {
    if (first || f.pipeline != current) {
      if (!first) out += "\n";
      out += std::string("[") + pipeline_name(f.pipeline) + "]\n";
      current = f.pipeline;
      first = false;
    }
    out += "  " + f.id + " [" + severity_name(f.severity) + "] " + f.title;
    out += " -- " + f.evidence;
    if (!f.details.empty()) {
      out += "\n       " + f.details;
    }
    out += "\n";
  }
  std::size_t above_info = 0;
  for (const auto& f : findings) {
    if (f.severity != Severity::info) ++above_info;
  }
  out += "\n" + std::to_string(findings.size()) + " finding(s), " +
         std::to_string(above_info) + " above info\n";
  return out;
}

std::string render_jsonl(const std::vector<Finding>& findings) {
  std::string out;
  for (const auto& f : findings) {
    out += records::finding_record(f).dump();
    out += '\n';
  }
  return out;
}

int report_exit_code(const std::vector<Finding>& findings) {
  for (const auto& f : findings) {
    if (f.severity != Severity::info) return 1;
  }
  return 0;
}

}  // namespace stackprobe::report
