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

#include "stackprobe/records.hpp"

#include <cctype>

namespace stackprobe::records {

Json exchange_record(const httpfuzz::HttpExchange& exchange) {
  Json j;
  j["record"] = "http_exchange";
  j["element"] = exchange.element;
  j["method"] = exchange.method;
  j["payload_len"] = exchange.payload_len;
  j["outcome"] = httpfuzz::outcome_name(exchange.outcome);
  if (exchange.has_status()) {
    j["status"] = exchange.status;
  }
  j["anomaly"] = httpfuzz::is_anomaly(exchange);
  j["elapsed_ms"] = exchange.elapsed.count();
  return j;
}

Json counter_record(const httpfuzz::PacketCounter& counter) {
  Json j;
  j["record"] = "packet_counter";
  j["request_total"] = counter.request_total;
  j["requests_by_method"] = Json::object();
  for (const auto& [method, n] : counter.requests_by_method) {
    j["requests_by_method"][method] = n;
  }
  j["response_total"] = counter.response_total;
  Json by_class = Json::object();
  for (int klass = 1; klass <= 5; ++klass) {
    by_class[std::to_string(klass) + "xx"] = counter.class_count(klass);
  }
  j["responses_by_class"] = by_class;
  j["responses_by_status"] = Json::object();
  for (const auto& [status, n] : counter.responses_by_status) {
    j["responses_by_status"][std::to_string(status)] = n;
  }
  j["outcomes"] = Json::object();
  for (const auto& [name, n] : counter.outcomes) {
    j["outcomes"][name] = n;
  }
  j["anomaly_count"] = counter.anomaly_count;
  return j;
}

Json execution_record(const runner::ExecutionRecord& record) {
  Json j;
  j["record"] = "execution";
  j["index"] = record.index;
  j["case_index"] = record.command.case_index;
  j["char"] = std::string(1, record.command.fill);
  j["length"] = record.command.length;
  j["command"] = record.command.rendered;
  j["outcome"] = runner::outcome_name(record.outcome);
  j["detail"] = record.detail;
  j["elapsed_ms"] = record.elapsed.count();
  return j;
}

Json residue_record(const std::string& name) {
  Json j;
  j["record"] = "residue";
  j["name"] = name;
  j["length"] = name.size();
  return j;
}

Json hijack_record(const sidejack::HijackAttempt& attempt) {
  Json j;
  j["record"] = "hijack_attempt";
  j["url"] = attempt.requested_url;
  j["cookie_name"] = attempt.session.cookie_name;
  j["cookie_value"] = attempt.session.cookie_value;
  j["status"] = attempt.status;
  j["marker_found"] = attempt.body_marker_found;
  j["success"] = attempt.success();
  return j;
}

Json credential_record(const credscan::CredentialFinding& finding,
                       bool redact_value) {
  auto lower = [](std::string s) {
    for (char& c : s) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
  };
  bool admin =
      lower(finding.matched_key).find("admin") != std::string::npos ||
      lower(finding.matched_value).find("admin") != std::string::npos;

  Json j;
  j["record"] = "credential_finding";
  j["origin"] = credscan::origin_name(finding.origin);
  j["locator"] = finding.locator;
  j["kind"] = credscan::kind_name(finding.kind);
  j["key"] = finding.matched_key;
  j["value"] = redact_value ? credscan::redact_value(finding.matched_value)
                            : finding.matched_value;
  j["admin"] = admin;
  j["confidence"] = credscan::confidence_name(finding.confidence);
  return j;
}

Json port_record(const report::PortScanEntry& entry) {
  Json j;
  j["record"] = "port";
  j["port"] = entry.port;
  j["state"] = report::port_state_name(entry.state);
  j["service"] = entry.service;
  return j;
}

Json finding_record(const report::Finding& finding) {
  Json j;
  j["record"] = "finding";
  j["id"] = finding.id;
  j["pipeline"] = report::pipeline_name(finding.pipeline);
  j["severity"] = report::severity_name(finding.severity);
  j["title"] = finding.title;
  j["evidence"] = finding.evidence;
  j["details"] = finding.details;
  return j;
}

}  // namespace stackprobe::records
