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

#include "stackprobe/credscan.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stackprobe/capture.hpp"
#include "stackprobe/errors.hpp"
#include "stackprobe/http.hpp"

namespace stackprobe::credscan {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPemBoundary = "-----BEGIN ";

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string strip_quotes(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// key/value out of an assignment line: `KEY=value`, `key = value`,
// `key: value`, optionally prefixed with `export `.
bool split_assignment(const std::string& line, std::string& key,
                      std::string& value) {
  std::string text = trim(line);
  if (text.rfind("export ", 0) == 0) text = trim(text.substr(7));
  std::size_t eq = text.find('=');
  std::size_t colon = text.find(':');
  std::size_t sep = std::min(eq, colon);
  if (sep == std::string::npos || sep == 0) return false;
  key = trim(text.substr(0, sep));
  value = strip_quotes(trim(text.substr(sep + 1)));
  if (key.find(' ') != std::string::npos) return false;
  return !key.empty();
}

bool key_matches(const std::string& key, const std::string& pattern) {
  if (!pattern.empty() && pattern.back() == '*') {
    std::string_view prefix(pattern.data(), pattern.size() - 1);
    return key.size() >= prefix.size() &&
           http::iequals(std::string_view(key).substr(0, prefix.size()),
                         prefix);
  }
  return http::iequals(key, pattern);
}

// PEM label out of "-----BEGIN CERTIFICATE-----".
std::string pem_label(const std::string& line) {
  std::string label = trim(line).substr(kPemBoundary.size());
  std::size_t dash = label.find("-----");
  if (dash != std::string::npos) label = label.substr(0, dash);
  return trim(label);
}

// Applies assignment and PEM rules to one text line.
void scan_line(const std::string& line, const std::vector<ScanRule>& rules,
               Origin origin, const std::string& locator,
               std::vector<CredentialFinding>& out) {
  std::string trimmed = trim(line);
  if (trimmed.empty() || trimmed[0] == '#') return;

  if (trimmed.rfind(kPemBoundary, 0) == 0) {
    for (const auto& rule : rules) {
      if (rule.kind != FindingKind::certificate_material) continue;
      CredentialFinding f;
      f.origin = origin;
      f.locator = locator;
      f.kind = rule.kind;
      f.matched_key = trimmed;
      f.matched_value = pem_label(trimmed);
      f.confidence = rule.confidence;
      out.push_back(std::move(f));
      return;
    }
    return;
  }

  std::string key;
  std::string value;
  if (!split_assignment(line, key, value) || value.empty()) return;
  for (const auto& rule : rules) {
    if (rule.kind != FindingKind::env_credential &&
        rule.kind != FindingKind::config_credential) {
      continue;
    }
    if (!key_matches(key, rule.key_pattern)) continue;
    CredentialFinding f;
    f.origin = origin;
    f.locator = locator;
    f.kind = rule.kind;
    f.matched_key = key;
    f.matched_value = value;
    f.confidence = rule.confidence;
    out.push_back(std::move(f));
    return;  // first matching rule wins, one finding per line
  }
}

bool has_kind(const std::vector<ScanRule>& rules, FindingKind kind) {
  return std::any_of(rules.begin(), rules.end(),
                     [kind](const ScanRule& r) { return r.kind == kind; });
}

}  // namespace

const char* origin_name(Origin origin) {
  return origin == Origin::wire ? "wire" : "file";
}

const char* kind_name(FindingKind kind) {
  switch (kind) {
    case FindingKind::form_login: return "form_login";
    case FindingKind::env_credential: return "env_credential";
    case FindingKind::config_credential: return "config_credential";
    case FindingKind::certificate_material: return "certificate_material";
  }
  return "unknown";
}

const char* confidence_name(Confidence confidence) {
  return confidence == Confidence::exact ? "exact" : "heuristic";
}

FindingKind kind_from_name(const std::string& name) {
  if (name == "form_login") return FindingKind::form_login;
  if (name == "env_credential") return FindingKind::env_credential;
  if (name == "config_credential") return FindingKind::config_credential;
  if (name == "certificate_material") {
    return FindingKind::certificate_material;
  }
  throw Error("unknown finding kind '" + name + "'");
}

Confidence confidence_from_name(const std::string& name) {
  if (name == "exact") return Confidence::exact;
  if (name == "heuristic") return Confidence::heuristic;
  throw Error("unknown confidence '" + name + "'");
}

ScanRuleSet ScanRuleSet::defaults() {
  ScanRuleSet rules;
  const std::vector<std::string> env_keys = {
      "OS_TENANT_ID", "OS_TENANT_NAME", "OS_USERNAME", "OS_AUTH_URL",
      "OS_PASSWORD"};
  rules.wire_rules.push_back(
      {FindingKind::form_login, "username&password", Confidence::exact});
  for (const auto& key : env_keys) {
    rules.wire_rules.push_back(
        {FindingKind::env_credential, key, Confidence::exact});
    rules.file_rules.push_back(
        {FindingKind::env_credential, key, Confidence::exact});
  }
  rules.file_rules.push_back(
      {FindingKind::config_credential, "admin_password", Confidence::exact});
  rules.file_rules.push_back(
      {FindingKind::config_credential, "password", Confidence::exact});
  rules.file_rules.push_back({FindingKind::certificate_material,
                              "-----BEGIN", Confidence::exact});
  return rules;
}

ScanRuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rule file " + path);
  ScanRuleSet rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw Error("rule file " + path + " line " + std::to_string(line_no) +
                  ": expected kind, pattern, confidence");
    }
    ScanRule rule{kind_from_name(fields[0]), fields[1],
                  confidence_from_name(fields[2])};
    rules.wire_rules.push_back(rule);
    rules.file_rules.push_back(rule);
  }
  return rules;
}

ScanReport scan_capture(const std::string& capture_path,
                        const ScanRuleSet& rules) {
  std::size_t frame_warnings = 0;
  auto frames = capture::read_all(capture_path, &frame_warnings);

  ScanReport report;
  for (std::size_t i = 0; i < frame_warnings; ++i) {
    report.warnings.push_back("malformed capture frame skipped");
  }

  http::MessageScanner scanner;
  for (const auto& frame : frames) {
    if (frame.direction == capture::Direction::client_to_server) {
      scanner.feed(frame.payload);
    }
  }
  scanner.finish();

  const bool want_form_login =
      has_kind(rules.wire_rules, FindingKind::form_login);
  std::size_t ordinal = 0;
  while (auto msg = scanner.next()) {
    if (!msg->is_request) continue;
    ++ordinal;
    const std::string locator_base = "msg" + std::to_string(ordinal);

    for (const auto& h : msg->request.headers) {
      scan_line(h.name + ": " + h.value, rules.wire_rules, Origin::wire,
                locator_base + ":header", report.findings);
    }

    const std::string& body = msg->request.body;
    if (want_form_login && msg->request.method == "POST") {
      auto fields = http::form_decode(body);
      auto user = fields.find("username");
      auto pass = fields.find("password");
      if (user != fields.end() && pass != fields.end() &&
          !user->second.empty() && !pass->second.empty()) {
        CredentialFinding f;
        f.origin = Origin::wire;
        f.locator = locator_base + ":body";
        f.kind = FindingKind::form_login;
        f.matched_key = "username&password";
        f.matched_value = user->second + ":" + pass->second;
        f.confidence = Confidence::exact;
        report.findings.push_back(std::move(f));
      }
    }
    std::istringstream body_lines(body);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(body_lines, line)) {
      ++line_no;
      scan_line(line, rules.wire_rules, Origin::wire,
                locator_base + ":body:" + std::to_string(line_no),
                report.findings);
    }
  }
  return report;
}

ScanReport scan_tree(const std::string& root, const ScanRuleSet& rules) {
  fs::path root_path(root);
  std::error_code ec;
  if (!fs::exists(root_path, ec) || !fs::is_directory(root_path, ec)) {
    throw RootMissingError("scan root missing or not a directory: " + root);
  }

  // Collect and sort paths first so results never depend on walk order.
  std::vector<fs::path> files;
  for (const auto& entry :
       fs::recursive_directory_iterator(
           root_path, fs::directory_options::skip_permission_denied)) {
    if (entry.is_symlink()) continue;
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  ScanReport report;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      report.warnings.push_back("unreadable file: " + path.string());
      continue;
    }
    std::string rel = fs::relative(path, root_path).generic_string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      scan_line(line, rules.file_rules, Origin::file,
                rel + ":" + std::to_string(line_no), report.findings);
    }
  }
  // Paths were visited sorted and lines ascending, so findings are already
  // ordered by (path, line).
  return report;
}

std::string redact_value(const std::string& value) {
  if (value.empty()) return "***";
  if (value == "***" ||
      (value.size() == 4 && value.compare(1, 3, "***") == 0)) {
    return value;  // already redacted
  }
  return value.substr(0, 1) + "***";
}

std::vector<CredentialFinding> redact(
    std::vector<CredentialFinding> findings) {
  for (auto& f : findings) {
    f.matched_value = redact_value(f.matched_value);
  }
  return findings;
}

}  // namespace stackprobe::credscan
