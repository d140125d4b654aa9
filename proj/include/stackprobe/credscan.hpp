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

// Cleartext credential detection in captured HTTP traffic and filesystem
// trees. Matching is line-oriented plain text with case-insensitive keys.
//
// Rule file format: one rule per line, comma separated:
//   kind, key pattern, confidence
// e.g. "env_credential, OS_REGION_NAME, exact". '#' lines are comments.

#ifndef STACKPROBE_CREDSCAN_HPP
#define STACKPROBE_CREDSCAN_HPP

#include <string>
#include <vector>

namespace stackprobe::credscan {

enum class Origin { wire, file };
enum class FindingKind {
  form_login,
  env_credential,
  config_credential,
  certificate_material,
};
enum class Confidence { exact, heuristic };

const char* origin_name(Origin origin);
const char* kind_name(FindingKind kind);
const char* confidence_name(Confidence confidence);
FindingKind kind_from_name(const std::string& name);
Confidence confidence_from_name(const std::string& name);

struct CredentialFinding {
  Origin origin = Origin::file;
  /// "path:line" for files; "msg<ordinal>:<part>" for wire matches. A
  /// re-scan of the same input reproduces the same locator and match.
  std::string locator;
  FindingKind kind = FindingKind::config_credential;
  std::string matched_key;
  std::string matched_value;
  Confidence confidence = Confidence::exact;

  bool operator==(const CredentialFinding&) const = default;
};

struct ScanRule {
  FindingKind kind = FindingKind::config_credential;
  std::string key_pattern;  // matched case-insensitively against the key
  Confidence confidence = Confidence::exact;
};

struct ScanRuleSet {
  std::vector<ScanRule> wire_rules;
  std::vector<ScanRule> file_rules;

  static ScanRuleSet defaults();
};

/// Parses a rule file. Rules land in both the wire and file lists; the
/// caller picks the side its scan uses.
ScanRuleSet load_rules(const std::string& path);

struct ScanReport {
  std::vector<CredentialFinding> findings;
  std::vector<std::string> warnings;
};

/// Scans every HTTP request (headers and body) in a capture file against
/// the wire rules. Throws CaptureOpenError.
ScanReport scan_capture(const std::string& capture_path,
                        const ScanRuleSet& rules = ScanRuleSet::defaults());

/// Recursively scans a directory tree (symlinks not followed) against the
/// file rules; findings are sorted by path then line. Unreadable files
/// become warnings. Throws RootMissingError.
ScanReport scan_tree(const std::string& root,
                     const ScanRuleSet& rules = ScanRuleSet::defaults());

/// "password1" -> "p***"; "" -> "***". Idempotent.
std::string redact_value(const std::string& value);
std::vector<CredentialFinding> redact(std::vector<CredentialFinding> findings);

}  // namespace stackprobe::credscan

#endif  // STACKPROBE_CREDSCAN_HPP
