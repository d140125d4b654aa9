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

// Block-based fuzz configuration scripts.
//
// File format (UTF-8, LF or CRLF):
//   - lines starting with '#' are comments and attach to the next test case;
//   - '@charset=<chars>' and '@maxlen=<n>' directives may appear before the
//     first test case only;
//   - a line containing exactly '--' terminates the current test case;
//   - all other non-blank lines of a block are joined with single spaces
//     into one command template;
//   - the standalone word 'FUZZ' (exact case) marks a placeholder.

#ifndef STACKPROBE_FUZZ_CONFIG_HPP
#define STACKPROBE_FUZZ_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stackprobe::fuzz {

/// Characters the published command-line campaigns substitute into
/// placeholders, in campaign order.
inline constexpr std::string_view kDefaultCharset = "!/09:@AZ['az{~";

/// Longest fuzz string the published campaigns generate.
inline constexpr int kDefaultMaxLen = 1025;

/// One template token: a run of literal words, or a fuzz placeholder.
struct Token {
  enum class Kind { literal, placeholder };
  Kind kind = Kind::literal;
  std::string text;  // empty for placeholders

  bool operator==(const Token&) const = default;
};

/// One '--'-terminated block of a config file.
struct TestCase {
  int index = 0;  // 1-based position in the file
  std::vector<std::string> comment_lines;  // verbatim, including '#'
  std::vector<Token> tokens;
  int placeholder_count = 0;

  /// Template with each placeholder rendered as `fill`; tokens joined by
  /// single spaces. command_text() re-renders the canonical source line.
  std::string render(std::string_view fill) const;
  std::string command_text() const { return render("FUZZ"); }

  bool operator==(const TestCase&) const = default;
};

struct FuzzConfig {
  std::string name;      // e.g. "nova"; not stored in the file itself
  std::string charset;   // ordered, duplicate-free single characters
  int max_len = kDefaultMaxLen;
  std::vector<TestCase> cases;

  bool operator==(const FuzzConfig&) const = default;

  /// Throws if any structural invariant is violated.
  void validate() const;
};

/// Per-run fallbacks used when the file carries no directives.
struct ConfigDefaults {
  std::string charset = std::string(kDefaultCharset);
  int max_len = kDefaultMaxLen;
};

/// Parses a config script. Errors: EmptyConfigError, NoPlaceholderError,
/// DuplicateCharsetError, ConfigParseError.
FuzzConfig parse_config(std::istream& source, const std::string& name,
                        const ConfigDefaults& defaults = {});
FuzzConfig parse_config_text(std::string_view text, const std::string& name,
                             const ConfigDefaults& defaults = {});
FuzzConfig parse_config_file(const std::string& path,
                             const ConfigDefaults& defaults = {});

/// Inverse of parse_config: directives, then each case's comments, command
/// line and '--'. parse(serialize(c)) == c.
std::string serialize_config(const FuzzConfig& config);

}  // namespace stackprobe::fuzz

#endif  // STACKPROBE_FUZZ_CONFIG_HPP
