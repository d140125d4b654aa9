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

#include "stackprobe/fuzz_config.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "stackprobe/errors.hpp"

namespace stackprobe::fuzz {

namespace {

constexpr std::string_view kPlaceholderWord = "FUZZ";

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

// Builds the token list from the whitespace-joined block content.
std::vector<Token> tokenize(const std::vector<std::string>& words) {
  std::vector<Token> tokens;
  for (const auto& word : words) {
    if (word == kPlaceholderWord) {
      tokens.push_back(Token{Token::Kind::placeholder, ""});
    } else if (!tokens.empty() &&
               tokens.back().kind == Token::Kind::literal) {
      tokens.back().text += ' ';
      tokens.back().text += word;
    } else {
      tokens.push_back(Token{Token::Kind::literal, word});
    }
  }
  return tokens;
}

void check_charset(std::string_view charset) {
  for (std::size_t i = 0; i < charset.size(); ++i) {
    for (std::size_t j = i + 1; j < charset.size(); ++j) {
      if (charset[i] == charset[j]) throw DuplicateCharsetError(charset[i]);
    }
  }
}

}  // namespace

std::string TestCase::render(std::string_view fill) const {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    if (token.kind == Token::Kind::placeholder) {
      out += fill;
    } else {
      out += token.text;
    }
  }
  return out;
}

void FuzzConfig::validate() const {
  if (charset.empty()) throw Error("charset is empty");
  check_charset(charset);
  if (max_len < 1) throw Error("max_len must be >= 1");
  if (cases.empty()) throw EmptyConfigError();
  for (const auto& tc : cases) {
    if (tc.placeholder_count < 1) throw NoPlaceholderError(tc.index);
  }
}

FuzzConfig parse_config(std::istream& source, const std::string& name,
                        const ConfigDefaults& defaults) {
  FuzzConfig config;
  config.name = name;
  config.charset = defaults.charset;
  config.max_len = defaults.max_len;

  std::vector<std::string> pending_comments;
  std::vector<std::string> pending_words;
  bool block_seen = false;   // any test-case content so far
  bool in_block = false;     // current block has comments or words
  std::size_t line_no = 0;

  auto close_block = [&] {
    auto tokens = tokenize(pending_words);
    TestCase tc;
    tc.index = static_cast<int>(config.cases.size()) + 1;
    tc.comment_lines = std::move(pending_comments);
    tc.tokens = std::move(tokens);
    for (const auto& t : tc.tokens) {
      if (t.kind == Token::Kind::placeholder) ++tc.placeholder_count;
    }
    if (tc.placeholder_count < 1) throw NoPlaceholderError(tc.index);
    config.cases.push_back(std::move(tc));
    pending_comments.clear();
    pending_words.clear();
    in_block = false;
  };

  std::string raw;
  while (std::getline(source, raw)) {
    ++line_no;
    std::string line = strip_cr(std::move(raw));
    if (line.rfind("@charset=", 0) == 0 || line.rfind("@maxlen=", 0) == 0) {
      if (block_seen || in_block) {
        throw ConfigParseError(line_no,
                               "directive after the first test case");
      }
      if (line.rfind("@charset=", 0) == 0) {
        config.charset = line.substr(9);
        if (config.charset.empty()) {
          throw ConfigParseError(line_no, "@charset= lists no characters");
        }
        check_charset(config.charset);
      } else {
        try {
          config.max_len = std::stoi(line.substr(8));
        } catch (const std::exception&) {
          throw ConfigParseError(line_no, "@maxlen= is not an integer");
        }
        if (config.max_len < 1) {
          throw ConfigParseError(line_no, "@maxlen= must be >= 1");
        }
      }
      continue;
    }
    if (!line.empty() && line[0] == '#') {
      pending_comments.push_back(line);
      in_block = true;
      block_seen = true;
      continue;
    }
    if (line == "--") {
      close_block();
      block_seen = true;
      continue;
    }
    if (is_blank(line)) continue;
    auto words = split_words(line);
    pending_words.insert(pending_words.end(), words.begin(), words.end());
    in_block = true;
    block_seen = true;
  }
  if (in_block) close_block();  // lenient: missing trailing '--'

  if (config.cases.empty()) throw EmptyConfigError();
  config.validate();
  return config;
}

FuzzConfig parse_config_text(std::string_view text, const std::string& name,
                             const ConfigDefaults& defaults) {
  std::istringstream in{std::string(text)};
  return parse_config(in, name, defaults);
}

FuzzConfig parse_config_file(const std::string& path,
                             const ConfigDefaults& defaults) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path);
  return parse_config(in, std::filesystem::path(path).stem().string(),
                      defaults);
}

std::string serialize_config(const FuzzConfig& config) {
  std::string out = "@charset=" + config.charset + "\n" +
                    "@maxlen=" + std::to_string(config.max_len) + "\n";
  for (const auto& tc : config.cases) {
    for (const auto& c : tc.comment_lines) {
      out += c;
      out += '\n';
    }
    out += tc.command_text();
    out += "\n--\n";
  }
  return out;
}

}  // namespace stackprobe::fuzz
