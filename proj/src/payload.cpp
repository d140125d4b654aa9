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

#include "stackprobe/payload.hpp"

#include <fstream>
#include <ostream>

#include "stackprobe/errors.hpp"

namespace stackprobe::fuzz {

FuzzPlan plan(const FuzzConfig& config) {
  config.validate();
  FuzzPlan p;
  p.per_case_count = static_cast<std::uint64_t>(config.charset.size()) *
                     static_cast<std::uint64_t>(config.max_len);
  p.total_count = p.per_case_count * config.cases.size();
  return p;
}

CommandStream::CommandStream(const FuzzConfig& config, int min_length,
                             int max_length)
    : config_(config),
      min_length_(min_length < 1 ? 1 : min_length),
      max_length_(max_length < 1 ? config.max_len : max_length) {
  config_.validate();
  if (max_length_ > config_.max_len) max_length_ = config_.max_len;
  length_ = min_length_;
}

void CommandStream::reset() {
  case_i_ = 0;
  char_i_ = 0;
  length_ = min_length_;
  emitted_ = 0;
}

std::optional<GeneratedCommand> CommandStream::next() {
  if (min_length_ > max_length_) return std::nullopt;
  if (case_i_ >= config_.cases.size()) return std::nullopt;

  GeneratedCommand cmd;
  cmd.case_index = config_.cases[case_i_].index;
  cmd.fill = config_.charset[char_i_];
  cmd.length = length_;
  cmd.rendered =
      config_.cases[case_i_].render(std::string(
          static_cast<std::size_t>(length_), cmd.fill));
  ++emitted_;

  if (++length_ > max_length_) {
    length_ = min_length_;
    if (++char_i_ >= config_.charset.size()) {
      char_i_ = 0;
      ++case_i_;
    }
  }
  return cmd;
}

std::uint64_t for_each_command(
    const FuzzConfig& config,
    const std::function<void(const GeneratedCommand&)>& fn) {
  CommandStream stream(config);
  std::uint64_t count = 0;
  while (auto cmd = stream.next()) {
    fn(*cmd);
    ++count;
  }
  return count;
}

std::uint64_t emit_script(const FuzzConfig& config, std::ostream& sink) {
  config.validate();
  std::uint64_t commands = 0;
  std::string fill;
  for (const auto& tc : config.cases) {
    for (const auto& comment : tc.comment_lines) {
      sink << comment << '\n';
    }
    for (char c : config.charset) {
      fill.assign(1, c);
      for (int len = 1; len <= config.max_len; ++len) {
        if (len > 1) fill.push_back(c);
        sink << tc.render(fill) << '\n';
        ++commands;
      }
    }
    if (!sink) throw SinkWriteError("script sink write failed");
  }
  sink.flush();
  if (!sink) throw SinkWriteError("script sink flush failed");
  return commands;
}

std::uint64_t emit_script_file(const FuzzConfig& config,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SinkWriteError("cannot open " + path + " for writing");
  return emit_script(config, out);
}

}  // namespace stackprobe::fuzz
