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

// Deterministic expansion of a FuzzConfig into its full command sweep.
//
// Iteration order is frozen: test cases outer, charset characters next (in
// config order), lengths innermost ascending. Every placeholder of one
// command receives the same fuzz string (one character repeated `length`
// times). Generation streams in constant memory; the nova-scale campaigns
// are never materialized as a whole.

#ifndef STACKPROBE_PAYLOAD_HPP
#define STACKPROBE_PAYLOAD_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "stackprobe/fuzz_config.hpp"

namespace stackprobe::fuzz {

/// Campaign arithmetic for one config.
struct FuzzPlan {
  std::uint64_t per_case_count = 0;  // |charset| * max_len
  std::uint64_t total_count = 0;     // per_case_count * |cases|
};

FuzzPlan plan(const FuzzConfig& config);

/// One concrete command of the sweep.
struct GeneratedCommand {
  int case_index = 0;  // 1-based
  char fill = '\0';
  int length = 0;
  std::string rendered;
};

/// Streaming iterator over the sweep. An optional length window narrows the
/// innermost loop to [min_length, max_length] for truncated desk-scale runs;
/// the default window is the config's full 1..max_len sweep.
class CommandStream {
 public:
  explicit CommandStream(const FuzzConfig& config, int min_length = 1,
                         int max_length = 0 /* 0 = config.max_len */);

  std::optional<GeneratedCommand> next();
  void reset();

  std::uint64_t emitted() const { return emitted_; }

 private:
  const FuzzConfig& config_;
  int min_length_;
  int max_length_;
  std::size_t case_i_ = 0;
  std::size_t char_i_ = 0;
  int length_ = 0;
  std::uint64_t emitted_ = 0;
};

/// Applies fn to every command of the full sweep; returns how many ran.
std::uint64_t for_each_command(
    const FuzzConfig& config,
    const std::function<void(const GeneratedCommand&)>& fn);

/// Writes the sweep as a shell-script-style stream: each case's comment
/// lines once, then its commands one per line. UTF-8, LF endings, no
/// trailing blank line. Returns the number of command lines written.
/// Throws SinkWriteError when the sink fails.
std::uint64_t emit_script(const FuzzConfig& config, std::ostream& sink);
std::uint64_t emit_script_file(const FuzzConfig& config,
                               const std::string& path);

}  // namespace stackprobe::fuzz

#endif  // STACKPROBE_PAYLOAD_HPP
