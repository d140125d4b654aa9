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

// Executes generated command sweeps through an adapter, records every
// outcome, enforces an optional rate limit, and checks for post-campaign
// residue (resources that reported a successful delete but still exist).

#ifndef STACKPROBE_CMD_RUNNER_HPP
#define STACKPROBE_CMD_RUNNER_HPP

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "stackprobe/payload.hpp"

namespace stackprobe::runner {

enum class Outcome { accepted, rejected, error, timeout };

const char* outcome_name(Outcome outcome);

struct ExecutionRecord {
  std::uint64_t index = 0;  // generation ordinal, 0-based
  fuzz::GeneratedCommand command;
  Outcome outcome = Outcome::error;
  std::string detail;  // e.g. "HTTP 201" or "exit 1"
  std::chrono::milliseconds elapsed{0};
};

struct RateLimitPolicy {
  bool enabled = false;
  std::uint32_t max_per_window = 0;
  std::chrono::milliseconds window{1000};
};

/// Admits at most max_per_window calls per window across all workers.
class RateLimiter {
 public:
  explicit RateLimiter(RateLimitPolicy policy) : policy_(policy) {}
  void acquire();

 private:
  RateLimitPolicy policy_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point window_start_{};
  std::uint32_t used_ = 0;
};

struct AdapterResult {
  Outcome outcome = Outcome::error;
  std::string detail;
};

/// Where generated commands land: the victim's type API over HTTP, or a
/// subprocess template for real targets.
class Adapter {
 public:
  virtual ~Adapter() = default;

  /// Cheap reachability probe, consulted once before a sweep starts.
  virtual bool available() = 0;

  virtual AdapterResult execute(const fuzz::GeneratedCommand& command,
                                std::chrono::milliseconds timeout) = 0;

  /// Names currently present on the target (for residue checks). Adapters
  /// without a listable resource return an empty list.
  virtual std::vector<std::string> list_names() { return {}; }
};

/// Maps commands whose template contains `type-create <arg>` or
/// `type-delete <arg>` onto the victim's volume-type endpoints.
class VictimTypeAdapter : public Adapter {
 public:
  VictimTypeAdapter(std::string host, std::uint16_t port);

  bool available() override;
  AdapterResult execute(const fuzz::GeneratedCommand& command,
                        std::chrono::milliseconds timeout) override;
  std::vector<std::string> list_names() override;

  /// Deletes one name directly (cleanup passes). Returns the HTTP status.
  int delete_name(const std::string& name,
                  std::chrono::milliseconds timeout);

 private:
  std::string host_;
  std::uint16_t port_;
};

/// Runs each rendered command through `/bin/sh -c`. A `{}` in the template
/// is replaced by the shell-quoted command; without one the command is
/// appended. Exit 0 -> accepted, nonzero -> rejected.
class ExecAdapter : public Adapter {
 public:
  explicit ExecAdapter(std::string command_template);

  bool available() override { return true; }
  AdapterResult execute(const fuzz::GeneratedCommand& command,
                        std::chrono::milliseconds timeout) override;

 private:
  std::string template_;
};

struct SweepOptions {
  RateLimitPolicy policy;
  int workers = 1;
  std::chrono::milliseconds command_timeout{30000};
};

/// Drains the stream through the adapter. Individual failures become
/// record outcomes; the sweep itself never aborts once started. Records
/// come back in generation order regardless of worker count.
/// Throws AdapterUnavailableError when the initial probe fails.
std::vector<ExecutionRecord> run_sweep(fuzz::CommandStream& stream,
                                       Adapter& adapter,
                                       const SweepOptions& options = {});

/// Names from expected_deleted that the adapter still lists.
/// Throws AdapterUnavailableError.
std::vector<std::string> residue_check(
    Adapter& adapter, const std::vector<std::string>& expected_deleted);

}  // namespace stackprobe::runner

#endif  // STACKPROBE_CMD_RUNNER_HPP
