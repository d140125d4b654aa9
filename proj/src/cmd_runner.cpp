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

#include "stackprobe/cmd_runner.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "stackprobe/errors.hpp"
#include "stackprobe/http.hpp"
#include "stackprobe/net.hpp"

#include "json.hpp"

namespace stackprobe::runner {

namespace {

// Shell-quotes with single quotes; embedded quotes become '\''.
std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

// The fuzzed argument following a `type-create`/`type-delete` verb.
// Fuzz strings never contain whitespace, so plain word splitting is safe.
bool find_type_op(const std::string& rendered, std::string& verb,
                  std::string& arg) {
  std::istringstream in(rendered);
  std::string word;
  std::string prev;
  while (in >> word) {
    if (prev == "type-create" || prev == "type-delete") {
      verb = prev;
      arg = word;
      return true;
    }
    prev = word;
  }
  return false;
}

Outcome outcome_from_status(int status) {
  if (status >= 200 && status < 300) return Outcome::accepted;
  if (status >= 400 && status < 500) return Outcome::rejected;
  return Outcome::error;
}

}  // namespace

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::accepted: return "accepted";
    case Outcome::rejected: return "rejected";
    case Outcome::error: return "error";
    case Outcome::timeout: return "timeout";
  }
  return "unknown";
}

void RateLimiter::acquire() {
  if (!policy_.enabled || policy_.max_per_window == 0) return;
  while (true) {
    std::chrono::steady_clock::time_point wake;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      if (window_start_.time_since_epoch().count() == 0 ||
          now - window_start_ >= policy_.window) {
        window_start_ = now;
        used_ = 0;
      }
      if (used_ < policy_.max_per_window) {
        ++used_;
        return;
      }
      wake = window_start_ + policy_.window;
    }
    std::this_thread::sleep_until(wake);
  }
}

VictimTypeAdapter::VictimTypeAdapter(std::string host, std::uint16_t port)
    : host_(std::move(host)), port_(port) {}

bool VictimTypeAdapter::available() {
  return net::probe_connect(host_, port_, net::Millis(2000)) ==
         net::ProbeResult::open;
}

AdapterResult VictimTypeAdapter::execute(const fuzz::GeneratedCommand& command,
                                         std::chrono::milliseconds timeout) {
  std::string verb;
  std::string arg;
  if (!find_type_op(command.rendered, verb, arg)) {
    // Not a type operation; the adapter declines rather than failing the
    // sweep, so mixed-service configs can still run against the victim.
    return {Outcome::rejected, "no type-create/type-delete verb in command"};
  }
  http::Request req;
  if (verb == "type-create") {
    req.method = "POST";
    req.target = "/types";
    req.headers.push_back({"Content-Type",
                           "application/x-www-form-urlencoded"});
    req.body = "name=" + http::url_encode(arg);
  } else {
    req.method = "DELETE";
    req.target = "/types/" + http::url_encode(arg);
  }
  try {
    http::Response resp = http::simple_request(host_, port_, req, timeout);
    return {outcome_from_status(resp.status),
            "HTTP " + std::to_string(resp.status)};
  } catch (const TargetUnreachableError& e) {
    return {Outcome::error, e.what()};
  } catch (const Error& e) {
    return {Outcome::error, e.what()};
  }
}

std::vector<std::string> VictimTypeAdapter::list_names() {
  http::Request req;
  req.method = "GET";
  req.target = "/types";
  http::Response resp =
      http::simple_request(host_, port_, req, net::Millis(5000));
  std::vector<std::string> names;
  auto parsed = nlohmann::json::parse(resp.body, nullptr, false);
  if (parsed.is_array()) {
    for (const auto& item : parsed) {
      if (item.is_string()) names.push_back(item.get<std::string>());
    }
  }
  return names;
}

int VictimTypeAdapter::delete_name(const std::string& name,
                                   std::chrono::milliseconds timeout) {
  http::Request req;
  req.method = "DELETE";
  req.target = "/types/" + http::url_encode(name);
  return http::simple_request(host_, port_, req, timeout).status;
}

ExecAdapter::ExecAdapter(std::string command_template)
    : template_(std::move(command_template)) {}

AdapterResult ExecAdapter::execute(const fuzz::GeneratedCommand& command,
                                   std::chrono::milliseconds timeout) {
  std::string quoted = shell_quote(command.rendered);
  std::string cmdline;
  std::size_t slot = template_.find("{}");
  if (slot != std::string::npos) {
    cmdline = template_.substr(0, slot) + quoted +
              template_.substr(slot + 2);
  } else if (template_.empty()) {
    cmdline = command.rendered;  // run the rendered command itself
  } else {
    cmdline = template_ + " " + quoted;
  }

  pid_t pid = ::fork();
  if (pid < 0) return {Outcome::error, "fork failed"};
  if (pid == 0) {
    ::execl("/bin/sh", "sh", "-c", cmdline.c_str(), nullptr);
    ::_exit(127);
  }

  auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  while (true) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) return {Outcome::error, "waitpid failed"};
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return {Outcome::timeout, "killed after timeout"};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (WIFEXITED(status)) {
    int code = WEXITSTATUS(status);
    return {code == 0 ? Outcome::accepted : Outcome::rejected,
            "exit " + std::to_string(code)};
  }
  return {Outcome::error, "terminated by signal"};
}

std::vector<ExecutionRecord> run_sweep(fuzz::CommandStream& stream,
                                       Adapter& adapter,
                                       const SweepOptions& options) {
  if (!adapter.available()) {
    throw AdapterUnavailableError("adapter unreachable at sweep start");
  }

  std::vector<ExecutionRecord> records;
  RateLimiter limiter(options.policy);
  std::mutex stream_mutex;
  std::mutex records_mutex;
  std::uint64_t next_index = 0;

  auto worker = [&] {
    while (true) {
      std::optional<fuzz::GeneratedCommand> cmd;
      std::uint64_t index = 0;
      {
        std::lock_guard<std::mutex> lock(stream_mutex);
        cmd = stream.next();
        if (!cmd) return;
        index = next_index++;
      }
      limiter.acquire();
      auto start = std::chrono::steady_clock::now();
      AdapterResult result;
      try {
        result = adapter.execute(*cmd, options.command_timeout);
      } catch (const std::exception& e) {
        result = {Outcome::error, e.what()};
      }
      ExecutionRecord record;
      record.index = index;
      record.command = std::move(*cmd);
      record.outcome = result.outcome;
      record.detail = std::move(result.detail);
      record.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      std::lock_guard<std::mutex> lock(records_mutex);
      records.push_back(std::move(record));
    }
  };

  int width = std::max(1, options.workers);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(records.begin(), records.end(),
            [](const ExecutionRecord& a, const ExecutionRecord& b) {
              return a.index < b.index;
            });
  return records;
}

std::vector<std::string> residue_check(
    Adapter& adapter, const std::vector<std::string>& expected_deleted) {
  if (expected_deleted.empty()) return {};
  if (!adapter.available()) {
    throw AdapterUnavailableError("adapter unreachable for residue check");
  }
  auto names = adapter.list_names();
  std::unordered_set<std::string> present(names.begin(), names.end());
  std::vector<std::string> survivors;
  std::unordered_set<std::string> seen;
  for (const auto& name : expected_deleted) {
    if (present.count(name) && seen.insert(name).second) {
      survivors.push_back(name);
    }
  }
  return survivors;
}

}  // namespace stackprobe::runner
