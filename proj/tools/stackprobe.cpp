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

// stackprobe: command-line front end for the penetration test pipelines.
//
//   victim     run the deliberately vulnerable target service
//   cmd-fuzz   command sweeps against an adapter (plus script emission)
//   http-fuzz  HTTP protocol fuzzing campaigns
//   sidejack   cookie harvesting (file or proxy tap) and session replay
//   credscan   credential scanning of captures and filesystem trees
//   recon      TCP connect scan with the builtin service label table
//   report     merge pipeline outputs into one findings report
//
// Exit codes: 0 success (for `report`: no findings above info), 1 findings
// present (`report` only), 2 execution error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "stackprobe/cmd_runner.hpp"
#include "stackprobe/credscan.hpp"
#include "stackprobe/errors.hpp"
#include "stackprobe/fuzz_config.hpp"
#include "stackprobe/http_fuzzer.hpp"
#include "stackprobe/payload.hpp"
#include "stackprobe/records.hpp"
#include "stackprobe/report.hpp"
#include "stackprobe/sidejack.hpp"
#include "stackprobe/victim.hpp"

namespace {

using namespace stackprobe;
using records::Json;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

void install_signal_handlers() {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
}

struct GlobalOptions {
  std::string output;
  std::string format = "text";
  std::uint64_t seed = 1;

  bool jsonl() const { return format == "jsonl"; }
};

/// Line sink: --output file when given, stdout otherwise.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw SinkWriteError("cannot open output file " + path);
      use_file_ = true;
    }
  }

  void line(const std::string& text) {
    (use_file_ ? static_cast<std::ostream&>(file_) : std::cout)
        << text << '\n';
  }

  bool to_file() const { return use_file_; }

 private:
  std::ofstream file_;
  bool use_file_ = false;
};

fuzz::ConfigDefaults make_defaults(const std::string& charset, int max_len) {
  fuzz::ConfigDefaults defaults;
  if (!charset.empty()) defaults.charset = charset;
  if (max_len > 0) defaults.max_len = max_len;
  return defaults;
}

// ---------------------------------------------------------------- victim --

struct VictimArgs {
  std::string listen;
  bool no_rotate = false;
  bool always_200 = false;
  bool no_255_bug = false;
  std::vector<std::string> faults;
  std::size_t uri_limit = 8192;
  std::string cookie_name = sidejack::kDefaultCookieName;
  std::string seed_fs;
};

int run_victim(const GlobalOptions& globals, const VictimArgs& args) {
  if (!args.seed_fs.empty()) {
    auto written = victim::seed_credential_fixture(args.seed_fs);
    for (const auto& rel : written) {
      std::cout << "seeded " << args.seed_fs << "/" << rel << "\n";
    }
    if (args.listen.empty()) return 0;
  }
  if (args.listen.empty()) {
    std::cerr << "victim: --listen or --seed-fs is required\n";
    return 2;
  }

  victim::VictimConfig config;
  auto hp = net::HostPort::parse(args.listen);
  config.host = hp.host;
  config.port = hp.port;
  config.rotate_on_logout = !args.no_rotate;
  config.always_200 = args.always_200;
  config.type_delete_bug = !args.no_255_bug;
  config.uri_length_limit = args.uri_limit;
  config.session_cookie_name = args.cookie_name;
  config.seed = globals.seed;
  for (const auto& text : args.faults) {
    config.fault_rules.push_back(victim::parse_fault_rule(text));
  }

  victim::VictimServer server(std::move(config));
  server.start();
  std::cout << "victim listening on " << hp.host << ":" << server.port()
            << " (cleartext HTTP by design)\n"
            << "  rotate_on_logout=" << (args.no_rotate ? "no" : "yes")
            << " always_200=" << (args.always_200 ? "yes" : "no")
            << " type_delete_bug=" << (args.no_255_bug ? "off" : "on")
            << "\n";
  std::cout.flush();
  while (!g_interrupted.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  std::cout << "victim stopped\n";
  return 0;
}

// -------------------------------------------------------------- cmd-fuzz --

struct CmdFuzzArgs {
  std::string config_path;
  std::string adapter = "";
  std::string charset;
  int max_len = 0;
  int min_len = 1;
  bool full = false;
  bool dry_run = false;
  std::string emit_path;
  double rate = 0.0;  // commands per second, 0 = unthrottled
  int workers = 1;
  double timeout_s = 30.0;
  bool residue = false;
};

std::unique_ptr<runner::Adapter> make_adapter(const std::string& spec,
                                              runner::VictimTypeAdapter** victim_out) {
  const std::string victim_prefix = "victim:";
  const std::string exec_prefix = "exec:";
  if (spec.rfind(victim_prefix, 0) == 0) {
    auto hp = net::HostPort::parse(spec.substr(victim_prefix.size()));
    auto adapter =
        std::make_unique<runner::VictimTypeAdapter>(hp.host, hp.port);
    if (victim_out) *victim_out = adapter.get();
    return adapter;
  }
  if (spec.rfind(exec_prefix, 0) == 0) {
    return std::make_unique<runner::ExecAdapter>(spec.substr(exec_prefix.size()));
  }
  throw Error("adapter must be victim:<host:port> or exec:<template>");
}

int run_cmd_fuzz(const GlobalOptions& globals, const CmdFuzzArgs& args) {
  fuzz::FuzzConfig config = fuzz::parse_config_file(
      args.config_path, make_defaults(args.charset, args.max_len));

  // Desk-scale default: truncate to two characters and length <= 300
  // unless --full asks for the whole campaign.
  if (!args.full) {
    if (config.charset.size() > 2) config.charset.resize(2);
    if (config.max_len > 300) config.max_len = 300;
  }

  auto plan = fuzz::plan(config);
  if (args.dry_run) {
    std::cout << "config " << config.name << ": "
              << config.cases.size() << " case(s), charset "
              << config.charset.size() << ", lengths 1.." << config.max_len
              << "\n";
    std::cout << "per-case commands: " << plan.per_case_count << "\n";
    std::cout << "total commands:    " << plan.total_count << "\n";
    return 0;
  }
  if (!args.emit_path.empty()) {
    std::uint64_t lines = fuzz::emit_script_file(config, args.emit_path);
    std::cout << "wrote " << lines << " command line(s) to "
              << args.emit_path << "\n";
    return 0;
  }
  if (args.adapter.empty()) {
    std::cerr << "cmd-fuzz: --adapter is required unless --dry-run/--emit\n";
    return 2;
  }

  runner::VictimTypeAdapter* victim_adapter = nullptr;
  auto adapter = make_adapter(args.adapter, &victim_adapter);

  runner::SweepOptions options;
  options.workers = args.workers;
  options.command_timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(args.timeout_s * 1000));
  if (args.rate > 0) {
    options.policy.enabled = true;
    options.policy.max_per_window = static_cast<std::uint32_t>(
        args.rate < 1 ? 1 : args.rate);
    options.policy.window = std::chrono::milliseconds(1000);
  }

  fuzz::CommandStream stream(config, args.min_len);
  auto records = runner::run_sweep(stream, *adapter, options);

  OutputSink sink(globals.output);
  std::map<std::string, std::uint64_t> by_outcome;
  for (const auto& record : records) {
    ++by_outcome[runner::outcome_name(record.outcome)];
    if (globals.jsonl() || sink.to_file()) {
      sink.line(records::execution_record(record).dump());
    }
  }

  std::vector<std::string> survivors;
  if (args.residue && victim_adapter) {
    // Cleanup pass: delete every name this sweep created successfully,
    // then ask the target what survived.
    std::set<std::string> created;
    for (const auto& record : records) {
      if (record.outcome != runner::Outcome::accepted) continue;
      std::string verb;
      std::istringstream words(record.command.rendered);
      std::string w;
      std::string prev;
      while (words >> w) {
        if (prev == "type-create") {
          created.insert(w);
          break;
        }
        prev = w;
      }
    }
    std::vector<std::string> deleted;
    for (const auto& name : created) {
      int status =
          victim_adapter->delete_name(name, options.command_timeout);
      if (status == 200) deleted.push_back(name);
    }
    survivors = runner::residue_check(*victim_adapter, deleted);
    for (const auto& name : survivors) {
      if (globals.jsonl() || sink.to_file()) {
        sink.line(records::residue_record(name).dump());
      }
    }
  }

  if (!globals.jsonl()) {
    std::cout << "sweep complete: " << records.size() << " command(s)\n";
    for (const auto& [name, count] : by_outcome) {
      std::cout << "  " << name << ": " << count << "\n";
    }
    if (args.residue) {
      std::cout << "residue: " << survivors.size()
                << " undeletable name(s)\n";
      for (const auto& name : survivors) {
        std::cout << "  length " << name.size() << ": "
                  << name.substr(0, 40) << (name.size() > 40 ? "..." : "")
                  << "\n";
      }
    }
  }
  return 0;
}

// -------------------------------------------------------------- http-fuzz --

struct HttpFuzzArgs {
  std::string mode = "bed";
  std::string host;
  std::uint16_t port = 80;
  double delay_s = 0.0;
  int max_len = 10024;
  double timeout_s = 10.0;
  std::vector<std::string> functions;
  std::string charset = "A";
};

int run_http_fuzz(const GlobalOptions& globals, const HttpFuzzArgs& args) {
  httpfuzz::HttpFuzzCampaign campaign;
  campaign.mode = args.mode == "bed" ? httpfuzz::FuzzMode::bed
                                     : httpfuzz::FuzzMode::sfuzz_basic;
  campaign.target_host = args.host;
  campaign.target_port = args.port;
  campaign.delay = std::chrono::milliseconds(
      static_cast<std::int64_t>(args.delay_s * 1000));
  campaign.max_payload_len = args.max_len;
  campaign.timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(args.timeout_s * 1000));
  campaign.payload_charset = args.charset;
  if (!args.functions.empty()) campaign.functions = args.functions;

  auto result = campaign.mode == httpfuzz::FuzzMode::bed
                    ? httpfuzz::run_bed(campaign)
                    : httpfuzz::run_sfuzz_basic(campaign);

  OutputSink sink(globals.output);
  if (globals.jsonl() || sink.to_file()) {
    for (const auto& exchange : result.exchanges) {
      sink.line(records::exchange_record(exchange).dump());
    }
    sink.line(records::counter_record(result.counter).dump());
  }
  if (!globals.jsonl()) {
    std::cout << httpfuzz::counter_to_text(result.counter);
    std::cout << "anomalies: " << result.counter.anomaly_count << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- sidejack --

struct HarvestArgs {
  std::string capture;
  std::string proxy_listen;
  std::string upstream;
  std::string save_capture;
  std::string cookie_name = sidejack::kDefaultCookieName;
  std::uint64_t max_conns = 0;
};

int run_harvest(const GlobalOptions& globals, const HarvestArgs& args) {
  OutputSink sink(globals.output);
  if (!args.capture.empty()) {
    auto sessions = sidejack::harvest_capture(args.capture, args.cookie_name);
    for (const auto& session : sessions) {
      sink.line(sidejack::session_store_line(session));
    }
    if (sink.to_file()) {
      std::cout << "harvested " << sessions.size() << " session(s) from "
                << args.capture << "\n";
    }
    return 0;
  }

  if (args.proxy_listen.empty() || args.upstream.empty()) {
    std::cerr << "sidejack harvest: need --capture, or --proxy with "
                 "--upstream\n";
    return 2;
  }
  auto listen = net::HostPort::parse(args.proxy_listen);
  auto upstream = net::HostPort::parse(args.upstream);

  std::mutex sink_mutex;
  std::uint64_t harvested = 0;
  sidejack::ProxyTap::Options options;
  options.listen_host = listen.host;
  options.listen_port = listen.port;
  options.upstream_host = upstream.host;
  options.upstream_port = upstream.port;
  options.capture_path = args.save_capture;
  options.cookie_name = args.cookie_name;
  options.on_session = [&](const sidejack::CapturedSession& session) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    sink.line(sidejack::session_store_line(session));
    ++harvested;
  };

  sidejack::ProxyTap tap(options);
  tap.start();
  std::cerr << "proxy tap on " << listen.host << ":" << tap.port()
            << " -> " << upstream.str() << " (ctrl-c to stop)\n";
  while (!g_interrupted.load()) {
    if (args.max_conns > 0 && tap.connections_handled() >= args.max_conns) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  // Give in-flight pumps a moment to finish before tearing down.
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  tap.stop();
  std::cerr << "proxy tap stopped, " << harvested << " session(s)\n";
  return 0;
}

struct ReplayArgs {
  std::string store;
  std::size_t index = 0;
  std::string url;
  std::string marker;
  double timeout_s = 5.0;
};

int run_replay(const GlobalOptions& globals, const ReplayArgs& args) {
  auto sessions = sidejack::load_session_store(args.store);
  if (args.index >= sessions.size()) {
    std::cerr << "replay: index " << args.index << " out of range ("
              << sessions.size() << " session(s) in store)\n";
    return 2;
  }
  auto attempt = sidejack::replay(
      sessions[args.index], args.url, args.marker,
      net::Millis(static_cast<std::int64_t>(args.timeout_s * 1000)));

  OutputSink sink(globals.output);
  if (globals.jsonl() || sink.to_file()) {
    sink.line(records::hijack_record(attempt).dump());
  }
  if (!globals.jsonl()) {
    std::cout << (attempt.success() ? "hijack SUCCEEDED" : "hijack FAILED")
              << ": status " << attempt.status << ", marker "
              << (attempt.body_marker_found ? "found" : "absent") << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- credscan --

struct CredScanArgs {
  std::string capture;
  std::string root;
  std::string rules_path;
  bool no_redact = false;
};

int run_credscan(const GlobalOptions& globals, const CredScanArgs& args,
                 bool wire) {
  credscan::ScanRuleSet rules = args.rules_path.empty()
                                    ? credscan::ScanRuleSet::defaults()
                                    : credscan::load_rules(args.rules_path);
  credscan::ScanReport report =
      wire ? credscan::scan_capture(args.capture, rules)
           : credscan::scan_tree(args.root, rules);

  // Findings stay unredacted in memory; masking happens at serialization.
  const bool redact = !args.no_redact;
  OutputSink sink(globals.output);
  for (const auto& finding : report.findings) {
    if (globals.jsonl() || sink.to_file()) {
      sink.line(records::credential_record(finding, redact).dump());
    } else {
      std::cout << "[" << credscan::kind_name(finding.kind) << "] "
                << finding.locator << ": " << finding.matched_key << " = "
                << (redact ? credscan::redact_value(finding.matched_value)
                           : finding.matched_value)
                << "\n";
    }
  }
  if (!globals.jsonl()) {
    std::cout << report.findings.size() << " credential finding(s), "
              << report.warnings.size() << " warning(s)\n";
    for (const auto& warning : report.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------ recon --

struct ReconArgs {
  std::string host;
  std::vector<std::uint16_t> ports;
  double timeout_s = 1.0;
  int width = 8;
};

int run_recon(const GlobalOptions& globals, const ReconArgs& args) {
  std::vector<std::uint16_t> ports = args.ports;
  if (ports.empty()) {
    for (const auto& entry : report::default_port_table()) {
      ports.push_back(entry.port);
    }
  }
  auto results = report::recon(
      args.host, ports,
      net::Millis(static_cast<std::int64_t>(args.timeout_s * 1000)),
      args.width);

  OutputSink sink(globals.output);
  for (const auto& entry : results) {
    if (globals.jsonl() || sink.to_file()) {
      sink.line(records::port_record(entry).dump());
    } else {
      std::cout << "port " << entry.port << "\t" << entry.service << "\t"
                << report::port_state_name(entry.state) << "\n";
    }
  }
  return 0;
}

// ----------------------------------------------------------------- report --

int run_report(const GlobalOptions& globals,
               const std::vector<std::string>& inputs) {
  auto findings = report::aggregate(inputs);
  OutputSink sink(globals.output);
  std::string rendered = globals.jsonl() ? report::render_jsonl(findings)
                                         : report::render_text(findings);
  if (sink.to_file()) {
    // Sink writes line-wise; pass the rendering through unchanged.
    std::string line;
    std::istringstream lines(rendered);
    while (std::getline(lines, line)) sink.line(line);
  } else {
    std::cout << rendered;
  }
  return report::report_exit_code(findings);
}

}  // namespace

int main(int argc, char** argv) {
  install_signal_handlers();

  CLI::App app{"penetration test toolkit with a bundled mock victim"};
  app.require_subcommand(1);

  GlobalOptions globals;
  app.add_option("--output", globals.output,
                 "write machine-readable output to this file");
  app.add_option("--format", globals.format, "text or jsonl")
      ->check(CLI::IsMember({"text", "jsonl"}));
  app.add_option("--seed", globals.seed, "seed for token generation");

  // victim
  VictimArgs victim_args;
  auto* victim_cmd =
      app.add_subcommand("victim", "run the mock vulnerable target")->fallthrough();
  victim_cmd->add_option("--listen", victim_args.listen, "host:port to bind");
  victim_cmd->add_flag("--no-rotate", victim_args.no_rotate,
                       "keep sessions alive after logout (unpatched mode)");
  victim_cmd->add_flag("--always-200", victim_args.always_200,
                       "answer 200 to everything except injected faults");
  victim_cmd->add_flag("--no-255-bug", victim_args.no_255_bug,
                       "disable the 255-character delete failure");
  victim_cmd->add_option("--fault", victim_args.faults,
                         "element:threshold:status fault rule (repeatable)");
  victim_cmd->add_option("--uri-limit", victim_args.uri_limit,
                         "request-target length limit (default 8192)");
  victim_cmd->add_option("--cookie-name", victim_args.cookie_name,
                         "session cookie name (default sessionid)");
  victim_cmd->add_option("--seed-fs", victim_args.seed_fs,
                         "write the credential filesystem fixture here");

  // cmd-fuzz
  CmdFuzzArgs cmd_args;
  auto* cmd_cmd =
      app.add_subcommand("cmd-fuzz", "command-line fuzzing sweeps")->fallthrough();
  cmd_cmd->add_option("--config", cmd_args.config_path,
                      "block-based fuzz config file")
      ->required();
  cmd_cmd->add_option("--adapter", cmd_args.adapter,
                      "victim:<host:port> or exec:<template>");
  cmd_cmd->add_option("--charset", cmd_args.charset,
                      "override the charset (default from file/defaults)");
  cmd_cmd->add_option("--max-len", cmd_args.max_len,
                      "override the maximum fuzz length");
  cmd_cmd->add_option("--min-len", cmd_args.min_len,
                      "start the length sweep here (default 1)");
  cmd_cmd->add_flag("--full", cmd_args.full,
                    "run the whole campaign (no desk-scale truncation)");
  cmd_cmd->add_flag("--dry-run", cmd_args.dry_run, "print plan counts only");
  cmd_cmd->add_option("--emit", cmd_args.emit_path,
                      "write the generated script here instead of running");
  cmd_cmd->add_option("--rate", cmd_args.rate,
                      "rate limit in commands per second (0 = off)");
  cmd_cmd->add_option("--workers", cmd_args.workers, "worker pool width");
  cmd_cmd->add_option("--timeout", cmd_args.timeout_s,
                      "per-command timeout in seconds");
  cmd_cmd->add_flag("--residue-check", cmd_args.residue,
                    "cleanup-delete created types and report survivors");

  // http-fuzz
  HttpFuzzArgs http_args;
  auto* http_cmd =
      app.add_subcommand("http-fuzz", "HTTP protocol fuzzing campaigns")->fallthrough();
  http_cmd->add_option("--mode", http_args.mode, "bed or sfuzz-basic")
      ->check(CLI::IsMember({"bed", "sfuzz-basic"}));
  http_cmd->add_option("-t,--target", http_args.host, "target host")
      ->required();
  http_cmd->add_option("-p,--port", http_args.port, "target port")
      ->required();
  http_cmd->add_option("-o,--delay", http_args.delay_s,
                       "seconds between fuzzing attempts");
  http_cmd->add_option("--max-len", http_args.max_len,
                       "sfuzz-basic maximum payload length (default 10024)");
  http_cmd->add_option("--timeout", http_args.timeout_s,
                       "per-request timeout in seconds (default 10)");
  http_cmd->add_option("--functions", http_args.functions,
                       "bed elements to fuzz (default: all thirteen)");
  http_cmd->add_option("--charset", http_args.charset,
                       "payload fill characters (default A)");

  // sidejack
  auto* sidejack_cmd =
      app.add_subcommand("sidejack", "session sidejacking attacks")->fallthrough();
  sidejack_cmd->require_subcommand(1);

  HarvestArgs harvest_args;
  auto* harvest_cmd = sidejack_cmd->add_subcommand(
      "harvest", "collect session cookies from captures or a proxy tap")->fallthrough();
  harvest_cmd->add_option("--capture", harvest_args.capture,
                          "read a stream-capture file");
  harvest_cmd->add_option("--proxy", harvest_args.proxy_listen,
                          "run a transparent proxy tap on host:port");
  harvest_cmd->add_option("--upstream", harvest_args.upstream,
                          "forward proxied traffic to host:port");
  harvest_cmd->add_option("--save-capture", harvest_args.save_capture,
                          "record proxied bytes to this capture file");
  harvest_cmd->add_option("--cookie-name", harvest_args.cookie_name,
                          "session cookie name (default sessionid)");
  harvest_cmd->add_option("--max-conns", harvest_args.max_conns,
                          "stop after this many proxied connections");

  ReplayArgs replay_args;
  auto* replay_cmd = sidejack_cmd->add_subcommand(
      "replay", "replay a harvested session against a URL")->fallthrough();
  replay_cmd->add_option("--store", replay_args.store, "session store file")
      ->required();
  replay_cmd->add_option("--index", replay_args.index,
                         "session index in the store (0-based)");
  replay_cmd->add_option("--url", replay_args.url, "URL to request")
      ->required();
  replay_cmd->add_option("--marker", replay_args.marker,
                         "restricted-page marker string")
      ->required();
  replay_cmd->add_option("--timeout", replay_args.timeout_s,
                         "request timeout in seconds");

  // credscan
  auto* credscan_cmd =
      app.add_subcommand("credscan", "cleartext credential scanning")->fallthrough();
  credscan_cmd->require_subcommand(1);

  CredScanArgs wire_args;
  auto* wire_cmd = credscan_cmd->add_subcommand(
      "wire", "scan captured HTTP traffic")->fallthrough();
  wire_cmd->add_option("--capture", wire_args.capture, "capture file")
      ->required();
  wire_cmd->add_option("--rules", wire_args.rules_path, "custom rule file");
  wire_cmd->add_flag("--no-redact", wire_args.no_redact,
                     "emit matched values unmasked");

  CredScanArgs fs_args;
  auto* fs_cmd =
      credscan_cmd->add_subcommand("fs", "scan a filesystem tree")->fallthrough();
  fs_cmd->add_option("--root", fs_args.root, "tree root")->required();
  fs_cmd->add_option("--rules", fs_args.rules_path, "custom rule file");
  fs_cmd->add_flag("--no-redact", fs_args.no_redact,
                   "emit matched values unmasked");

  // recon
  ReconArgs recon_args;
  auto* recon_cmd =
      app.add_subcommand("recon", "TCP connect scan of the service ports")->fallthrough();
  recon_cmd->add_option("--host", recon_args.host, "host to scan")
      ->required();
  recon_cmd->add_option("--ports", recon_args.ports,
                        "ports to probe (default: the builtin 19)");
  recon_cmd->add_option("--timeout", recon_args.timeout_s,
                        "per-port timeout in seconds");
  recon_cmd->add_option("--width", recon_args.width,
                        "concurrent probes (default 8)");

  // report
  std::vector<std::string> report_inputs;
  auto* report_cmd = app.add_subcommand(
      "report", "aggregate pipeline outputs into a findings report")->fallthrough();
  report_cmd->add_option("inputs", report_inputs,
                         "pipeline output files (jsonl)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (victim_cmd->parsed()) return run_victim(globals, victim_args);
    if (cmd_cmd->parsed()) return run_cmd_fuzz(globals, cmd_args);
    if (http_cmd->parsed()) return run_http_fuzz(globals, http_args);
    if (sidejack_cmd->parsed()) {
      if (harvest_cmd->parsed()) return run_harvest(globals, harvest_args);
      return run_replay(globals, replay_args);
    }
    if (credscan_cmd->parsed()) {
      return run_credscan(globals, wire_cmd->parsed() ? wire_args : fs_args,
                          wire_cmd->parsed());
    }
    if (recon_cmd->parsed()) return run_recon(globals, recon_args);
    if (report_cmd->parsed()) return run_report(globals, report_inputs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
