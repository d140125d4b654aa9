#include <chrono>

#include "doctest.h"
#include "stackprobe/cmd_runner.hpp"
#include "stackprobe/errors.hpp"
#include "stackprobe/fuzz_config.hpp"
#include "stackprobe/victim.hpp"
#include "test_util.hpp"

using namespace stackprobe;
using fuzz::CommandStream;
using fuzz::ConfigDefaults;
using fuzz::FuzzConfig;
using fuzz::parse_config_text;
using runner::ExecAdapter;
using runner::Outcome;
using runner::RateLimitPolicy;
using runner::SweepOptions;
using runner::VictimTypeAdapter;
using testutil::VictimFixture;

namespace {

// One-case config that creates volume types named by the fuzz string.
FuzzConfig create_config(const std::string& charset, int max_len) {
  return parse_config_text(
      "# volume type create sweep\n"
      "cinder --os_username admin --os_password adminpassword type-create "
      "FUZZ\n--\n",
      "cinder", ConfigDefaults{charset, max_len});
}

}  // namespace

TEST_CASE("a four-command sweep creates four types") {
  VictimFixture fx;
  VictimTypeAdapter adapter(fx.host(), fx.port());
  FuzzConfig cfg = create_config("xy", 2);
  CommandStream stream(cfg);
  auto records = runner::run_sweep(stream, adapter);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CHECK(r.outcome == Outcome::accepted);
    CHECK(r.detail == "HTTP 201");
  }
  CHECK(fx.server().type_names().size() == 4);
  // Records preserve generation order.
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].index == i);
  }
}

TEST_CASE("the 250..260 sweep leaves exactly the 255-character residue") {
  VictimFixture fx;
  VictimTypeAdapter adapter(fx.host(), fx.port());
  FuzzConfig cfg = create_config("A", 260);

  // Create types with names 250..260 characters long.
  CommandStream create(cfg, 250, 260);
  auto records = runner::run_sweep(create, adapter);
  CHECK(records.size() == 11);

  // Cleanup pass: delete everything that was created; every delete
  // reports success.
  std::vector<std::string> deleted;
  for (const auto& r : records) {
    std::string name(static_cast<std::size_t>(r.command.length),
                     r.command.fill);
    CHECK(adapter.delete_name(name, std::chrono::milliseconds(3000)) == 200);
    deleted.push_back(name);
  }

  auto survivors = runner::residue_check(adapter, deleted);
  REQUIRE(survivors.size() == 1);
  CHECK(survivors[0].size() == 255);
}

TEST_CASE("the bug-disabled victim leaves no residue") {
  victim::VictimConfig vcfg;
  vcfg.type_delete_bug = false;
  VictimFixture fx(vcfg);
  VictimTypeAdapter adapter(fx.host(), fx.port());
  FuzzConfig cfg = create_config("A", 260);

  CommandStream create(cfg, 250, 260);
  auto records = runner::run_sweep(create, adapter);
  std::vector<std::string> deleted;
  for (const auto& r : records) {
    std::string name(static_cast<std::size_t>(r.command.length),
                     r.command.fill);
    adapter.delete_name(name, std::chrono::milliseconds(3000));
    deleted.push_back(name);
  }
  CHECK(runner::residue_check(adapter, deleted).empty());
}

TEST_CASE("residue check with an empty expected set is empty") {
  VictimFixture fx;
  VictimTypeAdapter adapter(fx.host(), fx.port());
  CHECK(runner::residue_check(adapter, {}).empty());
}

TEST_CASE("delete-verb commands map to the delete endpoint") {
  VictimFixture fx;
  VictimTypeAdapter adapter(fx.host(), fx.port());

  // Create two types, then sweep type-delete over the same fuzz space.
  FuzzConfig created = create_config("k", 2);
  CommandStream create(created);
  runner::run_sweep(create, adapter);
  REQUIRE(fx.server().type_names().size() == 2);

  FuzzConfig del = parse_config_text("cinder type-delete FUZZ\n--\n",
                                     "cinder", ConfigDefaults{"k", 2});
  CommandStream delete_stream(del);
  auto records = runner::run_sweep(delete_stream, adapter);
  CHECK(records.size() == 2);
  CHECK(records[0].outcome == Outcome::accepted);
  CHECK(fx.server().type_names().empty());
}

TEST_CASE("commands without a recognized verb are declined, not fatal") {
  VictimFixture fx;
  VictimTypeAdapter adapter(fx.host(), fx.port());
  FuzzConfig cfg = parse_config_text("nova add-fixed-ip FUZZ FUZZ\n--\n",
                                     "nova", ConfigDefaults{"A", 1});
  CommandStream stream(cfg);
  auto records = runner::run_sweep(stream, adapter);
  REQUIRE(records.size() == 1);
  CHECK(records[0].outcome == Outcome::rejected);
  CHECK(records[0].detail.find("type-create") != std::string::npos);
}

TEST_CASE("an unreachable adapter aborts the sweep before it starts") {
  net::Listener throwaway("127.0.0.1", 0);
  std::uint16_t dead_port = throwaway.port();
  throwaway.close();
  VictimTypeAdapter adapter("127.0.0.1", dead_port);
  FuzzConfig cfg = create_config("A", 1);
  CommandStream stream(cfg);
  CHECK_THROWS_AS(runner::run_sweep(stream, adapter),
                  AdapterUnavailableError);
}

TEST_CASE("the exec adapter maps exit codes onto outcomes") {
  FuzzConfig cfg = create_config("A", 2);

  SUBCASE("exit 0 is accepted") {
    ExecAdapter ok("true {}");
    CommandStream stream(cfg);
    auto records = runner::run_sweep(stream, ok);
    REQUIRE(records.size() == 2);
    CHECK(records[0].outcome == Outcome::accepted);
    CHECK(records[0].detail == "exit 0");
  }
  SUBCASE("nonzero exit is rejected, and the sweep still completes") {
    ExecAdapter bad("false {}");
    CommandStream stream(cfg);
    auto records = runner::run_sweep(stream, bad);
    REQUIRE(records.size() == 2);
    CHECK(records[0].outcome == Outcome::rejected);
    CHECK(records[1].outcome == Outcome::rejected);
  }
  SUBCASE("overrunning commands are killed and recorded as timeouts") {
    ExecAdapter slow("sleep 5 && true {}");
    CommandStream stream(cfg, 1, 1);
    SweepOptions options;
    options.command_timeout = std::chrono::milliseconds(150);
    auto start = std::chrono::steady_clock::now();
    auto records = runner::run_sweep(stream, slow, options);
    auto elapsed = std::chrono::steady_clock::now() - start;
    REQUIRE(records.size() == 1);
    CHECK(records[0].outcome == Outcome::timeout);
    CHECK(elapsed < std::chrono::seconds(3));
  }
}

TEST_CASE("quoting survives hostile characters in rendered commands") {
  // The rendered command is passed through the shell exactly once.
  FuzzConfig cfg = parse_config_text("payload FUZZ\n--\n", "q",
                                     ConfigDefaults{"';`$", 2});
  ExecAdapter echo("printf '%s' {} >/dev/null");
  CommandStream stream(cfg);
  auto records = runner::run_sweep(stream, echo);
  REQUIRE(records.size() == 8);
  for (const auto& r : records) {
    CHECK(r.outcome == Outcome::accepted);
  }
}

TEST_CASE("rate limiting stretches the sweep to the policy arithmetic") {
  FuzzConfig cfg = create_config("ab", 10);  // 20 commands
  ExecAdapter fast("true {}");
  SweepOptions options;
  options.policy = RateLimitPolicy{true, 5, std::chrono::milliseconds(100)};

  CommandStream stream(cfg);
  auto start = std::chrono::steady_clock::now();
  auto records = runner::run_sweep(stream, fast, options);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  REQUIRE(records.size() == 20);
  // 20 commands at 5 per 100 ms: the fourth window opens at t=300ms.
  CHECK(elapsed.count() >= 300);
}

TEST_CASE("a disabled policy does not throttle") {
  FuzzConfig cfg = create_config("ab", 10);
  ExecAdapter fast("true {}");
  CommandStream stream(cfg);
  auto start = std::chrono::steady_clock::now();
  runner::run_sweep(stream, fast);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  CHECK(elapsed.count() < 5000);
}

TEST_CASE("worker pools preserve generation order and outcomes") {
  VictimFixture fx;
  FuzzConfig cfg = create_config("mn", 12);  // 24 distinct names

  VictimTypeAdapter adapter(fx.host(), fx.port());
  CommandStream sequential(cfg);
  auto one = runner::run_sweep(sequential, adapter);

  victim::VictimConfig vcfg2;
  VictimFixture fx2(vcfg2);
  VictimTypeAdapter adapter2(fx2.host(), fx2.port());
  SweepOptions options;
  options.workers = 4;
  CommandStream parallel(cfg);
  auto four = runner::run_sweep(parallel, adapter2, options);

  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].index == four[i].index);
    CHECK(one[i].command.rendered == four[i].command.rendered);
    CHECK(one[i].outcome == four[i].outcome);
  }
}
