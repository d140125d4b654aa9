#include <algorithm>
#include <thread>

#include "doctest.h"
#include "stackprobe/errors.hpp"
#include "stackprobe/http_fuzzer.hpp"
#include "stackprobe/victim.hpp"
#include "test_util.hpp"

using namespace stackprobe;
using httpfuzz::bed_default_functions;
using httpfuzz::bed_payloads;
using httpfuzz::classify;
using httpfuzz::HttpExchange;
using httpfuzz::HttpFuzzCampaign;
using httpfuzz::Label;
using httpfuzz::PacketCounter;
using testutil::VictimFixture;

namespace {

HttpExchange with_status(int status) {
  HttpExchange ex;
  ex.outcome = HttpExchange::Outcome::status;
  ex.status = status;
  return ex;
}

HttpExchange with_outcome(HttpExchange::Outcome outcome) {
  HttpExchange ex;
  ex.outcome = outcome;
  return ex;
}

bool has_label(const std::vector<Label>& labels, Label want) {
  return std::find(labels.begin(), labels.end(), want) != labels.end();
}

void check_conservation(const httpfuzz::CampaignResult& result) {
  CHECK(result.counter.request_total == result.exchanges.size());
  std::uint64_t responses = 0;
  std::uint64_t outcomes = 0;
  for (const auto& [_, n] : result.counter.responses_by_status) responses += n;
  for (const auto& [_, n] : result.counter.outcomes) outcomes += n;
  CHECK(result.counter.response_total == responses);
  CHECK(responses + outcomes == result.exchanges.size());
  std::uint64_t class_sum = 0;
  for (int klass = 1; klass <= 5; ++klass) {
    class_sum += result.counter.class_count(klass);
  }
  CHECK(class_sum == result.counter.response_total);
  std::uint64_t method_sum = 0;
  for (const auto& [_, n] : result.counter.requests_by_method) method_sum += n;
  CHECK(method_sum == result.counter.request_total);
}

}  // namespace

TEST_CASE("the default function list is the thirteen fuzzable elements") {
  const std::vector<std::string> expected = {
      "HEAD", "GET", "POST", "User-Agent", "Host", "Accept", "Connection",
      "Referer", "Authorization", "From", "Charge-to", "If-Modified-Since",
      "Pragma"};
  CHECK(bed_default_functions() == expected);
}

TEST_CASE("the payload ladder is six lengths plus two format probes") {
  auto payloads = bed_payloads();
  REQUIRE(payloads.size() == 8);
  const std::vector<std::size_t> lengths = {16, 64, 256, 1024, 4096, 10024};
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    CHECK(payloads[i] == std::string(lengths[i], 'A'));
  }
  CHECK(payloads[6] == "%s%s%s%s");
  CHECK(payloads[7] == "%n%n%n%n");
}

TEST_CASE("sfuzz ladder is powers of two capped by the exact maximum") {
  CHECK(httpfuzz::sfuzz_basic_lengths(1) == std::vector<int>{1});
  CHECK(httpfuzz::sfuzz_basic_lengths(8) == std::vector<int>{1, 2, 4, 8});
  auto full = httpfuzz::sfuzz_basic_lengths(10024);
  REQUIRE(full.size() == 15);
  CHECK(full.front() == 1);
  CHECK(full[13] == 8192);
  CHECK(full.back() == 10024);
}

TEST_CASE("classification: 2xx normal, 4xx client error, 5xx anomalous") {
  CHECK(classify(with_status(200)) == std::vector<Label>{Label::normal});
  CHECK(classify(with_status(302)) == std::vector<Label>{Label::normal});
  CHECK(classify(with_status(404)) ==
        std::vector<Label>{Label::client_error});

  auto labels_500 = classify(with_status(500));
  CHECK(has_label(labels_500, Label::server_error));
  CHECK(has_label(labels_500, Label::anomaly));
  CHECK(httpfuzz::is_anomaly(with_status(500)));

  CHECK(classify(with_outcome(HttpExchange::Outcome::timeout)) ==
        std::vector<Label>{Label::anomaly});
  CHECK(httpfuzz::is_anomaly(
      with_outcome(HttpExchange::Outcome::connection_reset)));
  CHECK_FALSE(httpfuzz::is_anomaly(with_status(400)));
}

TEST_CASE("bed sweep against the always-200 victim: 104 clean exchanges") {
  victim::VictimConfig cfg;
  cfg.always_200 = true;
  VictimFixture fx(cfg);

  HttpFuzzCampaign campaign;
  campaign.mode = httpfuzz::FuzzMode::bed;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.delay = std::chrono::milliseconds(0);
  campaign.timeout = std::chrono::milliseconds(3000);

  auto result = httpfuzz::run_bed(campaign);
  CHECK(result.exchanges.size() == 13 * 8);
  CHECK(result.counter.anomaly_count == 0);
  CHECK(result.counter.class_count(2) == 13 * 8);
  CHECK(result.counter.requests_by_method.at("GET") == 11 * 8);
  CHECK(result.counter.requests_by_method.at("HEAD") == 8);
  CHECK(result.counter.requests_by_method.at("POST") == 8);
  check_conservation(result);
}

TEST_CASE("an empty function list yields an empty campaign") {
  HttpFuzzCampaign campaign;
  campaign.functions.clear();
  campaign.target_port = 1;  // never contacted
  auto result = httpfuzz::run_bed(campaign);
  CHECK(result.exchanges.empty());
  CHECK(result.counter.request_total == 0);
  CHECK(result.counter.response_total == 0);
  CHECK(result.counter.anomaly_count == 0);
}

TEST_CASE("a fault rule on Authorization produces 5xx anomalies") {
  victim::VictimConfig cfg;
  cfg.always_200 = true;
  cfg.fault_rules.push_back({"Authorization", 1000, 500});
  VictimFixture fx(cfg);

  HttpFuzzCampaign campaign;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.timeout = std::chrono::milliseconds(3000);

  auto result = httpfuzz::run_bed(campaign);
  CHECK(result.counter.anomaly_count >= 1);
  CHECK(result.counter.class_count(5) >= 1);
  // Authorization payloads over 1000 bytes: 1024, 4096, 10024.
  CHECK(result.counter.class_count(5) == 3);
  check_conservation(result);
}

TEST_CASE("sfuzz-basic with max length 1 sends one probe per method") {
  victim::VictimConfig cfg;
  VictimFixture fx(cfg);

  HttpFuzzCampaign campaign;
  campaign.mode = httpfuzz::FuzzMode::sfuzz_basic;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.max_payload_len = 1;
  campaign.timeout = std::chrono::milliseconds(3000);

  auto result = httpfuzz::run_sfuzz_basic(campaign);
  REQUIRE(result.exchanges.size() == 3);
  CHECK(result.counter.requests_by_method.at("GET") == 1);
  CHECK(result.counter.requests_by_method.at("HEAD") == 1);
  CHECK(result.counter.requests_by_method.at("POST") == 1);
  check_conservation(result);
}

TEST_CASE("sfuzz-basic in default mode draws 414 over the URI limit") {
  VictimFixture fx;

  HttpFuzzCampaign campaign;
  campaign.mode = httpfuzz::FuzzMode::sfuzz_basic;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.timeout = std::chrono::milliseconds(3000);

  auto result = httpfuzz::run_sfuzz_basic(campaign);
  CHECK(result.exchanges.size() == 45);  // 15 lengths x 3 methods
  // Targets of length 8193 and 10025 exceed the 8192 limit: two per method.
  CHECK(result.counter.responses_by_status.at(414) == 6);
  CHECK(result.counter.class_count(4) >= 6);
  check_conservation(result);

  // Every exchange is classified into exactly one bucket.
  for (const auto& ex : result.exchanges) {
    CHECK(ex.has_status());
  }
}

TEST_CASE("counter text rendering mirrors the analyzer category tree") {
  HttpFuzzCampaign campaign;
  VictimFixture fx;
  campaign.mode = httpfuzz::FuzzMode::sfuzz_basic;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.max_payload_len = 4;
  campaign.timeout = std::chrono::milliseconds(3000);
  auto result = httpfuzz::run_sfuzz_basic(campaign);

  std::string text = httpfuzz::counter_to_text(result.counter);
  CHECK(text.find("Total HTTP Packets") != std::string::npos);
  CHECK(text.find("HTTP Request Packets") != std::string::npos);
  CHECK(text.find("HTTP Response Packets") != std::string::npos);
  CHECK(text.find("4xx: Client Error") != std::string::npos);
  CHECK(text.find("404 Not Found") != std::string::npos);
  CHECK(text.find("???: broken") != std::string::npos);
  // Rendering is deterministic.
  CHECK(text == httpfuzz::counter_to_text(result.counter));
}

TEST_CASE("inter-request delay is honored between consecutive starts") {
  victim::VictimConfig cfg;
  cfg.always_200 = true;
  VictimFixture fx(cfg);

  HttpFuzzCampaign campaign;
  campaign.target_host = fx.host();
  campaign.target_port = fx.port();
  campaign.functions = {"GET"};  // 8 requests
  campaign.delay = std::chrono::milliseconds(120);
  campaign.timeout = std::chrono::milliseconds(3000);

  auto result = httpfuzz::run_bed(campaign);
  REQUIRE(result.exchanges.size() == 8);
  for (std::size_t i = 1; i < result.exchanges.size(); ++i) {
    auto span = std::chrono::duration_cast<std::chrono::milliseconds>(
        result.exchanges[i].started_at - result.exchanges[i - 1].started_at);
    CHECK(span.count() >= 120 - 50);
  }
}

TEST_CASE("a target that drops every connection cannot crash the campaign") {
  // Standalone listener that accepts and immediately closes.
  std::atomic<bool> stop{false};
  net::Listener listener("127.0.0.1", 0);
  std::uint16_t port = listener.port();
  std::thread dropper([&] {
    while (!stop.load()) {
      auto sock = listener.accept(stop, net::Millis(20));
      if (sock) sock->close();
    }
  });

  HttpFuzzCampaign campaign;
  campaign.target_host = "127.0.0.1";
  campaign.target_port = port;
  campaign.functions = {"GET", "Host"};
  campaign.timeout = std::chrono::milliseconds(500);

  auto result = httpfuzz::run_bed(campaign);
  stop.store(true);
  dropper.join();

  CHECK(result.exchanges.size() == 2 * 8);
  CHECK(result.counter.anomaly_count == 2 * 8);
  CHECK(result.counter.response_total == 0);
  check_conservation(result);
}

TEST_CASE("an unreachable target aborts the campaign up front") {
  net::Listener throwaway("127.0.0.1", 0);
  std::uint16_t dead_port = throwaway.port();
  throwaway.close();  // nothing listens here now

  HttpFuzzCampaign campaign;
  campaign.target_host = "127.0.0.1";
  campaign.target_port = dead_port;
  campaign.timeout = std::chrono::milliseconds(300);
  CHECK_THROWS_AS(httpfuzz::run_bed(campaign), TargetUnreachableError);
}
