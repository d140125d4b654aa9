#include <set>

#include "doctest.h"
#include "stackprobe/errors.hpp"
#include "stackprobe/victim.hpp"
#include "test_util.hpp"

using namespace stackprobe;
using testutil::http_get;
using testutil::http_post_form;
using testutil::login;
using testutil::TempDir;
using testutil::VictimFixture;

TEST_CASE("login issues a cleartext session cookie") {
  VictimFixture fx;
  auto resp = http_post_form(fx.host(), fx.port(), "/login",
                             {{"username", "Test_User_1"},
                              {"password", "password1"}});
  CHECK(resp.status == 200);
  const std::string* cookie = resp.header("Set-Cookie");
  REQUIRE(cookie != nullptr);
  CHECK(cookie->rfind("sessionid=", 0) == 0);
  std::string token = cookie->substr(10, cookie->find(';') - 10);
  CHECK(token.size() == 32);
  CHECK(token.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("wrong password is rejected without a cookie") {
  VictimFixture fx;
  auto resp = http_post_form(fx.host(), fx.port(), "/login",
                             {{"username", "Test_User_1"},
                              {"password", "wrong"}});
  CHECK(resp.status == 401);
  CHECK(resp.header("Set-Cookie") == nullptr);
}

TEST_CASE("restricted pages demand a valid session") {
  VictimFixture fx;
  CHECK(http_get(fx.host(), fx.port(), "/restricted/images").status == 403);

  auto token = login(fx.host(), fx.port(), "Test_User_1", "password1");
  REQUIRE(token.has_value());
  auto resp = http_get(fx.host(), fx.port(), "/restricted/images",
                       {{"Cookie", "sessionid=" + *token}});
  CHECK(resp.status == 200);
  CHECK(resp.body.find("Images & Snapshots") != std::string::npos);
  CHECK(resp.body.find("restricted images data for Test_User_1") !=
        std::string::npos);
}

TEST_CASE("session lifecycle: valid between login and logout, then rotated") {
  VictimFixture fx;
  auto token = login(fx.host(), fx.port(), "admin", "adminpassword");
  REQUIRE(token.has_value());
  CHECK(fx.server().session_valid(*token));

  auto out = http_post_form(fx.host(), fx.port(), "/logout", {},
                            {{"Cookie", "sessionid=" + *token}});
  CHECK(out.status == 200);
  CHECK_FALSE(fx.server().session_valid(*token));
  CHECK(http_get(fx.host(), fx.port(), "/restricted/images",
                 {{"Cookie", "sessionid=" + *token}})
            .status == 403);
}

TEST_CASE("no-rotate mode keeps sessions usable after logout") {
  victim::VictimConfig cfg;
  cfg.rotate_on_logout = false;
  VictimFixture fx(cfg);
  auto token = login(fx.host(), fx.port(), "Test_User_1", "password1");
  REQUIRE(token.has_value());
  http_post_form(fx.host(), fx.port(), "/logout", {},
                 {{"Cookie", "sessionid=" + *token}});
  auto resp = http_get(fx.host(), fx.port(), "/restricted/volumes",
                       {{"Cookie", "sessionid=" + *token}});
  CHECK(resp.status == 200);
}

TEST_CASE("same seed reproduces the same token sequence") {
  victim::VictimConfig cfg;
  cfg.seed = 99;
  std::string first;
  {
    VictimFixture fx(cfg);
    first = *login(fx.host(), fx.port(), "admin", "adminpassword");
  }
  {
    VictimFixture fx(cfg);
    CHECK(*login(fx.host(), fx.port(), "admin", "adminpassword") == first);
  }
}

TEST_CASE("type delete silently fails only at name length 255") {
  VictimFixture fx;
  for (int len = 250; len <= 260; ++len) {
    std::string name(static_cast<std::size_t>(len), 'A');
    auto created = http_post_form(fx.host(), fx.port(), "/types",
                                  {{"name", name}});
    CHECK(created.status == 201);
    auto deleted = stackprobe::http::simple_request(
        fx.host(), fx.port(),
        [&] {
          stackprobe::http::Request req;
          req.method = "DELETE";
          req.target = "/types/" + stackprobe::http::url_encode(name);
          return req;
        }());
    CHECK(deleted.status == 200);  // success reported for every length
  }
  auto names = fx.server().type_names();
  REQUIRE(names.size() == 1);
  CHECK(names[0].size() == 255);
}

TEST_CASE("bug-disabled victim deletes every length") {
  victim::VictimConfig cfg;
  cfg.type_delete_bug = false;
  VictimFixture fx(cfg);
  for (int len : {254, 255, 256}) {
    std::string name(static_cast<std::size_t>(len), 'z');
    http_post_form(fx.host(), fx.port(), "/types", {{"name", name}});
    stackprobe::http::Request req;
    req.method = "DELETE";
    req.target = "/types/" + stackprobe::http::url_encode(name);
    CHECK(stackprobe::http::simple_request(fx.host(), fx.port(), req)
              .status == 200);
  }
  CHECK(fx.server().type_names().empty());
}

TEST_CASE("deleting a missing type is a 404") {
  VictimFixture fx;
  stackprobe::http::Request req;
  req.method = "DELETE";
  req.target = "/types/absent";
  CHECK(stackprobe::http::simple_request(fx.host(), fx.port(), req).status ==
        404);
}

TEST_CASE("duplicate create conflicts, missing name is a bad request") {
  VictimFixture fx;
  CHECK(http_post_form(fx.host(), fx.port(), "/types", {{"name", "dup"}})
            .status == 201);
  CHECK(http_post_form(fx.host(), fx.port(), "/types", {{"name", "dup"}})
            .status == 409);
  CHECK(http_post_form(fx.host(), fx.port(), "/types", {}).status == 400);
}

TEST_CASE("fault rule fires strictly above its threshold") {
  victim::VictimConfig cfg;
  cfg.fault_rules.push_back({"Authorization", 1000, 500});
  VictimFixture fx(cfg);

  auto over = http_get(fx.host(), fx.port(), "/",
                       {{"Authorization", std::string(1024, 'A')}});
  CHECK(over.status == 500);
  auto under = http_get(fx.host(), fx.port(), "/",
                        {{"Authorization", std::string(999, 'A')}});
  CHECK(under.status == 200);
}

TEST_CASE("no fault rules means no injected faults") {
  VictimFixture fx;
  auto resp = http_get(fx.host(), fx.port(), "/",
                       {{"Authorization", std::string(5000, 'A')}});
  CHECK(resp.status == 200);
}

TEST_CASE("fault rules on methods check the request target length") {
  victim::VictimConfig cfg;
  cfg.fault_rules.push_back({"GET", 100, 503});
  VictimFixture fx(cfg);
  CHECK(http_get(fx.host(), fx.port(), "/" + std::string(200, 'x')).status ==
        503);
  CHECK(http_get(fx.host(), fx.port(), "/short").status == 404);
}

TEST_CASE("overlong request targets draw 414") {
  VictimFixture fx;
  auto resp = http_get(fx.host(), fx.port(),
                       "/" + std::string(9000, 'A'));
  CHECK(resp.status == 414);
}

TEST_CASE("uri limit sweep: 414 strictly above the limit") {
  victim::VictimConfig cfg;
  cfg.uri_length_limit = 64;
  VictimFixture fx(cfg);
  // target of exactly 64 bytes passes, 65 does not
  CHECK(http_get(fx.host(), fx.port(), "/" + std::string(63, 'a')).status ==
        404);
  CHECK(http_get(fx.host(), fx.port(), "/" + std::string(64, 'a')).status ==
        414);
}

TEST_CASE("always-200 mode flattens every answer except injected faults") {
  victim::VictimConfig cfg;
  cfg.always_200 = true;
  cfg.fault_rules.push_back({"Authorization", 1000, 500});
  VictimFixture fx(cfg);

  CHECK(http_get(fx.host(), fx.port(), "/nowhere").status == 200);
  CHECK(http_get(fx.host(), fx.port(), "/" + std::string(9000, 'A')).status ==
        200);
  CHECK(http_get(fx.host(), fx.port(), "/",
                 {{"Authorization", std::string(2000, 'A')}})
            .status == 500);

  // Malformed request line: still 200 in this mode.
  net::Socket sock = net::connect_to(fx.host(), fx.port());
  sock.send_all("garbage\r\n\r\n");
  sock.shutdown_send();
  std::string data;
  while (sock.recv_some(data) == net::Socket::RecvStatus::data) {
  }
  CHECK(data.find("HTTP/1.1 200") == 0);
}

TEST_CASE("malformed request lines draw 400 in default mode") {
  VictimFixture fx;
  net::Socket sock = net::connect_to(fx.host(), fx.port());
  sock.send_all("garbage\r\n\r\n");
  sock.shutdown_send();
  std::string data;
  while (sock.recv_some(data) == net::Socket::RecvStatus::data) {
  }
  CHECK(data.find("HTTP/1.1 400") == 0);
}

TEST_CASE("credential fixture writes the seven expected paths") {
  TempDir dir("victim-fixture");
  auto written = victim::seed_credential_fixture(dir.path().string());
  const std::vector<std::string> expected = {
      "devstack/localrc",
      "etc/nova/api-paste.ini",
      "etc/cinder/api-paste.ini",
      "var/cache/cinder/cacert.pem",
      "var/cache/cinder/signing_cert.pem",
      "var/cache/glance/registry/cacert.pem",
      "var/cache/glance/registry/signing_cert.pem",
  };
  CHECK(written == expected);
  for (const auto& rel : expected) {
    CHECK(std::filesystem::exists(dir.path() / rel));
  }
  CHECK(testutil::read_file(dir.file("devstack/localrc"))
            .find("OS_USERNAME=admin") != std::string::npos);
}

TEST_CASE("fault rule parser accepts element:threshold:status") {
  auto rule = victim::parse_fault_rule("Authorization:1000:500");
  CHECK(rule.element == "Authorization");
  CHECK(rule.threshold == 1000);
  CHECK(rule.status == 500);
  CHECK_THROWS_AS(victim::parse_fault_rule("nope"), Error);
  CHECK_THROWS_AS(victim::parse_fault_rule("A:x:500"), Error);
  CHECK_THROWS_AS(victim::parse_fault_rule("A:10:9000"), Error);
}
