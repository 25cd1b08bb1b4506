#include "helpers.hpp"

#include "awarekit/cgw1.hpp"
#include "awarekit/image_io.hpp"
#include "awarekit/model.hpp"
#include "awarekit/service.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <thread>

using namespace awarekit;
using awarekit::testing::small_planted;

namespace {

const LoadedModel& loaded() {
  static const LoadedModel m = model_from_bytes(cgw1::encode(small_planted().generator));
  return m;
}

/// Runs an HttpServer on an ephemeral port for the lifetime of the fixture.
struct RunningServer {
  service::HttpServer server{loaded(), {"127.0.0.1", 0, ""}};
  int port = server.bind();
  std::thread thread{[this] { server.run(); }};
  httplib::Client client{"127.0.0.1", port};

  RunningServer() {
    client.set_read_timeout(120, 0);
    for (int i = 0; i < 200; ++i) {
      if (client.Get("/api/model")) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL("server did not start");
  }
  ~RunningServer() {
    server.stop();
    thread.join();
  }

  nlohmann::json post(const std::string& path, const nlohmann::json& body, int expected_status = 200) {
    auto res = client.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return nlohmann::json::parse(res->body);
  }
  nlohmann::json get(const std::string& path, int expected_status = 200) {
    auto res = client.Get(path);
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return nlohmann::json::parse(res->body);
  }
};

}  // namespace

TEST_CASE("status mapping and error bodies") {
  CHECK(service::status_for("bad_request") == 400);
  CHECK(service::status_for("bad_class") == 400);
  CHECK(service::status_for("bad_param") == 400);
  CHECK(service::status_for("not_found") == 404);
  CHECK(service::status_for("internal") == 500);
  const auto body = service::error_body("bad_class", "nope");
  CHECK(body["code"] == "bad_class");
  CHECK(body["message"] == "nope");
}

TEST_CASE("handlers validate their inputs without a server") {
  const LoadedModel& m = loaded();
  CHECK_THROWS_AS(service::awareness(m, 4, 16, 0), Error);
  CHECK_THROWS_AS(service::awareness(m, 0, 1, 0), Error);
  CHECK_THROWS_AS(service::generate(m, {{"class", "zero"}}), Error);
  CHECK_THROWS_AS(service::generate(m, {{"class", 0}, {"interventions", {{{"block", 0}, {"channel", 99}}}}}), Error);
  CHECK_THROWS_AS(service::segment(m, {{"class", 0}, {"k", 40}}), Error);
  const auto summary = service::model_summary(m);
  CHECK(summary["spec"] == m.header["spec"]);
  CHECK(summary["output_resolution"] == m.generator.spec().output_resolution());
}

TEST_CASE("HTTP API end to end") {
  RunningServer s;

  SUBCASE("model summary mirrors the CGW1 header") {
    const auto j = s.get("/api/model");
    CHECK(j["spec"] == loaded().header["spec"]);
    CHECK(j["blocks"].size() == 2);
    CHECK(j["provenance"]["model_hash"] == loaded().model_hash);
  }

  SUBCASE("generate is deterministic and decodes to the output resolution") {
    const nlohmann::json body = {{"class", 1}, {"seed", 9}};
    const auto a = s.post("/api/generate", body);
    const auto b = s.post("/api/generate", body);
    CHECK(a["image_png_base64"] == b["image_png_base64"]);
    const DecodedPng png = decode_png(base64_decode(a["image_png_base64"].get<std::string>()));
    CHECK(png.width == loaded().generator.spec().output_resolution());
    CHECK(a["trace_summary"].size() == 2);

    nlohmann::json zeroed = body;
    zeroed["interventions"] = {{{"block", 0}, {"channel", 3}, {"mode", "zero"}}};
    const auto c = s.post("/api/generate", zeroed);
    nlohmann::json neutral = body;
    neutral["interventions"] = {{{"block", 0}, {"channel", 3}, {"mode", "multiply"}, {"magnitude", 1.0}}};
    CHECK(s.post("/api/generate", neutral)["image_png_base64"] == a["image_png_base64"]);
    CHECK(c.contains("image_png_base64"));
  }

  SUBCASE("errors carry a code and a 4xx status") {
    CHECK(s.post("/api/generate", {{"class", 99}, {"seed", 1}}, 400)["code"] == "bad_class");
    CHECK(s.post("/api/generate", {{"class", 0}, {"interventions", {{{"block", 7}, {"channel", 0}, {"mode", "zero"}}}}}, 400)["code"] ==
          "bad_block");
    auto res = s.client.Post("/api/generate", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["code"] == "bad_request");
    CHECK(s.get("/api/awareness/abc", 400)["code"] == "bad_class");
    CHECK(s.get("/api/awareness/-1", 400)["code"] == "bad_class");
    CHECK(s.get("/api/nothing", 404)["code"] == "not_found");
  }

  SUBCASE("awareness, hybridize and segment") {
    const auto aw = s.get("/api/awareness/2?samples=64&seed=3");
    CHECK(aw["provenance"]["samples"] == 64);
    CHECK(aw == s.get("/api/awareness/2?samples=64&seed=3"));

    const auto hy = s.post("/api/hybridize", {{"input_class", 0}, {"reference_class", 2}, {"seed", 1}, {"samples", 64}, {"k", 3}});
    CHECK(hy["channels"].size() == 3);
    for (const char* key : {"hybrid_png_base64", "input_png_base64", "reference_png_base64", "style_mix_png_base64"}) {
      CHECK(hy.contains(key));
    }

    const auto seg = s.post("/api/segment", {{"class", 1}, {"seed", 2}, {"k", 3}, {"samples", 64}, {"weighted", false}});
    CHECK(seg["k"] == 3);
    Index total = 0;
    for (const auto& c : seg["counts"]) total += c.get<Index>();
    const Index out = loaded().generator.spec().output_resolution();
    CHECK(total == out * out);
  }

  SUBCASE("concurrent requests return identical results") {
    const nlohmann::json body = {{"class", 3}, {"seed", 5}};
    const std::string expected = s.post("/api/generate", body)["image_png_base64"];
    std::vector<std::thread> workers;
    std::vector<std::string> results(4);
    const int port = s.port;
    for (std::size_t i = 0; i < results.size(); ++i) {
      workers.emplace_back([&, i] {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(120, 0);
        auto res = c.Post("/api/generate", body.dump(), "application/json");
        if (res && res->status == 200) results[i] = nlohmann::json::parse(res->body)["image_png_base64"];
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& r : results) CHECK(r == expected);
  }
}

TEST_CASE("binding a port that is already taken fails with port_in_use") {
  service::HttpServer first(loaded(), {"127.0.0.1", 0, ""});
  const int port = first.bind();
  service::HttpServer second(loaded(), {"127.0.0.1", port, ""});
  try {
    second.bind();
    FAIL("expected port_in_use");
  } catch (const Error& e) {
    CHECK(e.code() == "port_in_use");
  }
  CHECK_THROWS_AS(service::HttpServer(loaded(), {"127.0.0.1", 0, "/nonexistent/static"}), Error);
}
