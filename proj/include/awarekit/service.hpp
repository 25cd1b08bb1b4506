#pragma once

#include "awarekit/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace awarekit::service {

/// Request handlers behind the HTTP API. Each throws awarekit::Error whose code becomes the error body's
/// "code"; malformed bodies raise "bad_request".
nlohmann::ordered_json model_summary(const LoadedModel& model);
nlohmann::ordered_json awareness(const LoadedModel& model, std::int64_t class_id, std::int64_t samples,
                                 std::uint64_t seed);
nlohmann::ordered_json generate(const LoadedModel& model, const nlohmann::json& body);
nlohmann::ordered_json hybridize(const LoadedModel& model, const nlohmann::json& body);
nlohmann::ordered_json segment(const LoadedModel& model, const nlohmann::json& body);

nlohmann::ordered_json error_body(const std::string& code, const std::string& message);

/// HTTP status for an error code: 400 for request problems, 500 otherwise.
int status_for(const std::string& code);

inline constexpr std::int64_t kMaxSamples = 100000;

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

class HttpServer {
 public:
  HttpServer(const LoadedModel& model, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port. Throws Error("port_in_use").
  int bind();
  /// Serves until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace awarekit::service
