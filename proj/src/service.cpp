#include "awarekit/service.hpp"

#include "awarekit/awareness.hpp"
#include "awarekit/error.hpp"
#include "awarekit/image_io.hpp"
#include "awarekit/interventions.hpp"
#include "awarekit/random.hpp"
#include "awarekit/segmentation.hpp"

#include <httplib.h>

namespace awarekit::service {

namespace {

Error bad_request(const std::string& m) { return Error("bad_request", m); }

const nlohmann::json& field(const nlohmann::json& body, const char* key) {
  if (!body.is_object()) throw bad_request("request body must be a JSON object");
  if (!body.contains(key)) throw bad_request(std::string("missing field '") + key + "'");
  return body[key];
}

std::int64_t int_field(const nlohmann::json& body, const char* key) {
  const auto& v = field(body, key);
  if (!v.is_number_integer()) throw bad_request(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t int_field(const nlohmann::json& body, const char* key, std::int64_t fallback) {
  return body.is_object() && body.contains(key) ? int_field(body, key) : fallback;
}

std::uint64_t seed_field(const nlohmann::json& body) {
  const std::int64_t s = int_field(body, "seed", 0);
  if (s < 0) throw bad_request("seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

std::int64_t samples_field(const nlohmann::json& body) {
  const std::int64_t n = int_field(body, "samples", 256);
  if (n < 2 || n > kMaxSamples) throw bad_param("samples must be in [2, " + std::to_string(kMaxSamples) + "]");
  return n;
}

void check_class(const Generator& g, std::int64_t c) {
  if (c < 0 || c >= g.spec().num_classes) {
    throw bad_class("class " + std::to_string(c) + " out of range [0, " + std::to_string(g.spec().num_classes) + ")");
  }
}

std::string png64(const Tensor& image) { return base64_encode(encode_png_rgb(image)); }

nlohmann::ordered_json trace_summary(const ForwardTrace& trace) {
  auto blocks = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < trace.blocks.size(); ++b) {
    const auto& t = trace.blocks[b];
    const double active = (t.post_relu.data().array() > 0.0f).cast<double>().mean();
    blocks.push_back({{"block", b},
                      {"class_id", t.class_id},
                      {"probe", std::vector<float>(t.probe.data(), t.probe.data() + t.probe.size())},
                      {"active_fraction", active}});
  }
  return blocks;
}

}  // namespace

nlohmann::ordered_json error_body(const std::string& code, const std::string& message) {
  return {{"code", code}, {"message", message}};
}

int status_for(const std::string& code) {
  static const char* client[] = {"bad_request", "bad_class", "bad_block", "bad_channel", "bad_param", "not_found"};
  for (const char* c : client) {
    if (code == c) return code == "not_found" ? 404 : 400;
  }
  return 500;
}

nlohmann::ordered_json model_summary(const LoadedModel& model) {
  const auto& s = model.generator.spec();
  nlohmann::ordered_json j;
  j["spec"] = model.header.at("spec");
  j["num_blocks"] = s.num_blocks();
  auto blocks = nlohmann::ordered_json::array();
  for (Index b = 0; b < s.num_blocks(); ++b) {
    blocks.push_back({{"block", b}, {"channels", s.block_channels(b)}, {"resolution", s.block_resolution(b)}});
  }
  j["blocks"] = blocks;
  j["output_resolution"] = s.output_resolution();
  j["default_mix_block"] = default_mix_block(s);
  j["provenance"] = provenance(0, 0, model.model_hash);
  return j;
}

nlohmann::ordered_json awareness(const LoadedModel& model, std::int64_t class_id, std::int64_t samples,
                                 std::uint64_t seed) {
  check_class(model.generator, class_id);
  if (samples < 2 || samples > kMaxSamples) throw bad_param("samples must be in [2, " + std::to_string(kMaxSamples) + "]");
  const AwarenessTable t = estimate_awareness(model.generator, class_id, {samples, seed});
  nlohmann::ordered_json j = to_json(t);
  j["provenance"] = provenance(seed, samples, model.model_hash);
  return j;
}

nlohmann::ordered_json generate(const LoadedModel& model, const nlohmann::json& body) {
  const Generator& g = model.generator;
  const std::int64_t class_id = int_field(body, "class");
  check_class(g, class_id);
  const std::uint64_t seed = seed_field(body);
  InterventionPlan plan;
  if (body.contains("interventions")) {
    const auto& list = body["interventions"];
    if (!list.is_array()) throw bad_request("'interventions' must be an array");
    for (const auto& e : list) {
      const Index block = int_field(e, "block");
      const Index channel = int_field(e, "channel");
      const auto& mode = field(e, "mode");
      if (!mode.is_string()) throw bad_request("'mode' must be a string");
      const std::string m = mode.get<std::string>();
      float magnitude = 0.0f;
      if (e.contains("magnitude")) {
        if (!e["magnitude"].is_number()) throw bad_request("'magnitude' must be a number");
        magnitude = e["magnitude"].get<float>();
      }
      if (m == "zero") {
        plan.zero(block, {channel});
      } else if (m == "multiply") {
        plan.multiply(block, {channel}, magnitude);
      } else if (m == "add") {
        plan.add(block, {channel}, magnitude);
      } else {
        throw bad_request("unknown intervention mode '" + m + "'");
      }
    }
  }
  const ForwardResult r = forward(g, {sample_latent(g.spec().latent_dim, seed, 0), class_id}, plan);
  nlohmann::ordered_json j;
  j["image_png_base64"] = png64(r.image);
  j["trace_summary"] = trace_summary(r.trace);
  j["provenance"] = provenance(seed, 1, model.model_hash);
  return j;
}

nlohmann::ordered_json hybridize(const LoadedModel& model, const nlohmann::json& body) {
  const Generator& g = model.generator;
  HybridizationRequest req;
  req.input_class = int_field(body, "input_class");
  req.reference_class = int_field(body, "reference_class");
  check_class(g, req.input_class);
  check_class(g, req.reference_class);
  const std::uint64_t seed = seed_field(body);
  const std::int64_t samples = samples_field(body);
  const Index mix_block = int_field(body, "mix_block", default_mix_block(g.spec()));
  if (mix_block < 0 || mix_block >= g.spec().num_blocks()) throw bad_block("mix block out of range");
  const Index k = int_field(body, "k", 10);
  req.z = sample_latent(g.spec().latent_dim, seed, 0);
  req.mix_blocks = {mix_block};
  req.channels = {hybrid_channels(estimate_awareness(g, req.reference_class, {samples, seed}), mix_block, k)};
  const HybridResult r = hybridize(g, req);
  nlohmann::ordered_json j;
  j["hybrid_png_base64"] = png64(r.hybrid);
  j["input_png_base64"] = png64(r.input);
  j["reference_png_base64"] = png64(r.reference);
  j["style_mix_png_base64"] =
      png64(style_mixing_baseline(g, req.z, req.input_class, req.reference_class, mix_block + 1));
  j["mix_block"] = mix_block;
  j["channels"] = req.channels.front();
  j["provenance"] = provenance(seed, samples, model.model_hash);
  return j;
}

nlohmann::ordered_json segment(const LoadedModel& model, const nlohmann::json& body) {
  const Generator& g = model.generator;
  SegmentRequest req;
  req.class_id = int_field(body, "class");
  check_class(g, req.class_id);
  req.seed = seed_field(body);
  req.k = int_field(body, "k", 3);
  req.samples = samples_field(body);
  if (body.contains("layers")) {
    if (!body["layers"].is_string()) throw bad_request("'layers' must be a string");
    req.layers = parse_layer_selection(body["layers"].get<std::string>());
  }
  if (body.contains("weighted")) {
    if (!body["weighted"].is_boolean()) throw bad_request("'weighted' must be a boolean");
    req.weighted = body["weighted"].get<bool>();
  }
  const SegmentationResult r = segment_class(g, req);
  nlohmann::ordered_json j;
  j["labels_png_base64"] = base64_encode(encode_png_labels(r.labels, r.height, r.width));
  j["counts"] = r.counts;
  j["k"] = r.k;
  j["iterations"] = r.iterations;
  j["inertia"] = r.inertia;
  j["provenance"] = provenance(req.seed, req.samples, model.model_hash);
  return j;
}

struct HttpServer::Impl {
  Impl(const LoadedModel& m, ServerOptions o) : model(m), options(std::move(o)) {}
  const LoadedModel& model;
  ServerOptions options;
  httplib::Server server;
  int port = -1;
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    send_json(res, 200, fn());
  } catch (const Error& e) {
    send_json(res, status_for(e.code()), error_body(e.code(), e.what()));
  } catch (const nlohmann::json::exception& e) {
    send_json(res, 400, error_body("bad_request", e.what()));
  } catch (const std::invalid_argument& e) {
    send_json(res, 400, error_body("bad_request", e.what()));
  } catch (const std::exception& e) {
    send_json(res, 500, error_body("internal", e.what()));
  }
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw bad_request(std::string("malformed JSON body: ") + e.what());
  }
}

std::int64_t query_int(const httplib::Request& req, const char* key, std::int64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw bad_request(std::string("query parameter '") + key + "' must be an integer");
  }
}

}  // namespace

HttpServer::HttpServer(const LoadedModel& model, ServerOptions options)
    : impl_(std::make_unique<Impl>(model, std::move(options))) {
  auto& srv = impl_->server;
  const LoadedModel& m = impl_->model;
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  srv.Get("/api/model", [&m](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return model_summary(m); });
  });
  srv.Get(R"(/api/awareness/(-?\d+))", [&m](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::int64_t c = std::stoll(req.matches[1].str());
      const std::int64_t seed = query_int(req, "seed", 0);
      if (seed < 0) throw bad_request("seed must be non-negative");
      return awareness(m, c, query_int(req, "samples", 256), static_cast<std::uint64_t>(seed));
    });
  });
  srv.Get(R"(/api/awareness/(.*))", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 400, error_body("bad_class", "class must be an integer"));
  });
  srv.Post("/api/generate", [&m](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return generate(m, parse_body(req)); });
  });
  srv.Post("/api/hybridize", [&m](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return hybridize(m, parse_body(req)); });
  });
  srv.Post("/api/segment", [&m](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return segment(m, parse_body(req)); });
  });
  if (!impl_->options.static_dir.empty() && !srv.set_mount_point("/", impl_->options.static_dir)) {
    throw Error("bad_param", "static directory '" + impl_->options.static_dir + "' does not exist");
  }
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(error_body(res.status == 404 ? "not_found" : "http_error", "request failed").dump(), "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (impl_->port < 0) throw Error("port_in_use", "cannot bind " + o.host + ":" + std::to_string(o.port));
  return impl_->port;
}

void HttpServer::run() {
  if (impl_->port < 0) bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace awarekit::service
