#include "awarekit/model.hpp"

#include "awarekit/cgw1.hpp"

namespace awarekit {

LoadedModel model_from_bytes(const std::vector<std::uint8_t>& bytes) {
  Generator g = cgw1::decode(bytes);
  return {std::move(g), sha256_hex(bytes), cgw1::read_header(bytes)};
}

LoadedModel load_model(const std::filesystem::path& path) { return model_from_bytes(read_file(path)); }

nlohmann::ordered_json provenance(std::uint64_t seed, std::int64_t samples, const std::string& model_hash) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  j["samples"] = samples;
  j["model_hash"] = model_hash;
  return j;
}

}  // namespace awarekit
