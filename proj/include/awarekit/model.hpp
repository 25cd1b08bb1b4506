#pragma once

#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace awarekit {

inline constexpr const char* kToolVersion = "0.1.0";

/// A generator together with the identity of the CGW1 bytes it came from.
struct LoadedModel {
  Generator generator;
  std::string model_hash;  // SHA-256 of the file bytes
  nlohmann::json header;   // parsed CGW1 header
};

LoadedModel load_model(const std::filesystem::path& path);
LoadedModel model_from_bytes(const std::vector<std::uint8_t>& bytes);

/// {tool_version, seed, samples, model_hash}
nlohmann::ordered_json provenance(std::uint64_t seed, std::int64_t samples, const std::string& model_hash);

}  // namespace awarekit
