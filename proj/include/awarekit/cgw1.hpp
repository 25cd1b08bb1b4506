#pragma once

#include "awarekit/error.hpp"
#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace awarekit {

/// CGW1 container:
///   bytes 0..3   "CGW1"
///   bytes 4..7   header length L (uint32, little-endian)
///   bytes 8..8+L UTF-8 JSON header {"spec": ..., "tensors": [{name, shape, byte_offset}, ...]}
///   remainder    little-endian float32 payloads; byte_offset is relative to the payload start.
namespace cgw1 {

enum class FormatErrorKind { bad_magic, truncated_header, bad_header, truncated_payload, manifest_mismatch, io };

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& message);
  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

struct ManifestEntry {
  std::string name;
  std::vector<Index> shape;
  std::uint64_t byte_offset = 0;
};

nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec);
GeneratorSpec spec_from_json(const nlohmann::json& j);

/// Canonical tensor order and names used in the manifest.
std::vector<ManifestEntry> manifest_for(const GeneratorSpec& spec);

std::vector<std::uint8_t> encode(const Generator& g);
Generator decode(const std::vector<std::uint8_t>& bytes);

void save_weights(const Generator& g, const std::filesystem::path& path);
Generator load_weights(const std::filesystem::path& path);

/// Parsed JSON header of a CGW1 blob (used by the serve API's model summary).
nlohmann::json read_header(const std::vector<std::uint8_t>& bytes);

}  // namespace cgw1

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace awarekit
