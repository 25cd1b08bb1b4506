#include "awarekit/cgw1.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace awarekit {

namespace cgw1 {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'W', '1'};

static_assert(sizeof(float) == 4);

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_floats_le(std::vector<std::uint8_t>& out, const float* data, Index n) {
  const std::size_t start = out.size();
  out.resize(start + static_cast<std::size_t>(n) * 4);
  std::memcpy(out.data() + start, data, static_cast<std::size_t>(n) * 4);
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = start; i < out.size(); i += 4) {
      std::swap(out[i], out[i + 3]);
      std::swap(out[i + 1], out[i + 2]);
    }
  }
}

void get_floats_le(const std::uint8_t* src, float* dst, Index n) {
  std::memcpy(dst, src, static_cast<std::size_t>(n) * 4);
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<std::uint8_t*>(dst);
    for (Index i = 0; i < n * 4; i += 4) {
      std::swap(b[i], b[i + 3]);
      std::swap(b[i + 1], b[i + 2]);
    }
  }
}

// Tensor pointers in manifest order.
std::vector<float*> tensor_slots(GeneratorWeights& w) {
  std::vector<float*> slots{w.embedding.data().data(), w.stem_weight.data().data(), w.stem_bias.data()};
  for (auto& b : w.blocks) {
    slots.insert(slots.end(), {b.gamma_weight.data().data(), b.gamma_bias.data(), b.beta_weight.data().data(),
                               b.beta_bias.data(), b.conv_weight.data().data(), b.conv_bias.data()});
  }
  slots.push_back(w.output_weight.data().data());
  slots.push_back(w.output_bias.data());
  return slots;
}

}  // namespace

FormatError::FormatError(FormatErrorKind kind, const std::string& message)
    : Error("bad_model", message), kind_(kind) {}

nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["num_classes"] = spec.num_classes;
  j["latent_dim"] = spec.latent_dim;
  j["embedding_dim"] = spec.embedding_dim;
  j["initial_channels"] = spec.initial_channels;
  j["initial_resolution"] = GeneratorSpec::kInitialResolution;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : spec.blocks) blocks.push_back({b.in_channels, b.out_channels});
  j["blocks"] = blocks;
  j["output_channels"] = GeneratorSpec::kOutputChannels;
  return j;
}

GeneratorSpec spec_from_json(const nlohmann::json& j) {
  GeneratorSpec s;
  try {
    s.num_classes = j.at("num_classes").get<Index>();
    s.latent_dim = j.at("latent_dim").get<Index>();
    s.embedding_dim = j.at("embedding_dim").get<Index>();
    s.initial_channels = j.at("initial_channels").get<Index>();
    for (const auto& b : j.at("blocks")) s.blocks.push_back({b.at(0).get<Index>(), b.at(1).get<Index>()});
    if (j.value("initial_resolution", GeneratorSpec::kInitialResolution) != GeneratorSpec::kInitialResolution ||
        j.value("output_channels", GeneratorSpec::kOutputChannels) != GeneratorSpec::kOutputChannels) {
      throw FormatError(FormatErrorKind::bad_header, "unsupported initial resolution or output channel count");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::bad_header, std::string("malformed generator spec: ") + e.what());
  }
  try {
    s.validate();
  } catch (const ShapeError& e) {
    throw FormatError(FormatErrorKind::bad_header, e.what());
  }
  return s;
}

std::vector<ManifestEntry> manifest_for(const GeneratorSpec& spec) {
  const Index cd = spec.conditioning_dim();
  std::vector<ManifestEntry> m;
  m.push_back({"embedding", {spec.num_classes, spec.embedding_dim}, 0});
  m.push_back({"stem.weight", {spec.initial_channels * 16, cd}, 0});
  m.push_back({"stem.bias", {spec.initial_channels * 16}, 0});
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const auto& s = spec.blocks[b];
    const std::string p = "blocks." + std::to_string(b) + ".";
    m.push_back({p + "gamma.weight", {s.in_channels, cd}, 0});
    m.push_back({p + "gamma.bias", {s.in_channels}, 0});
    m.push_back({p + "beta.weight", {s.in_channels, cd}, 0});
    m.push_back({p + "beta.bias", {s.in_channels}, 0});
    m.push_back({p + "conv.weight", {s.out_channels, s.in_channels, 3, 3}, 0});
    m.push_back({p + "conv.bias", {s.out_channels}, 0});
  }
  m.push_back({"output.weight", {GeneratorSpec::kOutputChannels, spec.blocks.back().out_channels, 3, 3}, 0});
  m.push_back({"output.bias", {GeneratorSpec::kOutputChannels}, 0});
  std::uint64_t offset = 0;
  for (auto& e : m) {
    e.byte_offset = offset;
    offset += static_cast<std::uint64_t>(Tensor::element_count(e.shape)) * 4;
  }
  return m;
}

std::vector<std::uint8_t> encode(const Generator& g) {
  const auto manifest = manifest_for(g.spec());
  nlohmann::ordered_json header;
  header["spec"] = spec_to_json(g.spec());
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& e : manifest) {
    tensors.push_back({{"name", e.name}, {"shape", e.shape}, {"byte_offset", e.byte_offset}});
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32_le(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());

  GeneratorWeights copy = g.weights();
  const auto slots = tensor_slots(copy);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    put_floats_le(out, slots[i], Tensor::element_count(manifest[i].shape));
  }
  return out;
}

nlohmann::json read_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::bad_magic, "bad magic: not a CGW1 file");
  }
  if (bytes.size() < 8) throw FormatError(FormatErrorKind::truncated_header, "truncated header length field");
  const std::uint32_t len = get_u32_le(bytes.data() + 4);
  if (bytes.size() - 8 < len) throw FormatError(FormatErrorKind::truncated_header, "truncated JSON header");
  try {
    return nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::bad_header, std::string("malformed JSON header: ") + e.what());
  }
}

Generator decode(const std::vector<std::uint8_t>& bytes) {
  const nlohmann::json header = read_header(bytes);
  const std::size_t payload_start = 8 + get_u32_le(bytes.data() + 4);
  const std::uint64_t payload_size = bytes.size() - payload_start;

  if (!header.contains("spec") || !header.contains("tensors") || !header["tensors"].is_array()) {
    throw FormatError(FormatErrorKind::bad_header, "header must contain 'spec' and a 'tensors' array");
  }
  const GeneratorSpec spec = spec_from_json(header["spec"]);
  const auto expected = manifest_for(spec);

  std::vector<ManifestEntry> declared;
  try {
    for (const auto& t : header["tensors"]) {
      declared.push_back({t.at("name").get<std::string>(), t.at("shape").get<std::vector<Index>>(),
                          t.at("byte_offset").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::bad_header, std::string("malformed tensor manifest: ") + e.what());
  }

  std::uint64_t declared_end = 0;
  for (const auto& d : declared) {
    for (Index dim : d.shape) {
      if (dim <= 0) throw FormatError(FormatErrorKind::manifest_mismatch, "tensor '" + d.name + "' has a bad shape");
    }
    declared_end = std::max<std::uint64_t>(
        declared_end, d.byte_offset + static_cast<std::uint64_t>(Tensor::element_count(d.shape)) * 4);
  }
  if (declared_end > payload_size) {
    throw FormatError(FormatErrorKind::truncated_payload,
                      "truncated payload: manifest declares " + std::to_string(declared_end) + " bytes, file has " +
                          std::to_string(payload_size));
  }
  if (declared.size() != expected.size()) {
    throw FormatError(FormatErrorKind::manifest_mismatch, "manifest tensor count does not match the spec");
  }
  std::uint64_t expected_end = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (declared[i].name != expected[i].name || declared[i].shape != expected[i].shape) {
      throw FormatError(FormatErrorKind::manifest_mismatch,
                        "manifest entry '" + declared[i].name + "' inconsistent with the spec (expected '" +
                            expected[i].name + "')");
    }
    expected_end += static_cast<std::uint64_t>(Tensor::element_count(expected[i].shape)) * 4;
  }
  if (payload_size != expected_end) {
    throw FormatError(FormatErrorKind::manifest_mismatch, "payload length " + std::to_string(payload_size) +
                                                              " inconsistent with manifest (" +
                                                              std::to_string(expected_end) + " bytes)");
  }

  GeneratorWeights w = GeneratorWeights::zeros(spec);
  const auto slots = tensor_slots(w);
  for (std::size_t i = 0; i < declared.size(); ++i) {
    get_floats_le(bytes.data() + payload_start + declared[i].byte_offset, slots[i],
                  Tensor::element_count(declared[i].shape));
  }
  try {
    return Generator(spec, std::move(w));
  } catch (const ShapeError& e) {
    throw FormatError(FormatErrorKind::manifest_mismatch, e.what());
  }
}

void save_weights(const Generator& g, const std::filesystem::path& path) { write_file(path, encode(g)); }

Generator load_weights(const std::filesystem::path& path) { return decode(read_file(path)); }

}  // namespace cgw1

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cgw1::FormatError(cgw1::FormatErrorKind::io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

}  // namespace awarekit
