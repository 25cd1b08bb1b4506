#include "helpers.hpp"

#include "awarekit/cgw1.hpp"

#include <doctest.h>

using namespace awarekit;
using awarekit::testing::small_planted;

namespace {

struct Parts {
  nlohmann::json header;
  std::vector<std::uint8_t> payload;
};

Parts split(const std::vector<std::uint8_t>& blob) {
  const std::uint32_t len = blob[4] | (blob[5] << 8) | (blob[6] << 16) | (static_cast<std::uint32_t>(blob[7]) << 24);
  Parts p;
  p.header = nlohmann::json::parse(blob.begin() + 8, blob.begin() + 8 + len);
  p.payload.assign(blob.begin() + 8 + len, blob.end());
  return p;
}

std::vector<std::uint8_t> join(const nlohmann::json& header, const std::vector<std::uint8_t>& payload) {
  const std::string text = header.dump();
  std::vector<std::uint8_t> out{'C', 'G', 'W', '1'};
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

cgw1::FormatErrorKind kind_of(const std::vector<std::uint8_t>& blob) {
  try {
    cgw1::decode(blob);
  } catch (const cgw1::FormatError& e) {
    CHECK(e.code() == "bad_model");
    return e.kind();
  }
  FAIL("decode accepted a corrupt blob");
  return cgw1::FormatErrorKind::io;
}

}  // namespace

TEST_CASE("CGW1 round trip is bit-exact") {
  const Generator& g = small_planted().generator;
  const auto blob = cgw1::encode(g);
  const Generator back = cgw1::decode(blob);
  CHECK(back.spec() == g.spec());
  CHECK(cgw1::encode(back) == blob);
  const ConditioningInput c{sample_latent(g.spec().latent_dim, 1, 0), 2};
  CHECK(bit_equal(forward(back, c).image, forward(g, c).image));
}

TEST_CASE("CGW1 layout: magic, little-endian header length, ordered manifest") {
  const Generator& g = small_planted().generator;
  const auto blob = cgw1::encode(g);
  CHECK(std::string(blob.begin(), blob.begin() + 4) == "CGW1");
  const Parts p = split(blob);
  const auto manifest = cgw1::manifest_for(g.spec());
  REQUIRE(p.header["tensors"].size() == manifest.size());
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& t = p.header["tensors"][i];
    CHECK(t["name"] == manifest[i].name);
    CHECK(t["byte_offset"].get<std::uint64_t>() == offset);
    CHECK(manifest[i].byte_offset == offset);
    std::uint64_t count = 1;
    for (auto d : manifest[i].shape) count *= static_cast<std::uint64_t>(d);
    offset += 4 * count;
  }
  CHECK(p.payload.size() == offset);
  CHECK(cgw1::spec_from_json(p.header["spec"]) == g.spec());
  CHECK(cgw1::read_header(blob) == p.header);
}

TEST_CASE("CGW1 payload is little-endian float32") {
  const Generator& g = small_planted().generator;
  const Parts p = split(cgw1::encode(g));
  const float first = g.weights().embedding.data()[0];
  std::uint32_t bits = 0;
  std::memcpy(&bits, &first, 4);
  for (int i = 0; i < 4; ++i) CHECK(p.payload[static_cast<std::size_t>(i)] == ((bits >> (8 * i)) & 0xff));
}

TEST_CASE("CGW1 decode reports each corruption kind") {
  const auto blob = cgw1::encode(small_planted().generator);

  auto bad_magic = blob;
  bad_magic[0] = 'X';
  CHECK(kind_of(bad_magic) == cgw1::FormatErrorKind::bad_magic);
  CHECK_THROWS_WITH(cgw1::decode(bad_magic), doctest::Contains("bad magic"));

  CHECK(kind_of({'C', 'G', 'W', '1', 1}) == cgw1::FormatErrorKind::truncated_header);
  CHECK(kind_of(std::vector<std::uint8_t>(blob.begin(), blob.begin() + 20)) == cgw1::FormatErrorKind::truncated_header);

  Parts p = split(blob);
  CHECK(kind_of(join(p.header, std::vector<std::uint8_t>(p.payload.begin(), p.payload.end() - 4))) ==
        cgw1::FormatErrorKind::truncated_payload);
  CHECK_THROWS_WITH(cgw1::decode(join(p.header, std::vector<std::uint8_t>(p.payload.begin(), p.payload.end() - 4))),
                    doctest::Contains("truncated payload"));

  auto extra = p.payload;
  extra.push_back(0);
  CHECK(kind_of(join(p.header, extra)) == cgw1::FormatErrorKind::manifest_mismatch);

  auto renamed = p.header;
  renamed["tensors"][0]["name"] = "nonsense";
  CHECK(kind_of(join(renamed, p.payload)) == cgw1::FormatErrorKind::manifest_mismatch);

  auto dropped = p.header;
  dropped["tensors"].erase(dropped["tensors"].size() - 1);
  CHECK(kind_of(join(dropped, p.payload)) == cgw1::FormatErrorKind::manifest_mismatch);

  auto no_spec = p.header;
  no_spec.erase("spec");
  CHECK(kind_of(join(no_spec, p.payload)) == cgw1::FormatErrorKind::bad_header);

  std::vector<std::uint8_t> garbage{'C', 'G', 'W', '1', 3, 0, 0, 0, '{', '{', '{'};
  CHECK(kind_of(garbage) == cgw1::FormatErrorKind::bad_header);
}

TEST_CASE("CGW1 files save, load and hash") {
  const auto dir = awarekit::testing::scratch_dir("cgw1");
  const Generator& g = small_planted().generator;
  cgw1::save_weights(g, dir / "nested" / "m.cgw1");
  const Generator back = cgw1::load_weights(dir / "nested" / "m.cgw1");
  CHECK(cgw1::encode(back) == cgw1::encode(g));
  CHECK_THROWS_AS(cgw1::load_weights(dir / "missing.cgw1"), cgw1::FormatError);
  CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex({'a', 'b', 'c'}) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
