#include "helpers.hpp"

#include "awarekit/error.hpp"
#include "awarekit/image_io.hpp"

#include <doctest.h>

using namespace awarekit;
using awarekit::testing::random_tensor;

TEST_CASE("byte quantization maps [-1, 1] onto [0, 255]") {
  CHECK(to_byte(-1.0f) == 0);
  CHECK(to_byte(1.0f) == 255);
  CHECK(to_byte(-3.0f) == 0);
  CHECK(to_byte(3.0f) == 255);
  CHECK(to_byte(0.0f) == 128);
}

TEST_CASE("RGB PNG round trip preserves quantized pixels") {
  const Tensor img = activate(random_tensor({3, 8, 6}, 1), Activation::tanh);
  const auto png = encode_png_rgb(img);
  CHECK(png == encode_png_rgb(img));
  const DecodedPng d = decode_png(png);
  REQUIRE(d.width == 6);
  REQUIRE(d.height == 8);
  REQUIRE(d.channels == 3);
  for (Index y = 0; y < 8; ++y) {
    for (Index x = 0; x < 6; ++x) {
      for (Index c = 0; c < 3; ++c) CHECK(d.pixels[static_cast<std::size_t>((y * 6 + x) * 3 + c)] == to_byte(img.at(c, y, x)));
    }
  }
  CHECK_THROWS_AS(encode_png_rgb(random_tensor({1, 4, 4}, 1)), ShapeError);
}

TEST_CASE("difference and label PNGs") {
  Tensor diff({1, 2, 2});
  diff.data() << 0.0f, 1.0f, 2.0f, 4.0f;
  const DecodedPng d = decode_png(encode_png_difference(diff));
  CHECK(d.channels == 1);
  CHECK(d.pixels == std::vector<std::uint8_t>{0, 128, 255, 255});

  const std::vector<Index> labels{0, 1, 2, 15};
  const DecodedPng l = decode_png(encode_png_labels(labels, 2, 2));
  REQUIRE(l.channels == 3);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int c = 0; c < 3; ++c) CHECK(l.pixels[i * 3 + c] == label_palette()[labels[i]][c]);
  }
  CHECK_THROWS(encode_png_labels({0, 16, 0, 0}, 2, 2));
  CHECK_THROWS(encode_png_labels({0, 1}, 2, 2));
}

TEST_CASE("PPM header and payload") {
  const Tensor img = Tensor::constant({3, 2, 3}, 1.0f);
  const auto ppm = encode_ppm(img);
  const std::string header = "P6\n3 2\n255\n";
  CHECK(std::string(ppm.begin(), ppm.begin() + static_cast<std::ptrdiff_t>(header.size())) == header);
  CHECK(ppm.size() == header.size() + 18);
  CHECK(ppm.back() == 255);
}

TEST_CASE("decode_png rejects garbage") { CHECK_THROWS_AS(decode_png({1, 2, 3, 4}), Error); }

TEST_CASE("base64 round trip and known vectors") {
  CHECK(base64_encode({}) == "");
  CHECK(base64_encode({'f'}) == "Zg==");
  CHECK(base64_encode({'f', 'o'}) == "Zm8=");
  CHECK(base64_encode({'f', 'o', 'o', 'b', 'a', 'r'}) == "Zm9vYmFy");
  std::vector<std::uint8_t> all(256);
  std::iota(all.begin(), all.end(), std::uint8_t{0});
  CHECK(base64_decode(base64_encode(all)) == all);
  CHECK_THROWS(base64_decode("Zm9v!"));
}
