#pragma once

#include "awarekit/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace awarekit {

/// 8-bit quantization of a [-1, 1] value.
std::uint8_t to_byte(float v);

/// RGB PNG of a 3 x H x W image in [-1, 1].
std::vector<std::uint8_t> encode_png_rgb(const Tensor& image);
/// Grayscale PNG of a 1 x H x W difference map; values are mapped v / 2 * 255 (a difference of 2 is white).
std::vector<std::uint8_t> encode_png_difference(const Tensor& map);
/// Indexed-colour PNG of a label map with the fixed palette.
std::vector<std::uint8_t> encode_png_labels(const std::vector<Index>& labels, Index height, Index width);
/// Binary PPM (P6) of a 3 x H x W image in [-1, 1].
std::vector<std::uint8_t> encode_ppm(const Tensor& image);

struct DecodedPng {
  Index width = 0;
  Index height = 0;
  Index channels = 0;  // after palette expansion: 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> pixels;
};

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes);

inline constexpr int kPaletteSize = 16;
const std::uint8_t (&label_palette())[kPaletteSize][3];

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace awarekit
