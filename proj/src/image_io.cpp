#include "awarekit/image_io.hpp"

#include "awarekit/error.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <string>

namespace awarekit {

namespace {

// format is a PNG_FORMAT_* constant; rows are tightly packed 8-bit samples.
std::vector<std::uint8_t> write_png(Index width, Index height, png_uint_32 format,
                                    const std::vector<std::uint8_t>& rows, const std::uint8_t* colormap = nullptr,
                                    png_uint_32 colormap_entries = 0) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  image.colormap_entries = colormap_entries;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, rows.data(), 0, colormap)) {
    throw Error("png", image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, rows.data(), 0, colormap)) {
    throw Error("png", image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::uint8_t to_byte(float v) {
  const float u = std::clamp((v + 1.0f) * 0.5f, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(u * 255.0f));
}

std::vector<std::uint8_t> encode_png_rgb(const Tensor& image) {
  image.require_rank3("encode_png_rgb");
  if (image.channels() != 3) throw ShapeError("encode_png_rgb: expected 3 channels");
  const Index h = image.height(), w = image.width();
  std::vector<std::uint8_t> rows(static_cast<std::size_t>(h * w * 3));
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      for (Index c = 0; c < 3; ++c) rows[static_cast<std::size_t>((y * w + x) * 3 + c)] = to_byte(image.at(c, y, x));
    }
  }
  return write_png(w, h, PNG_FORMAT_RGB, rows);
}

std::vector<std::uint8_t> encode_png_difference(const Tensor& map) {
  map.require_rank3("encode_png_difference");
  const Index h = map.height(), w = map.width();
  std::vector<std::uint8_t> rows(static_cast<std::size_t>(h * w));
  for (Index i = 0; i < h * w; ++i) {
    const float u = std::clamp(map.data()[i] * 0.5f, 0.0f, 1.0f);
    rows[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(u * 255.0f));
  }
  return write_png(w, h, PNG_FORMAT_GRAY, rows);
}

const std::uint8_t (&label_palette())[kPaletteSize][3] {
  static const std::uint8_t palette[kPaletteSize][3] = {
      {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},  {245, 130, 48}, {145, 30, 180},
      {70, 240, 240}, {240, 50, 230}, {210, 245, 60}, {250, 190, 212}, {0, 128, 128}, {220, 190, 255},
      {170, 110, 40}, {255, 250, 200}, {128, 0, 0},   {0, 0, 128}};
  return palette;
}

std::vector<std::uint8_t> encode_png_labels(const std::vector<Index>& labels, Index height, Index width) {
  if (static_cast<Index>(labels.size()) != height * width) throw ShapeError("encode_png_labels: label count mismatch");
  std::vector<std::uint8_t> rows(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kPaletteSize) throw bad_param("label outside the palette");
    rows[i] = static_cast<std::uint8_t>(labels[i]);
  }
  return write_png(width, height, PNG_FORMAT_RGB_COLORMAP, rows, &label_palette()[0][0], kPaletteSize);
}

std::vector<std::uint8_t> encode_ppm(const Tensor& image) {
  image.require_rank3("encode_ppm");
  if (image.channels() != 3) throw ShapeError("encode_ppm: expected 3 channels");
  const Index h = image.height(), w = image.width();
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      for (Index c = 0; c < 3; ++c) out.push_back(to_byte(image.at(c, y, x)));
    }
  }
  return out;
}

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) throw Error("png", image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  DecodedPng out;
  out.width = image.width;
  out.height = image.height;
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error("png", image.message);
  }
  return out;
}

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63]);
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    const char* p = std::strchr(kAlphabet, ch);
    if (!p || ch == '\0') throw bad_param("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(p - kAlphabet);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace awarekit
