#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>

#include <openssl/evp.h>
#include <png.h>

#include "kernels_common.hpp"

namespace crowdgen {

ImageBuffer::ImageBuffer(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) fail(ErrorKind::kValidation, "image dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * h * 4, 0);
}

namespace {

ImageBuffer make_logo() {
  // Filled disc with a light ring.
  ImageBuffer img(12, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      const double d = std::hypot(x - 5.5, y - 5.5);
      std::uint8_t* p = img.at(x, y);
      if (d <= 3.5) { p[0] = 200; p[1] = 40; p[2] = 40; p[3] = 255; }
      else if (d <= 5.5) { p[0] = 250; p[1] = 250; p[2] = 250; p[3] = 255; }
    }
  return img;
}

ImageBuffer make_watermark() {
  // Translucent white diagonal stripes.
  ImageBuffer img(24, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 24; ++x)
      if ((x + y) % 4 < 2) {
        std::uint8_t* p = img.at(x, y);
        p[0] = p[1] = p[2] = 255;
        p[3] = 128;
      }
  return img;
}

ImageBuffer make_text() {
  // Three dark word blocks on one line.
  ImageBuffer img(20, 6);
  for (int y = 1; y < 5; ++y)
    for (int x = 0; x < 20; ++x)
      if (x % 7 != 6) {
        std::uint8_t* p = img.at(x, y);
        p[0] = p[1] = p[2] = 20;
        p[3] = 255;
      }
  return img;
}

}  // namespace

const ImageBuffer& overlay_asset(std::string_view name) {
  static const ImageBuffer logo = make_logo();
  static const ImageBuffer watermark = make_watermark();
  static const ImageBuffer text = make_text();
  if (name == "logo") return logo;
  if (name == "watermark") return watermark;
  if (name == "text") return text;
  throw Error(ErrorKind::kValidation, "unknown overlay asset '" + std::string(name) + "'",
              {"overlay.asset"});
}

std::pair<int, int> overlay_origin(const ImageBuffer& img, int w, int h, double x, double y) {
  return {static_cast<int>(std::lround(x * (img.width - w))),
          static_cast<int>(std::lround(y * (img.height - h)))};
}

std::pair<double, double> text_anchor_position(ops::Margin margin, double offset) {
  switch (margin) {
    case ops::Margin::kTop: return {offset, 0.0};
    case ops::Margin::kBottom: return {offset, 1.0};
    case ops::Margin::kLeft: return {0.0, offset};
    case ops::Margin::kRight: return {1.0, offset};
  }
  return {offset, 1.0};
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(ErrorKind::kValidation, std::string("invalid PNG: ") + image.message);
  image.format = PNG_FORMAT_RGBA;
  if (image.width == 0 || image.height == 0 || image.width > 16384 || image.height > 16384) {
    png_image_free(&image);
    fail(ErrorKind::kValidation, "PNG dimensions out of range");
  }
  ImageBuffer out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorKind::kValidation, "invalid PNG: " + msg);
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  detail::require_valid(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr))
    fail(ErrorKind::kIo, std::string("PNG encode failed: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr))
    fail(ErrorKind::kIo, std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "short write to " + path.string());
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  for (char c : text)
    if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
  if (clean.size() % 4 != 0) fail(ErrorKind::kValidation, "base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(clean.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) fail(ErrorKind::kValidation, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  if (!clean.empty() && clean.back() == '=') --len;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

}  // namespace crowdgen
