#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace crowdgen {

/// Row-major RGBA, 8 bits per channel, sRGB.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h);

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4;
  }
  bool operator==(const ImageBuffer&) const = default;
};

enum class HueMode { kWrap, kClip };

namespace ops {
struct Hue { double h = 0; HueMode mode = HueMode::kWrap; };
struct Saturation { double f = 1; };
struct Lightness { double d = 0; };
struct Exposure { double ev = 0; };
struct Tint { double t = 0; };
struct Temperature { double w = 0; };
struct ColorBalance { double r = 1, g = 1, b = 1; };
enum class Tone { kFall, kSpring };
struct TonePreset { Tone name = Tone::kFall; double strength = 0; };
struct Overlay { std::string asset = "logo"; double x = 0, y = 0, alpha = 1; };
struct Vignette { double cx = 0.5, cy = 0.5, radius = 0.5, strength = 0; };
struct SetHue { double h = 0; };
enum class Margin { kTop, kBottom, kLeft, kRight };
struct TextAnchor { Margin margin = Margin::kBottom; double offset = 0.5; };
}  // namespace ops

using OpKind = std::variant<ops::Hue, ops::Saturation, ops::Lightness, ops::Exposure, ops::Tint,
                            ops::Temperature, ops::ColorBalance, ops::TonePreset, ops::Overlay,
                            ops::Vignette, ops::SetHue, ops::TextAnchor>;

/// Identifier of the op ("hue", "color_balance", ...).
std::string_view op_name(const OpKind& op);

/// {"op": name, <params>}; parsing rejects unknown ops and out-of-domain values.
nlohmann::json to_json(const OpKind& op);
OpKind op_from_json(const nlohmann::json& doc);

/// Throws Error(kValidation) when a parameter is outside its domain.
void validate_op(const OpKind& op);

/// Parallel kernel (OpenMP, lookup tables where the op is per-channel).
ImageBuffer apply(const ImageBuffer& img, const OpKind& op);

/// Straightforward per-pixel reference; apply() must match it exactly.
ImageBuffer apply_serial(const ImageBuffer& img, const OpKind& op);

/// Shift added to the 8-bit hue channel: int(h * 255).
int hue_shift(double h);

/// Hue in [0,1) of a "#RRGGBB" color; 0 for grays.
double hex_to_hue(std::string_view hex);

/// 8-bit HSV as produced by the clip-mode conversion (same arithmetic as an
/// RGB->HSV image mode conversion with 8-bit channels).
struct Hsv8 { std::uint8_t h, s, v; };
Hsv8 rgb_to_hsv8(std::uint8_t r, std::uint8_t g, std::uint8_t b);
void hsv8_to_rgb(Hsv8 hsv, std::uint8_t out[3]);

/// 8-bit hue on a 256-step circle, as read back by wrap-mode ops. Grays map
/// to 0.
std::uint8_t wrap_hue8(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Built-in overlay sprites: "logo", "watermark", "text".
const ImageBuffer& overlay_asset(std::string_view name);

/// Top-left pixel where an overlay of size (w, h) lands for normalized (x, y).
std::pair<int, int> overlay_origin(const ImageBuffer& img, int w, int h, double x, double y);

/// Normalized overlay position used by text_anchor.
std::pair<double, double> text_anchor_position(ops::Margin margin, double offset);

ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace crowdgen
