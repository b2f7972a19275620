// OpenMP kernels. Per-channel ops go through 256-entry lookup tables; the
// rest share the reference pixel functions and parallelize over rows.

#include <array>
#include <vector>

#include "kernels_common.hpp"
#include "pixel.hpp"

namespace crowdgen {

namespace {

using Lut = std::array<std::uint8_t, 256>;

template <class F>
Lut make_lut(F&& f) {
  Lut lut{};
  for (int v = 0; v < 256; ++v) lut[v] = f(static_cast<std::uint8_t>(v));
  return lut;
}

ImageBuffer apply_luts(const ImageBuffer& img, const Lut& r, const Lut& g, const Lut& b) {
  ImageBuffer out(img.width, img.height);
  const std::int64_t n = static_cast<std::int64_t>(img.width) * img.height;
  const std::uint8_t* src = img.pixels.data();
  std::uint8_t* dst = out.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t o = i * 4;
    dst[o] = r[src[o]];
    dst[o + 1] = g[src[o + 1]];
    dst[o + 2] = b[src[o + 2]];
    dst[o + 3] = src[o + 3];
  }
  return out;
}

template <class F>
ImageBuffer map_rows(const ImageBuffer& img, F&& f) {
  ImageBuffer out(img.width, img.height);
  const int w = img.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t* in = img.at(0, y);
    std::uint8_t* o = out.at(0, y);
    for (int x = 0; x < w; ++x) f(in + 4 * x, o + 4 * x);
  }
  return out;
}

ImageBuffer overlay_omp(const ImageBuffer& img, const ImageBuffer& asset, double x, double y,
                        double alpha) {
  detail::require_fits(img, asset);
  ImageBuffer out = img;
  const auto [ox, oy] = overlay_origin(img, asset.width, asset.height, x, y);
#pragma omp parallel for schedule(static)
  for (int ay = 0; ay < asset.height; ++ay)
    for (int ax = 0; ax < asset.width; ++ax)
      detail::blend_pixel(out.at(ox + ax, oy + ay), asset.at(ax, ay), alpha);
  return out;
}

ImageBuffer vignette_omp(const ImageBuffer& img, const ops::Vignette& o) {
  std::vector<double> dx2(static_cast<std::size_t>(img.width));
  for (int x = 0; x < img.width; ++x) {
    const double dx = (x + 0.5) / img.width - o.cx;
    dx2[static_cast<std::size_t>(x)] = dx * dx;
  }
  ImageBuffer out(img.width, img.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    const double dy = (y + 0.5) / img.height - o.cy;
    const double dy2 = dy * dy;
    for (int x = 0; x < img.width; ++x) {
      const double k = detail::vignette_factor(std::sqrt(dx2[static_cast<std::size_t>(x)] + dy2),
                                               o.radius, o.strength);
      const std::uint8_t* in = img.at(x, y);
      std::uint8_t* px = out.at(x, y);
      for (int c = 0; c < 3; ++c) px[c] = detail::clamp8(in[c] * k);
      px[3] = in[3];
    }
  }
  return out;
}

}  // namespace

ImageBuffer apply(const ImageBuffer& img, const OpKind& op) {
  detail::require_valid(img);
  validate_op(op);
  using namespace detail;
  return std::visit(
      overloaded{
          [&](const ops::Hue& o) {
            const int shift = hue_shift(o.h);
            if (o.mode == HueMode::kWrap) {
              if (shift % 256 == 0) return img;
              return map_rows(img, [&](auto in, auto out) { wrap_shift_pixel(in, out, shift); });
            }
            return map_rows(img, [&](auto in, auto out) { clip_shift_pixel(in, out, shift); });
          },
          [&](const ops::Saturation& o) {
            return map_rows(img, [&](auto in, auto out) { saturation_pixel(in, out, o.f); });
          },
          [&](const ops::Lightness& o) {
            return map_rows(img, [&](auto in, auto out) { lightness_pixel(in, out, o.d); });
          },
          [&](const ops::Exposure& o) {
            const Lut lut = make_lut([&](std::uint8_t v) { return exposure_channel(v, o.ev); });
            return apply_luts(img, lut, lut, lut);
          },
          [&](const ops::Tint& o) {
            const Lut rb = make_lut([&](std::uint8_t v) { return clamp8(v + 32.0 * o.t); });
            const Lut g = make_lut([&](std::uint8_t v) { return clamp8(v - 64.0 * o.t); });
            return apply_luts(img, rb, g, rb);
          },
          [&](const ops::Temperature& o) {
            const Lut r = make_lut([&](std::uint8_t v) { return clamp8(v + 64.0 * o.w); });
            const Lut g = make_lut([](std::uint8_t v) { return v; });
            const Lut b = make_lut([&](std::uint8_t v) { return clamp8(v - 64.0 * o.w); });
            return apply_luts(img, r, g, b);
          },
          [&](const ops::ColorBalance& o) {
            return apply_luts(img, make_lut([&](std::uint8_t v) { return clamp8(v * o.r); }),
                              make_lut([&](std::uint8_t v) { return clamp8(v * o.g); }),
                              make_lut([&](std::uint8_t v) { return clamp8(v * o.b); }));
          },
          [&](const ops::TonePreset& o) {
            if (o.strength == 0) return img;
            return map_rows(img, [&](auto in, auto out) { tone_pixel(in, out, o.name, o.strength); });
          },
          [&](const ops::Overlay& o) { return overlay_omp(img, overlay_asset(o.asset), o.x, o.y, o.alpha); },
          [&](const ops::Vignette& o) { return vignette_omp(img, o); },
          [&](const ops::SetHue& o) {
            const int target = hue_shift(o.h) & 0xff;
            return map_rows(img, [&](auto in, auto out) { set_hue_pixel(in, out, target); });
          },
          [&](const ops::TextAnchor& o) {
            const auto [x, y] = text_anchor_position(o.margin, o.offset);
            return overlay_omp(img, overlay_asset("text"), x, y, 1.0);
          },
      },
      op);
}

}  // namespace crowdgen
