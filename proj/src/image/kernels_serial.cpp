// Reference kernels: one pixel at a time, formulas evaluated directly.

#include "crowdgen/error.hpp"
#include "kernels_common.hpp"
#include "pixel.hpp"

namespace crowdgen {

namespace {

template <class F>
ImageBuffer map_pixels(const ImageBuffer& img, F&& f) {
  ImageBuffer out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) f(img.at(x, y), out.at(x, y), x, y);
  return out;
}

ImageBuffer overlay_serial(const ImageBuffer& img, const ImageBuffer& asset, double x, double y,
                           double alpha) {
  detail::require_fits(img, asset);
  ImageBuffer out = img;
  const auto [ox, oy] = overlay_origin(img, asset.width, asset.height, x, y);
  for (int ay = 0; ay < asset.height; ++ay)
    for (int ax = 0; ax < asset.width; ++ax)
      detail::blend_pixel(out.at(ox + ax, oy + ay), asset.at(ax, ay), alpha);
  return out;
}

}  // namespace

ImageBuffer apply_serial(const ImageBuffer& img, const OpKind& op) {
  detail::require_valid(img);
  validate_op(op);
  using namespace detail;
  return std::visit(
      overloaded{
          [&](const ops::Hue& o) {
            const int shift = hue_shift(o.h);
            if (o.mode == HueMode::kWrap) {
              if (shift % 256 == 0) return img;
              return map_pixels(img, [&](auto in, auto out, int, int) { wrap_shift_pixel(in, out, shift); });
            }
            return map_pixels(img, [&](auto in, auto out, int, int) { clip_shift_pixel(in, out, shift); });
          },
          [&](const ops::Saturation& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) { saturation_pixel(in, out, o.f); });
          },
          [&](const ops::Lightness& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) { lightness_pixel(in, out, o.d); });
          },
          [&](const ops::Exposure& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) {
              for (int c = 0; c < 3; ++c) out[c] = exposure_channel(in[c], o.ev);
              out[3] = in[3];
            });
          },
          [&](const ops::Tint& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) {
              out[0] = clamp8(in[0] + 32.0 * o.t);
              out[1] = clamp8(in[1] - 64.0 * o.t);
              out[2] = clamp8(in[2] + 32.0 * o.t);
              out[3] = in[3];
            });
          },
          [&](const ops::Temperature& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) {
              out[0] = clamp8(in[0] + 64.0 * o.w);
              out[1] = in[1];
              out[2] = clamp8(in[2] - 64.0 * o.w);
              out[3] = in[3];
            });
          },
          [&](const ops::ColorBalance& o) {
            return map_pixels(img, [&](auto in, auto out, int, int) {
              out[0] = clamp8(in[0] * o.r);
              out[1] = clamp8(in[1] * o.g);
              out[2] = clamp8(in[2] * o.b);
              out[3] = in[3];
            });
          },
          [&](const ops::TonePreset& o) {
            if (o.strength == 0) return img;
            return map_pixels(img, [&](auto in, auto out, int, int) { tone_pixel(in, out, o.name, o.strength); });
          },
          [&](const ops::Overlay& o) { return overlay_serial(img, overlay_asset(o.asset), o.x, o.y, o.alpha); },
          [&](const ops::Vignette& o) {
            return map_pixels(img, [&](auto in, auto out, int x, int y) {
              const double dx = (x + 0.5) / img.width - o.cx;
              const double dy = (y + 0.5) / img.height - o.cy;
              const double k = vignette_factor(std::sqrt(dx * dx + dy * dy), o.radius, o.strength);
              for (int c = 0; c < 3; ++c) out[c] = clamp8(in[c] * k);
              out[3] = in[3];
            });
          },
          [&](const ops::SetHue& o) {
            const int target = hue_shift(o.h) & 0xff;
            return map_pixels(img, [&](auto in, auto out, int, int) { set_hue_pixel(in, out, target); });
          },
          [&](const ops::TextAnchor& o) {
            const auto [x, y] = text_anchor_position(o.margin, o.offset);
            return overlay_serial(img, overlay_asset("text"), x, y, 1.0);
          },
      },
      op);
}

}  // namespace crowdgen
