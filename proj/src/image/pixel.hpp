#pragma once

// Per-pixel arithmetic shared by the serial and parallel kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "crowdgen/image_ops.hpp"

namespace crowdgen::detail {

inline std::uint8_t clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

/// A color decomposed into extrema plus a position on the hue hexagon.
/// `hp` is in [0, 6); grays have chroma 0 and hp 0.
struct Hex {
  int max, min;
  double hp;
};

inline Hex to_hex(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int c = mx - mn;
  if (c == 0) return {mx, mn, 0.0};
  double hp;
  if (r == mx) {
    hp = static_cast<double>(g - b) / c;
    if (hp < 0) hp += 6.0;
  } else if (g == mx) {
    hp = 2.0 + static_cast<double>(b - r) / c;
  } else {
    hp = 4.0 + static_cast<double>(r - g) / c;
  }
  return {mx, mn, hp};
}

/// Rebuilds RGB from real-valued extrema and hexagon position.
inline void from_hex(double mx, double mn, double hp, std::uint8_t out[3]) {
  hp = std::fmod(hp, 6.0);
  if (hp < 0) hp += 6.0;
  int i = static_cast<int>(std::floor(hp));
  if (i > 5) i = 5;
  const double f = hp - i;
  const double c = mx - mn;
  const std::uint8_t hi = clamp8(mx), lo = clamp8(mn);
  const std::uint8_t rise = clamp8(mn + c * f), fall = clamp8(mx - c * f);
  switch (i) {
    case 0: out[0] = hi; out[1] = rise; out[2] = lo; break;
    case 1: out[0] = fall; out[1] = hi; out[2] = lo; break;
    case 2: out[0] = lo; out[1] = hi; out[2] = rise; break;
    case 3: out[0] = lo; out[1] = fall; out[2] = hi; break;
    case 4: out[0] = rise; out[1] = lo; out[2] = hi; break;
    default: out[0] = hi; out[1] = lo; out[2] = fall; break;
  }
}

inline int hue8_from_hp(double hp) {
  return static_cast<int>(std::lround(hp / 6.0 * 256.0)) & 0xff;
}

inline double hp_from_hue8(int h8) { return h8 * 6.0 / 256.0; }

inline void wrap_shift_pixel(const std::uint8_t* in, std::uint8_t* out, int shift) {
  const Hex hx = to_hex(in[0], in[1], in[2]);
  if (hx.max == hx.min) {
    std::copy(in, in + 3, out);
  } else {
    const int h8 = (hue8_from_hp(hx.hp) + shift) & 0xff;
    from_hex(hx.max, hx.min, hp_from_hue8(h8), out);
  }
  out[3] = in[3];
}

inline void clip_shift_pixel(const std::uint8_t* in, std::uint8_t* out, int shift) {
  Hsv8 hsv = rgb_to_hsv8(in[0], in[1], in[2]);
  hsv.h = static_cast<std::uint8_t>(std::clamp(static_cast<int>(hsv.h) + shift, 0, 255));
  hsv8_to_rgb(hsv, out);
  out[3] = in[3];
}

/// Closest color whose wrap-mode hue reads back as `target`, searching
/// extrema of equal or larger spread when the original ring has no point at
/// that hue.
void set_hue_pixel(const std::uint8_t* in, std::uint8_t* out, int target);

inline void saturation_pixel(const std::uint8_t* in, std::uint8_t* out, double f) {
  const Hex hx = to_hex(in[0], in[1], in[2]);
  if (hx.max == hx.min || hx.max == 0) {
    std::copy(in, in + 4, out);
    return;
  }
  const double s = std::min(1.0, static_cast<double>(hx.max - hx.min) / hx.max * f);
  from_hex(hx.max, hx.max * (1.0 - s), hx.hp, out);
  out[3] = in[3];
}

inline void lightness_pixel(const std::uint8_t* in, std::uint8_t* out, double d) {
  const Hex hx = to_hex(in[0], in[1], in[2]);
  const double mx = hx.max / 255.0, mn = hx.min / 255.0;
  const double l = (mx + mn) / 2.0;
  const double c = mx - mn;
  const double denom = 1.0 - std::fabs(2.0 * l - 1.0);
  const double s = denom > 0 ? c / denom : 0.0;
  const double l2 = std::clamp(l + d, 0.0, 1.0);
  const double c2 = (1.0 - std::fabs(2.0 * l2 - 1.0)) * s;
  from_hex((l2 + c2 / 2.0) * 255.0, (l2 - c2 / 2.0) * 255.0, hx.hp, out);
  out[3] = in[3];
}

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
  return c <= 0.0031308 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

/// Exposure before the final clamp, in 8-bit units.
inline double exposure_unclamped(std::uint8_t v, double ev) {
  return linear_to_srgb(srgb_to_linear(v / 255.0) * std::exp2(ev)) * 255.0;
}

inline std::uint8_t exposure_channel(std::uint8_t v, double ev) {
  return clamp8(exposure_unclamped(v, ev));
}

struct ToneTarget {
  double hue;         // [0,1)
  double saturation;  // multiplier gain per unit strength
  double warmth;      // temperature per unit strength
};

inline ToneTarget tone_target(ops::Tone t) {
  return t == ops::Tone::kFall ? ToneTarget{0.08, 0.2, 0.3} : ToneTarget{0.25, 0.3, -0.1};
}

/// Fraction of the shortest-arc hue distance covered at strength 1.
inline constexpr double kTonePull = 0.5;

inline void tone_pixel(const std::uint8_t* in, std::uint8_t* out, ops::Tone tone,
                       double strength) {
  const ToneTarget tt = tone_target(tone);
  const Hex hx = to_hex(in[0], in[1], in[2]);
  std::uint8_t mid[3];
  if (hx.max == hx.min || hx.max == 0) {
    std::copy(in, in + 3, mid);
  } else {
    double delta = tt.hue * 6.0 - hx.hp;
    if (delta > 3.0) delta -= 6.0;
    if (delta < -3.0) delta += 6.0;
    const double hp = hx.hp + kTonePull * strength * delta;
    const double s = std::min(
        1.0, static_cast<double>(hx.max - hx.min) / hx.max * (1.0 + tt.saturation * strength));
    from_hex(hx.max, hx.max * (1.0 - s), hp, mid);
  }
  const double w = tt.warmth * strength;
  out[0] = clamp8(mid[0] + 64.0 * w);
  out[1] = mid[1];
  out[2] = clamp8(mid[2] - 64.0 * w);
  out[3] = in[3];
}

/// Width of the vignette ramp in normalized distance units.
inline constexpr double kVignetteFalloff = 0.5;

inline double vignette_factor(double dist, double radius, double strength) {
  double t = std::clamp((dist - radius) / kVignetteFalloff, 0.0, 1.0);
  return 1.0 - strength * t * t * (3.0 - 2.0 * t);
}

/// Alpha-composites `src` onto `dst` in place.
inline void blend_pixel(std::uint8_t* dst, const std::uint8_t* src, double alpha) {
  const double a = alpha * src[3] / 255.0;
  for (int c = 0; c < 3; ++c) dst[c] = clamp8(src[c] * a + dst[c] * (1.0 - a));
  dst[3] = clamp8(255.0 * (a + dst[3] / 255.0 * (1.0 - a)));
}

}  // namespace crowdgen::detail
