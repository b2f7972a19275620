#include <cctype>
#include <cmath>

#include "crowdgen/error.hpp"
#include "pixel.hpp"

namespace crowdgen {

namespace {
std::uint8_t clip8i(int v) { return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v)); }
}  // namespace

// Float/double mixing below is deliberate: it mirrors the 8-bit HSV image
// mode conversion so results match it bit for bit.
Hsv8 rgb_to_hsv8(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::uint8_t maxc = std::max({r, g, b});
  const std::uint8_t minc = std::min({r, g, b});
  if (minc == maxc) return {0, 0, maxc};
  const float cr = static_cast<float>(maxc - minc);
  const float s = cr / static_cast<float>(maxc);
  const float rc = static_cast<float>(maxc - r) / cr;
  const float gc = static_cast<float>(maxc - g) / cr;
  const float bc = static_cast<float>(maxc - b) / cr;
  float h;
  if (r == maxc)
    h = bc - gc;
  else if (g == maxc)
    h = static_cast<float>(2.0 + rc - bc);
  else
    h = static_cast<float>(4.0 + gc - rc);
  h = static_cast<float>(std::fmod(h / 6.0 + 1.0, 1.0));
  return {clip8i(static_cast<int>(h * 255.0)), clip8i(static_cast<int>(s * 255.0)), maxc};
}

void hsv8_to_rgb(Hsv8 hsv, std::uint8_t out[3]) {
  const std::uint8_t v = hsv.v;
  if (hsv.s == 0) {
    out[0] = out[1] = out[2] = v;
    return;
  }
  const int i = static_cast<int>(std::floor(static_cast<float>(hsv.h) * 6.0 / 255.0));
  const float f = static_cast<float>(static_cast<float>(hsv.h) * 6.0 / 255.0 - static_cast<float>(i));
  const float fs = static_cast<float>(static_cast<float>(hsv.s) / 255.0);
  const std::uint8_t p = clip8i(static_cast<int>(std::round(static_cast<float>(v) * (1.0 - fs))));
  const std::uint8_t q = clip8i(static_cast<int>(std::round(static_cast<float>(v) * (1.0 - fs * f))));
  const std::uint8_t t =
      clip8i(static_cast<int>(std::round(static_cast<float>(v) * (1.0 - fs * (1.0 - f)))));
  switch (i % 6) {
    case 0: out[0] = v; out[1] = t; out[2] = p; break;
    case 1: out[0] = q; out[1] = v; out[2] = p; break;
    case 2: out[0] = p; out[1] = v; out[2] = t; break;
    case 3: out[0] = p; out[1] = q; out[2] = v; break;
    case 4: out[0] = t; out[1] = p; out[2] = v; break;
    case 5: out[0] = v; out[1] = p; out[2] = q; break;
  }
}

std::uint8_t wrap_hue8(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const auto hx = detail::to_hex(r, g, b);
  if (hx.max == hx.min) return 0;
  return static_cast<std::uint8_t>(detail::hue8_from_hp(hx.hp));
}

int hue_shift(double h) { return static_cast<int>(h * 255.0); }

double hex_to_hue(std::string_view hex) {
  auto bad = [&] { fail(ErrorKind::kValidation, "malformed hex color '" + std::string(hex) + "'"); };
  if (hex.size() != 7 || hex[0] != '#') bad();
  double rgb[3];
  for (int i = 0; i < 3; ++i) {
    int v = 0;
    for (int j = 0; j < 2; ++j) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[1 + 2 * i + j])));
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else { bad(); d = 0; }
      v = v * 16 + d;
    }
    rgb[i] = v / 255.0;
  }
  const double mx = std::max({rgb[0], rgb[1], rgb[2]});
  const double delta = mx - std::min({rgb[0], rgb[1], rgb[2]});
  if (delta == 0.0) return 0.0;
  // Later channels win when several hold the maximum.
  double h = 0;
  if (rgb[0] == mx) h = (rgb[1] - rgb[2]) / delta;
  if (rgb[1] == mx) h = 2.0 + (rgb[2] - rgb[0]) / delta;
  if (rgb[2] == mx) h = 4.0 + (rgb[0] - rgb[1]) / delta;
  h = std::fmod(h / 6.0, 1.0);
  if (h < 0) h += 1.0;
  return h;
}

namespace detail {

namespace {

// Ring point on extrema (mx, mn) whose wrap hue equals target, if any.
bool ring_point(int mx, int mn, int target, std::uint8_t out[3]) {
  const double hp = hp_from_hue8(target);
  const int sextant = std::min(5, static_cast<int>(std::floor(hp)));
  const int c = mx - mn;
  const double frac = hp - sextant;
  const bool rising = sextant % 2 == 0;
  const long base = std::lround(rising ? mn + c * frac : mx - c * frac);
  for (long delta : {0L, -1L, 1L, -2L, 2L}) {
    const long mid = base + delta;
    if (mid < mn || mid > mx) continue;
    std::uint8_t rgb[3];
    const auto hi = static_cast<std::uint8_t>(mx), lo = static_cast<std::uint8_t>(mn),
               md = static_cast<std::uint8_t>(mid);
    switch (sextant) {
      case 0: rgb[0] = hi; rgb[1] = md; rgb[2] = lo; break;
      case 1: rgb[0] = md; rgb[1] = hi; rgb[2] = lo; break;
      case 2: rgb[0] = lo; rgb[1] = hi; rgb[2] = md; break;
      case 3: rgb[0] = lo; rgb[1] = md; rgb[2] = hi; break;
      case 4: rgb[0] = md; rgb[1] = lo; rgb[2] = hi; break;
      default: rgb[0] = hi; rgb[1] = lo; rgb[2] = md; break;
    }
    if (wrap_hue8(rgb[0], rgb[1], rgb[2]) == target) {
      std::copy(rgb, rgb + 3, out);
      return true;
    }
  }
  return false;
}

}  // namespace

void set_hue_pixel(const std::uint8_t* in, std::uint8_t* out, int target) {
  out[3] = in[3];
  const int mx = std::max({in[0], in[1], in[2]});
  const int mn = std::min({in[0], in[1], in[2]});
  if (mx == mn) {
    std::copy(in, in + 3, out);
    return;
  }
  // Widen the spread one step at a time, keeping the maximum where possible.
  for (int d = 0; d <= 510; ++d) {
    for (int up = 0; up <= d; ++up) {
      const int hi = mx + up, lo = mn - (d - up);
      if (hi > 255 || lo < 0) continue;
      if (ring_point(hi, lo, target, out)) return;
    }
  }
  std::copy(in, in + 3, out);  // unreachable: (255, 0) has a point for every hue
}

}  // namespace detail
}  // namespace crowdgen
