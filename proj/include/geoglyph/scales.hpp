#pragma once

// Value-to-visual mappings shared by every encoder.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoglyph/error.hpp"

namespace geoglyph {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(Rgb, Rgb) = default;
  friend constexpr auto operator<=>(Rgb, Rgb) = default;
};

inline std::optional<Rgb> try_parse_hex(std::string_view s) {
  if (s.size() != 7 || s[0] != '#') return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::array<int, 6> n{};
  for (std::size_t i = 0; i < 6; ++i) {
    n[i] = nibble(s[i + 1]);
    if (n[i] < 0) return std::nullopt;
  }
  return Rgb{static_cast<std::uint8_t>(n[0] * 16 + n[1]),
             static_cast<std::uint8_t>(n[2] * 16 + n[3]),
             static_cast<std::uint8_t>(n[4] * 16 + n[5])};
}

inline Rgb parse_hex(std::string_view s) {
  if (auto c = try_parse_hex(s)) return *c;
  fail(ErrorCode::InvalidArgument, "not a #rrggbb color: '" + std::string(s) + "'");
}

inline std::string to_hex(Rgb c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    s.push_back(kDigits[v >> 4]);
    s.push_back(kDigits[v & 0xF]);
  }
  return s;
}

inline std::uint8_t round_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

/// Multiplies each channel by `factor`, rounding half up.
inline Rgb darken(Rgb c, double factor) {
  return {round_channel(c.r * factor), round_channel(c.g * factor), round_channel(c.b * factor)};
}

// --- linear scale -------------------------------------------------------------

struct LinearScale {
  double d0 = 0.0;
  double d1 = 1.0;
  double r0 = 0.0;
  double r1 = 1.0;

  LinearScale() = default;
  LinearScale(double dom0, double dom1, double ran0, double ran1)
      : d0(dom0), d1(dom1), r0(ran0), r1(ran1) {
    if (!(std::isfinite(d0) && std::isfinite(d1) && d0 < d1)) {
      fail(ErrorCode::InvalidArgument, "linear scale domain must satisfy d0 < d1");
    }
  }
};

/// Clamped linear interpolation; domain ends map to range ends exactly.
inline double linear_map(double v, const LinearScale& s) {
  if (v <= s.d0) return s.r0;
  if (v >= s.d1) return s.r1;
  return s.r0 + (v - s.d0) / (s.d1 - s.d0) * (s.r1 - s.r0);
}

// --- colors ---------------------------------------------------------------------

enum class RampMode { Ramp, Categorical };

struct ColorRamp {
  std::vector<Rgb> stops;
  RampMode mode = RampMode::Ramp;

  ColorRamp() = default;
  ColorRamp(std::vector<Rgb> s, RampMode m) : stops(std::move(s)), mode(m) {
    if (mode == RampMode::Ramp && stops.size() < 2) {
      fail(ErrorCode::InvalidArgument, "a color ramp needs at least 2 stops");
    }
    if (stops.empty()) fail(ErrorCode::InvalidArgument, "a palette needs at least 1 color");
  }
};

/// Piecewise-linear sRGB interpolation over evenly spaced stops; each
/// channel rounds half up. t is clamped to [0, 1].
inline Rgb color_at(double t, const ColorRamp& ramp) {
  const auto& s = ramp.stops;
  if (s.size() < 2) fail(ErrorCode::InvalidArgument, "color_at needs a ramp of >= 2 stops");
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  if (t == 0.0) return s.front();
  if (t == 1.0) return s.back();
  const double pos = t * static_cast<double>(s.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), s.size() - 2);
  const double f = pos - static_cast<double>(i);
  const Rgb a = s[i];
  const Rgb b = s[i + 1];
  auto mix = [f](std::uint8_t x, std::uint8_t y) {
    return round_channel(static_cast<double>(x) + f * (static_cast<double>(y) - x));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

inline Rgb category_color(std::size_t index, const ColorRamp& palette) {
  return palette.stops[index % palette.stops.size()];
}

/// Area-proportional symbol radius.
inline double symbol_radius(double v, double v_max, double r_max) {
  if (!(v_max > 0)) fail(ErrorCode::InvalidArgument, "symbol_radius needs v_max > 0");
  if (!(v > 0)) return 0.0;
  return r_max * std::sqrt(v / v_max);
}

// --- HSL ---------------------------------------------------------------------------

struct Hsl {
  double h = 0.0;  // degrees [0, 360)
  double s = 0.0;
  double l = 0.0;
};

inline Hsl to_hsl(Rgb c) {
  const double r = c.r / 255.0;
  const double g = c.g / 255.0;
  const double b = c.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  Hsl out;
  out.l = (mx + mn) / 2;
  const double d = mx - mn;
  if (d == 0) return out;
  out.s = out.l > 0.5 ? d / (2 - mx - mn) : d / (mx + mn);
  double h;
  if (mx == r) {
    h = (g - b) / d + (g < b ? 6 : 0);
  } else if (mx == g) {
    h = (b - r) / d + 2;
  } else {
    h = (r - g) / d + 4;
  }
  out.h = std::fmod(h * 60.0, 360.0);
  return out;
}

inline Rgb from_hsl(Hsl in) {
  const double h = std::fmod(std::fmod(in.h, 360.0) + 360.0, 360.0) / 360.0;
  const double s = std::clamp(in.s, 0.0, 1.0);
  const double l = std::clamp(in.l, 0.0, 1.0);
  if (s == 0) return {round_channel(l * 255), round_channel(l * 255), round_channel(l * 255)};
  const double q = l < 0.5 ? l * (1 + s) : l + s - l * s;
  const double p = 2 * l - q;
  auto hue = [&](double t) {
    if (t < 0) t += 1;
    if (t > 1) t -= 1;
    if (t < 1.0 / 6) return p + (q - p) * 6 * t;
    if (t < 0.5) return q;
    if (t < 2.0 / 3) return p + (q - p) * (2.0 / 3 - t) * 6;
    return p;
  };
  return {round_channel(hue(h + 1.0 / 3) * 255), round_channel(hue(h) * 255),
          round_channel(hue(h - 1.0 / 3) * 255)};
}

/// Shortest angular distance between two hues, in degrees.
inline double hue_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace geoglyph
