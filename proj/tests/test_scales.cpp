#include <random>

#include <gtest/gtest.h>

#include "geoglyph/resources.hpp"
#include "geoglyph/scales.hpp"

using namespace geoglyph;

TEST(LinearMap, Examples) {
  const LinearScale s(0, 10, 0, 100);
  EXPECT_EQ(linear_map(5, s), 50);
  EXPECT_EQ(linear_map(-3, s), 0);
  EXPECT_EQ(linear_map(10, s), 100);
  EXPECT_EQ(linear_map(11, s), 100);
}

TEST(LinearMap, RejectsDegenerateDomain) {
  EXPECT_THROW(LinearScale(1, 1, 0, 1), Error);
}

TEST(LinearMap, Monotone) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50, 150);
  const LinearScale s(0, 100, 3, 77);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    if (a <= b) EXPECT_LE(linear_map(a, s), linear_map(b, s));
  }
}

TEST(ColorAt, Examples) {
  const ColorRamp bw({parse_hex("#000000"), parse_hex("#FFFFFF")}, RampMode::Ramp);
  EXPECT_EQ(to_hex(color_at(0.5, bw)), "#808080");
  EXPECT_EQ(to_hex(color_at(0, bw)), "#000000");
  EXPECT_EQ(to_hex(color_at(1, bw)), "#ffffff");
}

TEST(ColorAt, EndpointExactAndMonotone) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    Rgb a{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
          static_cast<std::uint8_t>(byte(rng))};
    Rgb b{std::max(a.r, static_cast<std::uint8_t>(byte(rng))),
          std::max(a.g, static_cast<std::uint8_t>(byte(rng))),
          std::max(a.b, static_cast<std::uint8_t>(byte(rng)))};
    const ColorRamp ramp({a, b}, RampMode::Ramp);
    EXPECT_EQ(color_at(0, ramp), a);
    EXPECT_EQ(color_at(1, ramp), b);
    double t1 = u(rng), t2 = u(rng);
    if (t1 > t2) std::swap(t1, t2);
    const Rgb c1 = color_at(t1, ramp), c2 = color_at(t2, ramp);
    EXPECT_LE(c1.r, c2.r);
    EXPECT_LE(c1.g, c2.g);
    EXPECT_LE(c1.b, c2.b);
  }
}

TEST(ColorRamp, StopCounts) {
  EXPECT_THROW(ColorRamp({parse_hex("#000000")}, RampMode::Ramp), Error);
  EXPECT_NO_THROW(ColorRamp({parse_hex("#000000")}, RampMode::Categorical));
  EXPECT_THROW(ColorRamp({}, RampMode::Categorical), Error);
}

TEST(SymbolRadius, SqrtLaw) {
  EXPECT_EQ(symbol_radius(8, 8, 20), 20);
  EXPECT_EQ(symbol_radius(2, 8, 20), 10);
  EXPECT_EQ(symbol_radius(0, 8, 20), 0);
}

TEST(SymbolRadius, AreaProportional) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.001, 1000);
  for (int i = 0; i < 500; ++i) {
    const double vmax = 1000, v = u(rng);
    const double r = symbol_radius(v, vmax, 25);
    const double rm = symbol_radius(vmax, vmax, 25);
    EXPECT_NEAR((r * r) / (rm * rm), v / vmax, 1e-9 * v / vmax);
  }
}

TEST(Hsl, RoundTripsPrimaries) {
  for (const char* hex : {"#ff0000", "#00ff00", "#0000ff", "#808080", "#e15759"}) {
    const Rgb c = parse_hex(hex);
    EXPECT_EQ(to_hex(from_hsl(to_hsl(c))), hex);
  }
  EXPECT_NEAR(to_hsl(parse_hex("#00ff00")).h, 120, 1e-9);
  EXPECT_EQ(hue_distance(350, 10), 20);
}

TEST(Hex, ParsesAndLowercases) {
  EXPECT_EQ(to_hex(parse_hex("#AbCdEf")), "#abcdef");
  EXPECT_FALSE(try_parse_hex("abcdef"));
  EXPECT_FALSE(try_parse_hex("#abcde"));
  EXPECT_FALSE(try_parse_hex("#abcdeg"));
}

TEST(Resources, DefaultsLoad) {
  const auto& p = default_palettes();
  EXPECT_EQ(p.categorical.stops.size(), 10u);
  EXPECT_EQ(p.intensity.stops.size(), 2u);
  const auto& icons = builtin_icons();
  for (const char* n : {"person", "pin", "tree", "factory", "drop"}) EXPECT_TRUE(icons.contains(n)) << n;
}
