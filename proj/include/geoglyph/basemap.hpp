#pragma once

// Bottom layer: nothing, region outlines, or lattice dots clipped to regions.

#include <cstdint>
#include <vector>

#include "geoglyph/designspace.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/resources.hpp"
#include "geoglyph/scene.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform [0, 1) draw for lattice cell (i, j) of a region.
constexpr double dot_unit(std::uint64_t seed, std::string_view key, std::uint64_t i, std::uint64_t j) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ text::fnv1a(key));
  h = splitmix64(h ^ i);
  h = splitmix64(h ^ j);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Dot {
  Vec2 c;
  std::uint64_t i = 0;
  std::uint64_t j = 0;
};

/// Lattice x0 + s/2 + i*s, y0 + s/2 + j*s over the region's bounding box;
/// a dot is kept iff its center is strictly inside the region.
inline std::vector<Dot> dot_grid(const ScreenRegion& region, double spacing, double radius) {
  if (!(radius > 0) || !(spacing > 2 * radius)) {
    fail(ErrorCode::InvalidArgument, "dot grid needs spacing > 2 * radius > 0");
  }
  std::vector<Dot> out;
  if (!(region_area(region) > 0)) return out;
  const Box b = bounding_box(region);
  const auto nx = static_cast<std::uint64_t>(std::ceil(b.width() / spacing));
  const auto ny = static_cast<std::uint64_t>(std::ceil(b.height() / spacing));
  for (std::uint64_t j = 0; j < ny; ++j) {
    const double y = b.y0 + spacing / 2 + static_cast<double>(j) * spacing;
    for (std::uint64_t i = 0; i < nx; ++i) {
      const Vec2 c{b.x0 + spacing / 2 + static_cast<double>(i) * spacing, y};
      if (point_in_region(c, region)) out.push_back({c, i, j});
    }
  }
  return out;
}

/// The visual footprint of a region under the chosen base map: its outline
/// path, or a group of dots. `fill` colors the footprint.
inline Mark region_footprint(const FrameRegion& r, const BaseMapSpec& base, std::uint64_t seed,
                             Style style, std::string role) {
  const bool dots = base.kind == BaseMapKind::ShapeBasedUniform ||
                    base.kind == BaseMapKind::ShapeBasedVaried;
  if (!dots) return make_mark(PathShape::region(r.shape), std::move(style), r.key, std::move(role));
  GroupShape g;
  for (const auto& d : dot_grid(r.shape, base.dot_spacing, base.dot_radius)) {
    double rad = base.dot_radius;
    if (base.kind == BaseMapKind::ShapeBasedVaried) {
      rad *= 0.5 + dot_unit(seed, r.key, d.i, d.j);
    }
    g.children.push_back(make_mark(CircleShape{d.c, rad}, {}));
  }
  style.stroke = {};
  style.stroke_width.reset();
  return make_mark(std::move(g), std::move(style), r.key, std::move(role));
}

inline std::vector<Mark> render_base(const BaseMapSpec& base, const MapFrame& frame, std::uint64_t seed,
                                     const Palettes& palettes = default_palettes()) {
  if (!is_supported(base.kind)) {
    fail(ErrorCode::UnsupportedBaseMap,
         std::string(to_string(base.kind)) + " base maps are not rendered");
  }
  std::vector<Mark> out;
  if (base.kind == BaseMapKind::Implicit) return out;
  Style style = filled(base.fill.value_or(palettes.base_fill));
  style.stroke = Paint::of(base.stroke.value_or(palettes.base_stroke));
  style.stroke_width = base.stroke_width;
  style.round_joins = true;
  for (const auto& r : frame.regions()) {
    Mark m = region_footprint(r, base, seed, style, "region");
    if (auto* g = std::get_if<GroupShape>(&m.shape); g && g->children.empty()) continue;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace geoglyph
