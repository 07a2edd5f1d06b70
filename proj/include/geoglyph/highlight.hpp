#pragma once

// Emphasis of a single region or point: glow, pin, contrasting fill,
// extrusion, contour, zoomed inset.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoglyph/dataio.hpp"
#include "geoglyph/designspace.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/resources.hpp"
#include "geoglyph/scene.hpp"

namespace geoglyph {

using LayerMap = std::map<Layer, std::vector<Mark>>;

struct HighlightContext {
  const MapFrame& frame;
  const Palettes& palettes = default_palettes();
  AliasTable aliases;
  Box canvas;
};

/// Complement hue at fixed saturation and lightness.
inline Rgb contrasting_color(Rgb base) {
  return from_hsl({std::fmod(to_hsl(base).h + 180.0, 360.0), 0.9, 0.5});
}

inline std::pair<Def, Mark> glow(Vec2 at, double r, Rgb color, const std::string& id, const std::string& key) {
  Def d{id, RadialGradientDef{{{0.0, color, 0.85}, {0.4, color, 0.45}, {1.0, color, 0.0}}}};
  Mark m = make_mark(CircleShape{at, 3 * r}, Style{.fill = Paint::url(id)}, key, "glow");
  return {std::move(d), std::move(m)};
}

/// Teardrop of total height `h` whose tip is exactly at `tip`.
inline std::vector<Mark> pin(Vec2 tip, double h, Rgb color, const std::string& key) {
  const double r = h / 3;
  const Vec2 c{tip.x, tip.y - h + r};
  PathShape p;
  p.move_to(tip)
      .line_to({c.x - 0.8 * r, c.y + 0.6 * r})
      .arc_to(r, r, true, true, {c.x + 0.8 * r, c.y + 0.6 * r})
      .close();
  Style s = filled(color);
  s.stroke = Paint::of(Rgb{255, 255, 255});
  s.stroke_width = 1;
  return {make_mark(std::move(p), s, key, "pin"),
          make_mark(CircleShape{c, r * 0.4}, filled(Rgb{255, 255, 255}), key, "pin-eye")};
}

inline Mark contour(const ScreenRegion& region, Rgb color, double width, const std::string& key) {
  Style s = stroked(color, width);
  s.fill = Paint::none();
  s.round_joins = true;
  return make_mark(PathShape::region(region), s, key, "contour");
}

inline constexpr Vec2 kExtrudeOffset{3, -3};
inline constexpr double kExtrudeShade = 0.6;

/// Raised copy of a region: darkened footprint, side quads along every edge,
/// and the lifted original on top.
inline Mark extrude(const ScreenRegion& region, Rgb fill, const std::string& key) {
  const Rgb dark = darken(fill, kExtrudeShade);
  GroupShape g;
  g.children.push_back(make_mark(PathShape::region(region), filled(dark), {}, "extrude-base"));
  ScreenRegion lifted = region;
  for (auto& poly : lifted.polygons) {
    for (auto& p : poly.outer) p = p + kExtrudeOffset;
    for (auto& h : poly.holes)
      for (auto& p : h) p = p + kExtrudeOffset;
  }
  auto quads = [&](const ScreenRing& ring) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const std::vector<Vec2> q{ring[j], ring[i], ring[i] + kExtrudeOffset, ring[j] + kExtrudeOffset};
      Style s = filled(dark);
      s.stroke = Paint::of(dark);
      s.stroke_width = 0.3;
      g.children.push_back(make_mark(PathShape::polygon(q), s, {}, "extrude-edge"));
    }
  };
  for (const auto& poly : region.polygons) {
    quads(poly.outer);
    for (const auto& h : poly.holes) quads(h);
  }
  Style top = filled(fill);
  top.stroke = Paint::of(Rgb{255, 255, 255});
  top.stroke_width = 0.5;
  g.children.push_back(make_mark(PathShape::region(lifted), top, {}, "extrude-top"));
  return make_mark(std::move(g), {}, key, "extrude");
}

// --- inset ------------------------------------------------------------------------------------

struct Inset {
  Box frame;
  std::vector<Mark> marks;  // background, scaled content, border, connectors
};

inline constexpr double kInsetPadding = 8.0;
inline constexpr int kInsetGrid = 16;

/// Top-left cell-aligned position for a w x h frame on a 16 x 16 occupancy
/// grid, nearest to `near`. Throws NoRoom if no free placement exists.
inline Box find_free_spot(const Box& canvas, const std::vector<Box>& occupied, double w, double h, Vec2 near) {
  const double cw = canvas.width() / kInsetGrid;
  const double ch = canvas.height() / kInsetGrid;
  std::array<std::array<bool, kInsetGrid>, kInsetGrid> busy{};
  for (int j = 0; j < kInsetGrid; ++j) {
    for (int i = 0; i < kInsetGrid; ++i) {
      const Box cell = Box::from_xywh(canvas.x0 + i * cw, canvas.y0 + j * ch, cw, ch);
      busy[j][i] = std::any_of(occupied.begin(), occupied.end(), [&](const Box& b) { return overlaps(cell, b); });
    }
  }
  const int nx = static_cast<int>(std::ceil(w / cw - 1e-9));
  const int ny = static_cast<int>(std::ceil(h / ch - 1e-9));
  std::optional<Box> best;
  double best_d = INFINITY;
  for (int j = 0; j + ny <= kInsetGrid; ++j) {
    for (int i = 0; i + nx <= kInsetGrid; ++i) {
      bool free = true;
      for (int y = j; y < j + ny && free; ++y)
        for (int x = i; x < i + nx && free; ++x) free = !busy[y][x];
      if (!free) continue;
      // Center the frame inside its cell block.
      const Box block = Box::from_xywh(canvas.x0 + i * cw, canvas.y0 + j * ch, nx * cw, ny * ch);
      const Box f = Box::from_center(block.center(), w, h);
      const double d = distance(f.center(), near);
      if (d < best_d - 1e-9) {
        best_d = d;
        best = f;
      }
    }
  }
  if (!best) fail(ErrorCode::NoRoom, "no free space for the inset");
  return *best;
}

/// Magnified copy of one region's marks. Overlay insets sit centered on the
/// region; adjacent ones go to free canvas space with two connectors.
inline Inset build_inset(const FrameRegion& region, const std::vector<Mark>& content, double scale,
                         InsetPlacement placement, const Box& canvas, const std::vector<Box>& occupied,
                         Rgb border) {
  if (!(scale > 1.0 && scale <= 8.0)) fail(ErrorCode::InvalidArgument, "inset scale must be in (1, 8]");
  const Box bb = region.bbox;
  const double w = scale * bb.width() + 2 * kInsetPadding;
  const double h = scale * bb.height() + 2 * kInsetPadding;
  Inset out;
  out.frame = placement == InsetPlacement::Overlay ? Box::from_center(bb.center(), w, h)
                                                   : find_free_spot(canvas, occupied, w, h, bb.center());
  const Affine t{scale, bb.center(), out.frame.center() - bb.center()};
  Style bg = filled(Rgb{255, 255, 255});
  bg.opacity = 0.95;
  out.marks.push_back(make_mark(RectShape{out.frame}, bg, region.key, "inset-background"));
  for (const auto& m : content) {
    Mark c = transformed(m, t);
    if (auto* txt = std::get_if<TextShape>(&c.shape)) txt->font_size = std::get<TextShape>(m.shape).font_size;
    c.role = "inset-" + m.role;
    out.marks.push_back(std::move(c));
  }
  Style frame = stroked(border, 1.0);
  frame.fill = Paint::none();
  out.marks.push_back(make_mark(RectShape{out.frame}, frame, region.key, "inset-frame"));
  if (placement == InsetPlacement::Adjacent) {
    const Vec2 d = out.frame.center() - bb.center();
    std::array<std::pair<Vec2, Vec2>, 2> links;
    if (std::abs(d.x) >= std::abs(d.y)) {
      const double xs = d.x > 0 ? bb.x1 : bb.x0;
      const double xf = d.x > 0 ? out.frame.x0 : out.frame.x1;
      links = {{{{xs, bb.y0}, {xf, out.frame.y0}}, {{xs, bb.y1}, {xf, out.frame.y1}}}};
    } else {
      const double ys = d.y > 0 ? bb.y1 : bb.y0;
      const double yf = d.y > 0 ? out.frame.y0 : out.frame.y1;
      links = {{{{bb.x0, ys}, {out.frame.x0, yf}}, {{bb.x1, ys}, {out.frame.x1, yf}}}};
    }
    Style ls = stroked(border, 0.75);
    ls.dash = "3 2";
    for (const auto& [a, b] : links) {
      out.marks.push_back(make_mark(PathShape::polyline(std::vector<Vec2>{a, b}), ls, region.key, "inset-connector"));
    }
  }
  return out;
}

// --- dispatch -----------------------------------------------------------------------------

namespace detail {

inline const FrameRegion* highlight_region(const HighlightSpec& h, const HighlightContext& ctx) {
  if (!h.region) return nullptr;
  const FrameRegion* r = ctx.frame.find(resolve_key(*h.region, ctx.aliases));
  if (!r) {
    fail(targets_region_only(h.kind) ? ErrorCode::UnknownRegion : ErrorCode::UnresolvedTarget,
         "highlight target '" + *h.region + "' is not a region of the map");
  }
  return r;
}

inline std::optional<Rgb> fill_color(const Mark& m) {
  if (m.style.fill.kind == Paint::Kind::Color) return m.style.fill.color;
  return std::nullopt;
}

/// The footprint marks (base or choropleth) of a region, topmost first.
inline std::vector<Mark*> footprints(LayerMap& layers, const std::string& key) {
  std::vector<Mark*> out;
  for (Layer l : {Layer::Encoding, Layer::Base}) {
    auto it = layers.find(l);
    if (it == layers.end()) continue;
    for (auto& m : it->second)
      if (m.key == key && (m.role == "choropleth" || m.role == "region")) out.push_back(&m);
  }
  return out;
}

}  // namespace detail

/// Applies highlight number `index` to the layers. Marks of other regions
/// are never touched. `occupied` feeds adjacent inset placement.
inline void apply_highlight(const HighlightSpec& h, std::size_t index, LayerMap& layers, std::vector<Def>& defs,
                            const HighlightContext& ctx, const std::vector<Box>& occupied = {}) {
  const FrameRegion* region = detail::highlight_region(h, ctx);
  if (targets_region_only(h.kind) && !region) {
    fail(ErrorCode::UnknownRegion, std::string(to_string(h.kind)) + " needs a region target");
  }
  const std::string key = region ? region->key : "point-" + std::to_string(index);
  auto target = [&]() -> Vec2 {
    if (region) return region->anchor;
    if (h.point) return ctx.frame.projection()(*h.point);
    fail(ErrorCode::UnresolvedTarget, "highlight has neither a region nor a point");
  };
  const Rgb accent = h.color.value_or(ctx.palettes.accent);
  switch (h.kind) {
    case HighlightKind::Glow: {
      auto [def, mark] = glow(target(), h.radius, accent, "glow-" + std::to_string(index), key);
      add_def(defs, std::move(def));
      layers[Layer::HighlightUnder].push_back(std::move(mark));
      break;
    }
    case HighlightKind::Pin:
      for (auto& m : pin(target(), h.height, accent, key)) layers[Layer::HighlightOver].push_back(std::move(m));
      break;
    case HighlightKind::ContrastingColor: {
      auto fps = detail::footprints(layers, region->key);
      const Rgb base = !fps.empty() && detail::fill_color(*fps.front()) ? *detail::fill_color(*fps.front())
                                                                      : ctx.palettes.base_fill;
      const Rgb c = h.color.value_or(contrasting_color(base));
      if (fps.empty()) {
        layers[Layer::HighlightUnder].push_back(
            make_mark(PathShape::region(region->shape), filled(c), region->key, "contrast"));
      }
      for (Mark* m : fps) m->style.fill = Paint::of(c);
      break;
    }
    case HighlightKind::Contour:
      layers[Layer::HighlightOver].push_back(contour(region->shape, accent, h.stroke_width, region->key));
      break;
    case HighlightKind::Extrude3D: {
      auto fps = detail::footprints(layers, region->key);
      if (fps.empty()) {
        layers[Layer::HighlightUnder].push_back(extrude(region->shape, ctx.palettes.base_fill, region->key));
        break;
      }
      Mark* top = fps.front();
      const Rgb fill = detail::fill_color(*top).value_or(ctx.palettes.base_fill);
      Mark ex = extrude(region->shape, fill, region->key);
      ex.datum = top->datum;
      *top = std::move(ex);
      break;
    }
    case HighlightKind::ZoomedInset: {
      std::vector<Mark> content;
      for (Layer l : {Layer::Base, Layer::Encoding, Layer::Flow}) {
        auto it = layers.find(l);
        if (it == layers.end()) continue;
        for (const auto& m : it->second)
          if (m.key == region->key) content.push_back(m);
      }
      auto inset = build_inset(*region, content, h.scale, h.placement, ctx.canvas, occupied,
                               h.color.value_or(Rgb{0x55, 0x55, 0x55}));
      for (auto& m : inset.marks) layers[Layer::Insets].push_back(std::move(m));
      break;
    }
  }
}

}  // namespace geoglyph
