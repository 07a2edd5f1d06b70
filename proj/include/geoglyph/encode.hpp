#pragma once

// Channel encoders: joined data -> marks, legend sections and definitions.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoglyph/basemap.hpp"
#include "geoglyph/dataio.hpp"
#include "geoglyph/designspace.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/resources.hpp"
#include "geoglyph/scales.hpp"
#include "geoglyph/scene.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

struct LegendEntry {
  enum class Kind { Ramp, Swatch, Bar, Prism, Circle, Icon, Line, Note };
  Kind kind = Kind::Note;
  std::vector<Rgb> colors;  // ramp stops, or the single swatch color
  double size = 0.0;        // bar height, circle radius, line width, icon size
  std::string icon;         // symbol def id
  std::string caption;
  std::string caption_high;  // ramp upper end
};

struct LegendSection {
  std::string title;
  std::vector<LegendEntry> entries;
};

/// How a color channel paints: a ramp over a numeric datum, or a fixed color
/// per region key.
struct ColorMapping {
  std::map<std::string, Rgb> by_key;
  std::optional<ColorRamp> ramp;
  double lo = 0.0;
  double hi = 1.0;

  std::optional<Rgb> at(const Mark& m) const {
    if (ramp && m.datum) {
      return color_at(hi > lo ? (*m.datum - lo) / (hi - lo) : 0.5, *ramp);
    }
    auto it = by_key.find(m.key);
    if (it == by_key.end()) return std::nullopt;
    return it->second;
  }
};

struct EncodedLayer {
  ChannelKind channel = ChannelKind::Text;
  Layer layer = Layer::Encoding;
  std::vector<Mark> marks;
  std::vector<Def> defs;
  std::vector<LegendSection> legend;
  std::vector<std::string> warnings;
  std::map<std::string, Vec2> anchors;  // moved anchors (circle cartogram)
  std::optional<ColorMapping> colors;
  bool replaces_regions = false;  // circle cartogram hides region shapes
};

struct EncodeContext {
  const MapFrame& frame;
  BaseMapSpec base;
  std::uint64_t seed = 0;
  const Palettes& palettes = default_palettes();
  const IconLibrary& icons = builtin_icons();
  std::map<std::string, std::string> symbols;  // spec-inlined icon paths
};

// --- helpers -----------------------------------------------------------------------------

namespace detail {

struct Row {
  const FrameRegion* region;
  const Match* match;
};

/// Matched rows with their frame regions, sorted by region key so output
/// never depends on row order.
inline std::vector<Row> rows_by_key(const JoinedData& joined, const MapFrame& frame) {
  std::vector<Row> out;
  for (const auto& m : joined.matched) {
    const FrameRegion* r = frame.find(m.key);
    if (!r) fail(ErrorCode::UnknownRegion, "no region '" + m.key + "' in the frame");
    out.push_back({r, &m});
  }
  std::sort(out.begin(), out.end(), [](const Row& a, const Row& b) { return a.match->key < b.match->key; });
  return out;
}

inline void require_quantitative(const JoinedData& joined, ChannelKind k) {
  if (joined.field_kind != FieldKind::Quantitative) {
    fail(ErrorCode::WrongDataKind, std::string(to_string(k)) + " needs quantitative data");
  }
}

inline double max_value(const std::vector<Row>& rows) {
  double m = -INFINITY;
  for (const auto& r : rows) m = std::max(m, r.match->row.number());
  return m;
}

inline Rgb mark_color(const ChannelSpec& ch, const Palettes& p) {
  if (ch.color) return *ch.color;
  if (!ch.palette.empty()) return ch.palette.front();
  return p.categorical.stops.front();
}

inline double round_half_away(double v) { return v < 0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5); }

}  // namespace detail

/// Symbol definition for a named icon (built-in or spec-inlined).
inline Def icon_def(const std::string& name, const EncodeContext& ctx) {
  const std::string id = "icon-" + sanitize_id(name);
  if (auto it = ctx.symbols.find(name); it != ctx.symbols.end()) return {id, SymbolDef{24.0, it->second}};
  if (auto it = ctx.icons.paths.find(name); it != ctx.icons.paths.end()) {
    return {id, SymbolDef{ctx.icons.view_box, it->second}};
  }
  fail(ErrorCode::UnknownIcon, "no icon named '" + name + "'");
}

/// Quadratic flow curve: chord midpoint pushed 20% of the chord length to
/// the left of from->to (screen coordinates, y down).
struct FlowCurve {
  Vec2 from;
  Vec2 control;
  Vec2 to;

  Vec2 at(double t) const {
    const double u = 1 - t;
    return from * (u * u) + control * (2 * u * t) + to * (t * t);
  }
};

inline FlowCurve flow_curve(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const Vec2 left{d.y, -d.x};
  return {a, (a + b) * 0.5 + left * 0.2, b};
}

namespace detail {

struct ResolvedEdge {
  const FlowEdge* edge;
  FlowCurve curve;
};

inline std::vector<ResolvedEdge> resolve_edges(const JoinedData& joined, const MapFrame& frame,
                                               std::vector<std::string>& warnings) {
  std::vector<ResolvedEdge> out;
  for (const auto& e : joined.edges) {
    const FrameRegion* a = frame.find(e.from);
    const FrameRegion* b = frame.find(e.to);
    if (!a || !b) fail(ErrorCode::UnresolvedEndpoint, "flow " + e.from + " -> " + e.to + " has no anchor");
    if (e.from == e.to || distance(a->anchor, b->anchor) < 1e-9) {
      warnings.push_back("flow from " + a->name + " to itself was skipped");
      continue;
    }
    out.push_back({&e, flow_curve(a->anchor, b->anchor)});
  }
  return out;
}

}  // namespace detail

// --- color -------------------------------------------------------------------------------

/// Intensity or hue fills of the region footprints. On flow data the mapping
/// is built over edge magnitudes and no region marks are produced.
inline EncodedLayer encode_color(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  EncodedLayer out;
  out.channel = ch.kind;
  const bool intensity = ch.kind == ChannelKind::ColorIntensity;
  if (!is_color(ch.kind)) fail(ErrorCode::InvalidArgument, "encode_color needs a color channel");
  if (intensity && joined.field_kind == FieldKind::Categorical) {
    fail(ErrorCode::WrongDataKind, "color_intensity needs quantitative data");
  }
  ColorMapping map;
  LegendSection legend{intensity ? "Intensity" : "Hue", {}};

  if (joined.field_kind == FieldKind::Categorical) {
    const ColorRamp palette =
        ch.palette.empty() ? ctx.palettes.categorical : ColorRamp(ch.palette, RampMode::Categorical);
    std::vector<std::string> categories;
    for (const auto& m : joined.matched) {
      if (std::find(categories.begin(), categories.end(), m.row.category()) == categories.end()) {
        categories.push_back(m.row.category());
      }
    }
    if (categories.size() > palette.stops.size()) {
      out.warnings.push_back(std::to_string(categories.size()) + " categories share " +
                             std::to_string(palette.stops.size()) + " palette colors");
    }
    for (const auto& m : joined.matched) {
      const auto idx = static_cast<std::size_t>(
          std::find(categories.begin(), categories.end(), m.row.category()) - categories.begin());
      map.by_key[m.key] = category_color(idx, palette);
    }
    for (std::size_t i = 0; i < categories.size(); ++i) {
      legend.entries.push_back({LegendEntry::Kind::Swatch, {category_color(i, palette)}, 0, {}, categories[i], {}});
    }
  } else {
    std::vector<double> vals;
    if (joined.field_kind == FieldKind::Flow) {
      for (const auto& e : joined.edges) vals.push_back(e.magnitude);
    } else {
      vals = joined.values();
    }
    const ColorRamp ramp = ch.palette.size() >= 2 ? ColorRamp(ch.palette, RampMode::Ramp)
                                                  : (intensity ? ctx.palettes.intensity : ctx.palettes.hue_ramp);
    map.ramp = ramp;
    map.lo = *std::min_element(vals.begin(), vals.end());
    map.hi = *std::max_element(vals.begin(), vals.end());
    for (const auto& m : joined.matched) {
      const double v = m.row.number();
      map.by_key[m.key] = color_at(map.hi > map.lo ? (v - map.lo) / (map.hi - map.lo) : 0.5, ramp);
    }
    legend.entries.push_back({LegendEntry::Kind::Ramp, ramp.stops, 0, {}, text::format_value(map.lo),
                              text::format_value(map.hi)});
  }

  if (joined.field_kind != FieldKind::Flow) {
    for (const auto& row : detail::rows_by_key(joined, ctx.frame)) {
      Style style = filled(map.by_key.at(row.match->key));
      style.stroke = Paint::of(ctx.base.stroke.value_or(ctx.palettes.base_stroke));
      style.stroke_width = ctx.base.stroke_width;
      style.round_joins = true;
      Mark m = region_footprint(*row.region, ctx.base, ctx.seed, style, "choropleth");
      if (row.match->row.is_quantitative()) m.datum = row.match->row.number();
      if (auto* g = std::get_if<GroupShape>(&m.shape); g && g->children.empty()) continue;
      out.marks.push_back(std::move(m));
    }
  }
  out.colors = std::move(map);
  out.legend.push_back(std::move(legend));
  return out;
}

// --- length ------------------------------------------------------------------------------

/// Bars standing on the anchor, height proportional to the value on [0, max].
inline EncodedLayer encode_length2d(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  detail::require_quantitative(joined, ChannelKind::Length2D);
  EncodedLayer out;
  out.channel = ChannelKind::Length2D;
  const auto rows = detail::rows_by_key(joined, ctx.frame);
  const double vmax = detail::max_value(rows);
  const Rgb color = detail::mark_color(ch, ctx.palettes);
  if (vmax > 0) {
    const LinearScale scale(0, vmax, 0, ch.bar_height);
    for (const auto& row : rows) {
      const double v = row.match->row.number();
      const double h = linear_map(v, scale);
      if (!(h > 0)) continue;
      const Vec2 a = row.region->anchor;
      Mark m = make_mark(RectShape{{a.x - ch.bar_width / 2, a.y - h, a.x + ch.bar_width / 2, a.y}},
                         filled(color), row.match->key, "bar");
      m.datum = v;
      out.marks.push_back(std::move(m));
    }
  }
  out.legend.push_back({"Length", {{LegendEntry::Kind::Bar, {color}, ch.bar_height, {},
                                    text::format_value(std::max(vmax, 0.0)), {}}}});
  return out;
}

struct PrismFaces {
  std::vector<Vec2> front;
  std::vector<Vec2> side;
  std::vector<Vec2> top;
};

/// Axonometric prism standing on `a`; depth offset (w/2, -w/2).
inline PrismFaces prism_faces(Vec2 a, double w, double h) {
  const double x0 = a.x - w / 2;
  const double x1 = a.x + w / 2;
  const double yb = a.y;
  const double yt = a.y - h;
  const Vec2 d{0.5 * w, -0.5 * w};
  return {
      {{x0, yb}, {x1, yb}, {x1, yt}, {x0, yt}},
      {{x1, yb}, {x1 + d.x, yb + d.y}, {x1 + d.x, yt + d.y}, {x1, yt}},
      {{x0, yt}, {x1, yt}, {x1 + d.x, yt + d.y}, {x0 + d.x, yt + d.y}},
  };
}

inline constexpr double kPrismSideShade = 0.75;
inline constexpr double kPrismFrontShade = 0.6;

inline EncodedLayer encode_length3d(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  detail::require_quantitative(joined, ChannelKind::Length3D);
  EncodedLayer out;
  out.channel = ChannelKind::Length3D;
  auto rows = detail::rows_by_key(joined, ctx.frame);
  // Painter's order: farther (smaller y) prisms first.
  std::stable_sort(rows.begin(), rows.end(), [](const detail::Row& a, const detail::Row& b) {
    return a.region->anchor.y < b.region->anchor.y;
  });
  const double vmax = detail::max_value(rows);
  const Rgb color = detail::mark_color(ch, ctx.palettes);
  if (vmax > 0) {
    const LinearScale scale(0, vmax, 0, ch.bar_height);
    for (const auto& row : rows) {
      const double v = row.match->row.number();
      const double h = linear_map(v, scale);
      if (!(h > 0)) continue;
      const auto f = prism_faces(row.region->anchor, ch.bar_width, h);
      const std::string& key = row.match->key;
      Mark front = make_mark(PathShape::polygon(f.front), filled(darken(color, kPrismFrontShade)), key, "prism-front");
      Mark side = make_mark(PathShape::polygon(f.side), filled(darken(color, kPrismSideShade)), key, "prism-side");
      Mark top = make_mark(PathShape::polygon(f.top), filled(color), key, "prism-top");
      for (Mark* m : {&front, &side, &top}) {
        m->datum = v;
        out.marks.push_back(std::move(*m));
      }
    }
  }
  out.legend.push_back({"Height", {{LegendEntry::Kind::Prism, {color}, ch.bar_height, {},
                                    text::format_value(std::max(vmax, 0.0)), {}}}});
  return out;
}

// --- size & cartogram --------------------------------------------------------------------

struct RelaxCircle {
  std::string key;
  Vec2 c;
  double r = 0.0;
};

struct RelaxResult {
  std::vector<RelaxCircle> circles;  // sorted by key
  int passes = 0;
  bool converged = true;
};

/// Deepest pairwise overlap relative to the smaller radius.
inline double max_relative_overlap(const std::vector<RelaxCircle>& cs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const double depth = cs[i].r + cs[j].r - distance(cs[i].c, cs[j].c);
      const double rmin = std::min(cs[i].r, cs[j].r);
      if (depth > 0 && rmin > 0) worst = std::max(worst, depth / rmin);
    }
  }
  return worst;
}

/// Non-contiguous circle cartogram relaxation. Each pass walks key-sorted
/// pairs and separates overlapping ones along their center line, each circle
/// moving by overlap * (other weight) / (weight sum) with weight r^2.
inline RelaxResult dorling_relax(std::vector<RelaxCircle> circles, int max_passes = 512,
                                 double tolerance = 0.005) {
  constexpr double kEps = 1e-9;
  std::sort(circles.begin(), circles.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  RelaxResult res;
  const std::size_t n = circles.size();
  // Coincident centers: nudge the later key along +x.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (circles[i].c == circles[j].c) circles[j].c.x += 1e-6 * std::max(1.0, circles[j].r);
    }
  }
  if (max_relative_overlap(circles) <= tolerance) {
    res.circles = std::move(circles);
    return res;
  }
  for (res.passes = 1; res.passes <= max_passes; ++res.passes) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto& a = circles[i];
        auto& b = circles[j];
        const Vec2 d = b.c - a.c;
        const double dist = length(d);
        const double overlap = a.r + b.r - dist;
        if (!(overlap > kEps)) continue;
        const Vec2 dir = dist > 0 ? d * (1.0 / dist) : Vec2{1, 0};
        const double wa = a.r * a.r;
        const double wb = b.r * b.r;
        if (!(wa + wb > 0)) continue;
        a.c = a.c - dir * (overlap * wb / (wa + wb));
        b.c = b.c + dir * (overlap * wa / (wa + wb));
      }
    }
    if (max_relative_overlap(circles) <= tolerance) break;
  }
  res.converged = res.passes <= max_passes;
  res.passes = std::min(res.passes, max_passes);
  res.circles = std::move(circles);
  return res;
}

/// Area-proportional circles at anchors, or a circle cartogram.
inline EncodedLayer encode_size(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  detail::require_quantitative(joined, ChannelKind::Size);
  EncodedLayer out;
  out.channel = ChannelKind::Size;
  out.replaces_regions = ch.cartogram;
  const auto rows = detail::rows_by_key(joined, ctx.frame);
  const double vmax = detail::max_value(rows);
  const Rgb color = detail::mark_color(ch, ctx.palettes);
  std::vector<RelaxCircle> circles;
  std::map<std::string, double> value;
  if (vmax > 0) {
    for (const auto& row : rows) {
      const double v = row.match->row.number();
      const double r = symbol_radius(v, vmax, ch.max_radius);
      if (!(r > 0)) continue;
      circles.push_back({row.match->key, row.region->anchor, r});
      value[row.match->key] = v;
    }
  }
  if (ch.cartogram && !circles.empty()) {
    auto relaxed = dorling_relax(circles);
    if (!relaxed.converged) {
      out.warnings.push_back("circle cartogram kept residual overlap after " +
                             std::to_string(relaxed.passes) + " passes");
    }
    circles = std::move(relaxed.circles);
    for (const auto& c : circles) out.anchors[c.key] = c.c;
  }
  // Large circles first so small ones stay visible.
  std::stable_sort(circles.begin(), circles.end(), [](const auto& a, const auto& b) {
    return a.r != b.r ? a.r > b.r : a.key < b.key;
  });
  for (const auto& c : circles) {
    Style s = filled(color);
    s.fill_opacity = ch.cartogram ? 0.9 : 0.75;
    s.stroke = Paint::of(Rgb{255, 255, 255});
    s.stroke_width = 0.75;
    Mark m = make_mark(CircleShape{c.c, c.r}, s, c.key, ch.cartogram ? "cartogram" : "symbol");
    m.datum = value[c.key];
    out.marks.push_back(std::move(m));
  }
  LegendSection legend{ch.cartogram ? "Circle area" : "Size", {}};
  if (vmax > 0) {
    legend.entries.push_back({LegendEntry::Kind::Circle, {color}, ch.max_radius, {}, text::format_value(vmax), {}});
    legend.entries.push_back(
        {LegendEntry::Kind::Circle, {color}, ch.max_radius / 2, {}, text::format_value(vmax / 4), {}});
  }
  out.legend.push_back(std::move(legend));
  return out;
}

// --- quantity ----------------------------------------------------------------------------

/// Smallest 1/2/5 x 10^k unit that draws the largest value with at most 10 icons.
inline double nice_unit(double vmax) {
  if (!(vmax > 0) || !std::isfinite(vmax)) return 1.0;
  const double target = vmax / 10.0;
  double p = std::pow(10.0, std::floor(std::log10(target)));
  for (;;) {
    for (double m : {1.0, 2.0, 5.0}) {
      if (m * p >= target * (1 - 1e-12)) return m * p;
    }
    p *= 10;
  }
}

inline int icon_count(double v, double unit) {
  const double n = detail::round_half_away(std::max(v, 0.0) / unit);
  if (n > 200) {
    fail(ErrorCode::TooManyIcons,
         "value " + text::format_value(v) + " needs " + text::format_value(n) + " icons; raise the unit");
  }
  return static_cast<int>(n);
}

/// Row-major block of `n` icons, rows of `per_row`, centered on `c`.
inline std::vector<Box> icon_block(Vec2 c, int n, int per_row, double size) {
  std::vector<Box> out;
  if (n <= 0) return out;
  const double cell = size + 1;
  const int cols = std::min(n, per_row);
  const int rows = (n + per_row - 1) / per_row;
  const double x0 = c.x - (cols * cell - 1) / 2;
  const double y0 = c.y - (rows * cell - 1) / 2;
  for (int i = 0; i < n; ++i) {
    out.push_back(Box::from_xywh(x0 + (i % per_row) * cell, y0 + (i / per_row) * cell, size, size));
  }
  return out;
}

inline EncodedLayer encode_quantity(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  if (joined.field_kind == FieldKind::Categorical) {
    fail(ErrorCode::WrongDataKind, "quantity needs quantitative data");
  }
  EncodedLayer out;
  out.channel = ChannelKind::Quantity;
  const Def def = icon_def(ch.icon, ctx);
  out.defs.push_back(def);
  const Rgb color = detail::mark_color(ch, ctx.palettes);
  std::vector<std::string> below;

  auto emit = [&](Vec2 center, double v, const std::string& key, double unit) {
    const auto n = icon_count(v, unit);
    for (const auto& box : icon_block(center, n, ch.per_row, ch.icon_size)) {
      Mark m = make_mark(IconShape{def.id, box}, filled(color), key, "unit-icon");
      m.datum = v;
      out.marks.push_back(std::move(m));
    }
    return n;
  };

  double unit = 1.0;
  if (joined.field_kind == FieldKind::Flow) {
    // Companion of a flow: one block per edge, stacked below the curve middle.
    double vmax = 0;
    for (const auto& e : joined.edges) vmax = std::max(vmax, e.magnitude);
    unit = ch.unit.value_or(nice_unit(vmax));
    auto edges = detail::resolve_edges(joined, ctx.frame, out.warnings);
    out.layer = Layer::Flow;
    for (const auto& re : edges) {
      const Vec2 mid = re.curve.at(0.5);
      const int rows = (icon_count(re.edge->magnitude, unit) + ch.per_row - 1) / ch.per_row;
      const double half = (rows * (ch.icon_size + 1) - 1) / 2;
      if (emit({mid.x, mid.y + 4 + half}, re.edge->magnitude, re.edge->from, unit) == 0) {
        below.push_back(re.edge->from + " -> " + re.edge->to);
      }
    }
  } else {
    const auto rows = detail::rows_by_key(joined, ctx.frame);
    unit = ch.unit.value_or(nice_unit(detail::max_value(rows)));
    for (const auto& row : rows) {
      if (emit(row.region->anchor, row.match->row.number(), row.match->key, unit) == 0) {
        below.push_back(row.region->name);
      }
    }
  }
  LegendSection legend{"Quantity", {}};
  legend.entries.push_back({LegendEntry::Kind::Icon, {color}, ch.icon_size, def.id,
                            "1 icon = " + text::format_value(unit), {}});
  if (!below.empty()) {
    std::string names;
    for (const auto& b : below) names += (names.empty() ? "" : ", ") + b;
    legend.entries.push_back({LegendEntry::Kind::Note, {}, 0, {}, "below unit: " + names, {}});
  }
  out.legend.push_back(std::move(legend));
  return out;
}

// --- glyph ---------------------------------------------------------------------------------

struct Sector {
  double start = 0.0;  // degrees clockwise from 12 o'clock
  double end = 0.0;
};

inline std::vector<Sector> pie_sectors(const std::vector<double>& series) {
  double total = 0;
  for (double v : series) total += std::max(v, 0.0);
  std::vector<Sector> out;
  if (!(total > 0)) return out;
  double acc = 0;
  for (double v : series) {
    const double start = acc / total * 360.0;
    acc += std::max(v, 0.0);
    out.push_back({start, acc / total * 360.0});
  }
  return out;
}

inline Vec2 clock_point(Vec2 c, double r, double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  return {c.x + r * std::sin(a), c.y - r * std::cos(a)};
}

inline EncodedLayer encode_glyph(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  if (joined.field_kind == FieldKind::Flow) fail(ErrorCode::WrongDataKind, "glyph cannot encode flows");
  EncodedLayer out;
  out.channel = ChannelKind::Glyph;
  const auto& g = ch.glyph;
  const double box = g.box;
  const Rgb mono = detail::mark_color(ch, ctx.palettes);
  const ColorRamp& series_colors = ctx.palettes.categorical;
  const auto rows = detail::rows_by_key(joined, ctx.frame);
  LegendSection legend{"Glyph", {}};

  if (g.type == GlyphType::Icon) {
    const Def def = icon_def(g.icon, ctx);
    out.defs.push_back(def);
    for (const auto& row : rows) {
      Mark m = make_mark(IconShape{def.id, Box::from_center(row.region->anchor, box, box)}, filled(mono),
                         row.match->key, "glyph");
      if (row.match->row.is_quantitative()) m.datum = row.match->row.number();
      out.marks.push_back(std::move(m));
    }
    legend.entries.push_back({LegendEntry::Kind::Icon, {mono}, 12, def.id, g.icon, {}});
    out.legend.push_back(std::move(legend));
    return out;
  }

  if (g.series.empty()) fail(ErrorCode::MissingSeries, "bar and pie glyphs need series values");
  double gmax = 0;
  std::size_t width = 0;
  for (const auto& [key, s] : g.series) {
    for (double v : s) gmax = std::max(gmax, v);
    width = std::max(width, s.size());
  }
  for (const auto& row : rows) {
    auto it = g.series.find(row.match->key);
    if (it == g.series.end()) {
      out.warnings.push_back("no glyph series for " + row.region->name);
      continue;
    }
    const auto& s = it->second;
    const Box frame = Box::from_center(row.region->anchor, box, box);
    GroupShape grp;
    if (g.type == GlyphType::Bar) {
      const double bw = box / static_cast<double>(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double h = gmax > 0 ? s[i] / gmax * box : 0.0;
        const double x = frame.x0 + static_cast<double>(i) * bw;
        grp.children.push_back(make_mark(RectShape{{x + 0.5, frame.y1 - h, x + bw - 0.5, frame.y1}},
                                         filled(category_color(i, series_colors)), {}, "glyph-bar"));
      }
    } else {
      const Vec2 c = row.region->anchor;
      const double r = box / 2;
      const auto sectors = pie_sectors(s);
      for (std::size_t i = 0; i < sectors.size(); ++i) {
        const auto& sec = sectors[i];
        const Style st = filled(category_color(i, series_colors));
        if (sec.end - sec.start >= 360.0 - 1e-9) {
          grp.children.push_back(make_mark(CircleShape{c, r}, st, {}, "glyph-sector"));
          continue;
        }
        if (!(sec.end > sec.start)) continue;
        PathShape p;
        p.move_to(c).line_to(clock_point(c, r, sec.start));
        p.arc_to(r, r, sec.end - sec.start > 180.0, true, clock_point(c, r, sec.end)).close();
        grp.children.push_back(make_mark(std::move(p), st, {}, "glyph-sector"));
      }
    }
    Mark m = make_mark(std::move(grp), {}, row.match->key, "glyph");
    if (row.match->row.is_quantitative()) m.datum = row.match->row.number();
    out.marks.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < width; ++i) {
    const std::string caption = i < g.labels.size() ? g.labels[i] : "series " + std::to_string(i + 1);
    legend.entries.push_back({LegendEntry::Kind::Swatch, {category_color(i, series_colors)}, 0, {}, caption, {}});
  }
  out.legend.push_back(std::move(legend));
  return out;
}

// --- flow -----------------------------------------------------------------------------------

inline EncodedLayer encode_flow(const JoinedData& joined, bool directional, const ChannelSpec& ch,
                                const EncodeContext& ctx) {
  if (joined.field_kind != FieldKind::Flow) fail(ErrorCode::WrongDataKind, "flow channels need flow data");
  EncodedLayer out;
  out.channel = directional ? ChannelKind::DirectionalFlow : ChannelKind::NonDirectionalFlow;
  out.layer = Layer::Flow;
  const auto edges = detail::resolve_edges(joined, ctx.frame, out.warnings);
  double mmax = 0;
  for (const auto& e : joined.edges) mmax = std::max(mmax, e.magnitude);
  const Rgb color = detail::mark_color(ch, ctx.palettes);
  auto width_of = [&](double m) {
    return mmax > 0 ? linear_map(m, LinearScale(0, mmax, 1, ch.max_flow_width)) : 1.0;
  };
  for (const auto& re : edges) {
    const double w = width_of(re.edge->magnitude);
    PathShape p;
    p.move_to(re.curve.from).quad_to(re.curve.control, re.curve.to);
    Style s = stroked(color, w);
    s.opacity = 0.85;
    Mark curve = make_mark(std::move(p), s, re.edge->from, "flow");
    curve.datum = re.edge->magnitude;
    out.marks.push_back(std::move(curve));
    if (directional) {
      const Vec2 t0 = re.curve.to - re.curve.control;
      const Vec2 t = t0 * (1.0 / length(t0));
      const Vec2 n{-t.y, t.x};
      const double len = 2.5 * w + 4;
      const double half = 1.25 * w + 2.5;
      const Vec2 base = re.curve.to - t * len;
      const std::vector<Vec2> tri{re.curve.to, base + n * half, base - n * half};
      Style hs = filled(color);
      hs.opacity = 0.85;
      Mark head = make_mark(PathShape::polygon(tri), hs, re.edge->from, "arrowhead");
      head.datum = re.edge->magnitude;
      out.marks.push_back(std::move(head));
    }
  }
  LegendSection legend{directional ? "Flow (directed)" : "Flow", {}};
  legend.entries.push_back({LegendEntry::Kind::Line, {color}, width_of(mmax), {}, text::format_value(mmax), {}});
  if (mmax > 0) {
    legend.entries.push_back({LegendEntry::Kind::Line, {color}, width_of(mmax / 2), {},
                              text::format_value(mmax / 2), {}});
  }
  out.legend.push_back(std::move(legend));
  return out;
}

// --- text -----------------------------------------------------------------------------------

inline std::string value_text(const DataRow& row) {
  return row.is_quantitative() ? text::format_value(row.number()) : row.category();
}

inline EncodedLayer encode_text(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  EncodedLayer out;
  out.channel = ChannelKind::Text;
  const double fs = ch.font_size;
  Style s = filled(ch.color.value_or(Rgb{0x22, 0x22, 0x22}));
  auto emit = [&](Vec2 at, std::string content, const std::string& key, std::optional<double> datum) {
    if (text::trim(content).empty()) return;
    Mark m = make_mark(TextShape{{at.x, at.y + 0.35 * fs}, {std::move(content)}, fs, TextAnchor::Middle, false},
                       s, key, "value-text");
    m.datum = datum;
    out.marks.push_back(std::move(m));
  };
  if (joined.field_kind == FieldKind::Flow) {
    out.layer = Layer::Flow;
    for (const auto& re : detail::resolve_edges(joined, ctx.frame, out.warnings)) {
      emit(re.curve.at(0.5), text::format_value(re.edge->magnitude), re.edge->from, re.edge->magnitude);
    }
    return out;
  }
  for (const auto& row : detail::rows_by_key(joined, ctx.frame)) {
    std::optional<double> datum;
    if (row.match->row.is_quantitative()) datum = row.match->row.number();
    emit(row.region->anchor, value_text(row.match->row), row.match->key, datum);
  }
  return out;
}

// --- dispatch & dual ----------------------------------------------------------------------

inline EncodedLayer encode_channel(const JoinedData& joined, const ChannelSpec& ch, const EncodeContext& ctx) {
  switch (ch.kind) {
    case ChannelKind::ColorIntensity:
    case ChannelKind::ColorHue: return encode_color(joined, ch, ctx);
    case ChannelKind::Length2D: return encode_length2d(joined, ch, ctx);
    case ChannelKind::Length3D: return encode_length3d(joined, ch, ctx);
    case ChannelKind::Size: return encode_size(joined, ch, ctx);
    case ChannelKind::Quantity: return encode_quantity(joined, ch, ctx);
    case ChannelKind::Glyph: return encode_glyph(joined, ch, ctx);
    case ChannelKind::DirectionalFlow: return encode_flow(joined, true, ch, ctx);
    case ChannelKind::NonDirectionalFlow: return encode_flow(joined, false, ch, ctx);
    case ChannelKind::Text: return encode_text(joined, ch, ctx);
  }
  fail(ErrorCode::UnknownChannel, "unhandled channel");
}

/// Which of two channels draws the primary marks: geometry before color,
/// anything before text; otherwise spec order.
inline std::pair<std::size_t, std::size_t> dual_order(ChannelKind a, ChannelKind b) {
  if (a == ChannelKind::Text) return {1, 0};
  if (b == ChannelKind::Text) return {0, 1};
  if (is_color(a) && !is_color(b)) return {1, 0};
  return {0, 1};
}

namespace detail {

inline void recolor(Mark& m, Rgb c) {
  if (m.role == "flow") {
    m.style.stroke = Paint::of(c);
    return;
  }
  if (m.role == "prism-side") c = darken(c, kPrismSideShade);
  if (m.role == "prism-front") c = darken(c, kPrismFrontShade);
  m.style.fill = Paint::of(c);
  if (auto* g = std::get_if<GroupShape>(&m.shape)) {
    for (auto& child : g->children) child.style.fill = {};
  }
}

inline void translate(Mark& m, Vec2 d) { m = transformed(m, Affine{1.0, {0, 0}, d}); }

}  // namespace detail

/// Merges the secondary channel into the primary layer: color restyles the
/// primary marks, text is added above each region's marks, other geometry is
/// stacked 4 px below the primary marks of the same region.
inline EncodedLayer apply_dual(EncodedLayer first, EncodedLayer second, bool glyph_monochrome = false) {
  if (!check_compatibility(first.channel, second.channel, glyph_monochrome).ok()) {
    fail(ErrorCode::IncompatiblePair, std::string(to_string(first.channel)) + " cannot be combined with " +
                                          std::string(to_string(second.channel)));
  }
  const bool first_is_fill = is_color(first.channel);
  const bool first_is_flow = is_flow(first.channel);
  if (second.colors && !first_is_fill) {
    for (auto& m : first.marks) {
      if (auto c = second.colors->at(m)) detail::recolor(m, *c);
    }
    second.marks.clear();
  } else if (second.channel == ChannelKind::Text && !first_is_fill && !first_is_flow) {
    std::map<std::string, Box> extent;
    for (const auto& m : first.marks) {
      auto [it, fresh] = extent.try_emplace(m.key, Box::empty());
      it->second.expand(mark_bbox(m));
    }
    for (auto& m : second.marks) {
      auto it = extent.find(m.key);
      if (it == extent.end() || it->second.is_empty()) continue;
      auto& t = std::get<TextShape>(m.shape);
      t.at.y = it->second.y0 - 3;
      if (first.anchors.count(m.key)) t.at.x = first.anchors.at(m.key).x;
    }
  } else if (!first_is_fill && !first_is_flow) {
    std::map<std::string, Box> a, b;
    for (const auto& m : first.marks) {
      auto [it, fresh] = a.try_emplace(m.key, Box::empty());
      it->second.expand(mark_bbox(m));
    }
    for (const auto& m : second.marks) {
      auto [it, fresh] = b.try_emplace(m.key, Box::empty());
      it->second.expand(mark_bbox(m));
    }
    for (auto& m : second.marks) {
      auto ia = a.find(m.key);
      if (ia == a.end() || ia->second.is_empty()) continue;
      detail::translate(m, {0, ia->second.y1 + 4 - b.at(m.key).y0});
    }
  }
  for (auto& m : second.marks) first.marks.push_back(std::move(m));
  for (auto& d : second.defs) add_def(first.defs, std::move(d));
  for (auto& l : second.legend) first.legend.push_back(std::move(l));
  for (auto& w : second.warnings) first.warnings.push_back(std::move(w));
  if (second.colors && !first.colors) first.colors = std::move(second.colors);
  return first;
}

}  // namespace geoglyph
