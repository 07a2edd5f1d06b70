#pragma once

// End-to-end rendering: spec + data + boundaries -> SVG and a report.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/basemap.hpp"
#include "geoglyph/dataio.hpp"
#include "geoglyph/designspace.hpp"
#include "geoglyph/encode.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/highlight.hpp"
#include "geoglyph/labels.hpp"
#include "geoglyph/resources.hpp"
#include "geoglyph/scene.hpp"

namespace geoglyph {

struct RenderResult {
  ValidationReport report;
  std::optional<std::string> svg;  // absent when the spec is invalid
  std::vector<std::string> warnings;
  SceneGraph scene;
};

/// A library error tagged with the pipeline stage it escaped from.
class StageError : public Error {
 public:
  StageError(ErrorCode code, std::string stage, const std::string& message)
      : Error(code, stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Runs `f`; library errors leave as StageError. The innermost stage wins.
template <typename F>
auto stage(std::string_view name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(name) + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    throw StageError(e.code(), std::string(name), msg);
  }
}

// --- legend ---------------------------------------------------------------------------------

struct LegendBlock {
  std::vector<Mark> marks;
  std::vector<Def> defs;
  Box box = Box::empty();
};

namespace detail {

inline constexpr double kLegendFont = 9.0;
inline constexpr double kLegendPad = 8.0;

inline double entry_height(const LegendEntry& e) {
  switch (e.kind) {
    case LegendEntry::Kind::Ramp: return 26;
    case LegendEntry::Kind::Bar:
    case LegendEntry::Kind::Prism: return 22;
    case LegendEntry::Kind::Circle: return std::max(14.0, 2 * e.size + 4);
    case LegendEntry::Kind::Line: return std::max(14.0, e.size + 6);
    case LegendEntry::Kind::Note: return 1.2 * kLegendFont * static_cast<double>(text::wrap(e.caption, 40).size()) + 2;
    default: return 14;
  }
}

inline double symbol_width(const LegendEntry& e) {
  switch (e.kind) {
    case LegendEntry::Kind::Ramp: return 120;
    case LegendEntry::Kind::Circle: return 2 * e.size;
    case LegendEntry::Kind::Line: return 28;
    case LegendEntry::Kind::Note: return 0;
    default: return 12;
  }
}

}  // namespace detail

/// Stacked legend sections with the bottom-left corner at `corner`.
inline LegendBlock build_legend(const std::vector<LegendSection>& sections, Vec2 corner) {
  using detail::kLegendFont;
  using detail::kLegendPad;
  LegendBlock out;
  double height = kLegendPad;
  double width = 120;
  for (const auto& s : sections) {
    if (s.entries.empty()) continue;
    height += 1.2 * kLegendFont + 4;
    width = std::max(width, measure_text(s.title, kLegendFont).width);
    for (const auto& e : s.entries) {
      height += detail::entry_height(e) + 2;
      const double cap = e.kind == LegendEntry::Kind::Note ? 0.6 * kLegendFont * 40
                                                           : measure_text(e.caption, kLegendFont).width;
      width = std::max(width, detail::symbol_width(e) + 6 + cap);
    }
  }
  if (height <= kLegendPad) return out;
  width += 2 * kLegendPad;
  height += kLegendPad - 2;
  out.box = {corner.x, corner.y - height, corner.x + width, corner.y};
  Style bg = filled(Rgb{255, 255, 255});
  bg.opacity = 0.9;
  bg.stroke = Paint::of(Rgb{0xcc, 0xcc, 0xcc});
  bg.stroke_width = 0.5;
  out.marks.push_back(make_mark(RectShape{out.box, 3}, bg, {}, "legend-frame"));
  const Rgb ink{0x33, 0x33, 0x33};
  const double x = out.box.x0 + kLegendPad;
  double y = out.box.y0 + kLegendPad;
  auto caption = [&](Vec2 at, std::vector<std::string> lines, TextAnchor a = TextAnchor::Start, bool bold = false) {
    out.marks.push_back(make_mark(TextShape{at, std::move(lines), kLegendFont, a, bold}, filled(ink), {},
                                  bold ? "legend-title" : "legend-caption"));
  };
  int ramp = 0;
  for (const auto& s : sections) {
    if (s.entries.empty()) continue;
    caption({x, y + kLegendFont}, {s.title}, TextAnchor::Start, true);
    y += 1.2 * kLegendFont + 4;
    for (const auto& e : s.entries) {
      const double h = detail::entry_height(e);
      const double mid = y + h / 2;
      const Rgb c = e.colors.empty() ? ink : e.colors.front();
      const double tx = x + detail::symbol_width(e) + 6;
      switch (e.kind) {
        case LegendEntry::Kind::Ramp: {
          const std::string id = "legend-ramp-" + std::to_string(ramp++);
          LinearGradientDef g;
          for (std::size_t i = 0; i < e.colors.size(); ++i) {
            const double off = e.colors.size() > 1 ? static_cast<double>(i) / static_cast<double>(e.colors.size() - 1) : 0;
            g.stops.push_back({off, e.colors[i], 1.0});
          }
          out.defs.push_back({id, std::move(g)});
          out.marks.push_back(make_mark(RectShape{Box::from_xywh(x, y, 120, 10)}, Style{.fill = Paint::url(id)}, {},
                                        "legend-ramp"));
          caption({x, y + 10 + kLegendFont + 2}, {e.caption});
          caption({x + 120, y + 10 + kLegendFont + 2}, {e.caption_high}, TextAnchor::End);
          break;
        }
        case LegendEntry::Kind::Swatch:
          out.marks.push_back(make_mark(RectShape{Box::from_xywh(x, mid - 5, 10, 10), 1}, filled(c), {}, "legend-swatch"));
          caption({tx, mid + 0.35 * kLegendFont}, {e.caption});
          break;
        case LegendEntry::Kind::Bar:
        case LegendEntry::Kind::Prism:
          out.marks.push_back(make_mark(RectShape{Box::from_xywh(x + 3, y + 2, 6, h - 4)}, filled(c), {}, "legend-bar"));
          caption({tx, mid + 0.35 * kLegendFont}, {e.caption + " (" + text::format_value(e.size) + " px)"});
          break;
        case LegendEntry::Kind::Circle: {
          Style st = filled(c);
          st.fill_opacity = 0.75;
          out.marks.push_back(make_mark(CircleShape{{x + e.size, mid}, e.size}, st, {}, "legend-circle"));
          caption({tx, mid + 0.35 * kLegendFont}, {e.caption});
          break;
        }
        case LegendEntry::Kind::Icon:
          out.marks.push_back(make_mark(IconShape{e.icon, Box::from_xywh(x, mid - 6, 12, 12)}, filled(c), {}, "legend-icon"));
          caption({tx, mid + 0.35 * kLegendFont}, {e.caption});
          break;
        case LegendEntry::Kind::Line:
          out.marks.push_back(make_mark(PathShape::polyline(std::vector<Vec2>{{x, mid}, {x + 28, mid}}),
                                        stroked(c, e.size), {}, "legend-line"));
          caption({tx, mid + 0.35 * kLegendFont}, {e.caption});
          break;
        case LegendEntry::Kind::Note:
          caption({x, y + kLegendFont}, text::wrap(e.caption, 40));
          break;
      }
      y += h + 2;
    }
  }
  return out;
}

// --- layout ---------------------------------------------------------------------------------

struct Layout {
  Box canvas;
  Box content;  // canvas minus title strip
  Box map;      // projection target
  std::optional<Box> panel;
};

inline constexpr double kTitleStrip = 32.0;

inline Layout plan_layout(const InfographicSpec& spec, double label_width, double label_height) {
  Layout l;
  l.canvas = {0, 0, static_cast<double>(spec.width), static_cast<double>(spec.height)};
  l.content = l.canvas;
  if (!spec.title.empty()) l.content.y0 += kTitleStrip;
  l.map = l.content;
  if (spec.labels && is_matched(spec.labels->strategy)) {
    const double pw = std::min(spec.labels->panel_width, l.canvas.width() * 0.5);
    l.panel = Box{l.canvas.x1 - pw, l.content.y0, l.canvas.x1, l.content.y1};
    l.map.x1 -= pw;
  }
  if (spec.labels && spec.labels->strategy == LabelStrategy::LinkedAligned) {
    const double mw = std::min(label_width + 2 + kAlignedStub + 6, l.canvas.width() * 0.3);
    const double mh = std::min(label_height + 2 + kAlignedStub + 6, l.canvas.height() * 0.3);
    for (Side s : spec.labels->sides) {
      if (s == Side::Left) l.map.x0 += mw;
      if (s == Side::Right) l.map.x1 -= mw;
      if (s == Side::Top) l.map.y0 += mh;
      if (s == Side::Bottom) l.map.y1 -= mh;
    }
  }
  if (l.map.width() < 10 || l.map.height() < 10) fail(ErrorCode::InvalidArgument, "viewport too small for the layout");
  return l;
}

// --- labels -----------------------------------------------------------------------------------

namespace detail {

inline std::vector<LabelItem> label_items(const JoinedData& joined, const MapFrame& frame) {
  std::map<std::string, LabelItem> items;
  auto region_item = [&](const std::string& key) -> LabelItem& {
    auto [it, fresh] = items.try_emplace(key);
    if (fresh) {
      const FrameRegion* r = frame.find(key);
      it->second = {key, r->name, r->anchor, 0.0, {}, {}};
    }
    return it->second;
  };
  if (joined.field_kind == FieldKind::Flow) {
    for (const auto& e : joined.edges) {
      region_item(e.from).priority += e.magnitude;
      region_item(e.to).priority += e.magnitude;
    }
  } else {
    for (const auto& m : joined.matched) {
      auto& it = region_item(m.key);
      if (m.row.label && !text::trim(*m.row.label).empty()) it.text = *m.row.label;
      it.priority = m.row.is_quantitative() ? m.row.number() : region_area(frame.find(m.key)->shape);
    }
  }
  std::vector<LabelItem> out;
  for (auto& [k, v] : items) out.push_back(std::move(v));
  return out;
}

inline bool is_obstacle_role(const std::string& role) {
  return role == "bar" || role.starts_with("prism-") || role == "symbol" || role == "cartogram" ||
         role == "unit-icon" || role == "glyph" || role == "value-text";
}

}  // namespace detail

// --- render -----------------------------------------------------------------------------------

struct RenderInputs {
  InfographicSpec spec;
  RegionSet regions;
  DataTable table;
};

inline RenderInputs parse_inputs(std::string_view spec_bytes, std::string_view data_bytes,
                                 std::string_view boundary_bytes) {
  RenderInputs in;
  in.spec = stage("spec", [&] { return parse_spec(spec_bytes); });
  in.table = stage("data", [&] { return parse_data(data_bytes); });
  in.regions = stage("boundaries", [&] { return parse_boundaries(boundary_bytes); });
  return in;
}

/// Validation only; suggestions are attached when the spec is invalid.
inline ValidationReport check(const InfographicSpec& spec, const DataTable& table, const RegionSet& regions) {
  const auto joined = stage("join", [&] { return join(regions, table, spec.aliases); });
  auto report = stage("validate", [&] { return validate(spec, joined, regions); });
  if (!report.valid) {
    try {
      report.suggestions = suggest_alternatives(spec, joined);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAlternatives) throw;
    }
  }
  return report;
}

inline ValidationReport check(const RenderInputs& in) { return check(in.spec, in.table, in.regions); }

inline RenderResult render(const InfographicSpec& spec, const DataTable& table, const RegionSet& regions) {
  RenderResult out;
  const auto joined = stage("join", [&] { return join(regions, table, spec.aliases); });
  out.report = check(spec, table, regions);
  if (!out.report.valid) return out;

  const Palettes& palettes = default_palettes();

  // Margins for aligned labels depend on the label sizes only.
  double label_w = 0, label_h = 0;
  const double font = spec.labels ? spec.labels->font_size : 10.0;
  if (spec.labels && spec.labels->strategy == LabelStrategy::LinkedAligned) {
    const MapFrame probe(regions, Projection(spec.projection, regions.bbox(), {0, 0, 100, 100}));
    for (const auto& it : detail::label_items(joined, probe)) {
      const auto sz = measure_text(it.text, font);
      label_w = std::max(label_w, sz.width);
      label_h = std::max(label_h, sz.height);
    }
  }
  const Layout layout = stage("layout", [&] { return plan_layout(spec, label_w, label_h); });
  MapFrame frame(regions, Projection(spec.projection, regions.bbox(), layout.map));

  LayerMap layers;
  std::vector<Def> defs;

  // Encoding.
  EncodeContext ctx{frame, spec.basemap, spec.seed, palettes, builtin_icons(), spec.symbols};
  EncodedLayer enc = stage("encode", [&] {
    if (spec.channels.size() == 1) return encode_channel(joined, spec.channels[0], ctx);
    const auto [a, b] = dual_order(spec.channels[0].kind, spec.channels[1].kind);
    return apply_dual(encode_channel(joined, spec.channels[a], ctx), encode_channel(joined, spec.channels[b], ctx),
                      detail::glyph_flag(spec));
  });
  for (const auto& [key, p] : enc.anchors) frame.override_anchor(key, p);
  for (auto& w : enc.warnings) out.warnings.push_back(std::move(w));
  for (auto& d : enc.defs) add_def(defs, std::move(d));

  if (!enc.replaces_regions) {
    layers[Layer::Base] = stage("basemap", [&] { return render_base(spec.basemap, frame, spec.seed, palettes); });
  }
  layers[enc.layer] = std::move(enc.marks);

  std::vector<Box> occupied;  // for labels and adjacent insets
  if (!spec.title.empty()) {
    const Box strip{0, 0, layout.canvas.x1, kTitleStrip};
    layers[Layer::Legend].push_back(make_mark(
        TextShape{{16, 22}, {spec.title}, 16, TextAnchor::Start, true}, filled(Rgb{0x22, 0x22, 0x22}), {}, "title"));
    occupied.push_back(strip);
  }
  if (spec.legend) {
    auto legend = build_legend(enc.legend, {layout.map.x0 + 8, layout.map.y1 - 8});
    if (!legend.box.is_empty()) {
      occupied.push_back(legend.box);
      for (auto& d : legend.defs) add_def(defs, std::move(d));
      for (auto& m : legend.marks) layers[Layer::Legend].push_back(std::move(m));
    }
  }

  // Labels.
  if (spec.labels) {
    stage("labels", [&] {
      const auto& ls = *spec.labels;
      auto items = detail::label_items(joined, frame);
      std::vector<PlacedLabel> placed;
      std::vector<LabelItem> convenient;
      std::vector<Box> obstacles = occupied;
      const auto enc_layer = layers.find(enc.layer);
      if (enc_layer != layers.end()) {
        for (const auto& m : enc_layer->second)
          if (detail::is_obstacle_role(m.role)) obstacles.push_back(mark_bbox(m));
      }
      switch (ls.strategy) {
        case LabelStrategy::Situated:
          for (const auto& it : items) {
            try {
              placed.push_back(place_situated(it, frame.find(it.key)->shape, ls.font_size));
            } catch (const Error& e) {
              if (e.code() != ErrorCode::DoesNotFit) throw;
              if (ls.fallback) {
                convenient.push_back(it);
              } else {
                out.warnings.push_back("label '" + it.text + "' does not fit its region");
              }
            }
          }
          for (const auto& p : placed) obstacles.push_back(p.rect);
          break;
        case LabelStrategy::MatchedText:
        case LabelStrategy::MatchedIcon:
        case LabelStrategy::MatchedColor: {
          MatchMode mode = ls.strategy == LabelStrategy::MatchedText   ? MatchMode::Text
                           : ls.strategy == LabelStrategy::MatchedIcon ? MatchMode::Icon
                                                                       : MatchMode::Color;
          std::size_t i = 0;
          for (auto& it : items) {
            if (mode == MatchMode::Icon) {
              auto name = ls.icons.count(it.key) ? ls.icons.at(it.key) : ls.icon;
              Def d = icon_def(name, ctx);
              it.icon = d.id;
              add_def(defs, std::move(d));
            }
            if (mode == MatchMode::Color) {
              std::optional<Rgb> c;
              if (enc.colors) {
                if (auto f = enc.colors->by_key.find(it.key); f != enc.colors->by_key.end()) c = f->second;
              }
              it.color = c.value_or(category_color(i, palettes.categorical));
            }
            ++i;
          }
          auto legend = build_matched_legend(items, mode, *layout.panel, ls.font_size);
          for (auto& m : legend.anchor_marks) layers[Layer::Labels].push_back(std::move(m));
          for (auto& m : legend.panel_marks) layers[Layer::Legend].push_back(std::move(m));
          occupied.push_back(*layout.panel);
          break;
        }
        case LabelStrategy::LinkedConvenient:
          convenient = items;
          break;
        case LabelStrategy::LinkedAligned: {
          auto r = place_linked_aligned(items, ls.sides, layout.map, layout.content, ls.font_size);
          placed.insert(placed.end(), r.placed.begin(), r.placed.end());
          break;
        }
        case LabelStrategy::LinkedOrdered: {
          auto r = place_linked_ordered(items, ls.guide, ls.font_size);
          placed.insert(placed.end(), r.placed.begin(), r.placed.end());
          break;
        }
      }
      if (!convenient.empty()) {
        auto r = place_linked_convenient(convenient, obstacles, layout.map, ls.font_size);
        placed.insert(placed.end(), r.placed.begin(), r.placed.end());
        for (auto& w : r.warnings) out.warnings.push_back(std::move(w));
      }
      for (const auto& p : placed) occupied.push_back(p.rect);
      for (auto& m : label_marks(placed, ls.font_size)) layers[Layer::Labels].push_back(std::move(m));
    });
  }

  // Highlights.
  if (!spec.highlights.empty()) {
    stage("highlight", [&] {
      HighlightContext hctx{frame, palettes, spec.aliases, layout.map};
      std::vector<Box> taken = occupied;
      if (!enc.replaces_regions) {
        for (const auto& r : frame.regions()) {
          for (const auto& poly : r.shape.polygons) taken.push_back(bounding_box(std::span<const Vec2>(poly.outer)));
        }
      }
      for (const auto& m : layers[enc.layer]) {
        if (detail::is_obstacle_role(m.role)) taken.push_back(mark_bbox(m));
      }
      for (std::size_t i = 0; i < spec.highlights.size(); ++i) {
        try {
          apply_highlight(spec.highlights[i], i, layers, defs, hctx, taken);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoRoom) throw;
          HighlightSpec overlay = spec.highlights[i];
          overlay.placement = InsetPlacement::Overlay;
          apply_highlight(overlay, i, layers, defs, hctx, taken);
          out.warnings.push_back("no free space next to the map for an inset; drawn over the region instead");
        }
        if (auto it = layers.find(Layer::Insets); it != layers.end()) {
          for (const auto& m : it->second)
            if (m.role == "inset-frame") taken.push_back(mark_bbox(m));
        }
      }
    });
  }

  out.scene = stage("compose", [&] { return compose(spec.width, spec.height, std::move(defs), std::move(layers)); });
  out.svg = stage("serialize", [&] { return to_svg(out.scene); });
  return out;
}

inline RenderResult render(const RenderInputs& in) { return render(in.spec, in.table, in.regions); }

/// Never throws for library failures: they become error issues in the report.
inline RenderResult render(std::string_view spec_bytes, std::string_view data_bytes, std::string_view boundary_bytes) {
  try {
    return render(parse_inputs(spec_bytes, data_bytes, boundary_bytes));
  } catch (const StageError& e) {
    RenderResult out;
    out.report.add({std::string(to_string(e.code())), Severity::Error, e.what(), e.stage()});
    return out;
  }
}

/// Report JSON with render warnings folded in as warning issues.
inline nlohmann::ordered_json report_json(const RenderResult& r) {
  ValidationReport rep = r.report;
  for (const auto& w : r.warnings) rep.issues.push_back({"render_warning", Severity::Warning, w, "render"});
  return to_json(rep, !rep.valid);
}

}  // namespace geoglyph
