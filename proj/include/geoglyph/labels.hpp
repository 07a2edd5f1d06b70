#pragma once

// Region label placement: situated, matched (legend panel) and linked
// (leader lines) strategies.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geoglyph/designspace.hpp"
#include "geoglyph/geometry.hpp"
#include "geoglyph/scene.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

inline constexpr std::size_t kLabelWrap = 24;  // codepoints per line

struct TextSize {
  double width = 0.0;
  double height = 0.0;
};

/// Fixed-advance metrics: 0.6 em per codepoint, 1.2 em per line.
inline TextSize measure_text(std::string_view s, double font_size) {
  const auto lines = text::wrap(s, kLabelWrap);
  std::size_t widest = 0;
  for (const auto& l : lines) widest = std::max(widest, text::codepoint_count(l));
  return {0.6 * font_size * static_cast<double>(widest),
          1.2 * font_size * static_cast<double>(std::max<std::size_t>(lines.size(), 1))};
}

struct LabelItem {
  std::string key;
  std::string text;
  Vec2 anchor;
  double priority = 0.0;
  std::string icon;          // symbol def id (matched icon mode)
  std::optional<Rgb> color;  // region color (matched color mode)
};

struct PlacedLabel {
  std::string key;
  std::vector<std::string> lines;
  Box rect;
  std::vector<Vec2> leader;  // anchor first, last point on the rect boundary
};

struct LabelResult {
  std::vector<PlacedLabel> placed;
  std::vector<std::string> dropped;  // keys
  std::vector<std::string> warnings;
};

/// Priority descending, ties by key ascending.
inline std::vector<LabelItem> by_priority(std::vector<LabelItem> items) {
  std::stable_sort(items.begin(), items.end(), [](const LabelItem& a, const LabelItem& b) {
    return a.priority != b.priority ? a.priority > b.priority : a.key < b.key;
  });
  return items;
}

inline Vec2 closest_on_box(const Box& b, Vec2 p) {
  const Vec2 q{std::clamp(p.x, b.x0, b.x1), std::clamp(p.y, b.y0, b.y1)};
  if (!(q == p)) return q;
  // Inside: push to the nearest edge.
  const double dl = p.x - b.x0, dr = b.x1 - p.x, dt = p.y - b.y0, db = b.y1 - p.y;
  const double m = std::min({dl, dr, dt, db});
  if (m == dl) return {b.x0, p.y};
  if (m == dr) return {b.x1, p.y};
  if (m == dt) return {p.x, b.y0};
  return {p.x, b.y1};
}

inline PlacedLabel make_placed(const LabelItem& it, Box rect, std::vector<Vec2> leader = {}) {
  return {it.key, text::wrap(it.text, kLabelWrap), rect, std::move(leader)};
}

// --- situated --------------------------------------------------------------------------

/// Label centered on the anchor; its four corners and center must all lie
/// inside the region.
inline PlacedLabel place_situated(const LabelItem& item, const ScreenRegion& region, double font_size) {
  const auto size = measure_text(item.text, font_size);
  const Box rect = Box::from_center(item.anchor, size.width, size.height);
  for (Vec2 p : {Vec2{rect.x0, rect.y0}, Vec2{rect.x1, rect.y0}, Vec2{rect.x1, rect.y1}, Vec2{rect.x0, rect.y1},
                 rect.center()}) {
    if (!point_in_region(p, region)) {
      fail(ErrorCode::DoesNotFit, "label '" + item.text + "' does not fit inside its region");
    }
  }
  return make_placed(item, rect);
}

// --- matched -------------------------------------------------------------------------------

enum class MatchMode { Text, Icon, Color };

struct MatchedLegend {
  std::vector<Mark> anchor_marks;
  std::vector<Mark> panel_marks;
  std::vector<Box> rows;  // one per item, in panel order
};

inline constexpr double kMatchedSymbol = 12.0;

/// Panel rows pair a symbol (index number, icon or color swatch) with the
/// region name; the same symbol is drawn at the region anchor.
inline MatchedLegend build_matched_legend(const std::vector<LabelItem>& items, MatchMode mode, const Box& panel,
                                          double font_size) {
  MatchedLegend out;
  const auto ordered = by_priority(items);
  const Rgb ink{0x22, 0x22, 0x22};
  double y = panel.y0 + 6;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& it = ordered[i];
    const auto lines = text::wrap(it.text, kLabelWrap);
    const double h = std::max(kMatchedSymbol, 1.2 * font_size * static_cast<double>(lines.size())) + 4;
    const Box row{panel.x0 + 6, y, panel.x1 - 6, y + h};
    if (row.y1 > panel.y1) {
      fail(ErrorCode::PanelOverflow, std::to_string(ordered.size()) + " matched labels do not fit the panel (row " +
                                         std::to_string(i + 1) + ")");
    }
    out.rows.push_back(row);
    const Box sym = Box::from_xywh(row.x0, row.y0 + 2, kMatchedSymbol, kMatchedSymbol);
    const Box at = Box::from_center(it.anchor, kMatchedSymbol, kMatchedSymbol);
    switch (mode) {
      case MatchMode::Text: {
        const std::string n = std::to_string(i + 1);
        auto badge = [&](const Box& b) {
          return TextShape{{b.center().x, b.center().y + 0.35 * font_size}, {n}, font_size, TextAnchor::Middle, true};
        };
        out.anchor_marks.push_back(make_mark(badge(at), filled(ink), it.key, "match-number"));
        out.panel_marks.push_back(make_mark(badge(sym), filled(ink), it.key, "match-number"));
        break;
      }
      case MatchMode::Icon:
        out.anchor_marks.push_back(make_mark(IconShape{it.icon, at}, filled(ink), it.key, "match-icon"));
        out.panel_marks.push_back(make_mark(IconShape{it.icon, sym}, filled(ink), it.key, "match-icon"));
        break;
      case MatchMode::Color: {
        Style s = filled(it.color.value_or(ink));
        s.stroke = Paint::of(Rgb{255, 255, 255});
        s.stroke_width = 1;
        out.anchor_marks.push_back(make_mark(CircleShape{it.anchor, 4}, s, it.key, "match-swatch"));
        out.panel_marks.push_back(make_mark(RectShape{sym, 2}, s, it.key, "match-swatch"));
        break;
      }
    }
    out.panel_marks.push_back(make_mark(
        TextShape{{sym.x1 + 6, row.y0 + 2 + font_size}, lines, font_size, TextAnchor::Start, false}, filled(ink),
        it.key, "match-name"));
    y = row.y1;
  }
  return out;
}

// --- linked: convenient --------------------------------------------------------------------

inline constexpr std::array<double, 5> kConvenientRadii = {12, 20, 28, 36, 44};

/// Rect attached to the point at `radius` along compass slot `slot`
/// (0 = East, then clockwise on screen).
inline Box compass_rect(Vec2 anchor, int slot, double radius, TextSize size) {
  const double a = slot * std::numbers::pi / 4;
  const double dx = std::cos(a);
  const double dy = std::sin(a);
  const Vec2 p = anchor + Vec2{dx, dy} * radius;
  const double x0 = dx > 0.3 ? p.x : dx < -0.3 ? p.x - size.width : p.x - size.width / 2;
  const double y0 = dy > 0.3 ? p.y : dy < -0.3 ? p.y - size.height : p.y - size.height / 2;
  return Box::from_xywh(x0, y0, size.width, size.height);
}

/// Greedy compass search. A candidate must stay on the canvas, avoid every
/// obstacle (placed labels become obstacles) and keep its leader clear of
/// placed labels.
inline LabelResult place_linked_convenient(const std::vector<LabelItem>& items, std::vector<Box> obstacles,
                                           const Box& canvas, double font_size, double eps = 0.01) {
  LabelResult out;
  std::vector<Box> placed;
  for (const auto& it : by_priority(items)) {
    const auto size = measure_text(it.text, font_size);
    bool done = false;
    for (double r : kConvenientRadii) {
      for (int slot = 0; slot < 8 && !done; ++slot) {
        const Box rect = compass_rect(it.anchor, slot, r, size);
        if (!canvas.contains(rect)) continue;
        if (std::any_of(obstacles.begin(), obstacles.end(), [&](const Box& o) { return overlaps(rect, o, -eps); })) {
          continue;
        }
        const Vec2 end = closest_on_box(rect, it.anchor);
        if (std::any_of(placed.begin(), placed.end(),
                        [&](const Box& o) { return segment_hits_box(it.anchor, end, o.inflated(eps)); })) {
          continue;
        }
        out.placed.push_back(make_placed(it, rect, {it.anchor, end}));
        placed.push_back(rect);
        obstacles.push_back(rect);
        done = true;
      }
      if (done) break;
    }
    if (!done) {
      out.dropped.push_back(it.key);
      out.warnings.push_back("no free position for label '" + it.text + "'");
    }
  }
  return out;
}

// --- linked: aligned ------------------------------------------------------------------------

/// Nondecreasing least-squares fit (pool adjacent violators).
inline std::vector<double> isotonic(const std::vector<double>& y) {
  struct Block {
    double sum;
    double n;
  };
  std::vector<Block> blocks;
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].sum / blocks[blocks.size() - 2].n > blocks.back().sum / blocks.back().n) {
      const Block b = blocks.back();
      blocks.pop_back();
      blocks.back().sum += b.sum;
      blocks.back().n += b.n;
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks)
    for (int i = 0; i < static_cast<int>(b.n); ++i) out.push_back(b.sum / b.n);
  return out;
}

/// Centers as close as possible to `desired` (sorted) with pitch >= `pitch`
/// inside [lo, hi]. Throws SideOverflow if they cannot fit.
inline std::vector<double> spread(const std::vector<double>& desired, double pitch, double lo, double hi) {
  const std::size_t n = desired.size();
  if (n == 0) return {};
  const double L = lo + pitch / 2;
  const double U = hi - pitch / 2 - pitch * static_cast<double>(n - 1);
  if (L > U + 1e-9) fail(ErrorCode::SideOverflow, std::to_string(n) + " aligned labels do not fit along the side");
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = desired[i] - pitch * static_cast<double>(i);
  auto fit = isotonic(b);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(fit[i], L, std::max(L, U)) + pitch * static_cast<double>(i);
  return out;
}

inline Side nearest_side(Vec2 p, const Box& map, const std::vector<Side>& sides) {
  Side best = sides.front();
  double bd = INFINITY;
  for (Side s : sides) {
    const double d = s == Side::Left ? p.x - map.x0 : s == Side::Right ? map.x1 - p.x
                   : s == Side::Top  ? p.y - map.y0 : map.y1 - p.y;
    if (d < bd) {
      bd = d;
      best = s;
    }
  }
  return best;
}

inline constexpr double kAlignedGap = 4.0;   // between stacked labels
inline constexpr double kAlignedStub = 8.0;  // straight run into the label

/// Labels stacked in columns/rows outside `map`, within `area`. Leaders run
/// anchor -> elbow -> label edge; the last run is perpendicular to the side.
/// Slots are assigned so that per side leaders never cross.
inline LabelResult place_linked_aligned(const std::vector<LabelItem>& items, const std::vector<Side>& sides,
                                        const Box& map, const Box& area, double font_size) {
  if (sides.empty()) fail(ErrorCode::InvalidArgument, "aligned labels need at least one side");
  LabelResult out;
  std::map<Side, std::vector<LabelItem>> groups;
  for (const auto& it : items) groups[nearest_side(it.anchor, map, sides)].push_back(it);
  for (auto& [side, group] : groups) {
    const bool vertical = side == Side::Left || side == Side::Right;
    auto along = [&](Vec2 p) { return vertical ? p.y : p.x; };
    std::stable_sort(group.begin(), group.end(), [&](const LabelItem& a, const LabelItem& b) {
      return along(a.anchor) != along(b.anchor) ? along(a.anchor) < along(b.anchor) : a.key < b.key;
    });
    std::vector<TextSize> sizes;
    double extent = 0;
    for (const auto& it : group) {
      sizes.push_back(measure_text(it.text, font_size));
      extent = std::max(extent, vertical ? sizes.back().height : sizes.back().width);
    }
    std::vector<double> desired;
    for (const auto& it : group) desired.push_back(along(it.anchor));
    const double lo = vertical ? area.y0 : area.x0;
    const double hi = vertical ? area.y1 : area.x1;
    const auto centers = spread(desired, extent + kAlignedGap, lo, hi);

    // Port (elbow) of slot k and the label edge it feeds.
    const double line = side == Side::Left ? map.x0 - 2 : side == Side::Right ? map.x1 + 2
                      : side == Side::Top  ? map.y0 - 2 : map.y1 + 2;
    const double dir = (side == Side::Left || side == Side::Top) ? -1.0 : 1.0;
    auto port = [&](std::size_t k) { return vertical ? Vec2{line, centers[k]} : Vec2{centers[k], line}; };
    std::vector<std::size_t> slot(group.size());
    for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = i;
    // Uncross: swapping the slots of two crossing leaders strictly shortens
    // the total length, so this terminates.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) {
          const Vec2 ai = group[i].anchor, aj = group[j].anchor;
          const Vec2 pi = port(slot[i]), pj = port(slot[j]);
          if (segments_intersect(ai, pi, aj, pj) &&
              distance(ai, pj) + distance(aj, pi) < distance(ai, pi) + distance(aj, pj) - 1e-12) {
            std::swap(slot[i], slot[j]);
            changed = true;
          }
        }
      }
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& it = group[i];
      const TextSize sz = sizes[i];
      const Vec2 elbow = port(slot[i]);
      const double c = centers[slot[i]];
      const double edge = line + dir * kAlignedStub;
      Box rect;
      Vec2 end;
      if (vertical) {
        rect = dir < 0 ? Box{edge - sz.width, c - sz.height / 2, edge, c + sz.height / 2}
                       : Box{edge, c - sz.height / 2, edge + sz.width, c + sz.height / 2};
        end = {edge, c};
      } else {
        rect = dir < 0 ? Box{c - sz.width / 2, edge - sz.height, c + sz.width / 2, edge}
                       : Box{c - sz.width / 2, edge, c + sz.width / 2, edge + sz.height};
        end = {c, edge};
      }
      out.placed.push_back(make_placed(it, rect, {it.anchor, elbow, end}));
    }
  }
  return out;
}

// --- linked: ordered ---------------------------------------------------------------------------

inline Vec2 point_at_length(const std::vector<Vec2>& path, double s) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double l = distance(path[i - 1], path[i]);
    if (s <= l || i + 1 == path.size()) {
      const double t = l > 0 ? std::clamp(s / l, 0.0, 1.0) : 0.0;
      return path[i - 1] + (path[i] - path[i - 1]) * t;
    }
    s -= l;
  }
  return path.front();
}

/// Labels centered at arc-length fractions (i + 0.5) / n of the guide, in
/// priority order, with straight leaders.
inline LabelResult place_linked_ordered(const std::vector<LabelItem>& items, const std::vector<Vec2>& guide,
                                        double font_size) {
  if (guide.size() < 2) fail(ErrorCode::InvalidArgument, "ordered labels need a guide with at least two points");
  double total = 0;
  for (std::size_t i = 1; i < guide.size(); ++i) total += distance(guide[i - 1], guide[i]);
  LabelResult out;
  const auto ordered = by_priority(items);
  const double n = static_cast<double>(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& it = ordered[i];
    const auto sz = measure_text(it.text, font_size);
    const Vec2 c = point_at_length(guide, (static_cast<double>(i) + 0.5) / n * total);
    const Box rect = Box::from_center(c, sz.width, sz.height);
    out.placed.push_back(make_placed(it, rect, {it.anchor, closest_on_box(rect, it.anchor)}));
  }
  return out;
}

// --- marks -----------------------------------------------------------------------------------

/// Text (and leader, if any) marks for placed labels.
inline std::vector<Mark> label_marks(const std::vector<PlacedLabel>& placed, double font_size) {
  std::vector<Mark> out;
  const Rgb ink{0x22, 0x22, 0x22};
  for (const auto& p : placed) {
    if (p.leader.size() >= 2) {
      Style s = stroked(Rgb{0x66, 0x66, 0x66}, 0.75);
      out.push_back(make_mark(PathShape::polyline(p.leader), s, p.key, "leader"));
    }
    const double x = p.rect.center().x;
    out.push_back(make_mark(TextShape{{x, p.rect.y0 + font_size}, p.lines, font_size, TextAnchor::Middle, false},
                            filled(ink), p.key, "label"));
  }
  return out;
}

}  // namespace geoglyph
