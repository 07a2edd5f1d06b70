#pragma once

// Scene graph: marks in fixed layers, id assignment and byte-stable SVG.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geoglyph/error.hpp"
#include "geoglyph/geometry.hpp"
#include "geoglyph/scales.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

// --- style ------------------------------------------------------------------------

struct Paint {
  enum class Kind { Unset, None, Color, Ref };
  Kind kind = Kind::Unset;
  Rgb color;
  std::string ref;

  static Paint none() { return {Kind::None, {}, {}}; }
  static Paint of(Rgb c) { return {Kind::Color, c, {}}; }
  static Paint url(std::string id) { return {Kind::Ref, {}, std::move(id)}; }

  bool is_color() const { return kind == Kind::Color; }
  friend bool operator==(const Paint&, const Paint&) = default;
};

struct Style {
  Paint fill;
  Paint stroke;
  std::optional<double> stroke_width;
  std::optional<double> opacity;
  std::optional<double> fill_opacity;
  std::string dash;  // stroke-dasharray
  bool round_joins = false;

  friend bool operator==(const Style&, const Style&) = default;
};

inline Style filled(Rgb c) { return Style{.fill = Paint::of(c)}; }
inline Style stroked(Rgb c, double w) {
  return Style{.fill = Paint::none(), .stroke = Paint::of(c), .stroke_width = w};
}

// --- shapes -----------------------------------------------------------------------

struct PathCmd {
  char op = 'M';  // M L Q A Z
  std::array<double, 7> a{};

  friend bool operator==(const PathCmd&, const PathCmd&) = default;
};

struct PathShape {
  std::vector<PathCmd> cmds;

  PathShape& move_to(Vec2 p) { return push('M', {p.x, p.y}); }
  PathShape& line_to(Vec2 p) { return push('L', {p.x, p.y}); }
  PathShape& quad_to(Vec2 c, Vec2 p) { return push('Q', {c.x, c.y, p.x, p.y}); }
  PathShape& arc_to(double rx, double ry, bool large, bool sweep, Vec2 p) {
    return push('A', {rx, ry, 0, large ? 1.0 : 0.0, sweep ? 1.0 : 0.0, p.x, p.y});
  }
  PathShape& close() { return push('Z', {}); }

  static PathShape polygon(std::span<const Vec2> pts) {
    PathShape s;
    for (std::size_t i = 0; i < pts.size(); ++i) i == 0 ? s.move_to(pts[i]) : s.line_to(pts[i]);
    if (!pts.empty()) s.close();
    return s;
  }
  static PathShape polyline(std::span<const Vec2> pts) {
    PathShape s;
    for (std::size_t i = 0; i < pts.size(); ++i) i == 0 ? s.move_to(pts[i]) : s.line_to(pts[i]);
    return s;
  }
  static PathShape region(const ScreenRegion& r) {
    PathShape s;
    for_each_ring(r, [&](const ScreenRing& ring) {
      for (std::size_t i = 0; i < ring.size(); ++i) i == 0 ? s.move_to(ring[i]) : s.line_to(ring[i]);
      s.close();
    });
    return s;
  }

  friend bool operator==(const PathShape&, const PathShape&) = default;

 private:
  PathShape& push(char op, std::initializer_list<double> args) {
    PathCmd c{op, {}};
    std::copy(args.begin(), args.end(), c.a.begin());
    cmds.push_back(c);
    return *this;
  }
};

struct RectShape {
  Box box;
  double rx = 0.0;
  friend bool operator==(const RectShape&, const RectShape&) = default;
};

struct CircleShape {
  Vec2 c;
  double r = 0.0;
  friend bool operator==(const CircleShape&, const CircleShape&) = default;
};

enum class TextAnchor { Start, Middle, End };

/// `at` is the baseline origin of the first line; further lines step 1.2 em.
struct TextShape {
  Vec2 at;
  std::vector<std::string> lines;
  double font_size = 10.0;
  TextAnchor anchor = TextAnchor::Start;
  bool bold = false;
  friend bool operator==(const TextShape&, const TextShape&) = default;
};

/// Reference to a symbol definition drawn into `box`.
struct IconShape {
  std::string def;
  Box box;
  friend bool operator==(const IconShape&, const IconShape&) = default;
};

struct Mark;

struct GroupShape {
  std::vector<Mark> children;
  bool operator==(const GroupShape& o) const;
};

struct Mark {
  std::variant<PathShape, RectShape, CircleShape, TextShape, GroupShape, IconShape> shape;
  Style style;
  std::string key;   // region key, empty for non-region marks
  std::string role;  // serialized as class
  std::string id;    // assigned by compose()
  std::optional<double> datum;  // encoded value, not serialized

  friend bool operator==(const Mark&, const Mark&) = default;
};

inline bool GroupShape::operator==(const GroupShape& o) const { return children == o.children; }

inline Mark make_mark(auto shape, Style style, std::string key = {}, std::string role = {}) {
  return Mark{std::move(shape), std::move(style), std::move(key), std::move(role), {}, {}};
}

// --- geometry of marks --------------------------------------------------------------

/// Rendered extent of lines of text positioned like TextShape.
inline Box text_box(const TextShape& t) {
  std::size_t widest = 0;
  for (const auto& l : t.lines) widest = std::max(widest, text::codepoint_count(l));
  const double w = 0.6 * t.font_size * static_cast<double>(widest);
  const double h = 1.2 * t.font_size * static_cast<double>(t.lines.size());
  double x0 = t.at.x;
  if (t.anchor == TextAnchor::Middle) x0 -= w / 2;
  if (t.anchor == TextAnchor::End) x0 -= w;
  // The first baseline sits one em below the top of the box.
  return Box::from_xywh(x0, t.at.y - t.font_size, w, h);
}

inline Box mark_bbox(const Mark& m) {
  Box b = Box::empty();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PathShape>) {
          Vec2 cur{};
          for (const auto& c : s.cmds) {
            switch (c.op) {
              case 'M':
              case 'L':
                cur = {c.a[0], c.a[1]};
                b.expand(cur);
                break;
              case 'Q':
                b.expand(Vec2{c.a[0], c.a[1]});
                cur = {c.a[2], c.a[3]};
                b.expand(cur);
                break;
              case 'A': {
                // Conservative: the arc stays within its radius of both ends.
                const Vec2 next{c.a[5], c.a[6]};
                const double r = std::max(c.a[0], c.a[1]);
                for (Vec2 p : {cur, next}) b.expand(Box{p.x - r, p.y - r, p.x + r, p.y + r});
                cur = next;
                break;
              }
              default:
                break;
            }
          }
        } else if constexpr (std::is_same_v<T, RectShape>) {
          b = s.box;
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          b = Box{s.c.x - s.r, s.c.y - s.r, s.c.x + s.r, s.c.y + s.r};
        } else if constexpr (std::is_same_v<T, TextShape>) {
          b = text_box(s);
        } else if constexpr (std::is_same_v<T, IconShape>) {
          b = s.box;
        } else {
          for (const auto& child : s.children) b.expand(mark_bbox(child));
        }
      },
      m.shape);
  if (!b.is_empty() && m.style.stroke.kind != Paint::Kind::Unset &&
      m.style.stroke.kind != Paint::Kind::None && m.style.stroke_width) {
    b = b.inflated(*m.style.stroke_width / 2);
  }
  return b;
}

/// Applies v' = scale*(v - center) + center + offset to every coordinate and
/// scales lengths (radii, font sizes, stroke widths) by `scale`.
inline Mark transformed(const Mark& m, const Affine& t) {
  Mark out = m;
  const double k = t.scale;
  std::visit(
      [&](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PathShape>) {
          for (auto& c : s.cmds) {
            switch (c.op) {
              case 'M':
              case 'L': {
                const Vec2 p = t({c.a[0], c.a[1]});
                c.a[0] = p.x;
                c.a[1] = p.y;
                break;
              }
              case 'Q': {
                const Vec2 p = t({c.a[0], c.a[1]});
                const Vec2 q = t({c.a[2], c.a[3]});
                c.a = {p.x, p.y, q.x, q.y, 0, 0, 0};
                break;
              }
              case 'A': {
                const Vec2 p = t({c.a[5], c.a[6]});
                c.a[0] *= k;
                c.a[1] *= k;
                c.a[5] = p.x;
                c.a[6] = p.y;
                break;
              }
              default:
                break;
            }
          }
        } else if constexpr (std::is_same_v<T, RectShape>) {
          const Vec2 a = t({s.box.x0, s.box.y0});
          const Vec2 b = t({s.box.x1, s.box.y1});
          s.box = {a.x, a.y, b.x, b.y};
          s.rx *= k;
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          s.c = t(s.c);
          s.r *= k;
        } else if constexpr (std::is_same_v<T, TextShape>) {
          s.at = t(s.at);
          s.font_size *= k;
        } else if constexpr (std::is_same_v<T, IconShape>) {
          const Vec2 a = t({s.box.x0, s.box.y0});
          const Vec2 b = t({s.box.x1, s.box.y1});
          s.box = {a.x, a.y, b.x, b.y};
        } else {
          for (auto& child : s.children) child = transformed(child, t);
        }
      },
      out.shape);
  if (out.style.stroke_width) out.style.stroke_width = *out.style.stroke_width * k;
  return out;
}

// --- definitions ----------------------------------------------------------------------

struct GradientStop {
  double offset = 0.0;
  Rgb color;
  double opacity = 1.0;
  friend bool operator==(const GradientStop&, const GradientStop&) = default;
};

/// Radial gradients use the object bounding box (center 0.5, radius 0.5).
struct RadialGradientDef {
  std::vector<GradientStop> stops;
  friend bool operator==(const RadialGradientDef&, const RadialGradientDef&) = default;
};

struct LinearGradientDef {
  Vec2 from{0, 0};
  Vec2 to{1, 0};
  std::vector<GradientStop> stops;
  friend bool operator==(const LinearGradientDef&, const LinearGradientDef&) = default;
};

struct SymbolDef {
  double view_box = 24.0;
  std::string path;  // raw path data
  friend bool operator==(const SymbolDef&, const SymbolDef&) = default;
};

struct Def {
  std::string id;
  std::variant<SymbolDef, RadialGradientDef, LinearGradientDef> body;
  friend bool operator==(const Def&, const Def&) = default;
};

/// Adds `d` unless an identical definition with the same id exists; a
/// different body under the same id is a DuplicateId.
inline void add_def(std::vector<Def>& defs, Def d) {
  for (const auto& e : defs) {
    if (e.id == d.id) {
      if (e == d) return;
      fail(ErrorCode::DuplicateId, "definition id '" + d.id + "' is used twice");
    }
  }
  defs.push_back(std::move(d));
}

// --- scene ----------------------------------------------------------------------------

enum class Layer { Base, Encoding, HighlightUnder, Flow, HighlightOver, Labels, Legend, Insets };

inline constexpr std::array<Layer, 8> kLayerOrder = {
    Layer::Base,          Layer::Encoding, Layer::HighlightUnder, Layer::Flow,
    Layer::HighlightOver, Layer::Labels,   Layer::Legend,         Layer::Insets,
};

constexpr std::string_view layer_prefix(Layer l) {
  switch (l) {
    case Layer::Base: return "base";
    case Layer::Encoding: return "enc";
    case Layer::HighlightUnder: return "hlu";
    case Layer::Flow: return "flow";
    case Layer::HighlightOver: return "hlo";
    case Layer::Labels: return "label";
    case Layer::Legend: return "legend";
    case Layer::Insets: return "inset";
  }
  return "";
}

struct SceneGraph {
  int width = 0;
  int height = 0;
  std::vector<Def> defs;
  std::array<std::vector<Mark>, 8> layers;

  std::vector<Mark>& layer(Layer l) { return layers[static_cast<std::size_t>(l)]; }
  const std::vector<Mark>& layer(Layer l) const { return layers[static_cast<std::size_t>(l)]; }

  std::size_t mark_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
  }
  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

/// Id-safe form of a region key: ASCII letters, digits and '-' kept, anything
/// else becomes '_'.
inline std::string sanitize_id(std::string_view key) {
  std::string out;
  for (unsigned char c : key) {
    const bool ok = std::isalnum(c) != 0 || c == '-';
    out.push_back(ok && c < 0x80 ? static_cast<char>(c) : '_');
  }
  return out;
}

namespace detail {

inline void collect_refs(const Mark& m, std::vector<std::string>& refs) {
  for (const Paint* p : {&m.style.fill, &m.style.stroke})
    if (p->kind == Paint::Kind::Ref) refs.push_back(p->ref);
  if (const auto* icon = std::get_if<IconShape>(&m.shape)) refs.push_back(icon->def);
  if (const auto* g = std::get_if<GroupShape>(&m.shape)) {
    for (const auto& c : g->children) collect_refs(c, refs);
  }
}

}  // namespace detail

/// Slots marks into the fixed layer order and assigns ids:
/// "<layer>-<key>" for a region's only mark in a layer, "<layer>-<key>-<n>"
/// when it has several, "<layer>-<n>" for marks without a region.
inline SceneGraph compose(int width, int height, std::vector<Def> defs,
                          std::map<Layer, std::vector<Mark>> layers) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "viewport must be positive");
  SceneGraph scene;
  scene.width = width;
  scene.height = height;
  std::set<std::string> ids;
  for (const auto& d : defs) {
    if (!ids.insert(d.id).second) fail(ErrorCode::DuplicateId, "duplicate id '" + d.id + "'");
  }
  scene.defs = std::move(defs);
  for (auto& [layer, marks] : layers) {
    const std::string prefix(layer_prefix(layer));
    std::map<std::string, std::size_t> per_key;
    for (const auto& m : marks)
      if (!m.key.empty()) ++per_key[m.key];
    std::map<std::string, std::size_t> seen;
    std::size_t loose = 0;
    for (auto& m : marks) {
      if (m.key.empty()) {
        m.id = prefix + "-" + std::to_string(loose++);
      } else {
        const std::string base = prefix + "-" + sanitize_id(m.key);
        m.id = per_key[m.key] == 1 ? base : base + "-" + std::to_string(seen[m.key]++);
      }
      if (!ids.insert(m.id).second) fail(ErrorCode::DuplicateId, "duplicate id '" + m.id + "'");
    }
    scene.layer(layer) = std::move(marks);
  }
  std::vector<std::string> refs;
  for (const auto& l : scene.layers)
    for (const auto& m : l) detail::collect_refs(m, refs);
  std::set<std::string> def_ids;
  for (const auto& d : scene.defs) def_ids.insert(d.id);
  for (const auto& r : refs) {
    if (!def_ids.count(r)) fail(ErrorCode::UnresolvedReference, "no definition for '#" + r + "'");
  }
  return scene;
}

// --- SVG ------------------------------------------------------------------------------

namespace svg {

using Attrs = std::vector<std::pair<std::string, std::string>>;

inline std::string num(double v) { return text::fixed2(v); }

class Writer {
 public:
  void open(std::string_view tag, Attrs attrs, int depth) { line(tag, std::move(attrs), depth, ">"); }
  void leaf(std::string_view tag, Attrs attrs, int depth) { line(tag, std::move(attrs), depth, "/>"); }
  void close(std::string_view tag, int depth) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }
  void element_with_text(std::string_view tag, Attrs attrs, const std::string& body, int depth) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    start(tag, std::move(attrs));
    out_ += ">";
    out_ += text::xml_escape(body);
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }
  void raw(std::string_view s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  void start(std::string_view tag, Attrs attrs) {
    std::stable_sort(attrs.begin(), attrs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    out_ += "<";
    out_ += tag;
    for (const auto& [k, v] : attrs) {
      out_ += " ";
      out_ += k;
      out_ += "=\"";
      out_ += text::xml_escape(v);
      out_ += "\"";
    }
  }
  void line(std::string_view tag, Attrs attrs, int depth, std::string_view end) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    start(tag, std::move(attrs));
    out_ += end;
    out_ += "\n";
  }

  std::string out_;
};

inline std::string path_data(const PathShape& p) {
  std::string d;
  for (const auto& c : p.cmds) {
    d.push_back(c.op);
    switch (c.op) {
      case 'M':
      case 'L':
        d += num(c.a[0]) + " " + num(c.a[1]);
        break;
      case 'Q':
        d += num(c.a[0]) + " " + num(c.a[1]) + " " + num(c.a[2]) + " " + num(c.a[3]);
        break;
      case 'A':
        d += num(c.a[0]) + " " + num(c.a[1]) + " 0 " + (c.a[3] != 0 ? "1" : "0") + " " +
             (c.a[4] != 0 ? "1" : "0") + " " + num(c.a[5]) + " " + num(c.a[6]);
        break;
      default:
        break;
    }
  }
  return d;
}

inline std::string paint(const Paint& p) {
  switch (p.kind) {
    case Paint::Kind::None: return "none";
    case Paint::Kind::Color: return to_hex(p.color);
    case Paint::Kind::Ref: return "url(#" + p.ref + ")";
    default: return "";
  }
}

inline void style_attrs(const Style& s, Attrs& a) {
  if (s.fill.kind != Paint::Kind::Unset) a.emplace_back("fill", paint(s.fill));
  if (s.stroke.kind != Paint::Kind::Unset) a.emplace_back("stroke", paint(s.stroke));
  if (s.stroke_width) a.emplace_back("stroke-width", num(*s.stroke_width));
  if (s.opacity) a.emplace_back("opacity", num(*s.opacity));
  if (s.fill_opacity) a.emplace_back("fill-opacity", num(*s.fill_opacity));
  if (!s.dash.empty()) a.emplace_back("stroke-dasharray", s.dash);
  if (s.round_joins) {
    a.emplace_back("stroke-linejoin", "round");
    a.emplace_back("stroke-linecap", "round");
  }
}

inline void write_mark(Writer& w, const Mark& m, int depth) {
  Attrs a;
  if (!m.id.empty()) a.emplace_back("id", m.id);
  if (!m.role.empty()) a.emplace_back("class", m.role);
  style_attrs(m.style, a);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PathShape>) {
          a.emplace_back("d", path_data(s));
          w.leaf("path", std::move(a), depth);
        } else if constexpr (std::is_same_v<T, RectShape>) {
          a.emplace_back("x", num(s.box.x0));
          a.emplace_back("y", num(s.box.y0));
          a.emplace_back("width", num(s.box.width()));
          a.emplace_back("height", num(s.box.height()));
          if (s.rx > 0) a.emplace_back("rx", num(s.rx));
          w.leaf("rect", std::move(a), depth);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          a.emplace_back("cx", num(s.c.x));
          a.emplace_back("cy", num(s.c.y));
          a.emplace_back("r", num(s.r));
          w.leaf("circle", std::move(a), depth);
        } else if constexpr (std::is_same_v<T, TextShape>) {
          a.emplace_back("font-family", "sans-serif");
          a.emplace_back("font-size", num(s.font_size));
          if (s.bold) a.emplace_back("font-weight", "bold");
          if (s.anchor == TextAnchor::Middle) a.emplace_back("text-anchor", "middle");
          if (s.anchor == TextAnchor::End) a.emplace_back("text-anchor", "end");
          if (s.lines.size() == 1) {
            a.emplace_back("x", num(s.at.x));
            a.emplace_back("y", num(s.at.y));
            w.element_with_text("text", std::move(a), s.lines[0], depth);
          } else {
            w.open("text", std::move(a), depth);
            for (std::size_t i = 0; i < s.lines.size(); ++i) {
              w.element_with_text(
                  "tspan",
                  {{"x", num(s.at.x)}, {"y", num(s.at.y + 1.2 * s.font_size * static_cast<double>(i))}},
                  s.lines[i], depth + 1);
            }
            w.close("text", depth);
          }
        } else if constexpr (std::is_same_v<T, IconShape>) {
          a.emplace_back("xlink:href", "#" + s.def);
          a.emplace_back("x", num(s.box.x0));
          a.emplace_back("y", num(s.box.y0));
          a.emplace_back("width", num(s.box.width()));
          a.emplace_back("height", num(s.box.height()));
          w.leaf("use", std::move(a), depth);
        } else {
          w.open("g", std::move(a), depth);
          for (const auto& c : s.children) write_mark(w, c, depth + 1);
          w.close("g", depth);
        }
      },
      m.shape);
}

inline void write_stops(Writer& w, const std::vector<GradientStop>& stops, int depth) {
  for (const auto& s : stops) {
    w.leaf("stop",
           {{"offset", num(s.offset)}, {"stop-color", to_hex(s.color)}, {"stop-opacity", num(s.opacity)}},
           depth);
  }
}

inline void write_def(Writer& w, const Def& d, int depth) {
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SymbolDef>) {
          w.open("symbol", {{"id", d.id}, {"viewBox", "0 0 " + num(b.view_box) + " " + num(b.view_box)}}, depth);
          w.leaf("path", {{"d", b.path}}, depth + 1);
          w.close("symbol", depth);
        } else if constexpr (std::is_same_v<T, RadialGradientDef>) {
          w.open("radialGradient", {{"id", d.id}}, depth);
          write_stops(w, b.stops, depth + 1);
          w.close("radialGradient", depth);
        } else {
          w.open("linearGradient",
                 {{"id", d.id},
                  {"x1", num(b.from.x)},
                  {"y1", num(b.from.y)},
                  {"x2", num(b.to.x)},
                  {"y2", num(b.to.y)}},
                 depth);
          write_stops(w, b.stops, depth + 1);
          w.close("linearGradient", depth);
        }
      },
      d.body);
}

}  // namespace svg

/// Standalone SVG document. Pure: equal scenes give equal bytes.
inline std::string to_svg(const SceneGraph& scene) {
  svg::Writer w;
  w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  const std::string wd = std::to_string(scene.width);
  const std::string ht = std::to_string(scene.height);
  svg::Attrs root = {{"width", wd},
                     {"height", ht},
                     {"viewBox", "0 0 " + wd + " " + ht},
                     {"xmlns", "http://www.w3.org/2000/svg"},
                     {"xmlns:xlink", "http://www.w3.org/1999/xlink"}};
  if (scene.defs.empty() && scene.mark_count() == 0) {
    w.leaf("svg", std::move(root), 0);
    return w.take();
  }
  w.open("svg", std::move(root), 0);
  if (!scene.defs.empty()) {
    w.open("defs", {}, 1);
    for (const auto& d : scene.defs) svg::write_def(w, d, 2);
    w.close("defs", 1);
  }
  for (auto l : kLayerOrder) {
    const auto& marks = scene.layer(l);
    if (marks.empty()) continue;
    w.open("g", {{"id", "layer-" + std::string(layer_prefix(l))}}, 1);
    for (const auto& m : marks) svg::write_mark(w, m, 2);
    w.close("g", 1);
  }
  w.close("svg", 0);
  return w.take();
}

}  // namespace geoglyph
