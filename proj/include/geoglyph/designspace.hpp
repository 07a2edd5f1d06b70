#pragma once

// The four-dimension grammar (base map, encoding channels, labels,
// highlights), the dual-encoding compatibility matrix, spec parsing and the
// validation/suggestion engine.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/dataio.hpp"
#include "geoglyph/error.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/resources.hpp"
#include "geoglyph/scales.hpp"

namespace geoglyph {

// --- enumerations -------------------------------------------------------------

enum class ChannelKind {
  ColorIntensity,
  ColorHue,
  Length2D,
  Length3D,
  Size,
  Quantity,
  Glyph,
  DirectionalFlow,
  NonDirectionalFlow,
  Text,
};

inline constexpr std::array<ChannelKind, 10> kAllChannels = {
    ChannelKind::ColorIntensity, ChannelKind::ColorHue,        ChannelKind::Length2D,
    ChannelKind::Length3D,       ChannelKind::Size,            ChannelKind::Quantity,
    ChannelKind::Glyph,          ChannelKind::DirectionalFlow, ChannelKind::NonDirectionalFlow,
    ChannelKind::Text,
};

/// Fixed ranking used when proposing replacements.
inline constexpr std::array<ChannelKind, 10> kSuggestionPriority = {
    ChannelKind::ColorIntensity, ChannelKind::ColorHue, ChannelKind::Length2D,
    ChannelKind::Size,           ChannelKind::Quantity, ChannelKind::Length3D,
    ChannelKind::Glyph,          ChannelKind::Text,     ChannelKind::DirectionalFlow,
    ChannelKind::NonDirectionalFlow,
};

constexpr std::string_view to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::ColorIntensity: return "color_intensity";
    case ChannelKind::ColorHue: return "color_hue";
    case ChannelKind::Length2D: return "length_2d";
    case ChannelKind::Length3D: return "length_3d";
    case ChannelKind::Size: return "size";
    case ChannelKind::Quantity: return "quantity";
    case ChannelKind::Glyph: return "glyph";
    case ChannelKind::DirectionalFlow: return "directional_flow";
    case ChannelKind::NonDirectionalFlow: return "non_directional_flow";
    case ChannelKind::Text: return "text";
  }
  return "";
}

inline std::optional<ChannelKind> channel_from_string(std::string_view s) {
  for (auto k : kAllChannels)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr bool is_color(ChannelKind k) {
  return k == ChannelKind::ColorIntensity || k == ChannelKind::ColorHue;
}
constexpr bool is_flow(ChannelKind k) {
  return k == ChannelKind::DirectionalFlow || k == ChannelKind::NonDirectionalFlow;
}

enum class BaseMapKind {
  Implicit,
  MinimalPolitical,
  ShapeBasedUniform,
  ShapeBasedVaried,
  Topographic,
  Street,
};

inline constexpr std::array<BaseMapKind, 6> kAllBaseMaps = {
    BaseMapKind::Implicit,         BaseMapKind::MinimalPolitical, BaseMapKind::ShapeBasedUniform,
    BaseMapKind::ShapeBasedVaried, BaseMapKind::Topographic,      BaseMapKind::Street,
};

constexpr std::string_view to_string(BaseMapKind k) {
  switch (k) {
    case BaseMapKind::Implicit: return "implicit";
    case BaseMapKind::MinimalPolitical: return "minimal_political";
    case BaseMapKind::ShapeBasedUniform: return "shape_based_uniform";
    case BaseMapKind::ShapeBasedVaried: return "shape_based_varied";
    case BaseMapKind::Topographic: return "topographic";
    case BaseMapKind::Street: return "street";
  }
  return "";
}

/// Topographic and street maps need elevation / tile data and are not rendered.
constexpr bool is_supported(BaseMapKind k) {
  return k != BaseMapKind::Topographic && k != BaseMapKind::Street;
}

enum class LabelStrategy {
  Situated,
  MatchedText,
  MatchedIcon,
  MatchedColor,
  LinkedConvenient,
  LinkedAligned,
  LinkedOrdered,
};

inline constexpr std::array<LabelStrategy, 7> kAllLabelStrategies = {
    LabelStrategy::Situated,         LabelStrategy::MatchedText,   LabelStrategy::MatchedIcon,
    LabelStrategy::MatchedColor,     LabelStrategy::LinkedConvenient,
    LabelStrategy::LinkedAligned,    LabelStrategy::LinkedOrdered,
};

constexpr std::string_view to_string(LabelStrategy k) {
  switch (k) {
    case LabelStrategy::Situated: return "situated";
    case LabelStrategy::MatchedText: return "matched_text";
    case LabelStrategy::MatchedIcon: return "matched_icon";
    case LabelStrategy::MatchedColor: return "matched_color";
    case LabelStrategy::LinkedConvenient: return "linked_convenient";
    case LabelStrategy::LinkedAligned: return "linked_aligned";
    case LabelStrategy::LinkedOrdered: return "linked_ordered";
  }
  return "";
}

constexpr bool is_linked(LabelStrategy s) {
  return s == LabelStrategy::LinkedConvenient || s == LabelStrategy::LinkedAligned ||
         s == LabelStrategy::LinkedOrdered;
}
constexpr bool is_matched(LabelStrategy s) {
  return s == LabelStrategy::MatchedText || s == LabelStrategy::MatchedIcon ||
         s == LabelStrategy::MatchedColor;
}

enum class HighlightKind { Glow, Pin, ContrastingColor, Extrude3D, Contour, ZoomedInset };

inline constexpr std::array<HighlightKind, 6> kAllHighlights = {
    HighlightKind::Glow,      HighlightKind::Pin,     HighlightKind::ContrastingColor,
    HighlightKind::Extrude3D, HighlightKind::Contour, HighlightKind::ZoomedInset,
};

constexpr std::string_view to_string(HighlightKind k) {
  switch (k) {
    case HighlightKind::Glow: return "glow";
    case HighlightKind::Pin: return "pin";
    case HighlightKind::ContrastingColor: return "contrasting_color";
    case HighlightKind::Extrude3D: return "extrude_3d";
    case HighlightKind::Contour: return "contour";
    case HighlightKind::ZoomedInset: return "zoomed_inset";
  }
  return "";
}

constexpr bool targets_region_only(HighlightKind k) {
  return k != HighlightKind::Glow && k != HighlightKind::Pin;
}

enum class Side { Left, Right, Top, Bottom };

constexpr std::string_view to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Bottom: return "bottom";
  }
  return "";
}

enum class InsetPlacement { Adjacent, Overlay };

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from_string(std::string_view s, const std::array<Enum, N>& all) {
  for (auto v : all)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

// --- compatibility matrix -------------------------------------------------------

enum class Verdict { Compatible, CompatibleIfMonochromeGlyph, Incompatible, Unspecified };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Compatible: return "compatible";
    case Verdict::CompatibleIfMonochromeGlyph: return "compatible_if_monochrome_glyph";
    case Verdict::Incompatible: return "incompatible";
    case Verdict::Unspecified: return "unspecified";
  }
  return "";
}

struct MatrixEntry {
  Verdict verdict = Verdict::Unspecified;
  std::string reason;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Symmetric relation over channel pairs, loaded from the matrix data file.
class CompatibilityMatrix {
 public:
  static CompatibilityMatrix from_json(std::string_view json_text) {
    const auto j = nlohmann::json::parse(json_text);
    CompatibilityMatrix m;
    const std::string diag = j.value("diagonal_reason", "same channel");
    for (auto k : kAllChannels) m.cells_[idx(k)][idx(k)] = {Verdict::Incompatible, diag};
    for (const auto& e : j.at("entries")) {
      const auto a = channel_from_string(e.at("a").get<std::string>());
      const auto b = channel_from_string(e.at("b").get<std::string>());
      if (!a || !b) fail(ErrorCode::MalformedInput, "matrix: unknown channel in entry");
      const auto v = e.at("verdict").get<std::string>();
      MatrixEntry entry{Verdict::Unspecified, e.at("reason").get<std::string>()};
      if (v == "compatible") {
        entry.verdict = Verdict::Compatible;
      } else if (v == "compatible_if_monochrome_glyph") {
        entry.verdict = Verdict::CompatibleIfMonochromeGlyph;
      } else if (v == "incompatible") {
        entry.verdict = Verdict::Incompatible;
      } else if (v != "unspecified") {
        fail(ErrorCode::MalformedInput, "matrix: unknown verdict '" + v + "'");
      }
      if (*a == *b) fail(ErrorCode::MalformedInput, "matrix: diagonal entries are fixed");
      m.cells_[idx(*a)][idx(*b)] = entry;
      m.cells_[idx(*b)][idx(*a)] = entry;
      m.filled_[idx(*a)][idx(*b)] = m.filled_[idx(*b)][idx(*a)] = true;
    }
    for (auto a : kAllChannels) {
      for (auto b : kAllChannels) {
        if (a != b && !m.filled_[idx(a)][idx(b)]) {
          m.cells_[idx(a)][idx(b)] = {Verdict::Unspecified,
                                      "combination not covered by the design space"};
        }
      }
    }
    return m;
  }

  const MatrixEntry& at(ChannelKind a, ChannelKind b) const { return cells_[idx(a)][idx(b)]; }

 private:
  static constexpr std::size_t idx(ChannelKind k) { return static_cast<std::size_t>(k); }

  std::array<std::array<MatrixEntry, 10>, 10> cells_{};
  std::array<std::array<bool, 10>, 10> filled_{};
};

inline const CompatibilityMatrix& default_matrix() {
  static const CompatibilityMatrix m =
      CompatibilityMatrix::from_json(embedded::kCompatibilityMatrixJson);
  return m;
}

/// Resolved verdict: Compatible, Incompatible or Unspecified (never the
/// conditional form).
struct Compatibility {
  Verdict verdict = Verdict::Unspecified;
  std::string reason;

  bool ok() const { return verdict == Verdict::Compatible; }
  friend bool operator==(const Compatibility&, const Compatibility&) = default;
};

inline Compatibility check_compatibility(ChannelKind a, ChannelKind b, bool glyph_monochrome,
                                         const CompatibilityMatrix& m = default_matrix()) {
  const MatrixEntry& e = m.at(a, b);
  if (e.verdict == Verdict::CompatibleIfMonochromeGlyph) {
    if (glyph_monochrome) return {Verdict::Compatible, e.reason};
    return {Verdict::Incompatible, e.reason};
  }
  return {e.verdict, e.reason};
}

// --- spec -------------------------------------------------------------------------

enum class GlyphType { Icon, Bar, Pie };

struct GlyphDescriptor {
  GlyphType type = GlyphType::Icon;
  std::string icon = "person";
  std::map<std::string, std::vector<double>> series;  // by region key
  double box = 24.0;
  std::vector<std::string> labels;  // legend captions per series position
};

struct ChannelSpec {
  ChannelKind kind = ChannelKind::ColorIntensity;
  std::vector<Rgb> palette;  // empty: default for the kind
  std::optional<Rgb> color;  // single mark color for geometric channels
  double bar_height = 60.0;
  double bar_width = 10.0;
  double max_radius = 20.0;
  bool cartogram = false;
  std::optional<double> unit;  // quantity: value of one icon; chosen automatically if absent
  int per_row = 5;
  std::string icon = "person";
  double icon_size = 8.0;
  GlyphDescriptor glyph;
  bool glyph_monochrome = false;
  double max_flow_width = 6.0;
  double font_size = 9.0;
};

struct BaseMapSpec {
  BaseMapKind kind = BaseMapKind::MinimalPolitical;
  std::optional<Rgb> fill;
  std::optional<Rgb> stroke;
  double stroke_width = 0.5;
  double dot_spacing = 6.0;
  double dot_radius = 1.8;
};

struct LabelSpec {
  LabelStrategy strategy = LabelStrategy::Situated;
  double font_size = 10.0;
  std::vector<Side> sides;
  std::vector<Vec2> guide;
  bool fallback = true;
  double panel_width = 220.0;
  std::string icon = "pin";
  std::map<std::string, std::string> icons;  // region key -> icon name
};

struct HighlightSpec {
  HighlightKind kind = HighlightKind::Glow;
  std::optional<std::string> region;  // as written
  std::optional<GeoPoint> point;
  std::optional<Rgb> color;
  double radius = 4.0;
  double height = 18.0;
  double stroke_width = 2.5;
  double scale = 2.0;
  InsetPlacement placement = InsetPlacement::Adjacent;
};

struct InfographicSpec {
  std::string title;
  BaseMapSpec basemap;
  std::vector<ChannelSpec> channels;
  std::optional<LabelSpec> labels;
  std::vector<HighlightSpec> highlights;
  ProjectionKind projection = ProjectionKind::Equirectangular;
  int width = 960;
  int height = 540;
  std::uint64_t seed = 0;
  bool legend = true;
  AliasTable aliases;
  std::map<std::string, std::string> symbols;  // inline icon path data
};

namespace detail {

[[noreturn]] inline void spec_error(const std::string& msg) {
  fail(ErrorCode::MalformedSpec, "spec: " + msg);
}

inline double num(const nlohmann::json& obj, const char* key, double def, double lo, double hi) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_number()) spec_error(std::string(key) + " must be a number");
  const double v = it->get<double>();
  if (!(v >= lo && v <= hi)) spec_error(std::string(key) + " is out of range");
  return v;
}

inline std::optional<Rgb> color(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) spec_error(std::string(key) + " must be a #rrggbb string");
  auto c = try_parse_hex(it->get<std::string>());
  if (!c) spec_error(std::string(key) + " must be a #rrggbb string");
  return c;
}

inline std::string str(const nlohmann::json& obj, const char* key, std::string def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_string()) spec_error(std::string(key) + " must be a string");
  return it->get<std::string>();
}

inline bool boolean(const nlohmann::json& obj, const char* key, bool def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_boolean()) spec_error(std::string(key) + " must be true or false");
  return it->get<bool>();
}

inline void require_object(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) spec_error(std::string(what) + " must be an object");
}

inline ChannelSpec parse_channel(const nlohmann::json& j, const AliasTable& aliases) {
  require_object(j, "channel");
  if (!j.contains("kind") || !j["kind"].is_string()) spec_error("channel needs a kind");
  const auto name = j["kind"].get<std::string>();
  const auto kind = channel_from_string(name);
  if (!kind) fail(ErrorCode::UnknownChannel, "spec: unknown channel '" + name + "'");
  ChannelSpec c;
  c.kind = *kind;
  if (auto it = j.find("palette"); it != j.end()) {
    if (!it->is_array()) spec_error("palette must be an array of #rrggbb strings");
    for (const auto& s : *it) {
      if (!s.is_string() || !try_parse_hex(s.get<std::string>())) {
        spec_error("palette must be an array of #rrggbb strings");
      }
      c.palette.push_back(parse_hex(s.get<std::string>()));
    }
    if (c.palette.empty()) spec_error("palette must not be empty");
    if (c.kind == ChannelKind::ColorIntensity && c.palette.size() < 2) {
      spec_error("color_intensity palette needs 2 colors");
    }
  }
  c.color = color(j, "color");
  c.bar_height = num(j, "bar_height", c.bar_height, 1, 2000);
  c.bar_width = num(j, "bar_width", c.bar_width, 1, 500);
  c.max_radius = num(j, "max_radius", c.max_radius, 1, 1000);
  c.cartogram = boolean(j, "cartogram", false);
  if (j.contains("unit")) c.unit = num(j, "unit", 1, 1e-300, 1e300);
  c.per_row = static_cast<int>(num(j, "per_row", c.per_row, 1, 100));
  c.icon = str(j, "icon", c.icon);
  c.icon_size = num(j, "icon_size", c.icon_size, 1, 200);
  c.glyph_monochrome = boolean(j, "glyph_monochrome", false);
  c.max_flow_width = num(j, "max_flow_width", c.max_flow_width, 1, 100);
  c.font_size = num(j, "font_size", c.font_size, 1, 200);
  if (auto it = j.find("glyph"); it != j.end()) {
    require_object(*it, "glyph");
    const auto type = str(*it, "type", "icon");
    if (type == "icon") {
      c.glyph.type = GlyphType::Icon;
    } else if (type == "bar") {
      c.glyph.type = GlyphType::Bar;
    } else if (type == "pie") {
      c.glyph.type = GlyphType::Pie;
    } else {
      spec_error("glyph type must be icon, bar or pie");
    }
    c.glyph.icon = str(*it, "icon", c.glyph.icon);
    c.glyph.box = num(*it, "box", c.glyph.box, 4, 400);
    if (auto s = it->find("series"); s != it->end()) {
      require_object(*s, "glyph series");
      for (auto e = s->begin(); e != s->end(); ++e) {
        if (!e.value().is_array() || e.value().empty() || e.value().size() > 6) {
          spec_error("glyph series must hold 1 to 6 numbers per region");
        }
        std::vector<double> vals;
        for (const auto& v : e.value()) {
          if (!v.is_number() || v.get<double>() < 0) spec_error("glyph series values must be >= 0");
          vals.push_back(v.get<double>());
        }
        c.glyph.series[resolve_key(e.key(), aliases)] = std::move(vals);
      }
    }
    if (auto l = it->find("labels"); l != it->end()) {
      if (!l->is_array()) spec_error("glyph labels must be an array of strings");
      for (const auto& v : *l) {
        if (!v.is_string()) spec_error("glyph labels must be an array of strings");
        c.glyph.labels.push_back(v.get<std::string>());
      }
    }
  }
  return c;
}

}  // namespace detail

/// Parses the JSON spec document and fills defaults.
inline InfographicSpec parse_spec(std::string_view bytes) {
  using detail::spec_error;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    spec_error(e.what());
  }
  return [&] {
    detail::require_object(j, "spec");
    InfographicSpec s;
    s.title = detail::str(j, "title", "");
    s.seed = 0;
    if (auto it = j.find("seed"); it != j.end()) {
      if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
        spec_error("seed must be an unsigned integer");
      }
      s.seed = it->get<std::uint64_t>();
    }
    s.legend = detail::boolean(j, "legend", true);
    if (auto it = j.find("aliases"); it != j.end()) s.aliases = parse_aliases(it->dump());
    if (auto it = j.find("symbols"); it != j.end()) {
      detail::require_object(*it, "symbols");
      for (auto e = it->begin(); e != it->end(); ++e) {
        if (!e.value().is_string()) spec_error("symbols must map names to path data");
        s.symbols[e.key()] = e.value().get<std::string>();
      }
    }
    const auto proj = detail::str(j, "projection", "equirectangular");
    if (proj == "equirectangular") {
      s.projection = ProjectionKind::Equirectangular;
    } else if (proj == "mercator") {
      s.projection = ProjectionKind::Mercator;
    } else {
      spec_error("projection must be equirectangular or mercator");
    }
    if (auto it = j.find("viewport"); it != j.end()) {
      detail::require_object(*it, "viewport");
      s.width = static_cast<int>(detail::num(*it, "width", s.width, 1, 20000));
      s.height = static_cast<int>(detail::num(*it, "height", s.height, 1, 20000));
    }

    if (auto it = j.find("basemap"); it != j.end()) {
      const nlohmann::json b = it->is_string() ? nlohmann::json{{"kind", *it}} : *it;
      detail::require_object(b, "basemap");
      const auto kind = enum_from_string(detail::str(b, "kind", "minimal_political"), kAllBaseMaps);
      if (!kind) spec_error("unknown basemap kind");
      s.basemap.kind = *kind;
      s.basemap.fill = detail::color(b, "fill");
      s.basemap.stroke = detail::color(b, "stroke");
      s.basemap.stroke_width = detail::num(b, "stroke_width", s.basemap.stroke_width, 0, 50);
      s.basemap.dot_spacing = detail::num(b, "dot_spacing", s.basemap.dot_spacing, 0.1, 1000);
      s.basemap.dot_radius = detail::num(b, "dot_radius", s.basemap.dot_radius, 0.01, 500);
      const double need = s.basemap.kind == BaseMapKind::ShapeBasedVaried ? 3.0 : 2.0;
      if (!(s.basemap.dot_spacing > need * s.basemap.dot_radius)) {
        spec_error(need == 3.0 ? "varied dot grids need dot_spacing > 3 * dot_radius"
                               : "dot grids need dot_spacing > 2 * dot_radius");
      }
    }

    if (!j.contains("channels") || !j["channels"].is_array()) spec_error("channels must be an array");
    const auto& ch = j["channels"];
    if (ch.size() > 2) {
      fail(ErrorCode::TooManyChannels,
           "spec: at most two channels may be combined, got " + std::to_string(ch.size()));
    }
    if (ch.empty()) spec_error("at least one channel is required");
    for (const auto& c : ch) s.channels.push_back(detail::parse_channel(c, s.aliases));
    if (s.channels.size() == 2 && s.channels[0].kind == s.channels[1].kind) {
      spec_error("the two channels must differ in kind");
    }

    if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
      const nlohmann::json l = it->is_string() ? nlohmann::json{{"strategy", *it}} : *it;
      detail::require_object(l, "labels");
      LabelSpec ls;
      const auto strat = enum_from_string(detail::str(l, "strategy", "situated"), kAllLabelStrategies);
      if (!strat) spec_error("unknown label strategy");
      ls.strategy = *strat;
      ls.font_size = detail::num(l, "font_size", ls.font_size, 1, 200);
      ls.fallback = detail::boolean(l, "fallback", true);
      ls.panel_width = detail::num(l, "panel_width", ls.panel_width, 20, 5000);
      ls.icon = detail::str(l, "icon", ls.icon);
      if (auto sides = l.find("sides"); sides != l.end()) {
        if (!sides->is_array()) spec_error("sides must be an array");
        for (const auto& sd : *sides) {
          const auto side = sd.is_string()
                                ? enum_from_string(sd.get<std::string>(),
                                                   std::array{Side::Left, Side::Right, Side::Top,
                                                              Side::Bottom})
                                : std::nullopt;
          if (!side) spec_error("sides must be left, right, top or bottom");
          if (std::find(ls.sides.begin(), ls.sides.end(), *side) == ls.sides.end()) {
            ls.sides.push_back(*side);
          }
        }
      }
      if (auto g = l.find("guide"); g != l.end()) {
        if (!g->is_array()) spec_error("guide must be an array of [x, y] points");
        for (const auto& p : *g) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            spec_error("guide must be an array of [x, y] points");
          }
          ls.guide.push_back({p[0].get<double>(), p[1].get<double>()});
        }
      }
      if (auto ic = l.find("icons"); ic != l.end()) {
        detail::require_object(*ic, "label icons");
        for (auto e = ic->begin(); e != ic->end(); ++e) {
          if (!e.value().is_string()) spec_error("label icons must map regions to icon names");
          ls.icons[resolve_key(e.key(), s.aliases)] = e.value().get<std::string>();
        }
      }
      s.labels = ls;
    }

    if (auto it = j.find("highlights"); it != j.end()) {
      if (!it->is_array()) spec_error("highlights must be an array");
      for (const auto& h : *it) {
        detail::require_object(h, "highlight");
        HighlightSpec hs;
        const auto kind = enum_from_string(detail::str(h, "kind", ""), kAllHighlights);
        if (!kind) spec_error("unknown highlight kind");
        hs.kind = *kind;
        if (h.contains("region")) hs.region = detail::str(h, "region", "");
        if (h.contains("lon") || h.contains("lat")) {
          hs.point = GeoPoint{detail::num(h, "lon", 0, -180, 180), detail::num(h, "lat", 0, -90, 90)};
        }
        if (hs.region && hs.point) spec_error("a highlight targets a region or a point, not both");
        if (!hs.region && !hs.point) spec_error("a highlight needs a region or lon/lat target");
        if (targets_region_only(hs.kind) && !hs.region) {
          spec_error(std::string(to_string(hs.kind)) + " highlights need a region");
        }
        hs.color = detail::color(h, "color");
        hs.radius = detail::num(h, "radius", hs.radius, 0.1, 500);
        hs.height = detail::num(h, "height", hs.height, 1, 500);
        hs.stroke_width = detail::num(h, "stroke_width", hs.stroke_width, 0.1, 50);
        hs.scale = detail::num(h, "scale", hs.scale, 1.0 + 1e-9, 8.0);
        const auto placement = detail::str(h, "placement", "adjacent");
        if (placement == "adjacent") {
          hs.placement = InsetPlacement::Adjacent;
        } else if (placement == "overlay") {
          hs.placement = InsetPlacement::Overlay;
        } else {
          spec_error("placement must be adjacent or overlay");
        }
        s.highlights.push_back(hs);
      }
    }
    return s;
  }();
}

// --- validation -------------------------------------------------------------------

enum class Severity { Error, Warning };

struct Issue {
  std::string code;
  Severity severity = Severity::Error;
  std::string message;
  std::string element;
};

/// An ordered channel replacement: one or two channel kinds.
struct Suggestion {
  std::vector<ChannelKind> channels;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Issue> issues;
  std::vector<Suggestion> suggestions;

  void add(Issue issue) {
    if (issue.severity == Severity::Error) valid = false;
    issues.push_back(std::move(issue));
  }
  bool has(std::string_view code) const {
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
  }
};

/// Can channel `c` encode a table of `kind`, given the other channel (if any)?
/// Companion channels of a flow encode the edge magnitudes.
inline bool accepts_data(ChannelKind c, FieldKind kind, std::optional<ChannelKind> partner) {
  if (is_flow(c)) return kind == FieldKind::Flow;
  if (kind == FieldKind::Flow) {
    const bool companion = c == ChannelKind::ColorIntensity || c == ChannelKind::ColorHue ||
                           c == ChannelKind::Quantity || c == ChannelKind::Text;
    return companion && partner && is_flow(*partner);
  }
  switch (c) {
    case ChannelKind::ColorIntensity:
    case ChannelKind::Length2D:
    case ChannelKind::Length3D:
    case ChannelKind::Size:
    case ChannelKind::Quantity:
      return kind == FieldKind::Quantitative;
    default:
      return true;  // hue, glyph, text
  }
}

namespace detail {

inline bool icon_known(const std::string& name, const InfographicSpec& spec) {
  return builtin_icons().contains(name) || spec.symbols.count(name) > 0;
}

/// Parameter problems of a single channel, independent of its partner.
inline std::vector<Issue> channel_param_issues(const ChannelSpec& c, const InfographicSpec& spec,
                                               const std::string& element) {
  std::vector<Issue> out;
  if (c.kind == ChannelKind::Quantity && !icon_known(c.icon, spec)) {
    out.push_back({"unknown_icon", Severity::Error, "no icon named '" + c.icon + "'", element});
  }
  if (c.kind == ChannelKind::Glyph) {
    if (c.glyph.type == GlyphType::Icon && !icon_known(c.glyph.icon, spec)) {
      out.push_back(
          {"unknown_icon", Severity::Error, "no icon named '" + c.glyph.icon + "'", element});
    }
    if (c.glyph.type != GlyphType::Icon && c.glyph.series.empty()) {
      out.push_back({"missing_series", Severity::Error,
                     "bar and pie glyphs need per-region series in the spec", element});
    }
  }
  return out;
}

inline bool glyph_flag(const InfographicSpec& spec) {
  for (const auto& c : spec.channels)
    if (c.kind == ChannelKind::Glyph) return c.glyph_monochrome;
  return false;
}

}  // namespace detail

inline ValidationReport validate(const InfographicSpec& spec, const JoinedData& joined,
                                 const RegionSet& regions,
                                 const CompatibilityMatrix& matrix = default_matrix()) {
  ValidationReport report;
  const auto& ch = spec.channels;

  if (ch.size() == 2) {
    const auto c = check_compatibility(ch[0].kind, ch[1].kind, detail::glyph_flag(spec), matrix);
    if (c.verdict == Verdict::Incompatible) {
      report.add({"incompatible_channels", Severity::Error,
                  std::string(to_string(ch[0].kind)) + " cannot be combined with " +
                      std::string(to_string(ch[1].kind)) + ": " + c.reason,
                  "channels"});
    } else if (c.verdict == Verdict::Unspecified) {
      report.add({"unspecified_combination", Severity::Error,
                  std::string(to_string(ch[0].kind)) + " with " +
                      std::string(to_string(ch[1].kind)) + ": " + c.reason,
                  "channels"});
    }
  }

  for (std::size_t i = 0; i < ch.size(); ++i) {
    const std::string element = "channels[" + std::to_string(i) + "]";
    std::optional<ChannelKind> partner;
    if (ch.size() == 2) partner = ch[1 - i].kind;
    if (!accepts_data(ch[i].kind, joined.field_kind, partner)) {
      report.add({"wrong_data_kind", Severity::Error,
                  std::string(to_string(ch[i].kind)) + " cannot encode " +
                      std::string(to_string(joined.field_kind)) + " data",
                  element});
    }
    for (auto& issue : detail::channel_param_issues(ch[i], spec, element)) report.add(issue);
  }

  if (!is_supported(spec.basemap.kind)) {
    report.add({"unsupported_basemap", Severity::Error,
                std::string(to_string(spec.basemap.kind)) +
                    " base maps need elevation or street data and are not rendered",
                "basemap"});
  }

  for (std::size_t i = 0; i < spec.highlights.size(); ++i) {
    const auto& h = spec.highlights[i];
    if (h.region && !regions.find(resolve_key(*h.region, spec.aliases))) {
      report.add({"unknown_highlight_target", Severity::Error,
                  "highlight target '" + *h.region + "' is not a region",
                  "highlights[" + std::to_string(i) + "]"});
    }
  }

  if (spec.labels) {
    const auto& l = *spec.labels;
    if (l.strategy == LabelStrategy::LinkedOrdered) {
      double len = 0.0;
      for (std::size_t i = 1; i < l.guide.size(); ++i) len += distance(l.guide[i - 1], l.guide[i]);
      if (l.guide.size() < 2 || !(len > 0)) {
        report.add({"missing_label_params", Severity::Error,
                    "ordered labels need a guide path of at least 2 distinct points", "labels"});
      }
    }
    if (l.strategy == LabelStrategy::LinkedAligned && l.sides.empty()) {
      report.add({"missing_label_params", Severity::Error,
                  "aligned labels need at least one side", "labels"});
    }
    if (l.strategy == LabelStrategy::MatchedIcon && !detail::icon_known(l.icon, spec)) {
      report.add({"unknown_icon", Severity::Error, "no icon named '" + l.icon + "'", "labels"});
    }
  }

  if (!joined.unmatched_names.empty()) {
    std::string names;
    for (const auto& n : joined.unmatched_names) names += (names.empty() ? "" : ", ") + n;
    report.add({"unmatched_rows", Severity::Warning,
                std::to_string(joined.unmatched_names.size()) +
                    " row name(s) matched no region: " + names,
                "data"});
  }
  if (joined.field_kind == FieldKind::Quantitative) {
    const auto vals = joined.values();
    if (std::any_of(vals.begin(), vals.end(), [](double v) { return v < 0; })) {
      report.add({"negative_values", Severity::Warning,
                  "negative values are drawn at the zero baseline", "data"});
    }
  }
  return report;
}

namespace detail {

inline bool usable_alone(ChannelKind k, const InfographicSpec& spec, FieldKind kind) {
  if (!accepts_data(k, kind, std::nullopt)) return false;
  for (const auto& c : spec.channels) {
    if (c.kind == k) return channel_param_issues(c, spec, "").empty();
  }
  return channel_param_issues(ChannelSpec{.kind = k}, spec, "").empty();
}

inline bool usable_pair(ChannelKind a, ChannelKind b, const InfographicSpec& spec, FieldKind kind,
                        const CompatibilityMatrix& m) {
  if (a == b) return false;
  bool mono = glyph_flag(spec);
  if (!check_compatibility(a, b, mono, m).ok()) return false;
  if (!accepts_data(a, kind, b) || !accepts_data(b, kind, a)) return false;
  for (auto k : {a, b}) {
    auto it = std::find_if(spec.channels.begin(), spec.channels.end(),
                           [k](const ChannelSpec& c) { return c.kind == k; });
    const ChannelSpec c = it != spec.channels.end() ? *it : ChannelSpec{.kind = k};
    if (!channel_param_issues(c, spec, "").empty()) return false;
  }
  return true;
}

}  // namespace detail

/// Ranked channel replacements that pass both the matrix and the data-kind
/// rules. The user's first channel is kept when it is usable on its own.
inline std::vector<Suggestion> suggest_alternatives(const InfographicSpec& spec,
                                                    const JoinedData& joined,
                                                    const CompatibilityMatrix& matrix = default_matrix()) {
  const FieldKind kind = joined.field_kind;
  std::optional<ChannelKind> anchor;
  for (const auto& c : spec.channels) {
    if (detail::usable_alone(c.kind, spec, kind)) {
      anchor = c.kind;
      break;
    }
  }
  std::vector<Suggestion> out;
  if (anchor) {
    for (auto c : kSuggestionPriority) {
      if (detail::usable_pair(*anchor, c, spec, kind, matrix)) out.push_back({{*anchor, c}});
    }
    out.push_back({{*anchor}});
  } else {
    for (auto c : kSuggestionPriority) {
      if (detail::usable_alone(c, spec, kind)) out.push_back({{c}});
    }
  }
  // Never propose the combination the user already has.
  std::vector<ChannelKind> current;
  for (const auto& c : spec.channels) current.push_back(c.kind);
  std::erase_if(out, [&](const Suggestion& s) { return s.channels == current; });
  if (out.empty()) fail(ErrorCode::NoAlternatives, "no compatible alternative channels exist");
  return out;
}

/// Replaces the spec's channels with the suggestion, reusing existing
/// channel parameters where the kind is kept.
inline InfographicSpec apply_suggestion(const InfographicSpec& spec, const Suggestion& s) {
  InfographicSpec out = spec;
  out.channels.clear();
  for (auto k : s.channels) {
    auto it = std::find_if(spec.channels.begin(), spec.channels.end(),
                           [k](const ChannelSpec& c) { return c.kind == k; });
    out.channels.push_back(it != spec.channels.end() ? *it : ChannelSpec{.kind = k});
  }
  return out;
}

// --- serialization ---------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Suggestion& s) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto k : s.channels) arr.push_back(std::string(to_string(k)));
  nlohmann::ordered_json j;
  j["channels"] = std::move(arr);
  return j;
}

inline nlohmann::ordered_json to_json(const ValidationReport& r, bool with_suggestions = false) {
  nlohmann::ordered_json j;
  j["verdict"] = r.valid ? "valid" : "invalid";
  nlohmann::ordered_json issues = nlohmann::ordered_json::array();
  for (const auto& i : r.issues) {
    nlohmann::ordered_json e;
    e["code"] = i.code;
    e["severity"] = i.severity == Severity::Error ? "error" : "warning";
    e["message"] = i.message;
    e["element"] = i.element;
    issues.push_back(std::move(e));
  }
  j["issues"] = std::move(issues);
  if (with_suggestions) {
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    for (const auto& sug : r.suggestions) s.push_back(to_json(sug));
    j["suggestions"] = std::move(s);
  }
  return j;
}

/// Enumeration of the whole design space, including the matrix.
inline nlohmann::ordered_json design_space_catalog(const CompatibilityMatrix& m = default_matrix()) {
  nlohmann::ordered_json j;
  j["channels"] = nlohmann::ordered_json::array();
  for (auto k : kAllChannels) j["channels"].push_back(std::string(to_string(k)));
  j["basemaps"] = nlohmann::ordered_json::array();
  for (auto k : kAllBaseMaps) {
    nlohmann::ordered_json b;
    b["name"] = std::string(to_string(k));
    b["supported"] = is_supported(k);
    j["basemaps"].push_back(std::move(b));
  }
  j["label_strategies"] = nlohmann::ordered_json::array();
  for (auto k : kAllLabelStrategies) j["label_strategies"].push_back(std::string(to_string(k)));
  j["highlights"] = nlohmann::ordered_json::array();
  for (auto k : kAllHighlights) {
    nlohmann::ordered_json h;
    h["name"] = std::string(to_string(k));
    h["target"] = targets_region_only(k) ? "region" : "region_or_point";
    j["highlights"].push_back(std::move(h));
  }
  j["matrix"] = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < kAllChannels.size(); ++a) {
    for (std::size_t b = a + 1; b < kAllChannels.size(); ++b) {
      const auto& e = m.at(kAllChannels[a], kAllChannels[b]);
      nlohmann::ordered_json cell;
      cell["a"] = std::string(to_string(kAllChannels[a]));
      cell["b"] = std::string(to_string(kAllChannels[b]));
      cell["verdict"] = std::string(to_string(e.verdict));
      cell["reason"] = e.reason;
      j["matrix"].push_back(std::move(cell));
    }
  }
  return j;
}

}  // namespace geoglyph
