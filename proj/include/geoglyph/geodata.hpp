#pragma once

// Region boundaries: GeoJSON ingestion, projection to screen space and the
// per-region anchors every encoder attaches to.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/error.hpp"
#include "geoglyph/geometry.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend constexpr bool operator==(GeoPoint, GeoPoint) = default;
};

inline bool valid(GeoPoint p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

/// Implicitly closed: the first point is not repeated at the end.
using GeoRing = std::vector<GeoPoint>;

struct GeoPolygon {
  GeoRing outer;
  std::vector<GeoRing> holes;
};

struct Region {
  std::string name;
  std::string key;
  std::vector<GeoPolygon> polygons;
};

struct GeoBox {
  double lon0 = 180.0;
  double lat0 = 90.0;
  double lon1 = -180.0;
  double lat1 = -90.0;

  void expand(GeoPoint p) {
    lon0 = std::min(lon0, p.lon);
    lat0 = std::min(lat0, p.lat);
    lon1 = std::max(lon1, p.lon);
    lat1 = std::max(lat1, p.lat);
  }
  bool contains(GeoPoint p) const {
    return p.lon >= lon0 && p.lon <= lon1 && p.lat >= lat0 && p.lat <= lat1;
  }
  static GeoBox world() { return {-180.0, -90.0, 180.0, 90.0}; }
};

class RegionSet {
 public:
  RegionSet() = default;

  /// Throws DuplicateRegion when two regions share a key.
  explicit RegionSet(std::vector<Region> regions) : regions_(std::move(regions)) {
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      auto [it, inserted] = index_.emplace(regions_[i].key, i);
      if (!inserted) {
        fail(ErrorCode::DuplicateRegion,
             "regions '" + regions_[it->second].name + "' and '" + regions_[i].name +
                 "' share the key '" + regions_[i].key + "'");
      }
      for (const auto& poly : regions_[i].polygons) {
        for (const auto& p : poly.outer) bbox_.expand(p);
        for (const auto& h : poly.holes)
          for (const auto& p : h) bbox_.expand(p);
      }
    }
  }

  const std::vector<Region>& regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }
  const GeoBox& bbox() const { return bbox_; }

  std::optional<std::size_t> find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<Region> regions_;
  std::map<std::string, std::size_t> index_;
  GeoBox bbox_;
};

// --- projection -----------------------------------------------------------

enum class ProjectionKind { Equirectangular, Mercator };

constexpr std::string_view to_string(ProjectionKind k) {
  return k == ProjectionKind::Mercator ? "mercator" : "equirectangular";
}

/// Maps lon/lat into a target rectangle. Unit coordinates follow
/// x' = (lon+180)/360 and y' = (90-lat)/180 for equirectangular; the fit keeps
/// degrees square (world aspect 2:1), so the plane uses (x', y'/2).
class Projection {
 public:
  static constexpr double kMercatorMaxLat = 85.051129;
  static constexpr double kDefaultMargin = 0.04;

  Projection() = default;

  Projection(ProjectionKind kind, const GeoBox& bounds, const Box& target,
             double margin = kDefaultMargin)
      : kind_(kind), target_(target) {
    if (!(target.width() > 0) || !(target.height() > 0)) {
      fail(ErrorCode::InvalidArgument, "projection target must have positive size");
    }
    // Both projections are monotone per axis, so the bounds' corners span the plane box.
    const Vec2 a = plane({bounds.lon0, bounds.lat1});
    const Vec2 b = plane({bounds.lon1, bounds.lat0});
    const double pw = b.x - a.x;
    const double ph = b.y - a.y;
    const double aw = target.width() * (1.0 - 2.0 * margin);
    const double ah = target.height() * (1.0 - 2.0 * margin);
    if (pw > 0 && ph > 0) {
      scale_ = std::min(aw / pw, ah / ph);
    } else if (pw > 0) {
      scale_ = aw / pw;
    } else if (ph > 0) {
      scale_ = ah / ph;
    } else {
      scale_ = 1.0;
    }
    const Vec2 c = target.center();
    offset_ = Vec2{c.x - scale_ * (a.x + pw / 2), c.y - scale_ * (a.y + ph / 2)};
  }

  ProjectionKind kind() const { return kind_; }
  const Box& target() const { return target_; }
  double scale() const { return scale_; }

  /// Aspect-preserving plane coordinates before the fit transform.
  Vec2 plane(GeoPoint p) const {
    const double x = (p.lon + 180.0) / 360.0;
    if (kind_ == ProjectionKind::Equirectangular) {
      return {x, (90.0 - p.lat) / 360.0};
    }
    const double lat = std::clamp(p.lat, -kMercatorMaxLat, kMercatorMaxLat);
    const double phi = lat * std::numbers::pi / 180.0;
    const double y = 0.5 - std::log(std::tan(std::numbers::pi / 4.0 + phi / 2.0)) /
                               (2.0 * std::numbers::pi);
    return {x, y};
  }

  Vec2 operator()(GeoPoint p) const {
    const Vec2 q = plane(p);
    return Vec2{q.x * scale_ + offset_.x, q.y * scale_ + offset_.y};
  }

 private:
  ProjectionKind kind_ = ProjectionKind::Equirectangular;
  Box target_{0, 0, 1, 1};
  double scale_ = 1.0;
  Vec2 offset_{};
};

inline Vec2 project(GeoPoint p, const Projection& proj) { return proj(p); }

inline ScreenRegion project(const Region& region, const Projection& proj) {
  ScreenRegion out;
  out.polygons.reserve(region.polygons.size());
  auto ring = [&](const GeoRing& r) {
    ScreenRing s;
    s.reserve(r.size());
    for (const auto& p : r) s.push_back(proj(p));
    return s;
  };
  for (const auto& poly : region.polygons) {
    ScreenPolygon sp;
    sp.outer = ring(poly.outer);
    for (const auto& h : poly.holes) sp.holes.push_back(ring(h));
    out.polygons.push_back(std::move(sp));
  }
  return out;
}

// --- anchors ----------------------------------------------------------------

namespace detail {

// Midpoint of the widest interior span on the horizontal line through the
// middle of the largest ring. Used only when the grid search finds nothing.
inline std::optional<Vec2> scanline_interior(const ScreenRegion& region) {
  const ScreenRing* best = nullptr;
  double best_area = 0.0;
  for (const auto& poly : region.polygons) {
    const double a = polygon_area(poly.outer);
    if (a > best_area) {
      best_area = a;
      best = &poly.outer;
    }
  }
  if (!best) return std::nullopt;
  const Box bb = bounding_box(*best);
  for (double frac : {0.5, 0.37, 0.63, 0.25, 0.75}) {
    const double y = bb.y0 + frac * bb.height();
    std::vector<double> xs;
    for_each_ring(region, [&](const ScreenRing& ring) {
      const std::size_t n = ring.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    });
    std::sort(xs.begin(), xs.end());
    double widest = 0.0;
    std::optional<Vec2> out;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const double w = xs[i + 1] - xs[i];
      const Vec2 mid{(xs[i] + xs[i + 1]) / 2, y};
      if (w > widest && point_in_region(mid, region)) {
        widest = w;
        out = mid;
      }
    }
    if (out) return out;
  }
  return std::nullopt;
}

}  // namespace detail

/// Area-weighted centroid (outer rings minus holes). When it falls outside
/// the region, the nearest interior cell center of a 64x64 grid over the
/// bounding box is returned instead (scan order breaks ties).
inline Vec2 centroid(const ScreenRegion& region) {
  double total = 0.0;
  Vec2 moment{};
  for (const auto& poly : region.polygons) {
    const double a = polygon_area(poly.outer);
    if (a > 0) {
      total += a;
      moment = moment + ring_centroid(poly.outer) * a;
    }
    for (const auto& h : poly.holes) {
      const double ha = polygon_area(h);
      if (ha > 0) {
        total -= ha;
        moment = moment - ring_centroid(h) * ha;
      }
    }
  }
  if (!(total >= 1e-9)) {
    fail(ErrorCode::DegenerateRegion, "region has (near) zero projected area");
  }
  const Vec2 c = moment * (1.0 / total);
  if (point_in_region(c, region)) return c;

  constexpr int kGrid = 64;
  const Box bb = bounding_box(region);
  const double sx = bb.width() / kGrid;
  const double sy = bb.height() / kGrid;
  std::optional<Vec2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kGrid; ++j) {
    for (int i = 0; i < kGrid; ++i) {
      const Vec2 p{bb.x0 + (i + 0.5) * sx, bb.y0 + (j + 0.5) * sy};
      const double d = distance(p, c);
      if (d < best_d && point_in_region(p, region)) {
        best_d = d;
        best = p;
      }
    }
  }
  if (best) return *best;
  if (auto p = detail::scanline_interior(region)) return *p;
  fail(ErrorCode::DegenerateRegion, "no interior point found");
}

inline Vec2 centroid(const Region& region, const Projection& proj) {
  return centroid(project(region, proj));
}

inline bool point_in_region(Vec2 p, const Region& region, const Projection& proj) {
  return point_in_region(p, project(region, proj));
}

inline Box bounding_box(const Region& region, const Projection& proj) {
  return bounding_box(project(region, proj));
}

// --- GeoJSON ------------------------------------------------------------------

namespace detail {

inline double geo_signed_area(const GeoRing& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& a = r[i];
    const auto& b = r[(i + 1) % r.size()];
    s += a.lon * b.lat - b.lon * a.lat;
  }
  return s / 2.0;
}

inline ScreenRing as_plane(const GeoRing& r) {
  ScreenRing s;
  s.reserve(r.size());
  for (const auto& p : r) s.push_back({p.lon, p.lat});
  return s;
}

inline GeoRing read_ring(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array()) fail(ErrorCode::MalformedInput, name + ": ring is not an array");
  GeoRing ring;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      fail(ErrorCode::MalformedInput, name + ": coordinate is not [lon, lat]");
    }
    GeoPoint p{c[0].get<double>(), c[1].get<double>()};
    if (!valid(p)) fail(ErrorCode::MalformedInput, name + ": coordinate out of range");
    if (!ring.empty() && ring.back() == p) continue;
    ring.push_back(p);
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) fail(ErrorCode::MalformedInput, name + ": ring has fewer than 3 points");
  return ring;
}

/// Keeps the part of `r` with lo <= lon <= hi (Sutherland-Hodgman, two edges).
inline GeoRing clip_lon(const GeoRing& r, double lo, double hi) {
  auto clip = [](const GeoRing& in, double x, bool keep_above) {
    GeoRing out;
    auto inside = [&](const GeoPoint& p) { return keep_above ? p.lon >= x : p.lon <= x; };
    for (std::size_t i = 0; i < in.size(); ++i) {
      const GeoPoint& a = in[i];
      const GeoPoint& b = in[(i + 1) % in.size()];
      if (inside(a)) out.push_back(a);
      if (inside(a) != inside(b)) {
        const double t = (x - a.lon) / (b.lon - a.lon);
        out.push_back({x, a.lat + t * (b.lat - a.lat)});
      }
    }
    return out;
  };
  GeoRing out = clip(clip(r, lo, true), hi, false);
  GeoRing dedup;
  for (const auto& p : out) {
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

/// A ring whose neighbours jump by more than 180 degrees of longitude wraps
/// the antimeridian. It is unwrapped (closed through the pole if it circles
/// one) and cut into pieces that each stay inside [-180, 180].
inline std::vector<GeoRing> split_antimeridian(const GeoRing& ring) {
  bool wraps = false;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (std::abs(ring[(i + 1) % ring.size()].lon - ring[i].lon) > 180.0) wraps = true;
  }
  if (!wraps) return {ring};
  GeoRing u{ring.front()};
  double shift = 0.0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const double d = ring[i].lon - ring[i - 1].lon;
    if (d > 180.0) shift -= 360.0;
    if (d < -180.0) shift += 360.0;
    u.push_back({ring[i].lon + shift, ring[i].lat});
  }
  const double closing = ring.front().lon - ring.back().lon;
  if (closing > 180.0) shift -= 360.0;
  if (closing < -180.0) shift += 360.0;
  if (shift != 0.0) {
    double lat_sum = 0.0;
    for (const auto& p : ring) lat_sum += p.lat;
    const double pole = lat_sum < 0 ? -90.0 : 90.0;
    u.push_back({ring.front().lon + shift, ring.front().lat});
    u.push_back({ring.front().lon + shift, pole});
    u.push_back({ring.front().lon, pole});
  }
  std::vector<GeoRing> out;
  for (double k : {-360.0, 0.0, 360.0}) {
    GeoRing moved = u;
    for (auto& p : moved) p.lon += k;
    GeoRing piece = clip_lon(moved, -180.0, 180.0);
    if (piece.size() >= 3 && geo_signed_area(piece) != 0.0) out.push_back(std::move(piece));
  }
  return out;
}

/// Outer rings counterclockwise, holes clockwise (lon/lat, y up).
inline GeoRing oriented(GeoRing ring, bool outer, const std::string& name) {
  const double a = geo_signed_area(ring);
  if (a == 0.0) fail(ErrorCode::MalformedInput, name + ": ring has zero area");
  if ((a > 0) != outer) std::reverse(ring.begin(), ring.end());
  return ring;
}

/// One GeoJSON polygon; more than one when it wraps the antimeridian.
inline std::vector<GeoPolygon> parse_polygon(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::MalformedInput, name + ": empty polygon");
  std::vector<GeoPolygon> polys;
  for (auto& piece : split_antimeridian(read_ring(j[0], name))) {
    polys.push_back({oriented(std::move(piece), true, name), {}});
  }
  for (std::size_t i = 1; i < j.size(); ++i) {
    for (auto& piece : split_antimeridian(read_ring(j[i], name))) {
      GeoRing hole = oriented(std::move(piece), false, name);
      GeoPolygon* owner = nullptr;
      for (auto& poly : polys) {
        const ScreenRing outer = as_plane(poly.outer);
        const bool all_in = std::all_of(hole.begin(), hole.end(), [&](const GeoPoint& p) {
          const Vec2 v{p.lon, p.lat};
          return crosses_odd(v, outer) || on_ring_boundary(v, outer);
        });
        if (all_in) {
          owner = &poly;
          break;
        }
      }
      if (!owner) fail(ErrorCode::MalformedInput, name + ": hole lies outside its outer ring");
      owner->holes.push_back(std::move(hole));
    }
  }
  return polys;
}

}  // namespace detail

/// Parses a FeatureCollection of Polygon / MultiPolygon features.
inline RegionSet parse_boundaries(std::string_view bytes, std::string_view name_property = "name") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedInput, std::string("boundaries: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    fail(ErrorCode::MalformedInput, "boundaries: expected a FeatureCollection");
  }
  const std::string prop(name_property);
  std::vector<Region> regions;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "feature " + std::to_string(index++);
    if (!f.is_object()) fail(ErrorCode::MalformedInput, where + ": not an object");
    const auto props = f.find("properties");
    if (props == f.end() || !props->is_object() || !props->contains(prop) ||
        !(*props)[prop].is_string()) {
      fail(ErrorCode::MalformedInput, where + ": missing string property '" + prop + "'");
    }
    Region region;
    region.name = (*props)[prop].get<std::string>();
    region.key = text::normalize_key(region.name);
    if (region.key.empty()) fail(ErrorCode::MalformedInput, where + ": empty region name");
    const auto geom = f.find("geometry");
    if (geom == f.end() || !geom->is_object() || !geom->contains("type")) {
      fail(ErrorCode::MalformedInput, where + ": missing geometry");
    }
    const std::string type = (*geom)["type"].is_string() ? (*geom)["type"].get<std::string>() : "";
    const auto coords = geom->find("coordinates");
    if (type == "Polygon" || type == "MultiPolygon") {
      if (coords == geom->end()) fail(ErrorCode::MalformedInput, where + ": missing coordinates");
    }
    if (type == "Polygon") {
      region.polygons = detail::parse_polygon(*coords, region.name);
    } else if (type == "MultiPolygon") {
      if (!coords->is_array()) fail(ErrorCode::MalformedInput, where + ": bad coordinates");
      for (const auto& p : *coords) {
        for (auto& poly : detail::parse_polygon(p, region.name)) region.polygons.push_back(std::move(poly));
      }
    } else {
      fail(ErrorCode::UnsupportedGeometry,
           region.name + ": geometry type '" + type + "' is not Polygon or MultiPolygon");
    }
    if (region.polygons.empty()) fail(ErrorCode::MalformedInput, region.name + ": no polygons");
    regions.push_back(std::move(region));
  }
  return RegionSet(std::move(regions));
}

/// Writes regions back as a FeatureCollection of MultiPolygons (rings closed).
inline std::string serialize_boundaries(const RegionSet& set, std::string_view name_property = "name") {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  auto ring = [](const GeoRing& r) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& p : r) out.push_back({p.lon, p.lat});
    out.push_back({r.front().lon, r.front().lat});
    return out;
  };
  for (const auto& region : set.regions()) {
    nlohmann::ordered_json polys = nlohmann::ordered_json::array();
    for (const auto& poly : region.polygons) {
      nlohmann::ordered_json rings = nlohmann::ordered_json::array();
      rings.push_back(ring(poly.outer));
      for (const auto& h : poly.holes) rings.push_back(ring(h));
      polys.push_back(std::move(rings));
    }
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["properties"][std::string(name_property)] = region.name;
    f["geometry"]["type"] = "MultiPolygon";
    f["geometry"]["coordinates"] = std::move(polys);
    features.push_back(std::move(f));
  }
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc.dump();
}

// --- map frame ----------------------------------------------------------------

/// A region after projection, with the anchor all marks attach to.
struct FrameRegion {
  std::string key;
  std::string name;
  ScreenRegion shape;
  Box bbox;
  Vec2 anchor;
};

/// Every region of a RegionSet projected once. Immutable after construction.
class MapFrame {
 public:
  MapFrame() = default;

  MapFrame(const RegionSet& set, const Projection& proj) : proj_(proj) {
    regions_.reserve(set.size());
    for (const auto& r : set.regions()) {
      FrameRegion fr;
      fr.key = r.key;
      fr.name = r.name;
      fr.shape = project(r, proj);
      fr.bbox = bounding_box(fr.shape);
      fr.anchor = centroid(fr.shape);
      index_.emplace(fr.key, regions_.size());
      regions_.push_back(std::move(fr));
    }
  }

  const Projection& projection() const { return proj_; }
  const std::vector<FrameRegion>& regions() const { return regions_; }

  const FrameRegion* find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    return it == index_.end() ? nullptr : &regions_[it->second];
  }

  /// Moves anchors (e.g. after a circle cartogram displaced them).
  void override_anchor(std::string_view key, Vec2 anchor) {
    auto it = index_.find(std::string(key));
    if (it != index_.end()) regions_[it->second].anchor = anchor;
  }

 private:
  Projection proj_;
  std::vector<FrameRegion> regions_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace geoglyph
