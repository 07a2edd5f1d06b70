#pragma once

// Planar primitives in screen space (px, y grows downward).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geoglyph {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return length(b - a); }

/// Axis-aligned rectangle stored as min/max corners.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  static Box empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, -inf, -inf};
  }
  static Box from_center(Vec2 c, double w, double h) {
    return {c.x - w / 2, c.y - h / 2, c.x + w / 2, c.y + h / 2};
  }
  static Box from_xywh(double x, double y, double w, double h) { return {x, y, x + w, y + h}; }

  bool is_empty() const { return x0 > x1 || y0 > y1; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Vec2 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }

  void expand(Vec2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  void expand(const Box& b) {
    if (b.is_empty()) return;
    expand(Vec2{b.x0, b.y0});
    expand(Vec2{b.x1, b.y1});
  }
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Box& b) const {
    return b.x0 >= x0 && b.x1 <= x1 && b.y0 >= y0 && b.y1 <= y1;
  }
  Box inflated(double d) const { return {x0 - d, y0 - d, x1 + d, y1 + d}; }

  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Interiors overlap by more than eps on both axes. Touching boxes do not overlap.
inline bool overlaps(const Box& a, const Box& b, double eps = 0.0) {
  return a.x0 < b.x1 - eps && b.x0 < a.x1 - eps && a.y0 < b.y1 - eps && b.y0 < a.y1 - eps;
}

using ScreenRing = std::vector<Vec2>;

struct ScreenPolygon {
  ScreenRing outer;
  std::vector<ScreenRing> holes;
};

/// A region after projection. Geometry only; identity lives in Region.
struct ScreenRegion {
  std::vector<ScreenPolygon> polygons;
};

/// Shoelace sum / 2. Positive for counterclockwise rings in a y-up frame.
inline double signed_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return s / 2.0;
}

inline double polygon_area(std::span<const Vec2> ring) { return std::abs(signed_area(ring)); }

/// Area of a region: outer rings minus holes.
inline double region_area(const ScreenRegion& region) {
  double a = 0.0;
  for (const auto& poly : region.polygons) {
    a += polygon_area(poly.outer);
    for (const auto& h : poly.holes) a -= polygon_area(h);
  }
  return a;
}

/// Centroid of a simple ring; undefined (NaN) for zero area.
inline Vec2 ring_centroid(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  double a = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  // Shift to the first vertex to keep the products small.
  const Vec2 o = n ? ring[0] : Vec2{};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = ring[i] - o;
    const Vec2 q = ring[(i + 1) % n] - o;
    const double c = p.x * q.y - q.x * p.y;
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  a /= 2.0;
  return Vec2{cx / (6.0 * a), cy / (6.0 * a)} + o;
}

inline bool point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double c = cross(ab, p - a);
  const double tol = 1e-12 * std::max(1.0, len2);
  if (std::abs(c) > tol) return false;
  const double t = dot(p - a, ab);
  return t >= -tol && t <= len2 + tol;
}

/// Crossing-number parity for one ring; the caller handles edge points.
inline bool crosses_odd(Vec2 p, std::span<const Vec2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

inline bool on_ring_boundary(Vec2 p, std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (point_on_segment(p, ring[j], ring[i])) return true;
  }
  return false;
}

template <typename Fn>
void for_each_ring(const ScreenRegion& region, Fn&& fn) {
  for (const auto& poly : region.polygons) {
    fn(poly.outer);
    for (const auto& h : poly.holes) fn(h);
  }
}

/// Even-odd rule over every ring of the region. Points on an edge are outside.
inline bool point_in_region(Vec2 p, const ScreenRegion& region) {
  bool inside = false;
  bool on_edge = false;
  for_each_ring(region, [&](const ScreenRing& ring) {
    if (on_edge || ring.size() < 3) return;
    if (on_ring_boundary(p, ring)) {
      on_edge = true;
      return;
    }
    if (crosses_odd(p, ring)) inside = !inside;
  });
  return inside && !on_edge;
}

inline Box bounding_box(const ScreenRegion& region) {
  Box b = Box::empty();
  for_each_ring(region, [&](const ScreenRing& ring) {
    for (const auto& p : ring) b.expand(p);
  });
  return b;
}

inline Box bounding_box(std::span<const Vec2> pts) {
  Box b = Box::empty();
  for (const auto& p : pts) b.expand(p);
  return b;
}

/// Proper or touching intersection of closed segments ab and cd,
/// including collinear overlap.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_seg = [](Vec2 p, Vec2 q, Vec2 r) {  // r on pq given collinear
    return r.x >= std::min(p.x, q.x) && r.x <= std::max(p.x, q.x) &&
           r.y >= std::min(p.y, q.y) && r.y <= std::max(p.y, q.y);
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

/// Does segment ab enter the interior of box (shrunk by eps)?
inline bool segment_hits_box(Vec2 a, Vec2 b, const Box& box, double eps = 0.0) {
  const Box inner{box.x0 + eps, box.y0 + eps, box.x1 - eps, box.y1 - eps};
  if (inner.is_empty()) return false;
  // Liang-Barsky clip against the open interior.
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - inner.x0, inner.x1 - a.x, a.y - inner.y0, inner.y1 - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] <= 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
    }
  }
  return t0 < t1;
}

/// Uniform scale about a center followed by a translation:
/// v' = scale * (v - center) + center + offset.
struct Affine {
  double scale = 1.0;
  Vec2 center{};
  Vec2 offset{};

  Vec2 operator()(Vec2 v) const { return scale * (v - center) + center + offset; }
};

}  // namespace geoglyph
