#pragma once

// Independent reference implementations used to check the library. Nothing
// here calls into the code under test except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "geoglyph/geometry.hpp"

namespace oracle {

using geoglyph::Box;
using geoglyph::ScreenPolygon;
using geoglyph::ScreenRegion;
using geoglyph::ScreenRing;
using geoglyph::Vec2;

/// Winding number of ring around p (angle summation with atan2).
inline int winding_number(Vec2 p, std::span<const Vec2> ring) {
  double total = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i] - p;
    const Vec2 b = ring[(i + 1) % n] - p;
    total += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

/// Inside iff an odd number of rings wind around p.
inline bool inside(Vec2 p, const ScreenRegion& region) {
  int rings = 0;
  for (const auto& poly : region.polygons) {
    if (winding_number(p, poly.outer) != 0) ++rings;
    for (const auto& h : poly.holes)
      if (winding_number(p, h) != 0) ++rings;
  }
  return rings % 2 == 1;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double edge_distance(Vec2 p, const ScreenRegion& region) {
  double best = INFINITY;
  auto ring_dist = [&](const ScreenRing& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      best = std::min(best, segment_distance(p, r[i], r[(i + 1) % r.size()]));
    }
  };
  for (const auto& poly : region.polygons) {
    ring_dist(poly.outer);
    for (const auto& h : poly.holes) ring_dist(h);
  }
  return best;
}

inline Box bounds(const ScreenRegion& region) {
  Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& poly : region.polygons)
    for (const auto& v : poly.outer) {
      b.x0 = std::min(b.x0, v.x);
      b.y0 = std::min(b.y0, v.y);
      b.x1 = std::max(b.x1, v.x);
      b.y1 = std::max(b.y1, v.y);
    }
  return b;
}

/// Area by counting cell centers of an n x n raster over the bounding box.
inline double raster_area(const ScreenRegion& region, int n = 1000) {
  const Box b = bounds(region);
  const double cw = (b.x1 - b.x0) / n;
  const double ch = (b.y1 - b.y0) / n;
  // Scanline parity per row is equivalent to the winding test for simple
  // rings and far cheaper than a million atan2 sums.
  long count = 0;
  std::vector<double> xs;
  for (int j = 0; j < n; ++j) {
    const double y = b.y0 + (j + 0.5) * ch;
    xs.clear();
    auto add_ring = [&](const ScreenRing& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2 a = r[i];
        const Vec2 c = r[(i + 1) % r.size()];
        if ((a.y > y) != (c.y > y)) xs.push_back(a.x + (y - a.y) / (c.y - a.y) * (c.x - a.x));
      }
    };
    for (const auto& poly : region.polygons) {
      add_ring(poly.outer);
      for (const auto& h : poly.holes) add_ring(h);
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = (xs[k] - b.x0) / cw - 0.5;
      const double hi = (xs[k + 1] - b.x0) / cw - 0.5;
      const long first = static_cast<long>(std::ceil(lo));
      const long last = static_cast<long>(std::floor(hi));
      if (last >= first) count += last - first + 1;
    }
  }
  return static_cast<double>(count) * cw * ch;
}

/// Random simple star-shaped polygon (concave in general) around `center`.
inline ScreenRing star_polygon(std::mt19937_64& rng, Vec2 center, double r_min, double r_max,
                               int vertices) {
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::uniform_real_distribution<double> jitter(0.1, 0.9);
  ScreenRing ring;
  for (int i = 0; i < vertices; ++i) {
    const double angle = 2 * std::numbers::pi * (i + jitter(rng)) / vertices;
    const double r = radius(rng);
    ring.push_back({center.x + r * std::cos(angle), center.y + r * std::sin(angle)});
  }
  return ring;
}

/// Every lattice point x0 + s/2 + i*s (same for y) within the box that the
/// winding oracle puts strictly inside the region.
inline std::vector<Vec2> lattice_inside(const ScreenRegion& region, double spacing) {
  const Box b = bounds(region);
  std::vector<Vec2> out;
  for (double y = b.y0 + spacing / 2; y < b.y1; y += spacing) {
    for (double x = b.x0 + spacing / 2; x < b.x1; x += spacing) {
      const Vec2 p{x, y};
      if (edge_distance(p, region) > 1e-12 && inside(p, region)) out.push_back(p);
    }
  }
  return out;
}

/// Closed-segment intersection by parametric solve.
inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double den = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
  if (std::abs(den) < 1e-15) {
    // Parallel: intersect only if collinear and overlapping.
    const double cross = (c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x);
    if (std::abs(cross) > 1e-12) return false;
    auto proj = [&](Vec2 p) { return (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y); };
    const double len2 = proj(b);
    const double t0 = proj(c);
    const double t1 = proj(d);
    return std::max(t0, t1) >= 0 && std::min(t0, t1) <= len2;
  }
  const double t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / den;
  const double u = ((c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x)) / den;
  return t >= 0 && t <= 1 && u >= 0 && u <= 1;
}

/// Interiors overlap by more than eps on both axes.
inline bool rects_overlap(const Box& a, const Box& b, double eps) {
  return std::min(a.x1, b.x1) - std::max(a.x0, b.x0) > eps &&
         std::min(a.y1, b.y1) - std::max(a.y0, b.y0) > eps;
}

}  // namespace oracle
