#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geoglyph/dataio.hpp"
#include "geoglyph/error.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/text.hpp"

namespace support {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const geoglyph::RegionSet& world() {
  static const geoglyph::RegionSet w =
      geoglyph::parse_boundaries(read_file(GEOGLYPH_DATA_DIR "/world-110m.geojson"));
  return w;
}

/// Unit squares in lon/lat laid out left to right, two degrees apart.
inline geoglyph::RegionSet squares(std::initializer_list<const char*> names, double size = 1.0) {
  std::vector<geoglyph::Region> out;
  double x = 0;
  for (const char* n : names) {
    geoglyph::Region r;
    r.name = n;
    r.key = geoglyph::text::normalize_key(n);
    r.polygons.push_back({{{x, 0}, {x + size, 0}, {x + size, size}, {x, size}}, {}});
    out.push_back(std::move(r));
    x += 2 * size;
  }
  return geoglyph::RegionSet(std::move(out));
}

inline geoglyph::MapFrame frame_of(const geoglyph::RegionSet& set, double w = 960, double h = 540) {
  return {set, geoglyph::Projection(geoglyph::ProjectionKind::Equirectangular, set.bbox(), {0, 0, w, h})};
}

inline std::string json_str(const std::string& s) { return "\"" + s + "\""; }

/// Quantitative rows as a data document.
inline std::string numbers(std::initializer_list<std::pair<const char*, double>> rows) {
  std::string out = "[";
  for (const auto& [name, v] : rows) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    out += (out.size() > 1 ? "," : "") + std::string("{\"name\":") + json_str(name) + ",\"value\":" + o.str() + "}";
  }
  return out + "]";
}

inline std::string categories(std::initializer_list<std::pair<const char*, const char*>> rows) {
  std::string out = "[";
  for (const auto& [name, v] : rows) {
    out += (out.size() > 1 ? "," : "") + std::string("{\"name\":") + json_str(name) + ",\"value\":" + json_str(v) + "}";
  }
  return out + "]";
}

inline geoglyph::JoinedData joined(const geoglyph::RegionSet& set, const std::string& data) {
  return geoglyph::join(set, geoglyph::parse_data(data));
}

template <typename Fn>
std::string code_of(Fn&& fn) {
  try {
    fn();
  } catch (const geoglyph::Error& e) {
    return std::string(geoglyph::to_string(e.code()));
  }
  return "no_error";
}

}  // namespace support
