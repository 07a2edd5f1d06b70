#pragma once

// Bundled example specs and default file locations.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/error.hpp"

namespace geoglyph {

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

/// GEOGLYPH_BOUNDARIES if set, else the bundled world fixture.
inline std::filesystem::path default_boundaries_path() {
  if (const char* env = std::getenv("GEOGLYPH_BOUNDARIES"); env && *env) return env;
#ifdef GEOGLYPH_DATA_DIR
  return std::filesystem::path(GEOGLYPH_DATA_DIR) / "world-110m.geojson";
#else
  return "data/world-110m.geojson";
#endif
}

inline std::filesystem::path default_gallery_dir() {
#ifdef GEOGLYPH_GALLERY_DIR
  return GEOGLYPH_GALLERY_DIR;
#else
  return "gallery";
#endif
}

struct GalleryEntry {
  std::string name;
  std::string description;
  std::string spec;  // raw bytes
  std::string data;
};

/// Reads index.json and every <name>.spec.json / <name>.data.json it lists.
inline std::vector<GalleryEntry> load_gallery(const std::filesystem::path& dir = default_gallery_dir()) {
  const auto index = read_file(dir / "index.json");
  if (!index) fail(ErrorCode::MalformedInput, "gallery: cannot read " + (dir / "index.json").string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*index);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedInput, std::string("gallery: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::MalformedInput, "gallery: index must be an array");
  std::vector<GalleryEntry> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
      fail(ErrorCode::MalformedInput, "gallery: entries need a name");
    }
    GalleryEntry g;
    g.name = e["name"].get<std::string>();
    g.description = e.value("description", "");
    auto spec = read_file(dir / (g.name + ".spec.json"));
    auto data = read_file(dir / (g.name + ".data.json"));
    if (!spec || !data) fail(ErrorCode::MalformedInput, "gallery: missing files for '" + g.name + "'");
    g.spec = std::move(*spec);
    g.data = std::move(*data);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace geoglyph
