#pragma once

// Data files shipped in data/ and compiled in: the compatibility matrix,
// default palettes and the built-in icon library.

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "geoglyph/embedded_data.hpp"  // generated from data/*.json
#include "geoglyph/scales.hpp"

namespace geoglyph {

struct Palettes {
  ColorRamp categorical;
  ColorRamp intensity;
  ColorRamp hue_ramp;
  Rgb base_fill;
  Rgb base_stroke;
  Rgb accent;
};

inline Palettes parse_palettes(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto ramp = [&](const char* key, RampMode mode) {
    std::vector<Rgb> stops;
    for (const auto& s : j.at(key)) stops.push_back(parse_hex(s.get<std::string>()));
    return ColorRamp(std::move(stops), mode);
  };
  return Palettes{ramp("categorical", RampMode::Categorical),
                  ramp("intensity", RampMode::Ramp),
                  ramp("hue_ramp", RampMode::Ramp),
                  parse_hex(j.at("base_fill").get<std::string>()),
                  parse_hex(j.at("base_stroke").get<std::string>()),
                  parse_hex(j.at("accent").get<std::string>())};
}

inline const Palettes& default_palettes() {
  static const Palettes p = parse_palettes(embedded::kPalettesJson);
  return p;
}

/// Named symbols drawn on a square view box.
struct IconLibrary {
  double view_box = 24.0;
  std::map<std::string, std::string> paths;

  bool contains(const std::string& name) const { return paths.count(name) > 0; }
};

inline IconLibrary parse_icons(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  IconLibrary lib;
  lib.view_box = j.at("view_box").get<double>();
  for (const auto& [name, path] : j.at("icons").items()) lib.paths[name] = path.get<std::string>();
  return lib;
}

inline const IconLibrary& builtin_icons() {
  static const IconLibrary lib = parse_icons(embedded::kIconsJson);
  return lib;
}

}  // namespace geoglyph
