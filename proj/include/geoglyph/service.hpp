#pragma once

// Request handling for the render service, independent of any HTTP library.
// Bodies for POST endpoints: {"spec": {...}, "data": [...]}.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/gallery.hpp"
#include "geoglyph/pipeline.hpp"

namespace geoglyph {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline constexpr const char* kSvgType = "image/svg+xml";

/// Immutable after construction; `handle` may be called from many threads.
class Service {
 public:
  Service(RegionSet regions, std::vector<GalleryEntry> gallery)
      : regions_(std::move(regions)), gallery_(std::move(gallery)) {}

  const RegionSet& regions() const { return regions_; }
  const std::vector<GalleryEntry>& gallery() const { return gallery_; }

  Response handle(std::string_view method, std::string_view path, std::string_view body) const {
    if (method == "GET" && path == "/catalog") return json(200, design_space_catalog());
    if (method == "GET" && path == "/gallery") return gallery_list();
    if (method == "GET" && path.starts_with("/gallery/") && path.ends_with(".svg")) {
      return thumbnail(path.substr(9, path.size() - 13));
    }
    if (method == "POST" && (path == "/render" || path == "/validate" || path == "/suggest")) {
      std::string spec, data;
      if (!split_body(body, spec, data)) return error(400, "body must be a JSON object with 'spec' and 'data'");
      if (path == "/render") return render_(spec, data);
      if (path == "/validate") return validate_(spec, data, false);
      return validate_(spec, data, true);
    }
    if (path == "/catalog" || path == "/gallery" || path == "/render" || path == "/validate" || path == "/suggest") {
      return error(405, "method not allowed");
    }
    return error(404, "not found");
  }

 private:
  static Response json(int status, const nlohmann::ordered_json& j) { return {status, "application/json", j.dump()}; }

  static Response error(int status, const std::string& msg) {
    nlohmann::ordered_json j;
    j["error"] = msg;
    return json(status, j);
  }

  static bool split_body(std::string_view body, std::string& spec, std::string& data) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("spec") || !j.contains("data")) return false;
    spec = j["spec"].dump();
    data = j["data"].dump();
    return true;
  }

  static Response failure(const StageError& e) {
    ValidationReport r;
    r.add({std::string(to_string(e.code())), Severity::Error, e.what(), e.stage()});
    return json(422, to_json(r));
  }

  Response render_(std::string_view spec, std::string_view data) const {
    try {
      const auto s = stage("spec", [&] { return parse_spec(spec); });
      const auto t = stage("data", [&] { return parse_data(data); });
      auto r = render(s, t, regions_);
      if (!r.svg) return json(422, report_json(r));
      return {200, kSvgType, std::move(*r.svg)};
    } catch (const StageError& e) {
      return failure(e);
    }
  }

  Response validate_(std::string_view spec, std::string_view data, bool suggest) const {
    try {
      const auto s = stage("spec", [&] { return parse_spec(spec); });
      const auto t = stage("data", [&] { return parse_data(data); });
      if (!suggest) return json(200, to_json(check(s, t, regions_)));
      const auto joined = stage("join", [&] { return join(regions_, t, s.aliases); });
      std::vector<Suggestion> list;
      try {
        list = stage("suggest", [&] { return suggest_alternatives(s, joined); });
      } catch (const StageError& e) {
        if (e.code() != ErrorCode::NoAlternatives) throw;
      }
      nlohmann::ordered_json j;
      j["suggestions"] = nlohmann::ordered_json::array();
      for (const auto& sug : list) j["suggestions"].push_back(to_json(sug));
      return json(200, j);
    } catch (const StageError& e) {
      return failure(e);
    }
  }

  Response gallery_list() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& g : gallery_) {
      nlohmann::ordered_json e;
      e["name"] = g.name;
      e["description"] = g.description;
      e["spec"] = nlohmann::ordered_json::parse(g.spec);
      e["data"] = nlohmann::ordered_json::parse(g.data);
      e["thumbnail"] = "/gallery/" + g.name + ".svg";
      arr.push_back(std::move(e));
    }
    return json(200, arr);
  }

  Response thumbnail(std::string_view name) const {
    for (const auto& g : gallery_) {
      if (g.name == name) return render_(g.spec, g.data);
    }
    return error(404, "no gallery entry named '" + std::string(name) + "'");
  }

  RegionSet regions_;
  std::vector<GalleryEntry> gallery_;
};

}  // namespace geoglyph
