#pragma once

// Upload data format: a JSON array of objects, one per region (or per flow
// edge), each carrying a region name, a value and an optional label.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoglyph/error.hpp"
#include "geoglyph/geodata.hpp"
#include "geoglyph/text.hpp"

namespace geoglyph {

enum class FieldKind { Quantitative, Categorical, Flow };

constexpr std::string_view to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Quantitative: return "quantitative";
    case FieldKind::Categorical: return "categorical";
    case FieldKind::Flow: return "flow";
  }
  return "";
}

struct DataRow {
  std::string region_name;
  std::variant<double, std::string> value;
  std::optional<std::string> label;
  std::optional<std::string> flow_to;
  std::optional<double> flow_magnitude;

  bool is_quantitative() const { return std::holds_alternative<double>(value); }
  double number() const { return std::get<double>(value); }
  const std::string& category() const { return std::get<std::string>(value); }
};

struct DataTable {
  std::vector<DataRow> rows;
  FieldKind field_kind = FieldKind::Quantitative;
};

namespace detail {

inline const nlohmann::json* first_key(const nlohmann::json& obj,
                                       std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it != obj.end()) return &*it;
  }
  return nullptr;
}

}  // namespace detail

/// Accepted keys: "name" or "country" (region), "value" or "data" (payload),
/// "label" (optional), "to" (marks a flow row; the payload is its magnitude).
inline DataTable parse_data(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedInput, std::string("data: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorCode::MalformedInput, "data: top level must be an array");
  if (doc.empty()) fail(ErrorCode::EmptyTable, "data: no rows");

  DataTable table;
  bool any_flow = false;
  bool any_number = false;
  bool any_string = false;
  std::size_t i = 0;
  for (const auto& obj : doc) {
    const std::string where = "data row " + std::to_string(i++);
    if (!obj.is_object()) fail(ErrorCode::MalformedInput, where + ": not an object");
    DataRow row;
    const auto* name = detail::first_key(obj, {"name", "country"});
    if (!name || !name->is_string() || text::trim(name->get<std::string>()).empty()) {
      fail(ErrorCode::MalformedInput, where + ": missing region name");
    }
    row.region_name = name->get<std::string>();
    const auto* value = detail::first_key(obj, {"value", "data"});
    if (!value) fail(ErrorCode::MalformedInput, where + ": missing value");
    if (value->is_number()) {
      row.value = value->get<double>();
      any_number = true;
    } else if (value->is_string()) {
      row.value = value->get<std::string>();
      any_string = true;
    } else {
      fail(ErrorCode::MalformedInput, where + ": value must be a number or a string");
    }
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) fail(ErrorCode::MalformedInput, where + ": label must be a string");
      row.label = it->get<std::string>();
    }
    if (auto it = obj.find("to"); it != obj.end()) {
      if (!it->is_string() || text::trim(it->get<std::string>()).empty()) {
        fail(ErrorCode::MalformedInput, where + ": 'to' must name a region");
      }
      row.flow_to = it->get<std::string>();
      any_flow = true;
    }
    table.rows.push_back(std::move(row));
  }

  if (any_flow) {
    for (auto& row : table.rows) {
      if (!row.flow_to) fail(ErrorCode::MalformedInput, "data: flow tables need 'to' on every row");
      if (!row.is_quantitative() || row.number() < 0) {
        fail(ErrorCode::MalformedInput, "data: flow magnitudes must be numbers >= 0");
      }
      row.flow_magnitude = row.number();
    }
    table.field_kind = FieldKind::Flow;
  } else if (any_number && any_string) {
    fail(ErrorCode::MixedKinds, "data: numeric and text values are mixed");
  } else {
    table.field_kind = any_number ? FieldKind::Quantitative : FieldKind::Categorical;
  }
  return table;
}

/// Dataset spelling -> region key. Keys and targets are stored normalized.
using AliasTable = std::map<std::string, std::string>;

/// Accepts either {"USA": "United States of America"} or
/// [["USA", "United States of America"], ...].
inline AliasTable parse_aliases(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedInput, std::string("aliases: ") + e.what());
  }
  AliasTable out;
  if (doc.is_object()) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!it.value().is_string()) fail(ErrorCode::MalformedInput, "aliases: values must be strings");
      out[text::normalize_key(it.key())] = text::normalize_key(it.value().get<std::string>());
    }
  } else if (doc.is_array()) {
    for (const auto& pair : doc) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        fail(ErrorCode::MalformedInput, "aliases: rows must be [from, to] string pairs");
      }
      out[text::normalize_key(pair[0].get<std::string>())] =
          text::normalize_key(pair[1].get<std::string>());
    }
  } else {
    fail(ErrorCode::MalformedInput, "aliases: expected an object or an array of pairs");
  }
  return out;
}

struct Match {
  std::string key;  // region key
  DataRow row;
};

struct FlowEdge {
  std::string from;
  std::string to;
  double magnitude = 0.0;
  std::optional<std::string> label;
};

struct JoinedData {
  FieldKind field_kind = FieldKind::Quantitative;
  std::vector<Match> matched;  // non-flow tables, in row order
  std::vector<FlowEdge> edges;  // flow tables, in row order
  std::vector<std::string> unmatched_names;
  std::vector<std::string> uncovered_regions;

  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& m : matched)
      if (m.row.is_quantitative()) out.push_back(m.row.number());
    return out;
  }
};

inline std::string resolve_key(std::string_view name, const AliasTable& aliases) {
  std::string key = text::normalize_key(name);
  if (auto it = aliases.find(key); it != aliases.end()) return it->second;
  return key;
}

/// Joins rows to regions by normalized key (aliases first). Nothing is
/// dropped silently: every row lands in matched/edges or unmatched_names.
/// A second row for an already matched region is reported as unmatched.
inline JoinedData join(const RegionSet& regions, const DataTable& table,
                       const AliasTable& aliases = {}) {
  JoinedData out;
  out.field_kind = table.field_kind;
  std::set<std::string> covered;
  if (table.field_kind == FieldKind::Flow) {
    for (const auto& row : table.rows) {
      const std::string from = resolve_key(row.region_name, aliases);
      const std::string to = resolve_key(*row.flow_to, aliases);
      const bool from_ok = regions.find(from).has_value();
      const bool to_ok = regions.find(to).has_value();
      if (!from_ok) out.unmatched_names.push_back(row.region_name);
      if (!to_ok) out.unmatched_names.push_back(*row.flow_to);
      if (from_ok && to_ok) {
        out.edges.push_back({from, to, row.flow_magnitude.value_or(0.0), row.label});
        covered.insert(from);
        covered.insert(to);
      }
    }
    if (out.edges.empty()) fail(ErrorCode::NoMatches, "join: no flow edge resolved to regions");
  } else {
    for (const auto& row : table.rows) {
      const std::string key = resolve_key(row.region_name, aliases);
      if (regions.find(key) && !covered.count(key)) {
        covered.insert(key);
        out.matched.push_back({key, row});
      } else {
        out.unmatched_names.push_back(row.region_name);
      }
    }
    if (out.matched.empty()) fail(ErrorCode::NoMatches, "join: no row matched a region");
  }
  for (const auto& r : regions.regions()) {
    if (!covered.count(r.key)) out.uncovered_regions.push_back(r.key);
  }
  return out;
}

}  // namespace geoglyph
