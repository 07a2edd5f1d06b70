// geoglyph command line: render, validate, suggest, serve.
//
// Exit codes: 0 valid, 2 invalid (report on stderr for render), 1 I/O failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geoglyph/http.hpp"
#include "geoglyph/pipeline.hpp"

namespace {

using namespace geoglyph;

constexpr int kValid = 0;
constexpr int kIo = 1;
constexpr int kInvalid = 2;

struct Paths {
  std::string spec, data, boundaries;
};

std::optional<std::string> slurp(const std::string& path) {
  auto bytes = read_file(path);
  if (!bytes) std::cerr << "geoglyph: cannot read " << path << "\n";
  return bytes;
}

std::string boundaries_or_default(const std::string& p) { return p.empty() ? default_boundaries_path().string() : p; }

void print_failure(const StageError& e, std::ostream& os) {
  ValidationReport r;
  r.add({std::string(to_string(e.code())), Severity::Error, e.what(), e.stage()});
  os << to_json(r).dump() << "\n";
}

int cmd_render(const Paths& p, const std::string& out, std::optional<std::uint64_t> seed) {
  const auto spec = slurp(p.spec);
  const auto data = slurp(p.data);
  const auto bounds = slurp(boundaries_or_default(p.boundaries));
  if (!spec || !data || !bounds) return kIo;
  RenderResult r;
  try {
    auto in = parse_inputs(*spec, *data, *bounds);
    if (seed) in.spec.seed = *seed;
    r = render(in);
  } catch (const StageError& e) {
    print_failure(e, std::cerr);
    return kInvalid;
  }
  if (!r.svg) {
    std::cerr << report_json(r).dump() << "\n";
    return kInvalid;
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (out.empty() || out == "-") {
    std::cout << *r.svg;
    return kValid;
  }
  std::ofstream f(out, std::ios::binary);
  f << *r.svg;
  f.close();
  if (!f) {
    std::cerr << "geoglyph: cannot write " << out << "\n";
    return kIo;
  }
  return kValid;
}

int cmd_validate(const Paths& p, bool suggest) {
  const auto spec = slurp(p.spec);
  const auto data = slurp(p.data);
  const auto bounds = slurp(boundaries_or_default(p.boundaries));
  if (!spec || !data || !bounds) return kIo;
  try {
    const auto in = parse_inputs(*spec, *data, *bounds);
    ValidationReport report = check(in);
    if (suggest && report.valid) {
      const auto joined = join(in.regions, in.table, in.spec.aliases);
      try {
        report.suggestions = suggest_alternatives(in.spec, joined);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoAlternatives) throw;
      }
    }
    std::cout << to_json(report, suggest).dump() << "\n";
    return report.valid ? kValid : kInvalid;
  } catch (const StageError& e) {
    print_failure(e, std::cout);
    return kInvalid;
  }
}

int cmd_serve(int port, const std::string& host, const std::string& boundaries) {
  const auto bounds = slurp(boundaries_or_default(boundaries));
  if (!bounds) return kIo;
  try {
    Service service(parse_boundaries(*bounds), load_gallery());
    httplib::Server server;
    mount(server, service);
    std::cerr << "geoglyph: listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
      std::cerr << "geoglyph: cannot bind " << host << ":" << port << "\n";
      return kIo;
    }
  } catch (const Error& e) {
    std::cerr << "geoglyph: " << e.what() << "\n";
    return kIo;
  }
  return kValid;
}

void add_inputs(CLI::App* cmd, Paths& p) {
  cmd->add_option("--spec", p.spec, "Infographic spec (JSON)")->required();
  cmd->add_option("--data", p.data, "Data table (JSON array of objects)")->required();
  cmd->add_option("--boundaries", p.boundaries, "GeoJSON boundaries; default: $GEOGLYPH_BOUNDARIES or bundled world");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoglyph: geo-infographic renderer"};
  app.require_subcommand(1);

  Paths paths;
  std::string out;
  std::optional<std::uint64_t> seed;
  auto* render = app.add_subcommand("render", "Render an SVG");
  add_inputs(render, paths);
  render->add_option("--out", out, "Output SVG path; '-' for stdout");
  render->add_option("--seed", seed, "Override the spec seed");

  auto* validate = app.add_subcommand("validate", "Print the validation report");
  add_inputs(validate, paths);
  auto* suggest = app.add_subcommand("suggest", "Validation report plus ranked alternatives");
  add_inputs(suggest, paths);

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serve_bounds;
  auto* serve = app.add_subcommand("serve", "Run the HTTP render service");
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--boundaries", serve_bounds, "GeoJSON boundaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kIo;
  }
  if (*render) return cmd_render(paths, out, seed);
  if (*validate) return cmd_validate(paths, false);
  if (*suggest) return cmd_validate(paths, true);
  return cmd_serve(port, host, serve_bounds);
}
