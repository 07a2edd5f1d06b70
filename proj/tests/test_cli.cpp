#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("geoglyph-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + " " + GEOGLYPH_CLI + std::string(" ") + args + " 2>" + err.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = support::read_file(err.string());
  return r;
}

const std::string kData = support::numbers({{"China", 1411}, {"India", 1380}, {"Brazil", 213}});

std::string inputs(const fs::path& spec, const fs::path& data) {
  return "--spec " + spec.string() + " --data " + data.string();
}

}  // namespace

TEST(Cli, RenderWritesTheFile) {
  const auto spec = write("ok.json", R"({"channels":[{"kind":"color_intensity"}]})");
  const auto data = write("data.json", kData);
  const fs::path out = scratch() / "ok.svg";
  const auto r = run("render " + inputs(spec, data) + " --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(out));
  EXPECT_TRUE(support::read_file(out.string()).starts_with("<?xml"));
}

TEST(Cli, InvalidPairExitsTwoWithoutOutput) {
  const auto spec = write("bad.json", R"({"channels":[{"kind":"color_intensity"},{"kind":"color_hue"}]})");
  const auto data = write("data.json", kData);
  const fs::path out = scratch() / "bad.svg";
  const auto r = run("render " + inputs(spec, data) + " --out " + out.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(r.err.find("\"verdict\":\"invalid\""), std::string::npos);
  EXPECT_NE(r.err.find("incompatible_channels"), std::string::npos);
}

TEST(Cli, MissingFileExitsOne) {
  const auto data = write("data.json", kData);
  const auto r = run("render --spec " + (scratch() / "nope.json").string() + " --data " + data.string());
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, ValidateValidPrintsTheBareReport) {
  const auto spec = write("ok.json", R"({"channels":[{"kind":"color_intensity"}]})");
  const auto data = write("data.json", kData);
  const auto r = run("validate " + inputs(spec, data));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"verdict\":\"valid\",\"issues\":[]}\n");
}

TEST(Cli, ValidateTopographic) {
  const auto spec = write("topo.json", R"({"basemap":"topographic","channels":[{"kind":"color_intensity"}]})");
  const auto data = write("data.json", kData);
  const auto r = run("validate " + inputs(spec, data));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("\"code\":\"unsupported_basemap\""), std::string::npos);
}

TEST(Cli, SuggestListsAlternatives) {
  const auto spec = write("bad.json", R"({"channels":[{"kind":"color_intensity"},{"kind":"color_hue"}]})");
  const auto data = write("data.json", kData);
  const auto r = run("suggest " + inputs(spec, data));
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("suggestions"));
  EXPECT_FALSE(j["suggestions"].empty());
}

TEST(Cli, SeedOverrideAndStdout) {
  const auto spec = write("dots.json",
                          R"({"basemap":{"kind":"shape_based_varied","dot_spacing":8,"dot_radius":2},"channels":[{"kind":"color_intensity"}]})");
  const auto data = write("data.json", kData);
  const auto a = run("render " + inputs(spec, data) + " --out - --seed 1");
  const auto b = run("render " + inputs(spec, data) + " --out - --seed 1");
  const auto c = run("render " + inputs(spec, data) + " --out - --seed 2");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, BoundariesFromEnvironment) {
  const auto geo = write("squares.geojson", geoglyph::serialize_boundaries(support::squares({"Alpha", "Beta"}, 10)));
  const auto spec = write("ok.json", R"({"channels":[{"kind":"color_intensity"}]})");
  const auto data = write("ab.json", support::numbers({{"Alpha", 1}, {"Beta", 2}}));
  const auto r = run("validate " + inputs(spec, data), "GEOGLYPH_BOUNDARIES=" + geo.string());
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto world = run("validate " + inputs(spec, data));
  EXPECT_EQ(world.code, 2);  // neither name exists in the bundled world
}
