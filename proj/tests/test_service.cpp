#include <thread>

#include <gtest/gtest.h>

#include "geoglyph/http.hpp"
#include "support.hpp"

using namespace geoglyph;

namespace {

const Service& service() {
  static const Service s(support::world(), load_gallery());
  return s;
}

std::string body(const std::string& spec, const std::string& data) {
  return R"({"spec":)" + spec + R"(,"data":)" + data + "}";
}

const std::string kData = support::numbers({{"China", 1411}, {"India", 1380}, {"Brazil", 213}});

}  // namespace

TEST(Service, CatalogListsTenChannels) {
  const auto r = service().handle("GET", "/catalog", "");
  ASSERT_EQ(r.status, 200);
  const auto j = nlohmann::json::parse(r.body);
  EXPECT_EQ(j["channels"].size(), 10u);
  EXPECT_EQ(r.body, design_space_catalog().dump());
}

TEST(Service, ValidateReportsInvalidPairWith200) {
  const auto r = service().handle(
      "POST", "/validate", body(R"({"channels":[{"kind":"color_intensity"},{"kind":"color_hue"}]})", kData));
  EXPECT_EQ(r.status, 200);
  const auto j = nlohmann::json::parse(r.body);
  EXPECT_EQ(j["verdict"], "invalid");
  EXPECT_EQ(j["issues"][0]["code"], "incompatible_channels");
}

TEST(Service, SuggestReturnsRankedList) {
  const auto r = service().handle(
      "POST", "/suggest", body(R"({"channels":[{"kind":"color_intensity"},{"kind":"color_hue"}]})", kData));
  EXPECT_EQ(r.status, 200);
  const auto j = nlohmann::json::parse(r.body);
  ASSERT_FALSE(j["suggestions"].empty());
  EXPECT_TRUE(j["suggestions"][0].contains("channels"));
}

TEST(Service, RenderGivesSvgOrReport) {
  const auto& g = service().gallery().front();
  const auto ok = service().handle("POST", "/render", body(g.spec, g.data));
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(ok.content_type, "image/svg+xml");
  EXPECT_TRUE(ok.body.starts_with("<?xml"));

  const auto bad = service().handle(
      "POST", "/render", body(R"({"channels":[{"kind":"color_intensity"},{"kind":"color_hue"}]})", kData));
  EXPECT_EQ(bad.status, 422);
  EXPECT_EQ(nlohmann::json::parse(bad.body)["verdict"], "invalid");

  const auto malformed_spec = service().handle("POST", "/render", body(R"({"channels":7})", kData));
  EXPECT_EQ(malformed_spec.status, 422);
}

TEST(Service, MalformedBodyIs400) {
  for (const char* b : {"", "not json", "[1,2]", R"({"spec":{}})"}) {
    EXPECT_EQ(service().handle("POST", "/render", b).status, 400) << b;
    EXPECT_EQ(service().handle("POST", "/validate", b).status, 400) << b;
  }
}

TEST(Service, GalleryAndThumbnails) {
  const auto r = service().handle("GET", "/gallery", "");
  ASSERT_EQ(r.status, 200);
  const auto j = nlohmann::json::parse(r.body);
  EXPECT_GE(j.size(), 6u);
  const std::string thumb = j[0]["thumbnail"];
  const auto t = service().handle("GET", thumb, "");
  EXPECT_EQ(t.status, 200);
  EXPECT_EQ(t.content_type, "image/svg+xml");
  EXPECT_EQ(service().handle("GET", "/gallery/none.svg", "").status, 404);
}

TEST(Service, OrderDoesNotMatter) {
  const auto req = body(R"({"channels":[{"kind":"size"}],"labels":"linked_convenient"})", kData);
  const auto first = service().handle("POST", "/render", req).body;
  service().handle("POST", "/render", body(R"({"channels":[{"kind":"color_hue"}]})", kData));
  service().handle("GET", "/catalog", "");
  EXPECT_EQ(service().handle("POST", "/render", req).body, first);
}

TEST(Service, LiveServer) {
  httplib::Server server;
  mount(server, service());
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto cat = client.Get("/catalog");
  ASSERT_TRUE(cat);
  EXPECT_EQ(cat->status, 200);
  EXPECT_EQ(nlohmann::json::parse(cat->body)["channels"].size(), 10u);

  const auto& g = service().gallery().front();
  const auto svg = client.Post("/render", body(g.spec, g.data), "application/json");
  ASSERT_TRUE(svg);
  EXPECT_EQ(svg->status, 200);
  EXPECT_EQ(svg->get_header_value("Content-Type"), "image/svg+xml");

  const auto bad = client.Post("/validate", "{oops", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  const auto wrong = client.Get("/render");
  ASSERT_TRUE(wrong);
  EXPECT_EQ(wrong->status, 405);

  server.stop();
  t.join();
}
