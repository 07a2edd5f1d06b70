#include <random>

#include <gtest/gtest.h>

#include "geoglyph/basemap.hpp"
#include "geoglyph/scene.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace geoglyph;

namespace {

ScreenRegion square(double x0, double y0, double s) {
  return {{{{{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}}, {}}}};
}

}  // namespace

TEST(Svg, EmptySceneIsRootOnly) {
  const auto svg = to_svg(compose(10, 20, {}, {}));
  EXPECT_EQ(svg,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg height=\"20\" viewBox=\"0 0 10 20\" width=\"10\" xmlns=\"http://www.w3.org/2000/svg\" "
            "xmlns:xlink=\"http://www.w3.org/1999/xlink\"/>\n");
}

TEST(Svg, CoordinatesUseTwoDecimals) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Encoding].push_back(make_mark(CircleShape{{1.005, 2}, 3.333}, filled({255, 0, 0}), "a", "symbol"));
  const auto svg = to_svg(compose(10, 10, {}, std::move(layers)));
  EXPECT_NE(svg.find("cx=\"1.01\""), std::string::npos) << svg;
  EXPECT_NE(svg.find("cy=\"2.00\""), std::string::npos);
  EXPECT_NE(svg.find("r=\"3.33\""), std::string::npos);
  EXPECT_NE(svg.find("fill=\"#ff0000\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"symbol\""), std::string::npos);
  EXPECT_NE(svg.find("<g id=\"layer-enc\">"), std::string::npos);
}

TEST(Svg, AttributesAreSorted) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Encoding].push_back(make_mark(RectShape{{0, 0, 2, 3}}, filled({0, 0, 0}), "k", "bar"));
  const auto svg = to_svg(compose(10, 10, {}, std::move(layers)));
  const auto line_start = svg.find("<rect");
  const auto line = svg.substr(line_start, svg.find('\n', line_start) - line_start);
  std::vector<std::string> names;
  for (std::size_t i = 0; (i = line.find("=\"", i)) != std::string::npos; i += 2) {
    const auto sp = line.rfind(' ', i);
    names.push_back(line.substr(sp + 1, i - sp - 1));
  }
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end())) << line;
}

TEST(Compose, IdsFollowLayerAndKey) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Encoding].push_back(make_mark(CircleShape{{1, 1}, 1}, {}, "a"));
  layers[Layer::Encoding].push_back(make_mark(CircleShape{{2, 1}, 1}, {}, "a"));
  layers[Layer::Encoding].push_back(make_mark(CircleShape{{3, 1}, 1}, {}, "b"));
  layers[Layer::Labels].push_back(make_mark(CircleShape{{3, 1}, 1}, {}));
  const auto scene = compose(10, 10, {}, std::move(layers));
  const auto& enc = scene.layer(Layer::Encoding);
  EXPECT_EQ(enc[0].id, "enc-a-0");
  EXPECT_EQ(enc[1].id, "enc-a-1");
  EXPECT_EQ(enc[2].id, "enc-b");
  EXPECT_EQ(scene.layer(Layer::Labels)[0].id, "label-0");
}

TEST(Compose, UnresolvedReference) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Encoding].push_back(make_mark(IconShape{"icon-x", {0, 0, 8, 8}}, {}, "a"));
  EXPECT_EQ(support::code_of([&] { compose(10, 10, {}, layers); }), "unresolved_reference");
  std::vector<Def> defs{{"icon-x", SymbolDef{24, "M0 0h24v24z"}}};
  EXPECT_EQ(support::code_of([&] { compose(10, 10, defs, layers); }), "no_error");
}

TEST(Compose, DuplicateDefinition) {
  std::vector<Def> defs{{"icon-x", SymbolDef{24, "M0 0"}}};
  EXPECT_EQ(support::code_of([&] { add_def(defs, {"icon-x", SymbolDef{24, "M1 1"}}); }), "duplicate_id");
  add_def(defs, {"icon-x", SymbolDef{24, "M0 0"}});  // identical: deduplicated
  EXPECT_EQ(defs.size(), 1u);
}

TEST(Svg, LayersInFixedOrder) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Labels].push_back(make_mark(CircleShape{{1, 1}, 1}, {}, "a"));
  layers[Layer::Base].push_back(make_mark(CircleShape{{1, 1}, 1}, {}, "a"));
  layers[Layer::Flow].push_back(make_mark(CircleShape{{1, 1}, 1}, {}, "a"));
  const auto svg = to_svg(compose(10, 10, {}, std::move(layers)));
  const auto b = svg.find("layer-base");
  const auto f = svg.find("layer-flow");
  const auto l = svg.find("layer-label");
  EXPECT_LT(b, f);
  EXPECT_LT(f, l);
}

TEST(Svg, TextIsEscaped) {
  std::map<Layer, std::vector<Mark>> layers;
  layers[Layer::Labels].push_back(
      make_mark(TextShape{{5, 5}, {"Bosnia & <Herz>"}, 10, TextAnchor::Middle, false}, {}, "b"));
  const auto svg = to_svg(compose(10, 10, {}, std::move(layers)));
  EXPECT_NE(svg.find("Bosnia &amp; &lt;Herz&gt;"), std::string::npos) << svg;
}

TEST(MarkBbox, TextBox) {
  const TextShape t{{0, 10}, {"abcde"}, 10, TextAnchor::Start, false};
  const Box b = text_box(t);
  EXPECT_DOUBLE_EQ(b.width(), 30);
  EXPECT_DOUBLE_EQ(b.height(), 12);
}

TEST(Transformed, ScalesAboutCenter) {
  const Mark m = make_mark(CircleShape{{2, 0}, 1}, stroked({0, 0, 0}, 1), "a");
  const Mark t = transformed(m, Affine{2.0, {0, 0}, {1, 1}});
  const auto& c = std::get<CircleShape>(t.shape);
  EXPECT_DOUBLE_EQ(c.c.x, 5);
  EXPECT_DOUBLE_EQ(c.c.y, 1);
  EXPECT_DOUBLE_EQ(c.r, 2);
}

TEST(DotGrid, TenPixelSquare) {
  const auto dots = dot_grid(square(0, 0, 10), 2, 0.5);
  EXPECT_EQ(dots.size(), 25u);
  for (const auto& d : dots) EXPECT_TRUE(point_in_region(d.c, square(0, 0, 10)));
}

TEST(DotGrid, RejectsTouchingDots) {
  EXPECT_EQ(support::code_of([] { dot_grid(square(0, 0, 10), 1, 0.5); }), "invalid_argument");
  EXPECT_EQ(support::code_of([] { dot_grid(square(0, 0, 10), 2, 0); }), "invalid_argument");
}

TEST(DotGrid, ZeroAreaRegionHasNoDots) {
  const ScreenRegion flat{{{{{0, 0}, {10, 0}, {20, 0}}, {}}}};
  EXPECT_TRUE(dot_grid(flat, 2, 0.5).empty());
}

TEST(DotGrid, MatchesLatticeOracle) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    const ScreenRegion poly{{{oracle::star_polygon(rng, {100, 100}, 20, 80, 9 + k), {}}}};
    const auto dots = dot_grid(poly, 5, 1.5);
    for (const auto& d : dots) ASSERT_TRUE(point_in_region(d.c, poly));
    EXPECT_EQ(dots.size(), oracle::lattice_inside(poly, 5).size());
  }
}

TEST(DotGrid, VariedRadiiAreSeeded) {
  const auto set = support::squares({"A"}, 10);
  const auto frame = support::frame_of(set, 200, 200);
  BaseMapSpec base;
  base.kind = BaseMapKind::ShapeBasedVaried;
  const auto a = render_base(base, frame, 1);
  const auto b = render_base(base, frame, 1);
  const auto c = render_base(base, frame, 2);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& m : std::get<GroupShape>(a[0].shape).children) {
    const double r = std::get<CircleShape>(m.shape).r;
    EXPECT_GE(r, 0.5 * base.dot_radius);
    EXPECT_LT(r, 1.5 * base.dot_radius);
  }
}

TEST(RenderBase, Kinds) {
  const auto set = support::squares({"A", "B"});
  const auto frame = support::frame_of(set);
  BaseMapSpec base;
  base.kind = BaseMapKind::Implicit;
  EXPECT_TRUE(render_base(base, frame, 0).empty());
  base.kind = BaseMapKind::MinimalPolitical;
  EXPECT_EQ(render_base(base, frame, 0).size(), 2u);
  base.kind = BaseMapKind::Topographic;
  EXPECT_EQ(support::code_of([&] { render_base(base, frame, 0); }), "unsupported_basemap");
  base.kind = BaseMapKind::Street;
  EXPECT_EQ(support::code_of([&] { render_base(base, frame, 0); }), "unsupported_basemap");
}
