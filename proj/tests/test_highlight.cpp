#include <gtest/gtest.h>

#include "geoglyph/basemap.hpp"
#include "geoglyph/highlight.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace geoglyph;

namespace {

struct Fixture {
  RegionSet set = support::squares({"A", "B", "C"}, 10);
  MapFrame frame = support::frame_of(set);
  HighlightContext ctx{frame, default_palettes(), {}, {0, 0, 960, 540}};
  LayerMap layers;
  std::vector<Def> defs;

  Fixture() {
    BaseMapSpec base;
    base.kind = BaseMapKind::MinimalPolitical;
    layers[Layer::Base] = render_base(base, frame, 0);
  }
};

HighlightSpec spec(HighlightKind k, const char* region) {
  HighlightSpec h;
  h.kind = k;
  h.region = region;
  return h;
}

}  // namespace

TEST(Glow, GradientAndTripleRadius) {
  Fixture f;
  auto h = spec(HighlightKind::Glow, "B");
  h.radius = 5;
  apply_highlight(h, 0, f.layers, f.defs, f.ctx);
  ASSERT_EQ(f.defs.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<RadialGradientDef>(f.defs[0].body));
  const auto& m = f.layers[Layer::HighlightUnder].at(0);
  const auto& c = std::get<CircleShape>(m.shape);
  EXPECT_DOUBLE_EQ(c.r, 15);
  EXPECT_EQ(c.c, f.frame.find("b")->anchor);
  EXPECT_EQ(m.style.fill, Paint::url(f.defs[0].id));
  EXPECT_NO_THROW(compose(960, 540, f.defs, f.layers));
}

TEST(Glow, UnresolvedTarget) {
  Fixture f;
  EXPECT_EQ(support::code_of([&] { apply_highlight(spec(HighlightKind::Glow, "Atlantis"), 0, f.layers, f.defs, f.ctx); }),
            "unresolved_target");
}

TEST(Pin, TipAtTargetAndHeight) {
  const auto marks = pin({100, 200}, 18, {255, 0, 0}, "a");
  const auto& p = std::get<PathShape>(marks[0].shape);
  EXPECT_EQ((Vec2{p.cmds[0].a[0], p.cmds[0].a[1]}), (Vec2{100, 200}));
  // Head circle: center 12 above the tip, radius 6, so the top is 18 above.
  const auto& arc = p.cmds[2];
  EXPECT_DOUBLE_EQ(arc.a[0], 6);
  const Vec2 end{arc.a[5], arc.a[6]};
  EXPECT_NEAR(distance(end, {100, 188}), 6, 1e-12);
  const auto& eye = std::get<CircleShape>(marks[1].shape);
  EXPECT_DOUBLE_EQ(eye.c.y - 6, 200 - 18);
}

TEST(Contrast, OppositeHue) {
  const Rgb base = from_hsl({200, 0.6, 0.4});
  const Hsl c = to_hsl(contrasting_color(base));
  EXPECT_NEAR(c.h, 20, 1.0);
  EXPECT_NEAR(c.s, 0.9, 0.01);
  EXPECT_NEAR(c.l, 0.5, 0.01);
}

TEST(Contrast, FarFromEveryPaletteColor) {
  const auto& p = default_palettes();
  std::vector<Rgb> bases = p.categorical.stops;
  bases.insert(bases.end(), p.intensity.stops.begin(), p.intensity.stops.end());
  bases.insert(bases.end(), p.hue_ramp.stops.begin(), p.hue_ramp.stops.end());
  bases.push_back(p.base_fill);
  for (Rgb b : bases) {
    const Hsl hb = to_hsl(b);
    if (hb.s < 1e-9) continue;  // achromatic: no hue to differ from
    EXPECT_GE(hue_distance(hb.h, to_hsl(contrasting_color(b)).h), 60.0) << to_hex(b);
  }
}

TEST(Contrast, OnlyTargetRestyled) {
  Fixture f;
  const auto before = f.layers[Layer::Base];
  apply_highlight(spec(HighlightKind::ContrastingColor, "B"), 0, f.layers, f.defs, f.ctx);
  const auto& after = f.layers[Layer::Base];
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i].key == "b") {
      EXPECT_EQ(after[i].style.fill, Paint::of(contrasting_color(default_palettes().base_fill)));
    } else {
      EXPECT_EQ(before[i], after[i]);
    }
  }
}

TEST(Contour, OnePathNoFill) {
  Fixture f;
  apply_highlight(spec(HighlightKind::Contour, "A"), 0, f.layers, f.defs, f.ctx);
  const auto& over = f.layers[Layer::HighlightOver];
  ASSERT_EQ(over.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<PathShape>(over[0].shape));
  EXPECT_EQ(over[0].style.fill, Paint::none());
  EXPECT_DOUBLE_EQ(*over[0].style.stroke_width, 2.5);
}

TEST(Extrude, LayersOfTheGroup) {
  const ScreenRegion sq{{{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, {}}}};
  const Mark m = extrude(sq, {100, 150, 200}, "a");
  const auto& kids = std::get<GroupShape>(m.shape).children;
  ASSERT_EQ(kids.size(), 6u);  // base, four edge quads, top
  EXPECT_EQ(kids.front().role, "extrude-base");
  EXPECT_EQ(kids.front().style.fill, Paint::of(darken({100, 150, 200}, 0.6)));
  EXPECT_EQ(kids.back().role, "extrude-top");
  EXPECT_EQ(kids.back().style.fill, Paint::of(Rgb{100, 150, 200}));
  const Box top = mark_bbox(kids.back());
  EXPECT_NEAR(top.x0, 3 - 0.25, 1e-9);  // shifted by (3, -3), stroke 0.5
  EXPECT_NEAR(top.y0, -3 - 0.25, 1e-9);
}

TEST(Extrude, ReplacesFootprintInPlace) {
  Fixture f;
  apply_highlight(spec(HighlightKind::Extrude3D, "C"), 0, f.layers, f.defs, f.ctx);
  int n = 0;
  for (const auto& m : f.layers[Layer::Base]) {
    if (m.key == "c") {
      EXPECT_EQ(m.role, "extrude");
      ++n;
    }
  }
  EXPECT_EQ(n, 1);
}

TEST(Highlight, RegionOnlyKindsNeedKnownRegion) {
  Fixture f;
  for (auto k : {HighlightKind::ContrastingColor, HighlightKind::Contour, HighlightKind::Extrude3D,
                 HighlightKind::ZoomedInset}) {
    EXPECT_EQ(support::code_of([&] { apply_highlight(spec(k, "Nowhere"), 0, f.layers, f.defs, f.ctx); }),
              "unknown_region");
  }
}

TEST(Highlight, PointTarget) {
  Fixture f;
  HighlightSpec h;
  h.kind = HighlightKind::Pin;
  h.point = GeoPoint{5, 5};
  apply_highlight(h, 3, f.layers, f.defs, f.ctx);
  const auto& p = std::get<PathShape>(f.layers[Layer::HighlightOver][0].shape);
  const Vec2 tip{p.cmds[0].a[0], p.cmds[0].a[1]};
  EXPECT_EQ(tip, f.frame.projection()(GeoPoint{5, 5}));
  EXPECT_EQ(f.layers[Layer::HighlightOver][0].key, "point-3");
}

TEST(Inset, FrameSizeAndPureCopy) {
  Fixture f;
  const FrameRegion& r = *f.frame.find("a");
  const auto content = std::vector<Mark>{f.layers[Layer::Base][0]};
  const auto inset = build_inset(r, content, 2, InsetPlacement::Overlay, f.ctx.canvas, {}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(inset.frame.width(), 2 * r.bbox.width() + 2 * kInsetPadding);
  EXPECT_DOUBLE_EQ(inset.frame.height(), 2 * r.bbox.height() + 2 * kInsetPadding);
  EXPECT_EQ(inset.frame.center(), r.bbox.center());
  for (const auto& m : inset.marks) EXPECT_NE(m.role, "inset-connector");
  const Affine t{2, r.bbox.center(), {0, 0}};
  Mark expect = transformed(content[0], t);
  EXPECT_EQ(inset.marks[1].shape, expect.shape);
  EXPECT_EQ(inset.marks[1].style, expect.style);
}

TEST(Inset, AdjacentAvoidsOccupied) {
  Fixture f;
  const FrameRegion& r = *f.frame.find("b");
  std::vector<Box> occupied;
  for (const auto& fr : f.frame.regions()) occupied.push_back(fr.bbox);
  const Box canvas{0, 0, 2000, 2000};
  const auto inset = build_inset(r, {}, 2, InsetPlacement::Adjacent, canvas, occupied, {0, 0, 0});
  for (const auto& o : occupied) EXPECT_FALSE(oracle::rects_overlap(inset.frame, o, 0));
  EXPECT_TRUE(canvas.contains(inset.frame));
  int connectors = 0;
  for (const auto& m : inset.marks) connectors += m.role == "inset-connector";
  EXPECT_EQ(connectors, 2);
}

TEST(Inset, NoRoomAndScaleRange) {
  Fixture f;
  const FrameRegion& r = *f.frame.find("b");
  EXPECT_EQ(support::code_of([&] {
              build_inset(r, {}, 2, InsetPlacement::Adjacent, f.ctx.canvas, {f.ctx.canvas}, {0, 0, 0});
            }),
            "no_room");
  EXPECT_EQ(support::code_of([&] { build_inset(r, {}, 1, InsetPlacement::Overlay, f.ctx.canvas, {}, {0, 0, 0}); }),
            "invalid_argument");
  EXPECT_EQ(support::code_of([&] { build_inset(r, {}, 8, InsetPlacement::Overlay, f.ctx.canvas, {}, {0, 0, 0}); }),
            "no_error");
}
