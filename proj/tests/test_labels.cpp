#include <random>

#include <gtest/gtest.h>

#include "geoglyph/labels.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace geoglyph;

namespace {

ScreenRegion square(double x0, double y0, double s) {
  return {{{{{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}}, {}}}};
}

bool on_boundary(const Box& b, Vec2 p, double tol = 0.01) {
  const bool inside = p.x >= b.x0 - tol && p.x <= b.x1 + tol && p.y >= b.y0 - tol && p.y <= b.y1 + tol;
  const double d = std::min({std::abs(p.x - b.x0), std::abs(p.x - b.x1), std::abs(p.y - b.y0), std::abs(p.y - b.y1)});
  return inside && d <= tol;
}

std::vector<LabelItem> random_items(std::mt19937_64& rng, int n, Box area) {
  std::uniform_real_distribution<double> x(area.x0, area.x1), y(area.y0, area.y1), pr(0, 100);
  std::uniform_int_distribution<int> len(3, 12);
  std::vector<LabelItem> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"k" + std::to_string(i), std::string(static_cast<std::size_t>(len(rng)), 'x'), {x(rng), y(rng)},
                   std::round(pr(rng))});
  }
  return out;
}

}  // namespace

TEST(MeasureText, FixedAdvance) {
  const auto s = measure_text("abcde", 10);
  EXPECT_DOUBLE_EQ(s.width, 30);
  EXPECT_DOUBLE_EQ(s.height, 12);
  const auto two = measure_text("Democratic Republic of the Congo", 10);  // wraps at 24 codepoints
  EXPECT_DOUBLE_EQ(two.height, 24);
}

TEST(Situated, FitsOrThrows) {
  const LabelItem it{"a", "abcde", {50, 50}, 0, {}, {}};
  const auto p = place_situated(it, square(0, 0, 100), 10);
  EXPECT_EQ(p.rect, Box::from_center({50, 50}, 30, 12));
  EXPECT_TRUE(p.leader.empty());
  EXPECT_EQ(support::code_of([&] { place_situated(it, square(40, 40, 20), 10); }), "does_not_fit");
}

TEST(Matched, RowsIncreaseAndIconsMatch) {
  std::vector<LabelItem> items{{"b", "Beta", {10, 10}, 1, "icon-pin", {}}, {"a", "Alpha", {20, 20}, 5, "icon-pin", {}}};
  const auto m = build_matched_legend(items, MatchMode::Icon, {700, 40, 920, 500}, 10);
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_LT(m.rows[0].y0, m.rows[1].y0);
  ASSERT_EQ(m.anchor_marks.size(), 2u);
  EXPECT_EQ(m.anchor_marks[0].key, "a");  // higher priority first
  for (const auto& a : m.anchor_marks) {
    for (const auto& p : m.panel_marks) {
      if (p.key == a.key && p.role == "match-icon") {
        EXPECT_EQ(std::get<IconShape>(a.shape).def, std::get<IconShape>(p.shape).def);
      }
    }
  }
}

TEST(Matched, NumbersAndOverflow) {
  std::vector<LabelItem> items;
  for (int i = 0; i < 40; ++i) items.push_back({"r" + std::to_string(i), "Region", {0, 0}, 0, {}, {}});
  EXPECT_EQ(support::code_of([&] { build_matched_legend(items, MatchMode::Text, {0, 0, 200, 100}, 10); }),
            "panel_overflow");
  const auto m = build_matched_legend(items, MatchMode::Text, {0, 0, 200, 1000}, 10);
  for (std::size_t i = 1; i < m.rows.size(); ++i) EXPECT_LT(m.rows[i - 1].y0, m.rows[i].y0);
  EXPECT_EQ(std::get<TextShape>(m.anchor_marks[0].shape).lines[0], "1");
}

TEST(Convenient, SingleGoesEast) {
  const LabelItem it{"a", "abcde", {100, 100}, 0, {}, {}};
  const auto r = place_linked_convenient({it}, {}, {0, 0, 400, 400}, 10);
  ASSERT_EQ(r.placed.size(), 1u);
  EXPECT_DOUBLE_EQ(r.placed[0].rect.x0, 112);
  EXPECT_DOUBLE_EQ(r.placed[0].rect.center().y, 100);
}

TEST(Convenient, ObstacleOnEastGoesSoutheast) {
  const LabelItem it{"a", "abcde", {100, 100}, 0, {}, {}};
  const auto r = place_linked_convenient({it}, {{110, 90, 150, 105}}, {0, 0, 400, 400}, 10);
  ASSERT_EQ(r.placed.size(), 1u);
  const Box expect = compass_rect({100, 100}, 1, 12, measure_text("abcde", 10));
  EXPECT_EQ(r.placed[0].rect, expect);
  EXPECT_GT(r.placed[0].rect.x0, 100);
  EXPECT_GT(r.placed[0].rect.y0, 100);
}

TEST(Convenient, ExhaustedIsDropped) {
  const LabelItem it{"a", "abcde", {100, 100}, 0, {}, {}};
  const auto r = place_linked_convenient({it}, {{0, 0, 400, 400}}, {0, 0, 400, 400}, 10);
  EXPECT_TRUE(r.placed.empty());
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Convenient, RandomInstancesHaveNoOverlaps) {
  std::mt19937_64 rng(99);
  const Box canvas{0, 0, 960, 540};
  for (int t = 0; t < 50; ++t) {
    const auto items = random_items(rng, 20, {60, 40, 900, 500});
    std::vector<Box> obstacles;
    std::uniform_real_distribution<double> x(0, 900), y(0, 500);
    for (int i = 0; i < 6; ++i) obstacles.push_back(Box::from_xywh(x(rng), y(rng), 30, 20));
    const auto r = place_linked_convenient(items, obstacles, canvas, 10);
    EXPECT_EQ(r.placed.size() + r.dropped.size(), items.size());
    for (std::size_t i = 0; i < r.placed.size(); ++i) {
      for (std::size_t j = i + 1; j < r.placed.size(); ++j) {
        EXPECT_FALSE(oracle::rects_overlap(r.placed[i].rect, r.placed[j].rect, 0.01));
      }
      for (const auto& o : obstacles) EXPECT_FALSE(oracle::rects_overlap(r.placed[i].rect, o, 0.01));
      EXPECT_TRUE(on_boundary(r.placed[i].rect, r.placed[i].leader.back()));
    }
  }
}

TEST(Aligned, SingleTopCentered) {
  const LabelItem it{"a", "abcde", {300, 100}, 0, {}, {}};
  const auto r = place_linked_aligned({it}, {Side::Top}, {50, 50, 600, 400}, {0, 0, 650, 450}, 10);
  ASSERT_EQ(r.placed.size(), 1u);
  EXPECT_DOUBLE_EQ(r.placed[0].rect.center().x, 300);
  EXPECT_LT(r.placed[0].rect.y1, 50);
  EXPECT_EQ(r.placed[0].leader.size(), 3u);
  EXPECT_TRUE(on_boundary(r.placed[0].rect, r.placed[0].leader.back()));
}

TEST(Aligned, SideOverflow) {
  std::vector<LabelItem> items;
  for (int i = 0; i < 30; ++i) items.push_back({"k" + std::to_string(i), "abc", {100, 100.0 + i}, 0, {}, {}});
  EXPECT_EQ(support::code_of([&] {
              place_linked_aligned(items, {Side::Left}, {50, 50, 600, 200}, {0, 50, 650, 200}, 10);
            }),
            "side_overflow");
}

TEST(Aligned, RandomInstancesHaveNoCrossings) {
  std::mt19937_64 rng(5);
  const Box map{140, 40, 820, 500};
  const Box area{0, 0, 960, 540};
  for (int t = 0; t < 50; ++t) {
    const auto items = random_items(rng, 20, map);
    const auto r = place_linked_aligned(items, {Side::Left, Side::Right}, map, area, 10);
    ASSERT_EQ(r.placed.size(), items.size());
    for (std::size_t i = 0; i < r.placed.size(); ++i) {
      EXPECT_TRUE(on_boundary(r.placed[i].rect, r.placed[i].leader.back()));
      for (std::size_t j = i + 1; j < r.placed.size(); ++j) {
        EXPECT_FALSE(oracle::rects_overlap(r.placed[i].rect, r.placed[j].rect, 0.01));
        const auto& a = r.placed[i].leader;
        const auto& b = r.placed[j].leader;
        for (std::size_t s = 1; s < a.size(); ++s)
          for (std::size_t u = 1; u < b.size(); ++u)
            EXPECT_FALSE(oracle::segments_cross(a[s - 1], a[s], b[u - 1], b[u])) << "trial " << t;
      }
    }
  }
}

TEST(Ordered, EvenlyAlongGuide) {
  std::vector<LabelItem> items;
  for (int i = 0; i < 4; ++i) items.push_back({"k" + std::to_string(i), "ab", {0, 50}, 10.0 - i, {}, {}});
  const auto r = place_linked_ordered(items, {{0, 0}, {8, 0}}, 10);
  ASSERT_EQ(r.placed.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(r.placed[static_cast<std::size_t>(i)].rect.center().x, 1.0 + 2 * i);
    EXPECT_EQ(r.placed[static_cast<std::size_t>(i)].leader.size(), 2u);
    EXPECT_TRUE(on_boundary(r.placed[static_cast<std::size_t>(i)].rect, r.placed[static_cast<std::size_t>(i)].leader.back()));
  }
}

TEST(Isotonic, PoolsViolators) {
  const auto f = isotonic({1, 3, 2, 4});
  EXPECT_DOUBLE_EQ(f[1], 2.5);
  EXPECT_DOUBLE_EQ(f[2], 2.5);
  const auto s = spread({10, 10, 10}, 10, 0, 100);
  EXPECT_DOUBLE_EQ(s[0], 5);  // pushed down off the boundary
  EXPECT_DOUBLE_EQ(s[1], 15);
  EXPECT_DOUBLE_EQ(s[2], 25);
}
