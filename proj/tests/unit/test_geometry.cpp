#include <gtest/gtest.h>

#include "sublin/error.hpp"
#include "sublin/geometry.hpp"
#include "support.hpp"

using namespace sublin;

TEST(Grid, FlatIndexRoundTrip) {
  auto g = build_grid(3, {4, 5, 6}, {Interval{0, 1}, Interval{-1, 1}, Interval{2, 3}});
  EXPECT_EQ(g->size(), 120u);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(g->flat(g->unflat(i)), i);
  EXPECT_DOUBLE_EQ(g->spacing(1), 0.5);
  const Point p = g->point(g->flat({1, 2, 5}));
  EXPECT_DOUBLE_EQ(p[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 3.0);
  EXPECT_EQ(g->locate(p), g->flat({1, 2, 5}));
  EXPECT_FALSE(g->locate(Point{0.1, 0.0, 3.0}).has_value());
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(build_grid(4, {3}, {Interval{0, 1}}), PreconditionError);
  EXPECT_THROW(build_grid(2, {2}, {Interval{0, 1}}), PreconditionError);
  EXPECT_THROW(build_grid(1, {5}, {Interval{1, 1}}), PreconditionError);
}

TEST(Grid, NeighborLeavesLattice) {
  auto g = build_grid(2, {3}, {Interval{0, 1}});
  EXPECT_FALSE(g->neighbor(0, {-1, 0, 0}).has_value());
  EXPECT_EQ(g->neighbor(0, {1, 1, 0}), g->flat({1, 1, 0}));
  EXPECT_EQ(neighborhood_offsets(2).size(), 8u);
  EXPECT_EQ(neighborhood_offsets(3).size(), 26u);
}

TEST(DomainMask, BoxHasEdgeBoundary) {
  auto m = fixtures::box_mask(2, 7);
  EXPECT_EQ(m->interior().size(), 25u);
  EXPECT_EQ(m->boundary().size(), 24u);
  for (std::size_t i : m->interior()) EXPECT_FALSE(m->grid().on_edge(i));
}

TEST(DomainMask, BoundaryRingIncludesDiagonals) {
  // Every interior point has its full 3^d neighborhood inside the closed domain.
  auto m = fixtures::ball_mask(2, 21, 0.8);
  for (std::size_t i : m->interior())
    for (const auto& off : neighborhood_offsets(2)) {
      const auto j = m->grid().neighbor(i, off);
      ASSERT_TRUE(j.has_value());
      EXPECT_TRUE(m->is_active(*j));
    }
  for (std::size_t b : m->boundary()) {
    bool touches = false;
    for (const auto& off : neighborhood_offsets(2)) {
      const auto j = m->grid().neighbor(b, off);
      if (j && m->is_interior(*j)) touches = true;
    }
    EXPECT_TRUE(touches);
  }
}

TEST(DomainMask, RejectsEmptyAndDisconnected) {
  auto g = build_grid(1, {11}, {Interval{0, 1}});
  EXPECT_THROW(mask_from_predicate(g, [](const Point&) { return false; }), PreconditionError);
  EXPECT_THROW(mask_from_predicate(g, [](const Point& x) { return x[0] < 0.25 || x[0] > 0.75; }),
               PreconditionError);
}

TEST(Exhaustion, LevelsAreStrictlyNested) {
  auto omega = fixtures::ball_mask(2, 33, 0.95);
  const ExhaustionSequence seq = build_exhaustion(omega, 3);
  ASSERT_EQ(seq.size(), 3u);
  for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
    const DomainMask& inner = seq.level(n);
    const DomainMask& outer = seq.level(n + 1);
    for (std::size_t i = 0; i < inner.grid().size(); ++i)
      if (inner.is_active(i)) EXPECT_TRUE(outer.is_interior(i));
  }
  EXPECT_EQ(seq.level(2).interior().size(), omega->interior().size());
}

TEST(Exhaustion, CubeTruncations) {
  const TruncationFamily fam = cube_truncations(3, {1, 2, 4}, 0.5);
  ASSERT_EQ(fam.masks.size(), 3u);
  EXPECT_EQ(fam.masks[0]->interior().size(), 27u);
  EXPECT_EQ(fam.masks[2]->interior().size(), 15u * 15u * 15u);
  const ExhaustionSequence seq = exhaustion_from_truncations(fam);
  EXPECT_EQ(seq.size(), 3u);
}

TEST(DomainMask, RemaskingWithOwnInteriorIsIdempotent) {
  auto m = fixtures::ball_mask(3, 13, 0.7);
  auto again = mask_from_indicator(m->grid_ptr(), [&](std::size_t i) { return m->is_interior(i); });
  EXPECT_TRUE(again->same_as(*m));
}

TEST(Exhaustion, CannotNestOnTinyGrid) {
  auto g = build_grid(1, {5}, {Interval{0, 1}});
  EXPECT_DOUBLE_EQ(g->spacing(0), 0.25);
  auto m = mask_from_predicate(g, [](const Point&) { return true; });
  EXPECT_THROW(build_exhaustion(m, 4), PreconditionError);
}
