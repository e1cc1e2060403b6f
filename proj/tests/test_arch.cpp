#include "naloss/arch.hpp"
#include "naloss/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace naloss;

namespace {

oracle::CellSet cellsOf(const std::vector<Site>& v) {
  oracle::CellSet out;
  for (const auto s : v) {
    out.insert({s.row, s.col});
  }
  return out;
}

} // namespace

TEST(Grid, TenByTen) {
  const auto a = Architecture::grid(10, 10, 4);
  EXPECT_EQ(a.numSites(), 100u);
  EXPECT_EQ(a.dMax(), 4.0);
  EXPECT_EQ(a.sites().size(), 100u);
  EXPECT_EQ(a.sites().front(), (Site{0, 0}));
  EXPECT_EQ(a.sites().back(), (Site{9, 9}));
}

TEST(Grid, SingleSite) {
  const auto a = Architecture::grid(1, 1, 1);
  EXPECT_EQ(a.numSites(), 1u);
  EXPECT_TRUE(a.neighbors({0, 0}, 1).empty());
}

TEST(Grid, SweepEndpoints) {
  EXPECT_EQ(Architecture::grid(10, 10, 3).dMax(), 3.0);
  EXPECT_EQ(Architecture::grid(10, 10, 5).dMax(), 5.0);
}

TEST(Grid, RejectsBadDimensions) {
  for (const auto& [r, c, d] : {std::tuple{0, 5, 2.0}, std::tuple{5, 0, 2.0},
                                std::tuple{5, 5, 0.5}, std::tuple{-1, 5, 2.0}}) {
    try {
      (void)Architecture::grid(r, c, d);
      FAIL() << "accepted " << r << "x" << c << " d=" << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidDimension);
    }
  }
}

TEST(Distance, Examples) {
  EXPECT_EQ(distance({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_EQ(distance({2, 2}, {2, 4}), 2.0);
}

TEST(Neighbors, InteriorRangeOne) {
  const auto a = Architecture::grid(5, 5, 4);
  EXPECT_EQ(cellsOf(a.neighbors({2, 2}, 1)),
            (oracle::CellSet{{1, 2}, {3, 2}, {2, 1}, {2, 3}}));
}

TEST(Neighbors, InteriorRangeTwoHasTwelve) {
  const auto a = Architecture::grid(7, 7, 4);
  const auto n = cellsOf(a.neighbors({3, 3}, 2));
  EXPECT_EQ(n.size(), 12u);
  EXPECT_EQ(n, oracle::neighbors(7, 7, {3, 3}, 2));
}

TEST(Neighbors, CornerClipped) {
  const auto a = Architecture::grid(4, 4, 2);
  EXPECT_EQ(cellsOf(a.neighbors({0, 0}, 1)), (oracle::CellSet{{0, 1}, {1, 0}}));
}

TEST(Neighbors, MatchesBruteForceEverywhere) {
  for (const double d : {1.0, 1.5, 2.0, 2.3, 3.0, 4.0}) {
    const auto a = Architecture::grid(6, 7, 4);
    for (const auto s : a.sites()) {
      ASSERT_EQ(cellsOf(a.neighbors(s, d)), oracle::neighbors(6, 7, {s.row, s.col}, d))
          << "site " << s.row << "," << s.col << " d " << d;
    }
  }
}

TEST(Neighbors, SymmetricAndMonotone) {
  const auto a = Architecture::grid(6, 6, 4);
  const double ds[] = {1.0, 1.5, 2.0, 3.0, 4.0};
  for (const auto s : a.sites()) {
    for (std::size_t k = 0; k < std::size(ds); ++k) {
      const auto ns = cellsOf(a.neighbors(s, ds[k]));
      for (const auto& [r, c] : ns) {
        EXPECT_TRUE(cellsOf(a.neighbors({r, c}, ds[k])).count({s.row, s.col}));
      }
      if (k + 1 < std::size(ds)) {
        const auto wider = cellsOf(a.neighbors(s, ds[k + 1]));
        EXPECT_TRUE(std::includes(wider.begin(), wider.end(), ns.begin(), ns.end()));
      }
    }
  }
}

TEST(Blocked, SingleQubitBlocksNothing) {
  const auto a = Architecture::grid(10, 10, 4);
  const Site g[] = {{5, 5}};
  EXPECT_TRUE(a.blockedSites(g).empty());
}

TEST(Blocked, SpanTwoRadiusOne) {
  const auto a = Architecture::grid(3, 5, 4);
  const Site g[] = {{0, 0}, {0, 2}};
  EXPECT_EQ(oracle::cells(a.blockedSites(g)),
            (oracle::CellSet{{0, 1}, {1, 0}, {1, 2}, {0, 3}}));
}

TEST(Blocked, AdjacentPairBlocksNothing) {
  const auto a = Architecture::grid(5, 5, 4);
  const Site g[] = {{0, 0}, {0, 1}};
  EXPECT_TRUE(a.blockedSites(g).empty());
}

TEST(Blocked, OutOfRangeThrows) {
  const auto a = Architecture::grid(10, 10, 2);
  const Site g[] = {{0, 0}, {0, 3}};
  try {
    (void)a.blockedSites(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRangeInteraction);
  }
}

TEST(Blocked, MatchesRadiusOracleAndExcludesGateSites) {
  const auto a = Architecture::grid(8, 8, 4);
  Rng rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    const int k = oracle::uniformInt(rng, 1, 3);
    std::vector<Site> g;
    while (static_cast<int>(g.size()) < k) {
      const Site s{oracle::uniformInt(rng, 0, 7), oracle::uniformInt(rng, 0, 7)};
      const bool ok = std::none_of(g.begin(), g.end(), [&](Site t) {
        return t == s || !withinRange(squaredDistance(s, t), 4.0);
      });
      if (ok) {
        g.push_back(s);
      }
    }
    double r = 1.0;
    for (const auto x : g) {
      for (const auto y : g) {
        r = std::max(r, distance(x, y));
      }
    }
    oracle::CellSet expect;
    for (const auto s : a.sites()) {
      if (std::find(g.begin(), g.end(), s) != g.end()) {
        continue;
      }
      for (const auto x : g) {
        if (distance(s, x) <= r / 2 + 1e-9) {
          expect.insert({s.row, s.col});
        }
      }
    }
    const auto got = oracle::cells(a.blockedSites(g));
    ASSERT_EQ(got, expect) << "iteration " << iter;
    for (const auto x : g) {
      EXPECT_EQ(got.count({x.row, x.col}), 0u);
    }
  }
}

TEST(Blocked, HalfPitchRuleBlocksNothing) {
  const auto a = Architecture::grid(8, 8, 4, RestrictionRule::HalfPitch);
  const Site g[] = {{2, 2}, {2, 5}};
  EXPECT_TRUE(a.blockedSites(g).empty());
}

TEST(Path, ZeroHop) {
  const auto a = Architecture::grid(5, 5, 2);
  const auto p = a.shortestInteractionPath({2, 2}, {2, 2}, 2, SiteSet(a));
  ASSERT_TRUE(p);
  EXPECT_EQ(*p, (std::vector<Site>{{2, 2}}));
}

TEST(Path, TwoHopsAlongRow) {
  const auto a = Architecture::grid(5, 5, 2);
  const auto p = a.shortestInteractionPath({0, 0}, {0, 4}, 2, SiteSet(a));
  ASSERT_TRUE(p);
  EXPECT_EQ(*p, (std::vector<Site>{{0, 0}, {0, 2}, {0, 4}}));
}

TEST(Path, CutMeansNoPath) {
  const auto a = Architecture::grid(2, 3, 1);
  SiteSet forbidden(a);
  forbidden.insert({0, 1});
  forbidden.insert({1, 0});
  EXPECT_FALSE(a.shortestInteractionPath({0, 0}, {0, 2}, 1, forbidden));
  const auto truth = oracle::bfs(2, 3, 1, oracle::cells(forbidden), {0, 0});
  EXPECT_EQ(truth.count({0, 2}), 0u);
}

TEST(Path, LexicographicTieBreak) {
  // Both (0,1) and (1,0) lead from (0,0) to (1,1) in two unit hops.
  const auto a = Architecture::grid(3, 3, 1);
  const auto p = a.shortestInteractionPath({0, 0}, {1, 1}, 1, SiteSet(a));
  ASSERT_TRUE(p);
  EXPECT_EQ(*p, (std::vector<Site>{{0, 0}, {0, 1}, {1, 1}}));
}

TEST(NearestPath, PrefersCloserTargetAtEqualHops) {
  const auto a = Architecture::grid(5, 5, 2);
  // From (2,2) with d = 2 both (0,2) and (1,1) are one hop away; (1,1) is closer.
  const auto p = a.nearestPath({2, 2}, 2, SiteSet(a), [](Site s) {
    return s == Site{0, 2} || s == Site{1, 1};
  });
  ASSERT_TRUE(p);
  EXPECT_EQ(p->back(), (Site{1, 1}));
  EXPECT_EQ(p->size(), 2u);
}

TEST(NearestPath, NoTarget) {
  const auto a = Architecture::grid(3, 3, 1);
  EXPECT_FALSE(a.nearestPath({1, 1}, 1, SiteSet(a), [](Site) { return false; }));
}

TEST(SiteSet, Basics) {
  const auto a = Architecture::grid(3, 4, 1);
  SiteSet s(a);
  s.insert({1, 2});
  s.insert({1, 2});
  s.insert({0, 3});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains({1, 2}));
  EXPECT_FALSE(s.contains({2, 2}));
  EXPECT_FALSE(s.contains({-1, 0}));
  EXPECT_EQ(s.sites(), (std::vector<Site>{{0, 3}, {1, 2}}));
  s.erase({1, 2});
  EXPECT_EQ(s.size(), 1u);
  SiteSet t(a);
  t.insert({0, 3});
  EXPECT_TRUE(s.intersects(t));
  t.merge(SiteSet(a, std::vector<Site>{{2, 0}}));
  EXPECT_EQ(t.size(), 2u);
  t.clear();
  EXPECT_TRUE(t.empty());
}

TEST(LossState, GrowsAndClears) {
  const auto a = Architecture::grid(3, 3, 1);
  LossState l(a);
  l.markLost({0, 0});
  l.markLost({0, 0});
  l.markLost({2, 1});
  EXPECT_EQ(l.count(), 2u);
  EXPECT_TRUE(l.isLost({2, 1}));
  l.clear();
  EXPECT_EQ(l.count(), 0u);
}
