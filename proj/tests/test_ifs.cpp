#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ultrafractal.hpp"

using namespace ultrafractal;

namespace {

ExtHeight H(const char* s) { return parse_ordinal(s); }
NodePath P(std::vector<std::size_t> v) { return NodePath(std::move(v)); }
Branch B(std::vector<std::size_t> v) { return Branch(NodePath(std::move(v))); }
const Rational kHalf(1, 2);

std::string first_failure(const Report& r) { return r.failures.empty() ? "" : r.failures.front(); }

PointSet central_set() { return PointSet{Point{0, Branch::central()}}; }

}  // namespace

TEST(BuildUnital, MapCounts) {
  EXPECT_EQ(build_ifs_unital(H("1"), kHalf).map_count(), 2U);
  EXPECT_EQ(build_ifs_unital(H("inf"), kHalf).map_count(), 2U);
  EXPECT_EQ(build_ifs_unital(H("0"), kHalf).map_count(), 1U);
  HeightTree::Overrides o;
  o[NodePath{}] = NodeOverride{std::nullopt, {H("0"), H("0")}};
  const IfsSystem custom = IfsSystem::build_unital(HeightTree::custom(H("3"), o), kHalf);
  EXPECT_EQ(custom.map_count(), 4U);
  EXPECT_TRUE(verify_partition(custom, 5).passed);
}

TEST(BuildUnital, Refusals) {
  EXPECT_THROW(build_ifs_unital(H("w"), kHalf), NotSuccessor);
  EXPECT_THROW(build_ifs_unital(H("w^w"), kHalf), NotSuccessor);
  EXPECT_THROW(build_ifs_unital(H("1"), Rational(1)), DomainError);
  EXPECT_THROW(build_ifs_unital(H("1"), Rational(0)), DomainError);
  EXPECT_THROW(build_ifs_unital(H("1"), Rational(-1, 2)), DomainError);
}

TEST(LevelSets, HeightOneExamples) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  const auto t = level_sets(s, 2);
  ASSERT_EQ(t.size(), 3U);
  EXPECT_EQ(t[0], (std::vector<NodePath>{P({})}));
  EXPECT_EQ(t[1], (std::vector<NodePath>{P({}), P({1})}));
  EXPECT_EQ(t[2], (std::vector<NodePath>{P({}), P({1}), P({1, 0}), P({2})}));
}

TEST(LevelSets, MonotoneIncreasing) {
  for (const char* h : {"0", "1", "2", "w+1", "inf"}) {
    const auto t = level_sets(build_ifs_unital(H(h), kHalf), 7);
    for (std::size_t n = 1; n < t.size(); ++n) {
      EXPECT_TRUE(std::includes(t[n].begin(), t[n].end(), t[n - 1].begin(), t[n - 1].end())) << h;
    }
  }
}

TEST(NodeNorm, Examples) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  EXPECT_EQ(node_norm(s, P({})), Rational(1));
  EXPECT_EQ(node_norm(s, P({3})), Rational(1, 8));
  EXPECT_EQ(node_norm(s, P({0, 0})), Rational(0));
}

TEST(NodeNorm, LevelCapExceeded) {
  Caps caps;
  caps.level_cap = 4;
  const IfsSystem s = IfsSystem::build_unital(H("1"), kHalf, caps);
  EXPECT_EQ(s.node_norm(P({4})), Rational(1, 16));
  EXPECT_THROW(s.node_norm(P({9})), LevelCapExceeded);
}

// Oracle: first level set containing the node.
TEST(NodeNormProperty, MatchesLevelSetScan) {
  for (const char* h : {"1", "2", "3", "w+1", "w^2+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), Rational(1, 3));
    const IfsSystem fresh = build_ifs_unital(H(h), Rational(1, 3));
    std::size_t checked = 0;
    detail::for_each_window_node(s.tree(), {}, 3, 4, [&](const NodePath& p, const ExtHeight&) {
      const auto expect = oracle::level_set_norm(fresh, p, 14);
      if (!expect) return;
      EXPECT_EQ(s.node_norm(p), *expect) << h << " " << to_string(p);
      ++checked;
    });
    EXPECT_GE(checked, 5U) << h;
  }
}

TEST(Hutchinson, StepExamples) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  const PointSet one = hutchinson_step(s, central_set());
  EXPECT_EQ(one, PointSet::of_branches({Branch::central(), B({1})}));
  const PointSet two = hutchinson_step(s, one);
  EXPECT_EQ(two.size(), 3U);
  EXPECT_EQ(two, PointSet::of_branches({Branch::central(), B({1}), B({2})}));
  EXPECT_EQ(attractor_net(s, 0), central_set());
  EXPECT_EQ(attractor_net(s, 2), two);
}

TEST(Hutchinson, FixedPointsPersist) {
  const IfsSystem s = build_ifs_unital(H("2"), kHalf);
  std::vector<Branch> fixed;
  for (std::size_t k = 0; k < s.map_count(); ++k) fixed.push_back(fixed_point(s, k, Rational(1, 1024)).branch);
  const PointSet k = PointSet::of_branches(fixed);
  EXPECT_TRUE(hutchinson_step(s, k).includes(k));
}

TEST(Hausdorff, Examples) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  const BranchMetric d = s.metric();
  const PointSet k = attractor_net(s, 4);
  EXPECT_EQ(hausdorff_distance(d, k, k), Rational(0));
  EXPECT_EQ(hausdorff_distance(d, central_set(), PointSet::of_branches({B({1})})), kHalf);
  const Rational d01 = hausdorff_distance(d, central_set(), attractor_net(s, 1));
  const Rational d12 = hausdorff_distance(d, attractor_net(s, 1), attractor_net(s, 2));
  EXPECT_LE(d12, kHalf * d01);
  EXPECT_THROW(hausdorff_distance(d, PointSet{}, k), DomainError);
}

// Oracle: all-pairs evaluation of the metric.
TEST(HausdorffProperty, TrieMatchesBruteForce) {
  std::mt19937_64 rng(37);
  for (const char* h : {"2", "w+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), kHalf);
    const BranchMetric d = s.metric();
    const std::vector<Branch> pool = attractor_net(s, 6).branches();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(1, 12);
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<Branch> a, b;
      for (std::size_t i = len(rng); i-- > 0;) a.push_back(pool[pick(rng)]);
      for (std::size_t i = len(rng); i-- > 0;) b.push_back(pool[pick(rng)]);
      const PointSet pa = PointSet::of_branches(a), pb = PointSet::of_branches(b);
      EXPECT_EQ(hausdorff_distance(d, pa, pb), oracle::brute_hausdorff(d, pa, pb));
      EXPECT_EQ(diameter(d, pa), oracle::brute_diameter(d, pa));
    }
  }
}

TEST(AttractorNet, ConvergenceBound) {
  for (const char* h : {"1", "2", "w+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), kHalf);
    const BranchMetric d = s.metric();
    const PointSet top = attractor_net(s, 9);
    for (std::size_t n = 0; n < 9; ++n) {
      EXPECT_LE(hausdorff_distance(d, attractor_net(s, n), top), power(kHalf, n + 1)) << h << " n=" << n;
    }
  }
}

TEST(AttractorNet, NetCap) {
  Caps caps;
  caps.net_cap = 50;
  const IfsSystem s = IfsSystem::build_unital(H("inf"), kHalf, caps);
  EXPECT_THROW(attractor_net(s, 8), CapExceeded);
}

// Contraction from arbitrary seeds: d_H(F^n K, A_N) <= lambda^n max(diam bound, d_H(K, A_N)).
TEST(ContractionProperty, RandomSeeds) {
  std::mt19937_64 rng(41);
  const IfsSystem s = build_ifs_unital(H("2"), kHalf);
  const BranchMetric d = s.metric();
  const std::size_t big_n = 10;
  const PointSet top = attractor_net(s, big_n);
  const std::vector<Branch> pool = top.branches();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    PointSet k = PointSet::of_branches({pool[pick(rng)], pool[pick(rng)], pool[pick(rng)]});
    const Rational base = std::max(kHalf, hausdorff_distance(d, k, top));
    for (std::size_t n = 0; n + 1 < big_n / 2; ++n) {
      EXPECT_LE(hausdorff_distance(d, k, top), power(kHalf, n) * base);
      k = hutchinson_step(s, k);
    }
  }
}

TEST(Partition, Examples) {
  EXPECT_TRUE(verify_partition(build_ifs_unital(H("1"), kHalf), 5).passed);
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  const IfsSystem dup = IfsSystem::from_maps(s.tree(), kHalf, {s.map(0), s.map(1), s.map(1)});
  EXPECT_FALSE(verify_partition(dup, 4).passed);
  // Boundary blocks at n = 3 are pairwise apart.
  const BranchMetric d = s.metric();
  const PointSet net = attractor_net(s, 3);
  const PointSet fa = map_image(s, 0, net), ga = map_image(s, 1, net);
  for (const Point& a : fa) {
    for (const Point& b : ga) EXPECT_GT(d(a, b), 0);
  }
}

TEST(Partition, AllCatalogSystems) {
  for (const char* h : {"0", "1", "2", "3", "w+1", "w*2+1", "w^2+1", "inf"}) {
    const Report r = verify_partition(build_ifs_unital(H(h), kHalf), 6);
    EXPECT_TRUE(r.passed) << h << ": " << first_failure(r);
  }
}

TEST(LevelNorm, Suites) {
  for (const char* h : {"1", "2", "w+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), kHalf);
    EXPECT_TRUE(verify_level_norm(s, 6).passed) << h;
    EXPECT_TRUE(verify_lipschitz(s, 6, 5).passed) << h;
  }
}

TEST(WordDiameters, Examples) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  EXPECT_LE(word_diameters(s, 0, 8), kHalf);
  EXPECT_LE(word_diameters(s, 3, 8), Rational(1, 8));
  EXPECT_LE(word_diameters(s, 8, 8), power(kHalf, 8));
  Caps caps;
  caps.word_cap = 4;
  EXPECT_THROW(word_diameters(IfsSystem::build_unital(H("1"), kHalf, caps), 5, 6), CapExceeded);
}

TEST(FixedPoints, HeightOne) {
  const IfsSystem s = build_ifs_unital(H("1"), kHalf);
  const FixedPoint f = fixed_point(s, 0, Rational(1, 1024));
  const FixedPoint g = fixed_point(s, 1, Rational(1, 1024));
  EXPECT_TRUE(f.exact);
  EXPECT_TRUE(g.exact);
  EXPECT_EQ(f.branch, Branch::central());
  EXPECT_EQ(g.branch, B({1}));
  EXPECT_THROW(fixed_point(s, 0, Rational(0)), DomainError);
}

TEST(FixedPoints, BanachIterationBound) {
  for (const char* h : {"1", "2", "w+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), kHalf);
    const BranchMetric d = s.metric();
    for (std::size_t k = 0; k < s.map_count(); ++k) {
      const FixedPoint fp = fixed_point(s, k, Rational(1, 1 << 20));
      const Point fix{0, fp.branch};
      for (const Point& seed : attractor_net(s, 3)) {
        const Rational d0 = d(seed, fix);
        Point x = seed;
        for (std::size_t n = 1; n <= 8; ++n) {
          x = s.apply_map(k, x);
          EXPECT_LE(d(x, fix), power(kHalf, n) * d0 + fp.error_bound) << h;
        }
      }
    }
  }
}
