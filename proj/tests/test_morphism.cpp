#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ultrafractal.hpp"

using namespace ultrafractal;

namespace {

ExtHeight H(const char* s) { return parse_ordinal(s); }
NodePath P(std::vector<std::size_t> v) { return NodePath(std::move(v)); }
Branch B(std::vector<std::size_t> v) { return Branch(NodePath(std::move(v))); }

std::vector<NodePath> union_of_levels(const IfsSystem& s, std::size_t n) {
  std::set<NodePath> all;
  for (const auto& level : s.level_sets(n)) all.insert(level.begin(), level.end());
  return {all.begin(), all.end()};
}

std::string first_failure(const Report& r) { return r.failures.empty() ? "" : r.failures.front(); }

}  // namespace

TEST(Surjection, OmegaOntoOnePassesAxioms) {
  const auto m = build_surjective_morphism(canonical_tree(H("w")), {}, canonical_tree(H("1")), {});
  const Report r = verify_morphism_axioms(m, 4, 8);
  EXPECT_TRUE(r.passed) << first_failure(r);
}

TEST(Surjection, RefusesTallerTarget) {
  EXPECT_THROW(build_surjective_morphism(canonical_tree(H("1")), {}, canonical_tree(H("2")), {}), DomainError);
}

TEST(Surjection, EqualTreesMatchIndexToIndex) {
  const HeightTree t = canonical_tree(H("w+1"));
  const auto m = build_surjective_morphism(t, {}, t, {});
  EXPECT_EQ(apply_morphism(m, P({3, 1})), P({3, 1}));
  EXPECT_EQ(apply_morphism(m, P({7, 2, 1})), P({7, 2, 1}));
  EXPECT_EQ(apply_morphism(m, P({2, 0})), P({2, 0}));
}

TEST(Surjection, AlwaysPassesAxioms) {
  const char* heights[] = {"0", "1", "2", "3", "w", "w+1", "w*2", "w^2", "inf"};
  for (const char* a : heights) {
    for (const char* b : heights) {
      if (H(a) < H(b)) continue;
      const auto m = build_surjective_morphism(canonical_tree(H(a)), {}, canonical_tree(H(b)), {});
      const Report r = verify_morphism_axioms(m, 3, 6);
      EXPECT_TRUE(r.passed) << a << " -> " << b << ": " << first_failure(r);
    }
  }
}

TEST(Surjection, EveryTargetNodeHasAPreimage) {
  const HeightTree src = canonical_tree(H("w^2"));
  const HeightTree dst = canonical_tree(H("w+1"));
  const auto m = build_surjective_morphism(src, {}, dst, {});
  detail::for_each_window_node(dst, {}, 3, 4, [&](const NodePath& y, const ExtHeight&) {
    const auto x = m.preimage(y);
    ASSERT_TRUE(x.has_value()) << to_string(y);
    EXPECT_EQ(m.apply(*x), y);
  });
}

TEST(Shift, ImagesAndBoundary) {
  const IfsSystem s = build_ifs_unital(H("1"), Rational(1, 2));
  const HeightMorphism& f = s.map(0);
  const HeightMorphism& g = s.map(1);
  EXPECT_EQ(apply_morphism(f, P({1})), P({2}));
  EXPECT_EQ(apply_morphism(f, P({0})), P({0}));
  EXPECT_EQ(apply_morphism(g, P({0})), P({1, 0}));
  EXPECT_EQ(boundary_map(f, Branch::central()), Branch::central());
  EXPECT_EQ(boundary_map(f, B({1})), B({2}));
  EXPECT_EQ(boundary_map(g, Branch::central()), B({1}));
}

TEST(HandBuilt, TwoSiblingsOntoOneTargetFails) {
  const HeightTree t = canonical_tree(H("2"));
  const auto m = HeightMorphism::hand_built(t, {}, t, {}, [](const NodePath&, const NodePath&, std::size_t i) {
    return i == 0 ? std::size_t{0} : std::size_t{1};
  });
  EXPECT_FALSE(verify_morphism_axioms(m, 2, 4).passed);
}

TEST(HandBuilt, HeightIncreaseFails) {
  const auto m = HeightMorphism::hand_built(canonical_tree(H("1")), {}, canonical_tree(H("2")), {},
                                            [](const NodePath&, const NodePath&, std::size_t i) { return i; });
  EXPECT_FALSE(verify_morphism_axioms(m, 2, 4).passed);
}

TEST(Lipschitz, ShiftAndG) {
  const IfsSystem s = build_ifs_unital(H("1"), Rational(1, 2));
  EXPECT_EQ(s.node_norm(P({1})), Rational(1, 2));
  EXPECT_EQ(s.node_norm(s.map(0).apply(P({1}))), Rational(1, 4));
  const auto nodes = union_of_levels(s, 6);
  const auto branches = attractor_net(s, 5).branches();
  for (std::size_t k = 0; k < 2; ++k) {
    const Report r = lipschitz_check(s.map(k), s.norm_fn(), s.norm_fn(), s.lambda(), nodes, branches);
    EXPECT_TRUE(r.passed) << k << ": " << first_failure(r);
  }
}

TEST(Lipschitz, IdentityFails) {
  const IfsSystem s = build_ifs_unital(H("1"), Rational(1, 2));
  const auto id = HeightMorphism::surjection(s.tree(), {}, s.tree(), {}, "id");
  const Report r = lipschitz_check(id, s.norm_fn(), s.norm_fn(), s.lambda(), union_of_levels(s, 3), {});
  EXPECT_FALSE(r.passed);
}

TEST(Compose, StaysAHeightMorphism) {
  const HeightTree a = canonical_tree(H("w^2"));
  const HeightTree b = canonical_tree(H("w+1"));
  const HeightTree c = canonical_tree(H("2"));
  const auto ab = build_surjective_morphism(a, {}, b, {});
  const auto bc = build_surjective_morphism(b, {}, c, {});
  const auto ac = compose(bc, ab);
  EXPECT_TRUE(verify_morphism_axioms(ac, 3, 6).passed);
  EXPECT_EQ(ac.apply(P({5, 2})), bc.apply(ab.apply(P({5, 2}))));
  const IfsSystem s = build_ifs_unital(H("inf"), Rational(1, 2));
  EXPECT_TRUE(verify_morphism_axioms(compose(s.map(0), s.map(1)), 3, 5).passed);
}

// Boundary maps of lambda-Lipschitz maps are lambda-Lipschitz on random branch sets.
TEST(LipschitzProperty, BoundaryMapsOnRandomBranches) {
  std::mt19937_64 rng(31);
  for (const char* h : {"2", "w+1", "inf"}) {
    const IfsSystem s = build_ifs_unital(H(h), Rational(1, 2));
    const NormFn norm = s.norm_fn();
    std::vector<Branch> bs;
    while (bs.size() < 25) {
      const Branch b = oracle::random_branch(rng, 3, 3);
      if (s.tree().addressable(b.stem())) bs.push_back(b);
    }
    for (std::size_t k = 0; k < s.map_count(); ++k) {
      for (const Branch& a : bs) {
        for (const Branch& b : bs) {
          const Rational lhs = canonical_ultrametric(norm, s.map(k).boundary_map(a), s.map(k).boundary_map(b));
          EXPECT_LE(lhs, s.lambda() * canonical_ultrametric(norm, a, b)) << h;
        }
      }
    }
  }
}
