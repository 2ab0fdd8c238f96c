#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ultrafractal.hpp"

using namespace ultrafractal;

namespace {

OrdinalSpace S(const char* s) { return parse_space(s); }

/// Iterates the derivative until the space is empty.
std::pair<std::size_t, OrdinalSpace> iterate_derivative(OrdinalSpace x) {
  std::size_t k = 0;
  for (;;) {
    OrdinalSpace next = derived_set(x);
    if (next.is_empty()) return {k, x};
    x = next;
    ++k;
  }
}

}  // namespace

TEST(Scattered, DerivedSetExamples) {
  EXPECT_EQ(derived_set(S("w")), S("0"));
  EXPECT_TRUE(derived_set(S("5")).is_empty());
  EXPECT_EQ(derived_set(S("w^2*3+w*2+5")), S("w*3+2"));
  EXPECT_TRUE(derived_set(S("cantor")).is_cantor());
}

// In [0, g] a point is a limit point iff it is a nonzero limit ordinal.
// Points w*k + n of [0, w*m + r] are enumerated and the limit points
// counted; they form a copy of [0, m - 1].
TEST(Scattered, DerivedSetOfRankOneByEnumeration) {
  for (std::uint64_t m = 1; m <= 4; ++m) {
    for (std::uint64_t r = 0; r <= 3; ++r) {
      std::uint64_t limits = 0;
      for (std::uint64_t k = 0; k <= m; ++k) {
        for (std::uint64_t n = 0; n <= (k == m ? r : 5); ++n) {
          oracle::Small xi;
          xi.c = {n, k};
          if (!xi.is_zero() && oracle::to_ordinal(xi).is_limit()) ++limits;
        }
      }
      oracle::Small g;
      g.c = {r, m};
      const OrdinalSpace d = derived_set(OrdinalSpace::interval(oracle::to_ordinal(g)));
      EXPECT_EQ(d, OrdinalSpace::interval(Ordinal::finite(limits - 1)));
    }
  }
}

TEST(Scattered, HeightExamples) {
  EXPECT_EQ(scattered_height(S("w^2*3+w*2+5")), (ScatteredHeight{ExtHeight::finite(2), 3}));
  EXPECT_EQ(scattered_height(S("0")), (ScatteredHeight{ExtHeight::finite(0), 1}));
  EXPECT_EQ(scattered_height(S("cantor")), (ScatteredHeight{ExtHeight::infinity(), std::nullopt}));
  EXPECT_THROW(scattered_height(OrdinalSpace::empty()), DomainError);
}

TEST(Scattered, UnitalExamples) {
  EXPECT_TRUE(is_unital(S("w^2")));
  EXPECT_FALSE(is_unital(S("w*2")));
  EXPECT_TRUE(is_unital(S("cantor")));
  EXPECT_FALSE(is_unital(S("3")));
}

TEST(Scattered, DecompositionExamples) {
  EXPECT_EQ(unital_decomposition(S("w*2")), (std::vector<OrdinalSpace>{S("w"), S("w")}));
  EXPECT_EQ(unital_decomposition(S("w^2*3+w*2+5")),
            (std::vector<OrdinalSpace>{S("w^2"), S("w^2"), S("w^2+w*2+5")}));
  EXPECT_EQ(unital_decomposition(S("w")), (std::vector<OrdinalSpace>{S("w")}));
}

TEST(Scattered, ClassifyExamples) {
  EXPECT_EQ(classify_fractal(S("w")), FractalVerdict::BanachUltrafractal);
  EXPECT_EQ(classify_fractal(S("w^w")), FractalVerdict::NotTopologicalFractal);
  EXPECT_EQ(classify_fractal(S("cantor")), FractalVerdict::BanachUltrafractal);
  EXPECT_EQ(classify_fractal(S("7")), FractalVerdict::BanachUltrafractal);
}

TEST(ScatteredProperty, ClosedFormulaMatchesIteratedDerivativeAndCounting) {
  std::size_t cases = 0;
  for (const oracle::Small& g : oracle::all_small(4, 5)) {
    if (g.degree() > 4) continue;
    const OrdinalSpace x = OrdinalSpace::interval(oracle::to_ordinal(g));
    const ScatteredHeight sh = scattered_height(x);
    const auto [steps, top] = iterate_derivative(x);
    EXPECT_EQ(sh.height, ExtHeight::finite(steps));
    ASSERT_TRUE(top.is_interval());
    ASSERT_TRUE(top.gamma().is_finite());
    EXPECT_EQ(sh.multiplicity, top.gamma().finite_value() + 1);
    const oracle::CbData cb = oracle::cb_by_counting(g);
    EXPECT_EQ(sh.height, ExtHeight::finite(cb.height));
    EXPECT_EQ(sh.multiplicity, cb.multiplicity);
    ++cases;
  }
  EXPECT_GT(cases, 1000U);
}

TEST(ScatteredProperty, DerivedSetStrictlyDecreases) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const Ordinal g = oracle::to_ordinal(oracle::random_small(rng));
    const OrdinalSpace d = derived_set(OrdinalSpace::interval(g));
    if (d.is_empty()) continue;
    EXPECT_LT(d.gamma(), g);
  }
}

TEST(ScatteredProperty, DecompositionPiecesAreUnitalAndSumBack) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Ordinal g = oracle::to_ordinal(oracle::random_small(rng));
    const OrdinalSpace x = OrdinalSpace::interval(g);
    const auto pieces = unital_decomposition(x);
    ASSERT_FALSE(pieces.empty());
    // Order type of [0, g] is g + 1; pieces concatenate.
    Ordinal total;
    for (const OrdinalSpace& p : pieces) {
      EXPECT_TRUE(is_unital(p));
      EXPECT_EQ(scattered_height(p).height, scattered_height(x).height);
      total = total + p.gamma() + Ordinal::finite(1);
    }
    EXPECT_EQ(total, g + Ordinal::finite(1));
  }
}

TEST(ScatteredProperty, VerdictDependsOnlyOnHeightKind) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const oracle::Small s = oracle::random_small(rng, 3, 3);
    for (const char* lead : {"w^w", "w^(w+1)", "w^w^w"}) {
      Ordinal g = parse_cnf(lead) + oracle::to_ordinal(s);
      const OrdinalSpace x = OrdinalSpace::interval(g);
      const bool limit = classify_kind(scattered_height(x).height) == HeightKind::Limit;
      EXPECT_EQ(classify_fractal(x) == FractalVerdict::NotTopologicalFractal, limit) << to_string(g);
    }
  }
}
