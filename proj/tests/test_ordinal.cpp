#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ultrafractal.hpp"

using namespace ultrafractal;

namespace {

Ordinal O(const char* s) { return parse_cnf(s); }
ExtHeight H(const char* s) { return parse_ordinal(s); }

}  // namespace

TEST(OrdinalParse, CnfTerms) {
  const Ordinal o = O("w^2*3+w*2+5");
  ASSERT_EQ(o.terms().size(), 3U);
  EXPECT_EQ(o.terms()[0].exponent, Ordinal::finite(2));
  EXPECT_EQ(o.terms()[0].coefficient, 3U);
  EXPECT_EQ(o.terms()[1].exponent, Ordinal::finite(1));
  EXPECT_EQ(o.terms()[1].coefficient, 2U);
  EXPECT_EQ(o.terms()[2].exponent, Ordinal::finite(0));
  EXPECT_EQ(o.terms()[2].coefficient, 5U);
}

TEST(OrdinalParse, SpecialTokens) {
  EXPECT_TRUE(H("inf").is_infinity());
  EXPECT_TRUE(H("-1").is_minus_one());
  EXPECT_EQ(H("0"), ExtHeight::finite(0));
}

TEST(OrdinalParse, RejectsNonNormalForm) {
  EXPECT_THROW(H("w+w"), ParseError);
  EXPECT_THROW(H("1+w"), ParseError);
  EXPECT_THROW(H("w*0"), ParseError);
  EXPECT_THROW(H(""), ParseError);
  EXPECT_THROW(H("w^"), ParseError);
  EXPECT_THROW(H("x"), ParseError);
}

TEST(OrdinalParse, NestedExponents) {
  EXPECT_EQ(O("w^w^w").leading_exponent(), O("w^w"));
  EXPECT_EQ(O("w^(w+1)").leading_exponent(), O("w+1"));
  EXPECT_EQ(parse_cnf(to_string(O("w^(w^w)*2+w^w+3"))), O("w^(w^w)*2+w^w+3"));
}

TEST(OrdinalCompare, Examples) {
  EXPECT_EQ(compare(H("w"), H("w^2")), std::strong_ordering::less);
  EXPECT_EQ(compare(H("-1"), H("0")), std::strong_ordering::less);
  EXPECT_EQ(compare(H("w*2+1"), H("w*2")), std::strong_ordering::greater);
  EXPECT_EQ(compare(H("w^w"), H("inf")), std::strong_ordering::less);
}

TEST(OrdinalAdd, Examples) {
  EXPECT_EQ(O("1") + O("w"), O("w"));
  EXPECT_EQ(O("w") + O("1"), O("w+1"));
  EXPECT_EQ(O("w^2+w") + O("w^2"), O("w^2*2"));
}

TEST(OrdinalKind, Examples) {
  EXPECT_EQ(classify_kind(H("w^w")), HeightKind::Limit);
  EXPECT_EQ(classify_kind(H("w+1")), HeightKind::Successor);
  EXPECT_EQ(classify_kind(H("0")), HeightKind::Zero);
  EXPECT_EQ(classify_kind(H("-1")), HeightKind::MinusOne);
  EXPECT_EQ(classify_kind(H("inf")), HeightKind::Infinity);
}

TEST(OrdinalMinusOne, Examples) {
  EXPECT_EQ(height_minus_one(H("w+1")), H("w"));
  EXPECT_EQ(height_minus_one(H("w^w")), H("w^w"));
  EXPECT_EQ(height_minus_one(H("inf")), H("inf"));
  EXPECT_EQ(height_minus_one(H("3")), H("2"));
}

TEST(OrdinalFundamental, Examples) {
  EXPECT_EQ(fundamental_sequence(O("w"), 3), O("3"));
  EXPECT_EQ(fundamental_sequence(O("w^2"), 3), O("w*3"));
  EXPECT_EQ(fundamental_sequence(O("w^w"), 2), O("w^2"));
  EXPECT_THROW(fundamental_sequence(O("w+1"), 2), DomainError);
}

// Oracle: coefficient arrays with lexicographic order and absorbing addition.
TEST(OrdinalProperty, CompareAndAddMatchCoefficientOracle) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 2000; ++trial) {
    const oracle::Small a = oracle::random_small(rng), b = oracle::random_small(rng);
    const Ordinal oa = oracle::to_ordinal(a), ob = oracle::to_ordinal(b);
    const int expect = oracle::cmp(a, b);
    const auto got = oa <=> ob;
    EXPECT_EQ(got < 0, expect < 0);
    EXPECT_EQ(got == 0, expect == 0);
    EXPECT_EQ(oa + ob, oracle::to_ordinal(oracle::add(a, b)));
  }
}

TEST(OrdinalProperty, ParsePrintRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::Small a = oracle::random_small(rng);
    const std::string lit = oracle::literal(a);
    EXPECT_EQ(to_string(parse_cnf(lit)), lit);
    EXPECT_EQ(parse_cnf(lit), oracle::to_ordinal(a));
  }
}

TEST(OrdinalProperty, TotalOrderOnTriples) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Ordinal a = oracle::to_ordinal(oracle::random_small(rng, 3, 2));
    const Ordinal b = oracle::to_ordinal(oracle::random_small(rng, 3, 2));
    const Ordinal c = oracle::to_ordinal(oracle::random_small(rng, 3, 2));
    EXPECT_EQ((a <=> b) == 0, a == b);
    EXPECT_EQ(a < b, b > a);
    if (a <= b && b <= c) EXPECT_LE(a, c);
    if (a <= b && b <= a) EXPECT_EQ(a, b);
  }
}

TEST(OrdinalProperty, FundamentalSequencesIncreaseBelowLimit) {
  std::mt19937_64 rng(13);
  int limits = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Ordinal a = oracle::to_ordinal(oracle::random_small(rng));
    if (!a.is_limit()) continue;
    ++limits;
    for (std::uint64_t n = 1; n < 6; ++n) {
      EXPECT_LT(fundamental_sequence(a, n), fundamental_sequence(a, n + 1));
      EXPECT_LT(fundamental_sequence(a, n + 1), a);
    }
  }
  EXPECT_GT(limits, 50);
  for (const char* lim : {"w^w", "w^(w+1)", "w^w^w", "w^w*2+w^3"}) {
    for (std::uint64_t n = 1; n < 5; ++n) {
      EXPECT_LT(fundamental_sequence(O(lim), n), fundamental_sequence(O(lim), n + 1));
      EXPECT_LT(fundamental_sequence(O(lim), n + 1), O(lim));
    }
  }
}

TEST(OrdinalProperty, MinusOnePlusOneOnSuccessors) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const Ordinal a = oracle::to_ordinal(oracle::random_small(rng));
    const ExtHeight h(a);
    const ExtHeight back = height_minus_one(h);
    const bool restores = !a.is_zero() && back.ordinal() + Ordinal::finite(1) == a;
    EXPECT_EQ(restores, a.is_successor()) << to_string(a);
  }
}
