#include "alo/rational.h"

#include <stdexcept>

#include "gtest/gtest.h"

namespace alo {
namespace {

TEST(RationalTest, ReducesAndNormalizesSign) {
  Rational r(Int128(6), Int128(-8));
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 4);
  EXPECT_THROW(Rational(Int128(1), Int128(0)), std::domain_error);
}

TEST(RationalTest, FromDoubleUsesShortestDecimal) {
  EXPECT_EQ(Rational::FromDouble(0.2), Rational(Int128(1), Int128(5)));
  EXPECT_EQ(Rational::FromDouble(-0.05), Rational(Int128(-1), Int128(20)));
  EXPECT_EQ(Rational::FromDouble(0.998), Rational(Int128(499), Int128(500)));
  EXPECT_EQ(Rational::FromDouble(40000), Rational(40000));
}

TEST(RationalTest, Parse) {
  EXPECT_EQ(Rational::Parse("3/4"), Rational(Int128(3), Int128(4)));
  EXPECT_EQ(Rational::Parse("-0.05"), Rational(Int128(-1), Int128(20)));
  EXPECT_EQ(Rational::Parse("1e-3"), Rational(Int128(1), Int128(1000)));
  EXPECT_EQ(Rational::Parse("12"), Rational(12));
  EXPECT_THROW(Rational::Parse("abc"), std::invalid_argument);
  EXPECT_THROW(Rational::Parse("1/0"), std::invalid_argument);
}

TEST(RationalTest, ArithmeticAndOrdering) {
  Rational a(Int128(1), Int128(3));
  Rational b(Int128(1), Int128(6));
  EXPECT_EQ(a + b, Rational(Int128(1), Int128(2)));
  EXPECT_EQ(a - b, b);
  EXPECT_EQ(a * b, Rational(Int128(1), Int128(18)));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_LT(b, a);
  EXPECT_GT(-b, -a);
  EXPECT_EQ(Rational(Int128(-7), Int128(2)).Floor(), -4);
  EXPECT_EQ(Rational(Int128(-7), Int128(2)).Ceil(), -3);
  EXPECT_EQ(Rational(Int128(7), Int128(2)).ToString(), "7/2");
}

TEST(RationalTest, OverflowThrows) {
  Int128 big = Int128(1) << 100;
  EXPECT_THROW(Rational(big, 1) * Rational(big, 1), std::overflow_error);
}

}  // namespace
}  // namespace alo
