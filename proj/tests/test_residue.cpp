#include <gtest/gtest.h>

#include "phvs/error.hpp"
#include "phvs/residue.hpp"

using namespace phvs;

TEST(ResidueRing, RejectsEvenOrHugeModuli) {
  EXPECT_THROW(ResidueRing(2, 3), Error);
  EXPECT_THROW(ResidueRing(9, 1), Error);
  EXPECT_THROW(ResidueRing(3, 40), Error);
  EXPECT_NO_THROW(ResidueRing(13, 3));
}

TEST(ResidueRing, InverseAndReduce) {
  const ResidueRing r(5, 2);
  EXPECT_EQ(r.inv(2), 13u);
  EXPECT_EQ(r.reduce(-1), 24u);
  EXPECT_EQ(r.unit_count(), 20u);
  for (std::uint64_t a = 1; a < 25; ++a) {
    if (r.is_unit(a)) {
      EXPECT_EQ(r.mul(a, r.inv(a)), 1u);
    } else {
      EXPECT_THROW(r.inv(a), Error);
    }
  }
}

TEST(ResidueRing, Valuation) {
  const ResidueRing r(7, 3);
  EXPECT_EQ(r.valuation(0), 3u);
  EXPECT_EQ(r.valuation(49), 2u);
  EXPECT_EQ(r.valuation(14), 1u);
  EXPECT_EQ(r.valuation(3), 0u);
}

TEST(ResidueElem, ArithmeticAndRingMismatch) {
  const ResidueRing r(5, 2);
  const ResidueElem a = r.elem(7), b = r.elem(-3);
  EXPECT_EQ((a + b).value(), 4u);
  EXPECT_EQ((a * b).value(), r.reduce(-21));
  EXPECT_EQ((a * a.inverse()).value(), 1u);
  EXPECT_THROW(a + ResidueRing(5, 3).elem(1), Error);
}

TEST(Legendre, SmallPrimes) {
  EXPECT_EQ(legendre(2, 7), SquareClass::Square);
  EXPECT_EQ(legendre(3, 7), SquareClass::NonSquare);
  EXPECT_EQ(legendre(14, 7), SquareClass::Zero);
  EXPECT_EQ(legendre(-1, 5), SquareClass::Square);
  EXPECT_EQ(legendre(-1, 7), SquareClass::NonSquare);
  EXPECT_EQ(power(SquareClass::NonSquare, 2), SquareClass::Square);
}

TEST(HenselSqrt, LiftsToUniqueRoot) {
  EXPECT_EQ(hensel_sqrt(ResidueRing(5, 2).elem(6), 1).value(), 16u);
  EXPECT_EQ(hensel_sqrt(ResidueRing(7, 3).elem(2), 3).value(), 108u);
  EXPECT_THROW(hensel_sqrt(ResidueRing(7, 3).elem(3), 1), Error);
}

TEST(Diagonalize, DiscriminantMatchesDeterminantClass) {
  ModMatrix a(2, 5);
  a(0, 0) = 0;
  a(0, 1) = a(1, 0) = 1;
  a(1, 1) = 0;
  const auto d = diagonalize_symmetric(a);
  ASSERT_EQ(d.entries.size(), 2u);
  // det = -1, a square mod 5.
  EXPECT_EQ(d.discriminant, SquareClass::Square);
  const ModMatrix t = d.transform.transpose() * a * d.transform;
  EXPECT_TRUE(t.is_diagonal());
}

TEST(Diagonalize, SingularRank) {
  ModMatrix a(2, 7);
  a(0, 0) = 1;
  a(0, 1) = a(1, 0) = 1;
  a(1, 1) = 1;
  EXPECT_EQ(diagonalize_symmetric(a).entries.size(), 1u);
}

TEST(SolveLinear, ModPrimePower) {
  const ResidueRing r(5, 3);
  ModMatrix a(2, r.modulus());
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 4;
  const std::vector<std::uint64_t> b{7, 11};
  const auto z = solve_linear(a, b, r);
  EXPECT_EQ(r.add(r.mul(2, z[0]), z[1]), 7u);
  EXPECT_EQ(r.add(z[0], r.mul(4, z[1])), 11u);
}
