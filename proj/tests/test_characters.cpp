#include <gtest/gtest.h>

#include <cmath>

#include "phvs/characters.hpp"
#include "phvs/error.hpp"

using namespace phvs;

TEST(Generator, SmallestFullOrder) {
  EXPECT_EQ(find_generator(ResidueRing(5, 2)), 2u);
  EXPECT_EQ(find_generator(ResidueRing(7, 1)), 3u);
  EXPECT_EQ(find_generator(ResidueRing(7, 3)), 3u);
  EXPECT_EQ(find_generator(ResidueRing(13, 3)), 2u);
}

TEST(MultChar, IsMultiplicativeAndZeroOffUnits) {
  const ResidueRing r(7, 2);
  const MultChar chi(r, 5);
  for (std::uint64_t a = 0; a < 49; ++a)
    for (std::uint64_t b = 0; b < 49; b += 5) EXPECT_LT(std::abs(chi(r.mul(a, b)) - chi(a) * chi(b)), 1e-12);
  EXPECT_EQ(chi(std::uint64_t{14}), Complex(0.0, 0.0));
}

TEST(MultChar, Primitivity) {
  const ResidueRing r(5, 2);
  EXPECT_TRUE(is_primitive(MultChar(r, 1)));
  EXPECT_FALSE(is_primitive(MultChar(r, 5)));
  EXPECT_EQ(primitive_indices(r).size(), 16u);
  EXPECT_EQ(primitive_indices(ResidueRing(3, 2)).size(), 4u);
}

TEST(GaussSum, MagnitudeAndLegendreValue) {
  const ResidueRing f(5, 1);
  const AddChar psi(f, 1);
  const Complex g = gauss_sum(legendre_character(5), psi);
  EXPECT_NEAR(g.real(), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(g.imag(), 0.0, 1e-12);
  EXPECT_NEAR(gauss_sum(MultChar(f, 0), psi).real(), -1.0, 1e-12);
  for (std::uint64_t k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(gauss_sum(MultChar(f, k), psi)), std::sqrt(5.0), 1e-12);
}

TEST(DerivedPsi, TwistForIndexOne) {
  // chi_1(1 + 5y) = exp(2 pi i 2y / 5) for the generator 2 mod 25.
  EXPECT_EQ(derived_psi_prime(MultChar(ResidueRing(5, 2), 1)).twist(), 2u);
  EXPECT_THROW(derived_psi_prime(MultChar(ResidueRing(5, 2), 5)), Error);
}

TEST(AlphaTilde, BruteMatchesClosedForm) {
  for (const std::uint64_t p : {5u, 7u, 13u})
    for (const unsigned m : {2u, 3u}) {
      const ResidueRing r(p, m);
      for (const auto k : primitive_indices(r)) {
        const MultChar chi(r, k);
        EXPECT_LT(std::abs(alpha_tilde_mult(chi) - alpha_tilde_mult_closed(chi)), 1e-10 * std::pow(p, m / 2.0));
      }
    }
}

TEST(AlphaTildeAdd, Magnitude) {
  EXPECT_NEAR(std::abs(alpha_tilde_add(AddChar(ResidueRing(5, 2), 1))), 5.0, 1e-12);
  EXPECT_NEAR(std::abs(alpha_tilde_add(AddChar(ResidueRing(5, 3), 1))), std::pow(5.0, 1.5), 1e-10);
}

TEST(AlphaFactor, FourthRootOfUnity) {
  EXPECT_EQ(alpha_factor(MultChar(ResidueRing(5, 2), 1)), Complex(1.0, 0.0));
  for (const auto k : primitive_indices(ResidueRing(5, 3))) {
    const Complex a = alpha_factor(MultChar(ResidueRing(5, 3), k));
    EXPECT_EQ(a.imag(), 0.0);
    EXPECT_EQ(std::abs(a.real()), 1.0);
  }
  // p = 3 mod 4 with odd m gives +-i.
  const Complex b = alpha_factor(MultChar(ResidueRing(7, 3), 1));
  EXPECT_EQ(b.real(), 0.0);
  EXPECT_EQ(std::abs(b.imag()), 1.0);
}
