#include <gtest/gtest.h>

#include <random>

#include "phvs/charsums.hpp"
#include "phvs/error.hpp"
#include "phvs/morse.hpp"

using namespace phvs;

TEST(Newton, IterationBound) {
  EXPECT_EQ(newton_iteration_bound(1), 1u);
  EXPECT_EQ(newton_iteration_bound(2), 2u);
  EXPECT_EQ(newton_iteration_bound(3), 3u);
  EXPECT_EQ(newton_iteration_bound(4), 3u);
  EXPECT_EQ(newton_iteration_bound(5), 4u);
}

TEST(Newton, LiftsKnownCriticalPoints) {
  const auto c1 = lift_critical_point(parse_poly("x^2 + 5*x"), std::vector<std::int64_t>{0}, ResidueRing(5, 3));
  EXPECT_EQ(c1.point[0].value(), 60u);
  EXPECT_LE(c1.iterations, newton_iteration_bound(3));
  const auto c2 = lift_critical_point(parse_poly("x1^2 + x2^2 + 5*x1"), std::vector<std::int64_t>{0, 0},
                                      ResidueRing(5, 2));
  EXPECT_EQ(c2.point[0].value(), 10u);
  EXPECT_EQ(c2.point[1].value(), 0u);
  for (const auto v : c2.grad_valuations) EXPECT_EQ(v, 2u);
}

TEST(Newton, Errors) {
  const ResidueRing r(5, 2);
  EXPECT_THROW(lift_critical_point(parse_poly("x^2 + x"), std::vector<std::int64_t>{0}, r), Error);
  EXPECT_THROW(lift_critical_point(parse_poly("x^3"), std::vector<std::int64_t>{0}, r), Error);
}

TEST(Newton, UniqueCriticalPointPerDisc) {
  EXPECT_EQ(count_disc_critical_points(parse_poly("x1^2 - 3*x2^2 + x1*x2^3"), std::vector<std::int64_t>{0, 0}, 7),
            1u);
}

TEST(MorseNormalForm, ResidualVanishesOnDisc) {
  const ResidueRing r(7, 3);
  const MultiPoly f = parse_poly("x1^2 + 3*x1*x2 + 5*x2^2 + x1^3 - 2*x2^4 + 4");
  const auto nf = morse_normal_form(f, std::vector<std::int64_t>{0, 0}, r);
  ASSERT_EQ(nf.a.size(), 2u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint64_t> x(2);
    for (std::size_t j = 0; j < 2; ++j) x[j] = r.add(nf.cert.point[j].value(), r.mul(7, rng() % 49));
    EXPECT_EQ(normal_form_residual(f, nf, x), 0u);
  }
  // prod a_i against 2^{-n} det Hess.
  const ResidueRing field(7, 1);
  std::uint64_t prod = 1;
  for (const auto& a : nf.a) prod = field.mul(prod, a.value() % 7);
  EXPECT_EQ(legendre(static_cast<std::int64_t>(prod), 7), legendre(field.inv(4), 7) * nf.cert.hess_disc);
}

TEST(MorseNormalForm, SquareModulusKeepsQuadraticPart) {
  const ResidueRing r(5, 2);
  const MultiPoly f = parse_poly("x1^2 + x2^2 + 5*x1");
  const auto nf = morse_normal_form(f, std::vector<std::int64_t>{0, 0}, r);
  ASSERT_EQ(nf.a.size(), 2u);
  for (const auto& a : nf.a) EXPECT_EQ(a.value(), 1u);
  for (std::uint64_t u = 0; u < 5; ++u)
    for (std::uint64_t v = 0; v < 5; ++v) {
      const std::vector<std::uint64_t> x{r.add(nf.cert.point[0].value(), 5 * u), 5 * v};
      EXPECT_EQ(normal_form_residual(f, nf, x), 0u);
    }
}

TEST(MorseNormalForm, ZeroDiagonalNeedsShear) {
  const ResidueRing r(5, 3);
  const MultiPoly f = parse_poly("x1*x2 + x1^3");
  const auto nf = morse_normal_form(f, std::vector<std::int64_t>{0, 0}, r);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const std::vector<std::uint64_t> x{r.mul(5, rng() % 25), r.mul(5, rng() % 25)};
    EXPECT_EQ(normal_form_residual(f, nf, x), 0u);
  }
}

TEST(Chart, HyperplaneRestriction) {
  const ResidueRing r(5, 2);
  const auto cp = restrict_to_chart(parse_poly("x1*x2"), Chart::hyperplane({2, 1}), r);
  EXPECT_EQ(cp.solved, 0u);
  EXPECT_EQ(cp.g.nvars(), 1u);
  EXPECT_THROW(restrict_to_chart(parse_poly("x1*x2"), Chart::hyperplane({5, 10}), r), Error);
}

TEST(CriticalPointsSum, MatchesBruteOnAffineSpace) {
  const ResidueRing r(5, 2);
  const MultiPoly f = parse_poly("x1^2 + 2*x2^2 + 1");
  for (const auto k : {1u, 3u}) {
    const MultChar chi(r, k);
    EXPECT_LT(std::abs(critical_points_sum(f, chi, Chart::affine()).value - brute_sum(f, chi).value), 1e-9 * 25);
  }
}

TEST(CriticalPointsSum, HyperplaneMatchesEnumeration) {
  const ResidueRing r(7, 2);
  const MultiPoly f = parse_poly("x1*x2");
  const MultChar chi(r, 1);
  const std::vector<std::uint64_t> L{1, 3};
  EXPECT_LT(std::abs(critical_points_sum(f, chi, Chart::hyperplane(L)).value - hyperplane_sum(f, chi, L).value),
            1e-9 * 7);
}

TEST(CriticalPointsSum, DegenerateUnitValuedResidueThrows) {
  const ResidueRing r(5, 2);
  EXPECT_THROW(critical_points_sum(parse_poly("x^3 + 1"), MultChar(r, 1), Chart::affine()), Error);
}
