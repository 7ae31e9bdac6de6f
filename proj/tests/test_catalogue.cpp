#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "phvs/catalogue.hpp"
#include "phvs/error.hpp"

using namespace phvs;

TEST(Rational, ParseAndReduce) {
  EXPECT_EQ(Rational::parse("4"), (Rational{4, 1}));
  EXPECT_EQ(Rational::parse("6/-4"), (Rational{-3, 2}));
  EXPECT_EQ(Rational::parse("3/2").reduce(ResidueRing(5, 2)), 14u);
  EXPECT_THROW(Rational::parse("1/0"), Error);
  EXPECT_THROW(Rational::parse("x"), Error);
  EXPECT_THROW(Rational::parse("1/5").reduce(ResidueRing(5, 2)), Error);
}

TEST(Bernstein, LeadingCoefficients) {
  EXPECT_EQ(compute_b0(parse_poly("x1"), parse_poly("y1"), 1), (Rational{1, 1}));
  EXPECT_EQ(compute_b0(parse_poly("x1^2"), parse_poly("y1^2"), 2), (Rational{4, 1}));
  EXPECT_EQ(compute_b0(parse_poly("x1^2 + x2^2 + x3^2"), parse_poly("y1^2 + y2^2 + y3^2"), 2), (Rational{4, 1}));
  EXPECT_EQ(compute_b0(parse_poly("x1*x4 - x2*x3"), parse_poly("y1*y4 - y2*y3"), 2), (Rational{1, 1}));
  // b(s) = 4 (s+1)(s+k/2) for the quadric.
  const auto v = bernstein_values(parse_poly("x1^2 + x2^2 + x3^2"), parse_poly("y1^2 + y2^2 + y3^2"), 2);
  EXPECT_EQ(v[0], (Rational{6, 1}));
  EXPECT_EQ(v[1], (Rational{20, 1}));
  EXPECT_THROW(compute_b0(parse_poly("x1^2 + x2"), parse_poly("y1^2"), 2), Error);
  EXPECT_THROW(compute_b0(parse_poly("x1^3 + x2^3"), parse_poly("y1^3 + y2^3"), 3), Error);
}

TEST(Catalogue, BuiltinsAndLookup) {
  EXPECT_EQ(builtin_instances().size(), 7u);
  EXPECT_EQ(builtin_instance("det2").n, 4u);
  EXPECT_THROW(builtin_instance("nope"), Error);
}

TEST(Catalogue, ParseFormatRoundTrip) {
  const std::string text = format_catalogue(builtin_instances());
  const auto parsed = parse_catalogue(text);
  ASSERT_EQ(parsed.size(), builtin_instances().size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].name, builtin_instances()[i].name);
    EXPECT_EQ(parsed[i].f, builtin_instances()[i].f);
    EXPECT_EQ(parsed[i].b0, builtin_instances()[i].b0);
  }
}

TEST(Catalogue, RejectsBadBlocks) {
  EXPECT_THROW(parse_catalogue("name=a\nn=1\nd=1\nf=x1\nfdual=y1\nb0=2\n"), Error);
  EXPECT_THROW(parse_catalogue("name=a\nn=1\nd=1\nf=x1\nfdual=y1\nb0=1\ncolor=red\n"), Error);
  EXPECT_THROW(parse_catalogue("name=a\nn=1\nd=1\nf=x1\nf=x1\nfdual=y1\nb0=1\n"), Error);
  EXPECT_THROW(parse_catalogue("name=a\nn=1\n"), Error);
}

TEST(Catalogue, BundledFileMatchesBuiltins) {
  const auto insts = load_catalogue(default_catalogue_path());
  ASSERT_EQ(insts.size(), builtin_instances().size());
  for (std::size_t i = 0; i < insts.size(); ++i) EXPECT_EQ(insts[i].b0, builtin_instances()[i].b0);
}

TEST(Catalogue, ResolveFileAndName) {
  const auto path = std::filesystem::temp_directory_path() / "phvs_catalogue_test.txt";
  {
    std::ofstream out(path);
    out << "# test\nname=first\nn=1\nd=1\nf=x1\nfdual=y1\nb0=1\n\nname=second\nn=1\nd=2\nf=x1^2\nfdual=y1^2\nb0=4\n";
  }
  EXPECT_EQ(resolve_instance(path.string()).name, "first");
  EXPECT_EQ(resolve_instance(path.string() + ":second").d, 2u);
  EXPECT_EQ(resolve_instance("hyperbola").n, 2u);
  EXPECT_THROW(resolve_instance(path.string() + ":third"), Error);
  std::filesystem::remove(path);
}

TEST(DualGradient, CriticalPointAndValue) {
  const ResidueRing r(5, 2);
  const auto& h = builtin_instance("hyperbola");
  const std::vector<std::uint64_t> L{1, 1};
  const auto c = dual_gradient_point(h, L, r);
  EXPECT_EQ(c[0].value(), 13u);
  EXPECT_EQ(c[1].value(), 13u);
  EXPECT_TRUE(critical_value_identity_check(h, L, r));
  const auto q = dual_gradient_point(builtin_instance("quadric-2"), std::vector<std::uint64_t>{1, 0}, ResidueRing(7, 2));
  EXPECT_EQ(q[0].value(), 1u);
  EXPECT_EQ(q[1].value(), 0u);
  EXPECT_TRUE(critical_value_identity_check(builtin_instance("det2"), std::vector<std::uint64_t>{1, 2, 3, 4},
                                            ResidueRing(7, 2)));
}

TEST(BadPrime, ArithmeticAndStructural) {
  EXPECT_TRUE(arithmetic_bad_prime(builtin_instance("square"), 2));
  EXPECT_FALSE(arithmetic_bad_prime(builtin_instance("hyperbola"), 5));
  EXPECT_FALSE(is_bad_prime(builtin_instance("hyperbola"), 5));
  EXPECT_FALSE(is_bad_prime(builtin_instance("det2"), 3));
}
