#include <gtest/gtest.h>

#include <cmath>

#include "phvs/error.hpp"
#include "phvs/report.hpp"
#include "phvs/verifier.hpp"

using namespace phvs;

TEST(ClosedForm, HyperbolaAtOneOne) {
  const ResidueRing r(5, 2);
  const auto& inst = builtin_instance("hyperbola");
  const AddChar psi(r, 1);
  const std::vector<std::uint64_t> L{1, 1};
  for (const auto k : primitive_indices(r)) {
    const MultChar chi(r, k);
    const auto cf = closed_form_S(inst, chi, psi, L);
    ASSERT_TRUE(std::holds_alternative<ClosedFormResult>(cf));
    const auto& res = std::get<ClosedFormResult>(cf);
    EXPECT_NEAR(std::abs(res.value), 25.0, 1e-9);
    EXPECT_LT(std::abs(res.value - fourier_sum(inst.f, chi, psi, L).value), 1e-9 * 25);
    EXPECT_EQ(res.parts.chi_arg.value(), 19u);
  }
}

TEST(ClosedForm, VanishingWhenDualValueDivisible) {
  const ResidueRing r(5, 2);
  const auto cf = closed_form_S(builtin_instance("hyperbola"), MultChar(r, 1), AddChar(r, 1),
                                std::vector<std::uint64_t>{0, 1});
  EXPECT_TRUE(std::holds_alternative<Vanishing>(cf));
}

TEST(ClosedForm, SquareKappa) {
  const ResidueRing r(7, 2);
  const auto cf = closed_form_S(builtin_instance("square"), MultChar(r, 1), AddChar(r, 1), std::vector<std::uint64_t>{1});
  const auto& res = std::get<ClosedFormResult>(cf);
  EXPECT_EQ(res.parts.kappa, 1);
  EXPECT_NEAR(std::abs(res.value), 7.0, 1e-9);
}

TEST(ClosedForm, Preconditions) {
  const auto& inst = builtin_instance("hyperbola");
  EXPECT_THROW(closed_form_S(inst, MultChar(ResidueRing(5, 2), 5), AddChar(ResidueRing(5, 2), 1),
                             std::vector<std::uint64_t>{1, 1}),
               Error);
  EXPECT_THROW(closed_form_S(inst, MultChar(ResidueRing(5, 1), 1), AddChar(ResidueRing(5, 1), 1),
                             std::vector<std::uint64_t>{1, 1}),
               Error);
}

TEST(Policies, Parse) {
  EXPECT_EQ(LPolicy::parse("all").kind, LPolicy::Kind::All);
  EXPECT_EQ(LPolicy::parse("sample:7").count, 7u);
  const auto l = LPolicy::parse("list:1,2;3,4");
  ASSERT_EQ(l.list.size(), 2u);
  EXPECT_EQ(l.list[1][0], 3u);
  EXPECT_EQ(l.to_string(), "list:1,2;3,4");
  EXPECT_THROW(LPolicy::parse("some"), Error);
  EXPECT_THROW(LPolicy::parse("sample:x"), Error);
  EXPECT_EQ(ChiPolicy::parse("3").value, 3u);
  EXPECT_EQ(ChiPolicy::parse("sample:8").kind, ChiPolicy::Kind::Sample);
}

TEST(Verify, HyperbolaFullGrid) {
  VerifyConfig cfg;
  cfg.p = 5;
  cfg.m = 2;
  const auto rep = verify_instance(builtin_instance("hyperbola"), cfg);
  EXPECT_EQ(rep.records.size(), 625u * 16u);
  EXPECT_EQ(rep.count(Status::Mismatch), 0u);
  EXPECT_EQ(rep.count(Status::Match) + rep.count(Status::VanishMatch), rep.records.size());
  for (const auto& r : rep.records) {
    if (r.status == Status::VanishMatch) {
      EXPECT_GE(r.fdual_valuation, 1u);
    }
    if (r.status == Status::Match) {
      EXPECT_NEAR(std::abs(r.brute), 25.0, 1e-6 * 25);
    }
  }
  ASSERT_TRUE(rep.parseval);
  EXPECT_EQ(rep.parseval->status, "OK");
  EXPECT_FALSE(rep.has_mismatch());
}

TEST(Verify, ChiIndexMustBePrimitive) {
  VerifyConfig cfg;
  cfg.chi = ChiPolicy::parse("5");
  EXPECT_THROW(verify_instance(builtin_instance("linear"), cfg), Error);
}

TEST(Verify, BudgetGivesPartialReport) {
  VerifyConfig cfg;
  cfg.p = 5;
  cfg.m = 2;
  cfg.budget = 625 * 3;
  cfg.chi = ChiPolicy::parse("1");
  const auto rep = verify_instance(builtin_instance("hyperbola"), cfg);
  EXPECT_EQ(rep.records.size(), 3u);
  EXPECT_FALSE(rep.error.empty());
  EXPECT_EQ(rep.parseval->status, "SKIPPED_BUDGET");
}

TEST(Verify, SampledCharactersAreDistinctAndSorted) {
  VerifyConfig cfg;
  cfg.p = 7;
  cfg.m = 2;
  cfg.chi = ChiPolicy::parse("sample:8");
  cfg.L = LPolicy::parse("sample:3");
  cfg.parseval = false;
  const auto rep = verify_instance(builtin_instance("quadric-2"), cfg);
  ASSERT_EQ(rep.chis.size(), 8u);
  for (std::size_t i = 1; i < rep.chis.size(); ++i) EXPECT_LT(rep.chis[i - 1], rep.chis[i]);
  EXPECT_EQ(rep.count(Status::Mismatch), 0u);
}

TEST(Verify, ReplayCommand) {
  EXPECT_EQ(replay_command("det2", 5, 2, 3, 1, std::vector<std::uint64_t>{1, 2, 3, 4}),
            "phvs verify --instance det2 --p 5 --m 2 --chi 3 --psi 1 --L-policy list:1,2,3,4");
}

TEST(Trace, StagesAgree) {
  const ResidueRing r(7, 2);
  const auto tr = pipeline_trace(builtin_instance("quadric-2"), MultChar(r, 1), AddChar(r, 1),
                                 std::vector<std::uint64_t>{1, 0});
  ASSERT_EQ(tr.stages.size(), 3u);
  EXPECT_LT(tr.max_pairwise_delta, 1e-9 * 49);
  EXPECT_LT(tr.max_brute_delta, 1e-9 * 49);
  EXPECT_TRUE(tr.critical_value_identity);
  const ResidueRing s(5, 2);
  const auto one = pipeline_trace(builtin_instance("linear"), MultChar(s, 1), AddChar(s, 1), std::vector<std::uint64_t>{2});
  EXPECT_LT(one.max_pairwise_delta, 1e-9 * 5);
}

TEST(Sweep, MatchesEverywhereAtSmallPrime) {
  SweepConfig cfg;
  cfg.p = 7;
  cfg.m = 2;
  const auto s = sweep_all(builtin_instance("hyperbola"), cfg);
  EXPECT_EQ(s.L_count, 49u * 49u);
  EXPECT_EQ(s.pairs, s.L_count * s.chars);
  EXPECT_EQ(s.mismatch, 0u);
  EXPECT_EQ(s.match + s.vanish_match, s.pairs);
  EXPECT_LT(s.max_err, 1e-9);
  EXPECT_LT(s.crosscheck_max_err, 1e-9);
  EXPECT_LT(s.max_magnitude_dev, 1e-6);
}

TEST(Report, JsonShape) {
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  VerifyConfig cfg;
  cfg.p = 5;
  cfg.m = 2;
  cfg.L = LPolicy::parse("list:1,1;0,1");
  cfg.chi = ChiPolicy::parse("1");
  const auto rep = verify_instance(builtin_instance("hyperbola"), cfg);
  const std::string json = to_json(rep, false);
  EXPECT_EQ(json.find("\"seconds\""), std::string::npos);
  EXPECT_NE(to_json(rep, true).find("\"seconds\""), std::string::npos);
  EXPECT_NE(json.find("\"vanishing\""), std::string::npos);
  EXPECT_NE(json.find("\"status\": \"MATCH\""), std::string::npos);
  const std::string csv = to_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
