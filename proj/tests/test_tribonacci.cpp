#include <gtest/gtest.h>

#include <random>

#include "tripillai/tribonacci.hpp"

using namespace tripillai;

TEST(Trib, SeedsAndListedValues) {
  EXPECT_EQ(trib(0), 0);
  EXPECT_EQ(trib(9), 81);
  EXPECT_EQ(trib(12), 504);
  const long listed[] = {0, 1, 1, 2, 4, 7, 13, 24, 44, 81, 149, 274, 504};
  for (int n = 0; n <= 12; ++n) EXPECT_EQ(trib(n), listed[n]) << n;
}

TEST(Trib, MatrixAgreesWithRecurrence) {
  for (std::uint64_t n : {0, 1, 2, 3, 50, 333, 1000}) EXPECT_EQ(trib_matrix(n), trib(n)) << n;
}

TEST(Trib, Residues) {
  EXPECT_EQ(trib_mod(12, 10), 4u);
  EXPECT_EQ(trib_mod(0, 7), 0u);
  std::uint64_t a = 0, b = 1, c = 1;
  for (int k = 0; k < 1000000; ++k) {
    std::uint64_t d = (a + b + c) & 255;
    a = b;
    b = c;
    c = d;
  }
  EXPECT_EQ(trib_mod(1000000, 256), a);
  EXPECT_EQ(trib_mod(1000000 % 512, 256), a);
  EXPECT_EQ(trib_mod(mpz_class("123456789012345678901234567890"), mpz_class(1000003)),
            trib_mod(mpz_class("123456789012345678901234567890") % period_mod(1000003), mpz_class(1000003)));
}

TEST(Trib, Periods) {
  EXPECT_EQ(period_mod(8), 16u);
  EXPECT_EQ(period_mod(3), 13u);
  EXPECT_EQ(period_mod(9), 39u);
  for (unsigned k = 1; k <= 10; ++k) EXPECT_EQ(period_mod(1ull << k), 1ull << (k + 1)) << k;
}

TEST(Trib, Window) {
  TribWindow w = trib_window(10, 3);
  EXPECT_EQ(w.at(10), 149);
  EXPECT_EQ(w.at(12), 504);
}

TEST(Constants, Enclosures) {
  const FieldConstants& f = cached_constants(128);
  EXPECT_TRUE(certainly_gt(f.alpha, mpq_class(183, 100)) && certainly_lt(f.alpha, mpq_class(184, 100)));
  EXPECT_TRUE(certainly_gt(f.beta_abs, mpq_class(73, 100)) && certainly_lt(f.beta_abs, mpq_class(74, 100)));
  EXPECT_TRUE(certainly_gt(f.c_alpha, mpq_class(61, 100)) && certainly_lt(f.c_alpha, mpq_class(62, 100)));
  EXPECT_TRUE(certainly_gt(f.c_beta_abs, mpq_class(19, 100)) && certainly_lt(f.c_beta_abs, mpq_class(20, 100)));
}

TEST(Constants, LogAlphaOracle) {
  // 0.609377863436006231536803371168 (300-digit independent evaluation)
  RealBall l = log_alpha_ball(128);
  EXPECT_TRUE(certainly_gt(l, mpq_class("609377863436006231536803371167/1000000000000000000000000000000")));
  EXPECT_TRUE(certainly_lt(l, mpq_class("609377863436006231536803371169/1000000000000000000000000000000")));
}

TEST(Binet, Residuals) {
  EXPECT_TRUE(binet_residual_check(0).ok);
  CheckReport r = binet_residual_check(1000);
  EXPECT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(r.checked, 1001u);
}

TEST(Growth, EdgesAtOneAndTwo) {
  GrowthReport g = growth_check(1000);
  EXPECT_TRUE(g.holds_from_3);
  EXPECT_FALSE(g.strict_all);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].n, 1u);
  EXPECT_EQ(g.edges[0].right, Verdict::fails);  // T_1 = 1 = alpha^0
  EXPECT_EQ(g.edges[1].n, 2u);
  EXPECT_EQ(g.edges[1].left, Verdict::fails);   // T_2 = 1 = alpha^0
}

TEST(Gamma, InversesAreExact) {
  const SplitElem one = SplitElem::constant(1);
  EXPECT_EQ(SplitElem::alpha() * SplitElem::alpha_inv(), one);
  EXPECT_EQ(SplitElem::gamma() * SplitElem::gamma_inv(), one);
  // alpha^3 = alpha^2 + alpha + 1
  EXPECT_EQ(SplitElem::alpha().pow(3), SplitElem::alpha().pow(2) + SplitElem::alpha() + one);
}

TEST(Gamma, PairTwoOneDiffers) {
  GammaPair g = gamma_pair_check(2, 1);
  EXPECT_TRUE(g.differ);
  EXPECT_NE(g.norm, 0);
}

TEST(Gamma, FourThreeCoincides) {
  // At any root of x^3 - x^2 - x - 1, (1 - x^3)/(1 - x^4) = 1/2.
  GammaPair g = gamma_pair_check(4, 3);
  EXPECT_FALSE(g.differ);
  EXPECT_EQ(g.norm, 0);
  EXPECT_FALSE(gamma_pair_check(4, 1).differ_inverse);
}

TEST(Gamma, BoxReport) {
  GammaReport r = gamma_lemma_check();
  EXPECT_EQ(r.pairs.size(), 18u);
  std::size_t differ = 0;
  for (const auto& p : r.pairs) differ += p.differ;
  EXPECT_EQ(differ, 17u);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.ok_inverse);
}

TEST(Gamma, DomainGuard) { EXPECT_THROW(gamma_pair_check(1, 1), PreconditionError); }
