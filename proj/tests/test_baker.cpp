#include <gtest/gtest.h>

#include "tripillai/baker.hpp"

using namespace tripillai;

namespace {

// |b - v| <= tol * |v|
bool near(const RealBall& b, double v, double tol = 1e-12) {
  return std::abs(b.to_double() - v) <= tol * std::abs(v) && b.radius_double() <= tol * std::abs(v);
}

}  // namespace

TEST(Height, Polynomials) {
  EXPECT_TRUE(near(log_height(c_alpha_poly()), 1.261396544639420387632136));  // log(44)/3
  EXPECT_TRUE(near(log_height(PolyZ::from_leading({1, -2})), 0.6931471805599453));
  EXPECT_TRUE(near(log_height(psi_poly()), 0.2031259544786687438456011));      // log(alpha)/3
}

TEST(Height, SexticUncertified) { EXPECT_THROW(log_height(z_poly()), CertificationError); }

TEST(Matveev, SmallestInstance) {
  const prec_t p = 256;
  RealBall a = RealBall::exact(mpq_class(16, 100), p);
  EXPECT_TRUE(near(matveev_factor(2, 1, {a, a}, p) * (1 + ball_log(RealBall::exact(3, p))), 41356279.966238112569));
}

TEST(Matveev, FourTermsAtThreeEleven) {
  const prec_t p = 256;
  RealBall l2 = ball_log(RealBall::exact(2, p)), l3 = ball_log(RealBall::exact(3, p));
  MatveevInstance in{4, 3, RealBall::exact(311, p),
                     {3 * l2, 3 * l3, ball_log(RealBall::exact(44, p)), log_alpha_ball(p)}};
  RealBall k = matveev_lower(in, p) / ball_log(RealBall::exact(311, p));
  EXPECT_TRUE(near(k, 5494697879697831.0248));
  EXPECT_TRUE(certainly_lt(k, mpq_class(mpz_class("5600000000000000"))));
}

TEST(Matveev, Guards) {
  RealBall a = RealBall::exact(mpq_class(1, 10), 128);
  EXPECT_THROW(matveev_factor(2, 1, {a, a}), PreconditionError);
  EXPECT_THROW(matveev_factor(1, 1, {a}), PreconditionError);
}

TEST(BugeaudLaurent, FloorBranch) {
  const prec_t p = 256;
  BLInstance in{2, 1, 1, RealBall::exact(10, p), RealBall::exact(10, p), RealBall::exact(1, p), RealBall::exact(1, p)};
  EXPECT_TRUE(bl_E(in, p).contains(10));
  EXPECT_TRUE(near(bl_upper(in, p), 2079406.480844314634));
}

TEST(GrowthLemma, Values) {
  EXPECT_TRUE(near(guzman_luca(1, RealBall::exact(17, 256)), 96.329253697911346728));
  RealBall n3 = guzman_luca(3, RealBall::decimal("4.1e30", 256));
  EXPECT_TRUE(near(n3, 1.1487602123415606255e37));
  EXPECT_TRUE(certainly_lt(n3, mpq_class(parse_integer("1.2e37"))));
  RealBall n4 = guzman_luca(4, RealBall::decimal("6e21", 256));
  EXPECT_TRUE(near(n4, 6.070410026773154407e29));
  EXPECT_TRUE(certainly_lt(n4, mpq_class(parse_integer("6.1e29"))));
  EXPECT_THROW(guzman_luca(2, RealBall::exact(64, 128)), PreconditionError);
}

TEST(Window, AtThreeEleven) {
  auto [lo, hi] = x_window(mpz_class(311));
  EXPECT_TRUE(near(lo, 186.5165155285979380079458));
  EXPECT_TRUE(near(hi, 1839.78833585122626829903));
  EXPECT_THROW(x_window(mpz_class(310)), PreconditionError);
}

TEST(Window, FinalEdgeConsistent) {
  // n = 953 keeps n log(alpha) - 3 below 578; n = 954 does not.
  EXPECT_TRUE(certainly_lt(x_window(mpz_class(953)).first, mpq_class(578)));
  EXPECT_FALSE(certainly_lt(x_window(mpz_class(954)).first, mpq_class(578)));
}

class Chain : public ::testing::TestWithParam<Scenario> {};

TEST_P(Chain, EveryLinkWithinReference) {
  ChainResult r = bound_chain(GetParam());
  EXPECT_GE(r.certs.size(), 15u);
  for (const auto& c : r.certs) {
    EXPECT_TRUE(c.within_reference()) << c.name;
    RealBall again = c.recompute();
    EXPECT_TRUE(certainly_le(again, c.value + RealBall::exact(mpq_class(1, 1000000), 256) * c.value)) << c.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Chain, ::testing::Values(Scenario::positive, Scenario::negative));

TEST(Chain, PositiveHeadlineBounds) {
  ChainResult r = bound_chain(Scenario::positive);
  EXPECT_LT(r.n_bound, parse_integer("1.2e37"));
  EXPECT_TRUE(certainly_le(r.at("pos/n_gap").value, RealBall::decimal("9.6e15", 256)));
  EXPECT_TRUE(near(r.at("pos/n_gap").value, 9.016898e15, 1e-6));
  EXPECT_TRUE(near(r.at("pos/n_abs").value, 1.044639e37, 1e-6));
}

TEST(Chain, NegativeHeadlineBounds) {
  ChainResult r = bound_chain(Scenario::negative);
  EXPECT_LT(r.n_bound, parse_integer("6.1e29"));
  EXPECT_LT(r.x_bound, parse_integer("5.5e29"));
  EXPECT_LT(r.y_bound, parse_integer("3.5e29"));
}

TEST(Chain, ZeroScenarioHasNoChain) { EXPECT_THROW(bound_chain(Scenario::zero), PreconditionError); }
