#include <gtest/gtest.h>

#include <cmath>

#include "tripillai/arithmetic.hpp"

using namespace tripillai;

TEST(Ball, ExactRationalIsEnclosed) {
  RealBall b = RealBall::exact(mpq_class(1, 3), 64);
  EXPECT_TRUE(b.contains(mpq_class(1, 3)));
  EXPECT_FALSE(b.contains(mpq_class(1, 2)));
}

TEST(Ball, OutwardRoundingKeepsSums) {
  RealBall t = RealBall::exact(mpq_class(1, 3), 32);
  RealBall s = t + t + t;
  EXPECT_TRUE(s.contains(1));
  RealBall p = RealBall::exact(mpq_class(1, 7), 32) * 7;
  EXPECT_TRUE(p.contains(1));
}

TEST(Ball, LogOfOneIsTight) {
  RealBall one = RealBall::exact(1, 128);
  RealBall l = ball_log(one);
  EXPECT_TRUE(l.contains(0));
  EXPECT_LE(l.radius_double(), 1e-30);
}

TEST(Ball, LogTwoSelfConsistent) {
  RealBall l2 = ball_log(RealBall::exact(2, 256));
  RealBall q = l2 * (1 / l2);
  EXPECT_TRUE(q.contains(1));
  EXPECT_LT(q.radius_double(), 1e-70);
}

TEST(Roots, TribonacciRoot) {
  RealBall a = refine_root(PolyZ::from_leading({1, -1, -1, -1}), {1, 2}, 64);
  EXPECT_TRUE(certainly_gt(a, mpq_class(183, 100)));
  EXPECT_TRUE(certainly_lt(a, mpq_class(184, 100)));
  // 1.83928675521416113255185256465
  EXPECT_TRUE(certainly_gt(a, mpq_class("183928675521416113/100000000000000000")));
  EXPECT_TRUE(certainly_lt(a, mpq_class("183928675521416114/100000000000000000")));
}

TEST(Roots, LinearHitsExactly) {
  RealBall r = refine_root(PolyZ::from_leading({1, -2}), {1, 3}, 10);
  EXPECT_TRUE(r.contains(2));
  EXPECT_LE(r.radius_double(), std::ldexp(1.0, -10));
}

TEST(Roots, LeadingCoefficientRoot) {
  RealBall c = refine_root(PolyZ::from_leading({44, -44, 12, -1}), {mpq_class(1, 2), 1}, 64);
  EXPECT_TRUE(certainly_gt(c, mpq_class(61, 100)));
  EXPECT_TRUE(certainly_lt(c, mpq_class(62, 100)));
}

TEST(Roots, NonIsolatingIntervalRejected) {
  EXPECT_THROW(refine_root(PolyZ::from_leading({1, 0, -1}), {-2, 2}, 32), CertificationError);
}

TEST(FloorScaled, ExactHalf) { EXPECT_EQ(floor_scaled(RealBall::exact(mpq_class(1, 2), 64), 10), 5); }

TEST(FloorScaled, LogTwoMillion) { EXPECT_EQ(floor_scaled(lazy_log(2), 1000000), 693147); }

TEST(FloorScaled, StraddlingBallFails) {
  RealBall b = RealBall::from_endpoints(Float::from_q(mpq_class(9, 10), 64, MPFR_RNDD),
                                        Float::from_q(mpq_class(11, 10), 64, MPFR_RNDU), 64);
  EXPECT_THROW(floor_scaled(b, 1), CertificationError);
}

TEST(FloorScaled, PrecisionCapReached) {
  PrecisionPolicy tight{32, 64};
  EXPECT_THROW(floor_scaled(lazy_log(2), parse_integer("1e112"), tight), CertificationError);
}

TEST(FloorScaled, LatticeScaleLogs) {
  const mpz_class M = parse_integer("1e112");
  EXPECT_EQ(floor_scaled(lazy_log(2), M),
            mpz_class("6931471805599453094172321214581765680755001343602552541206800094933936219696947156058633269964186875420014810205"));
  EXPECT_EQ(floor_scaled(lazy_log(3), M),
            mpz_class("10986122886681096913952452369225257046474905578227494517346943336374942932186089668736157548137320887879700290659"));
}

TEST(ParseInteger, Forms) {
  EXPECT_EQ(parse_integer("1.2e37"), mpz_class(12) * pow10(36));
  EXPECT_EQ(parse_integer("10^113"), pow10(113));
  EXPECT_EQ(parse_integer("1e48"), pow10(48));
  EXPECT_EQ(parse_integer("285"), 285);
  EXPECT_THROW(parse_integer("1.25e1"), PreconditionError);
}
