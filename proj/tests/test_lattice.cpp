#include <gtest/gtest.h>

#include <random>

#include "tripillai/lattice.hpp"
#include "tripillai/tribonacci.hpp"

using namespace tripillai;

namespace {

Lattice from_cols(const std::vector<VecZ>& cols) {
  Lattice l;
  l.cols = cols;
  return l;
}

// Shortest nonzero vector over |coeffs| <= r.
mpz_class brute_svp_sq(const Lattice& l, int r) {
  mpz_class best = -1;
  const int k = l.rank();
  std::vector<int> c(k, -r);
  for (;;) {
    bool zero = true;
    for (int x : c) zero = zero && x == 0;
    if (!zero) {
      VecZ v(k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) v[i] += c[j] * l.cols[j][i];
      mpz_class n = detail::dot(v, v);
      if (best < 0 || n < best) best = n;
    }
    int i = 0;
    while (i < k && c[i] == r) c[i++] = -r;
    if (i == k) break;
    ++c[i];
  }
  return best;
}

// Closest lattice vector to t over |coeffs| <= r, excluding t itself.
mpz_class brute_cvp_sq(const Lattice& l, const VecZ& t, int r) {
  mpz_class best = -1;
  const int k = l.rank();
  std::vector<int> c(k, -r);
  for (;;) {
    VecZ v(k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) v[i] += c[j] * l.cols[j][i];
    for (int i = 0; i < k; ++i) v[i] -= t[i];
    mpz_class n = detail::dot(v, v);
    if (n > 0 && (best < 0 || n < best)) best = n;
    int i = 0;
    while (i < k && c[i] == r) c[i++] = -r;
    if (i == k) break;
    ++c[i];
  }
  return best;
}

const mpz_class kM112 = parse_integer("1e112");

ReductionProblem reference_problem(const char* M, RealBall c3, RealBall c4, bool pos) {
  ReductionProblem pr;
  pr.etas = {lazy_log(2), lazy_log(3), lazy_log_alpha()};
  pr.eta0 = lazy_log_c_alpha();
  pr.M = parse_integer(M);
  if (pos)
    pr.A = {parse_integer("1.1e37"), parse_integer("6.8e36"), parse_integer("1.2e37")};
  else
    pr.A = {parse_integer("5.5e29"), parse_integer("3.5e29"), parse_integer("6.1e29")};
  pr.c3 = c3;
  pr.c4 = c4;
  return pr;
}

}  // namespace

TEST(Lll, IdentityUnchanged) {
  Lattice id = from_cols({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  Lattice r = lll_reduce(id);
  EXPECT_EQ(r.cols, id.cols);
}

TEST(Lll, SmallExample) {
  Lattice l = from_cols({{1, 1, 1}, {-1, 0, 2}, {3, 5, 6}});
  EXPECT_EQ(abs(determinant(l)), 3);
  Lattice r = lll_reduce(l);
  EXPECT_EQ(abs(determinant(r)), 3);
  EXPECT_TRUE(is_lll_reduced(r));
  mpz_class svp = brute_svp_sq(l, 10);
  EXPECT_EQ(svp, 1);
  EXPECT_LE(detail::dot(r.cols[0], r.cols[0]), 4 * svp);  // (2^((k-1)/2))^2
  EXPECT_EQ(r.cols[0], (VecZ{0, 1, 0}));
  EXPECT_EQ(r.cols[1], (VecZ{1, 0, 1}));
  EXPECT_EQ(r.cols[2], (VecZ{-1, 0, 2}));
}

TEST(Lll, Euclidean2x2) {
  Lattice r = lll_reduce(from_cols({{1, 0}, {mpz_class(1000000000), 1}}));
  EXPECT_EQ(abs(r.cols[0][0]) + abs(r.cols[0][1]), 1);
  EXPECT_EQ(abs(r.cols[1][0]) + abs(r.cols[1][1]), 1);
  EXPECT_EQ(r.cols[0][0] * r.cols[1][0] + r.cols[0][1] * r.cols[1][1], 0);
}

TEST(Lll, SingularRejected) {
  EXPECT_THROW(lll_reduce(from_cols({{1, 2}, {2, 4}})), PreconditionError);
}

TEST(Lll, RandomInvariants) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<long> ent(-1000000, 1000000);
  for (int trial = 0; trial < 25; ++trial) {
    Lattice l = from_cols({{ent(rng), ent(rng), ent(rng)}, {ent(rng), ent(rng), ent(rng)}, {ent(rng), ent(rng), ent(rng)}});
    mpz_class d = abs(determinant(l));
    if (d == 0) continue;
    Lattice r = lll_reduce(l);
    EXPECT_EQ(abs(determinant(r)), d);
    EXPECT_TRUE(is_lll_reduced(r));
  }
}

TEST(Gap, IdentityLatticePoint) {
  Lattice id = from_cols({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  LatticeGap g = lattice_gap(id, {0, 0, 0});
  EXPECT_TRUE(g.in_lattice);
  EXPECT_EQ(g.sigma, 1);
  EXPECT_EQ(g.c1_sq, 1);
  EXPECT_EQ(g.c2_sq, 1);
  EXPECT_EQ(closest_distance_sq(id, {0, 0, 0}), 1);
}

TEST(Gap, RandomTargetsAgainstBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> ent(-9, 9), tgt(-6, 6);
  int checked = 0;
  while (checked < 20) {
    Lattice l = from_cols({{ent(rng), ent(rng), ent(rng)}, {ent(rng), ent(rng), ent(rng)}, {ent(rng), ent(rng), ent(rng)}});
    if (determinant(l) == 0) continue;
    Lattice r = lll_reduce(l);
    VecZ t{tgt(rng), tgt(rng), tgt(rng)};
    GramSchmidt gs = gram_schmidt(r);
    LatticeGap g = lattice_gap(r, t, &gs);
    mpz_class brute = brute_cvp_sq(r, t, 25);
    EXPECT_LE(g.c2_sq, mpq_class(brute));
    EXPECT_EQ(closest_distance_sq(r, t, &gs), mpq_class(brute));
    ++checked;
  }
}

TEST(ApproxLattice, OneDimensional) {
  ReductionProblem pr;
  pr.etas = {LazyReal([](prec_t p) { return RealBall::exact(mpq_class(1, 2), p); })};
  pr.M = 10;
  auto [lat, v] = build_approx_lattice(pr);
  ASSERT_EQ(lat.rank(), 1);
  EXPECT_EQ(lat.at(0, 0), 5);
  EXPECT_EQ(v[0], 0);
}

TEST(ApproxLattice, CertifiedLastRow) {
  ReductionProblem pr = reference_problem("1e112", RealBall::exact(15, 256), log_alpha_ball(256), true);
  auto [lat, v] = build_approx_lattice(pr);
  EXPECT_EQ(lat.at(0, 0), 1);
  EXPECT_EQ(lat.at(1, 1), 1);
  EXPECT_EQ(lat.at(2, 0), mpz_class("6931471805599453094172321214581765680755001343602552541206800094933936219696947156058633269964186875420014810205"));
  EXPECT_EQ(lat.at(2, 1), mpz_class("10986122886681096913952452369225257046474905578227494517346943336374942932186089668736157548137320887879700290659"));
  EXPECT_EQ(lat.at(2, 2), mpz_class("6093778634360062315368033711683986954285392793128541477762892366225152051203195768397057073419585497249233347078"));
  EXPECT_EQ(v[2], mpz_class("4805875663167974071894948319620912587929132789067166296626179185248482794909197061143549443000831762820836493421"));
}

TEST(ApproxLattice, GapBelowNeedAtFirstScale) {
  // l(L, v) is about 6.6e36 here, below sqrt(T^2 + S) of about 2e37.
  ReductionProblem pr = reference_problem("1e112", RealBall::exact(15, 256), log_alpha_ball(256), true);
  auto [lat, v] = build_approx_lattice(pr);
  Lattice r = lll_reduce(lat);
  mpq_class d = closest_distance_sq(r, v);
  EXPECT_GT(d, mpq_class(parse_integer("4e73")));
  EXPECT_LT(d, mpq_class(parse_integer("5e73")));
  EXPECT_THROW(deweger_bound(pr, 0), ReductionError);
}

TEST(Deweger, PositiveFirst) {
  DewegerResult r = deweger_bound(reference_problem("1e112", RealBall::exact(15, 256), log_alpha_ball(256), true));
  EXPECT_EQ(r.retries, 2);
  EXPECT_EQ(r.M, parse_integer("1e114"));
  EXPECT_LE(r.H, 300);
  EXPECT_GE(r.H, 285);
}

TEST(Deweger, PositiveSecondBatch) {
  ReductionProblem pr = reference_problem("1e113", RealBall::decimal("4.5", 256), RealBall::exact(1, 256), true);
  std::vector<LazyReal> targets;
  for (unsigned long d = 1; d <= 285; ++d) targets.push_back(lazy_log_c_alpha_shift(d));
  BatchResult b = deweger_batch(pr, targets);
  EXPECT_EQ(b.items.size(), 285u);
  EXPECT_LE(b.H_max, 185);
  EXPECT_GE(b.H_max, 174);
}

TEST(Deweger, NegativeBoth) {
  DewegerResult a = deweger_bound(reference_problem("1e90", RealBall::decimal("4.5", 256), RealBall::exact(1, 256), false));
  EXPECT_LE(a.H, 150);
  EXPECT_GE(a.H, 138);
  DewegerResult b = deweger_bound(reference_problem("1e90", RealBall::decimal("1.5e50", 256), log_alpha_ball(256), false));
  EXPECT_LE(b.H, 440);
  EXPECT_GE(b.H, 417);
}

TEST(Deweger, InputGuards) {
  ReductionProblem pr = reference_problem("1e112", RealBall::exact(15, 256), log_alpha_ball(256), true);
  pr.A.pop_back();
  EXPECT_THROW(deweger_bound(pr), PreconditionError);
}
