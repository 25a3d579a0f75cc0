#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tripillai/arithmetic.hpp"
#include "tripillai/tribonacci.hpp"

namespace tripillai {

// ---------------------------------------------------------------------------
// Heights

namespace detail {

// Real roots of p, each as a ball of radius <= 2^-bits.
inline std::vector<RealBall> real_roots(const PolyZ& p, unsigned bits) {
  mpq_class bound = 1;
  for (int i = 0; i < p.degree(); ++i) {
    mpq_class r(abs(p[i]), abs(p.leading()));
    if (r + 1 > bound) bound = r + 1;
  }
  SturmChain sturm(p);
  std::vector<RealBall> out;
  std::vector<std::pair<mpq_class, mpq_class>> work{{-bound - 1, bound + 1}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    int k = sturm.count(a, b);
    if (k == 0) continue;
    if (k == 1 && p.sign_at(a) != 0) {
      out.push_back(refine_root(p, {a, b}, bits));
      continue;
    }
    mpq_class m = (a + b) / 2;
    if (p.sign_at(m) == 0) {
      out.push_back(RealBall::exact(m, bits + 64));
      // Nudge the split so neither half has the root on its open end.
      mpq_class eps = (b - a) / 1024;
      work.push_back({a, m - eps});
      work.push_back({m + eps, b});
      continue;
    }
    work.push_back({a, m});
    work.push_back({m, b});
  }
  return out;
}

}  // namespace detail

// Absolute logarithmic height of a root of the minimal polynomial poly.
// Handles any number of real roots and at most one complex pair.
inline RealBall log_height(const PolyZ& poly, prec_t prec = 128) {
  require(poly.degree() >= 1, "constant polynomial");
  require(poly.leading() > 0, "leading coefficient must be positive");
  mpz_class content = 0;
  for (const auto& c : poly.coeffs()) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
  require(content == 1, "polynomial must be primitive");

  const int d = poly.degree();
  std::vector<RealBall> roots = detail::real_roots(poly, static_cast<unsigned>(prec) + 16);
  RealBall one = RealBall::exact(1, prec);
  RealBall sum = ball_log(RealBall::exact(poly.leading(), prec));
  for (const auto& r : roots) sum = sum + ball_log(ball_max(ball_abs(r.with_prec(prec)), one));

  const int complex_roots = d - static_cast<int>(roots.size());
  if (complex_roots == 2) {
    if (poly[0] == 0) throw CertificationError("roots uncertified");
    // |z|^2 = |a_0 / a_d| / prod |real roots|
    RealBall mod2 = RealBall::exact(mpq_class(abs(poly[0]), poly.leading()), prec);
    for (const auto& r : roots) mod2 = mod2 / ball_abs(r.with_prec(prec));
    sum = sum + ball_log(ball_max(mod2, one));
  } else if (complex_roots != 0) {
    throw CertificationError("roots uncertified");
  }
  return sum / d;
}

// ---------------------------------------------------------------------------
// Matveev

struct MatveevInstance {
  int t = 2;
  int D = 1;
  RealBall B;                 // max |b_i|
  std::vector<RealBall> A;    // A_i >= max(D h(l_i), |log l_i|, 0.16)
};

// 1.4 * 30^(t+3) * t^4.5 * D^2 (1 + log D) * prod A_i, the part of the
// bound that does not depend on B.
inline RealBall matveev_factor(int t, int D, const std::vector<RealBall>& A, prec_t prec = 256) {
  require(t >= 2 && D >= 1, "Matveev needs t >= 2, D >= 1");
  require(static_cast<int>(A.size()) == t, "need exactly t values A_i");
  mpz_class p30;
  mpz_ui_pow_ui(p30.get_mpz_t(), 30, static_cast<unsigned long>(t + 3));
  RealBall k = RealBall::exact(mpq_class(7, 5), prec) * RealBall::exact(p30, prec);
  RealBall tb = RealBall::exact(t, prec);
  k = k * ball_pow(tb, 4) * ball_sqrt(tb);
  k = k * RealBall::exact(static_cast<long>(D) * D, prec) * (1 + ball_log(RealBall::exact(D, prec)));
  const RealBall floor016 = RealBall::exact(mpq_class(16, 100), prec);
  for (const auto& a : A) {
    require(!certainly_lt(a, floor016), "A_i below 0.16");
    k = k * a.with_prec(prec);
  }
  return k;
}

// K with log |Lambda| > -K.
inline RealBall matveev_lower(const MatveevInstance& inst, prec_t prec = 256) {
  require(!certainly_lt(inst.B, RealBall::exact(3, prec)), "Matveev needs B >= 3");
  return matveev_factor(inst.t, inst.D, inst.A, prec) * (1 + ball_log(inst.B.with_prec(prec)));
}

// ---------------------------------------------------------------------------
// Bugeaud-Laurent

struct BLInstance {
  int p = 2;
  int g = 1;
  int D = 1;
  RealBall h1, h2;  // modified heights h'(l_1), h'(l_2)
  RealBall b1, b2;
};

// 24 p g / ((p - 1) (log p)^4) * D^4
inline RealBall bl_prefactor(int p, int g, int D, prec_t prec = 256) {
  RealBall lp = ball_log(RealBall::exact(p, prec));
  RealBall num = RealBall::exact(24L * p * g, prec) * RealBall::exact(static_cast<long>(D) * D * D * D, prec);
  return num / (RealBall::exact(p - 1, prec) * ball_pow(lp, 4));
}

inline RealBall bl_E(const BLInstance& in, prec_t prec = 256) {
  RealBall lp = ball_log(RealBall::exact(in.p, prec));
  RealBall ep = in.b1.with_prec(prec) / in.h2.with_prec(prec) + in.b2.with_prec(prec) / in.h1.with_prec(prec);
  RealBall e1 = ball_log(ep) + ball_log(lp) + RealBall::exact(mpq_class(2, 5), prec);
  return ball_max(ball_max(e1, RealBall::exact(10, prec)), lp * 10);
}

// Upper bound on nu_p(l_1^b1 l_2^b2 - 1).
inline RealBall bl_upper(const BLInstance& in, prec_t prec = 256) {
  require(in.p == 2 || in.p == 3, "p must be 2 or 3");
  require(in.g >= 1 && in.D >= 1, "g, D must be positive");
  RealBall floor_h = ball_log(RealBall::exact(in.p, prec)) / in.D;
  require(!certainly_lt(in.h1, floor_h) && !certainly_lt(in.h2, floor_h), "h' below log p / D");
  RealBall e = bl_E(in, prec);
  return bl_prefactor(in.p, in.g, in.D, prec) * e * e * in.h1.with_prec(prec) * in.h2.with_prec(prec);
}

// ---------------------------------------------------------------------------
// Growth lemmas

// z < 2^m T (log T)^m whenever T > z / (log z)^m and T > (4 m^2)^m.
inline RealBall guzman_luca(int m, const RealBall& T) {
  require(m >= 1, "m must be >= 1");
  prec_t p = T.prec();
  mpz_class thr;
  mpz_ui_pow_ui(thr.get_mpz_t(), 4ul * m * m, static_cast<unsigned long>(m));
  if (!certainly_gt(T, mpq_class(thr))) throw PreconditionError("threshold too small");
  mpz_class two_m = mpz_class(1) << m;
  return RealBall::exact(two_m, p) * T * ball_pow(ball_log(T), static_cast<unsigned long>(m));
}

// n log(alpha) - 3 < X < n log(alpha) + 60 (log(n log alpha))^2 for n > 310.
inline std::pair<RealBall, RealBall> x_window(const RealBall& n, prec_t prec = 256) {
  if (!certainly_gt(n, mpq_class(310))) throw PreconditionError("hypothesis violated: n must exceed 310");
  RealBall nl = n.with_prec(prec) * log_alpha_ball(prec);
  RealBall l = ball_log(nl);
  return {nl - 3, nl + l * l * 60};
}
inline std::pair<RealBall, RealBall> x_window(const mpz_class& n, prec_t prec = 256) {
  return x_window(RealBall::exact(n, prec), prec);
}

// ---------------------------------------------------------------------------
// Certificates and chains

struct BoundCertificate {
  std::string name;       // e.g. "pos/n_gap"
  std::string rule;       // which bound produced it
  std::string shape;      // the value multiplies this factor, e.g. "log n"
  RealBall value;
  std::optional<std::string> reference;  // published constant it must not exceed (with 5% slack)
  std::vector<std::pair<std::string, RealBall>> inputs;
  std::function<RealBall(const std::vector<RealBall>&)> formula;

  RealBall recompute() const {
    std::vector<RealBall> v;
    for (const auto& kv : inputs) v.push_back(kv.second);
    return formula(v);
  }
  // Derived value may exceed the reference by at most 5%.
  bool within_reference() const {
    if (!reference) return true;
    RealBall lim = RealBall::decimal(*reference, value.prec()) * RealBall::exact(mpq_class(105, 100), value.prec());
    return certainly_le(value, lim);
  }
};

enum class Scenario { positive, negative, zero };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::positive: return "positive";
    case Scenario::negative: return "negative";
    default: return "zero";
  }
}
inline Scenario parse_scenario(const std::string& s) {
  if (s == "positive" || s == "positive_c" || s == "pos") return Scenario::positive;
  if (s == "negative" || s == "negative_c" || s == "neg") return Scenario::negative;
  if (s == "zero" || s == "zero_c") return Scenario::zero;
  throw PreconditionError("unknown scenario: " + s);
}

struct ChainResult {
  Scenario scenario = Scenario::positive;
  std::vector<BoundCertificate> certs;
  mpz_class n_bound, x_bound, y_bound;  // strict integer upper bounds

  const BoundCertificate& at(const std::string& name) const {
    for (const auto& c : certs)
      if (c.name == name) return c;
    throw PreconditionError("no certificate named " + name);
  }
};

namespace detail {

class ChainBuilder {
 public:
  explicit ChainBuilder(prec_t prec) : prec_(prec) {}

  RealBall add(std::string name, std::string rule, std::string shape, std::optional<std::string> ref,
               std::vector<std::pair<std::string, RealBall>> inputs,
               std::function<RealBall(const std::vector<RealBall>&)> f) {
    std::vector<RealBall> v;
    for (const auto& kv : inputs) v.push_back(kv.second);
    BoundCertificate c{std::move(name), std::move(rule), std::move(shape), f(v), std::move(ref),
                       std::move(inputs), std::move(f)};
    if (!c.within_reference()) throw CertificationError("chain mismatch at " + c.name + ": " + c.value.str(6) +
                                                        " exceeds " + *c.reference + " by more than 5%");
    certs_.push_back(c);
    return c.value;
  }
  std::vector<BoundCertificate> take() { return std::move(certs_); }
  prec_t prec() const { return prec_; }

 private:
  prec_t prec_;
  std::vector<BoundCertificate> certs_;
};

}  // namespace detail

// Re-derives every constant of the absolute bound for the scenario.
inline ChainResult bound_chain(Scenario sc, prec_t prec = 256) {
  require(sc != Scenario::zero, "the zero scenario has no bound chain");
  detail::ChainBuilder cb(prec);
  auto X = [prec](long v) { return RealBall::exact(v, prec); };
  auto Q = [prec](long a, long b) { return RealBall::exact(mpq_class(a, b), prec); };
  const RealBall l2 = ball_log(X(2)), l3 = ball_log(X(3)), la = log_alpha_ball(prec);
  const RealBall l311 = ball_log(X(311)), l36100 = ball_log(X(36100));
  const bool pos = sc == Scenario::positive;
  const std::string pre = pos ? "pos/" : "neg/";

  // A_i from heights of 2, 3, C_alpha, alpha over a cubic field.
  const RealBall A1 = 3 * log_height(PolyZ{-2, 1}, prec), A2 = 3 * log_height(PolyZ{-3, 1}, prec);
  const RealBall A_c = 3 * log_height(c_alpha_poly(), prec), A_a = 3 * log_height(psi_poly(), prec);

  // (1 + log n) <= (1 + 1/log 311) log n for n > 310.
  RealBall matveev = cb.add(pre + "matveev", "matveev", "log n", pos ? "5.6e15" : "5.5e15",
                            {{"A1", A1}, {"A2", A2}, {"A3", A_c}, {"A4", A_a}, {"log311", l311}},
                            [](const std::vector<RealBall>& v) {
                              return matveev_factor(4, 3, {v[0], v[1], v[2], v[3]}, v[0].prec()) * (1 + 1 / v[4]);
                            });

  RealBall ngap, xgap;
  if (pos) {
    ngap = cb.add(pre + "n_gap", "matveev", "log n", "9.6e15",
                  {{"K", matveev}, {"log10", ball_log(X(10))}, {"log311", l311}, {"log_alpha", la}},
                  [](const std::vector<RealBall>& v) { return (v[0] + v[1] / v[2]) / v[3]; });
    RealBall a4 = cb.add(pre + "A4", "height", "log n", "5.7e15",
                         {{"n_gap", ngap}, {"log_alpha", la}, {"log44", ball_log(X(44))},
                          {"log1.55", ball_log(Q(155, 100))}, {"log311", l311}},
                         [](const std::vector<RealBall>& v) { return v[0] * v[1] + (v[2] + 2 * v[3]) / v[4]; });
    RealBall k1 = cb.add(pre + "matveev2", "matveev", "(log n)^2", "8.4e30",
                         {{"A1", A1}, {"A2", A2}, {"A3", A_a}, {"A4", a4}, {"log311", l311}},
                         [](const std::vector<RealBall>& v) {
                           return matveev_factor(4, 3, {v[0], v[1], v[2], v[3]}, v[0].prec()) * (1 + 1 / v[4]);
                         });
    xgap = cb.add(pre + "X_gap", "matveev", "(log n)^2", "8.5e30",
                  {{"K", k1}, {"log3", l3}, {"log311", l311}},
                  [](const std::vector<RealBall>& v) { return v[0] + v[1] / (v[2] * v[2]); });
  } else {
    xgap = cb.add(pre + "X_gap", "matveev", "log n", "5.55e15", {{"K", matveev}, {"log3", l3}, {"log311", l311}},
                  [](const std::vector<RealBall>& v) { return v[0] + v[1] / v[2]; });
    // (60 (log(n1 log alpha))^2 + log 3 + K log n) / log alpha with log(n1 log alpha) < log n.
    ngap = cb.add(pre + "n_gap", "matveev", "(log n)^2", "2e15",
                  {{"K", matveev}, {"log3", l3}, {"log311", l311}, {"log_alpha", la}},
                  [](const std::vector<RealBall>& v) {
                    return (60 + v[1] / (v[2] * v[2]) + v[0] / v[2]) / v[3];
                  });
  }

  // Valuation of the beta/gamma factor: (6 (n - n2) + 30) log(alpha) / log p.
  const RealBall absorb = pos ? l36100 : l311 * l311;
  RealBall beta2 = cb.add(pre + "beta_val_2", "height", pos ? "log n" : "(log n)^2", pos ? "5.7e16" : "1.1e16",
                          {{"n_gap", ngap}, {"absorb", absorb}, {"log_alpha", la}, {"logp", l2}},
                          [](const std::vector<RealBall>& v) { return (6 * v[0] + 30 / v[1]) * v[2] / v[3]; });
  RealBall beta3 = cb.add(pre + "beta_val_3", "height", pos ? "log n" : "(log n)^2", pos ? "3.2e16" : "6.7e15",
                          {{"n_gap", ngap}, {"absorb", absorb}, {"log_alpha", la}, {"logp", l3}},
                          [](const std::vector<RealBall>& v) { return (6 * v[0] + 30 / v[1]) * v[2] / v[3]; });

  // h'(lambda_2) < 4 + (8/3)(n - n2 + 4) log alpha.
  const RealBall habsorb = pos ? l311 : l311 * l311;
  RealBall h2 = cb.add(pre + "h2", "height", pos ? "log n" : "(log n)^2", pos ? "1.6e16" : "3.3e15",
                       {{"n_gap", ngap}, {"log_alpha", la}, {"absorb", habsorb}},
                       [](const std::vector<RealBall>& v) {
                         RealBall e = RealBall::exact(mpq_class(8, 3), v[0].prec());
                         RealBall f = RealBall::exact(mpq_class(32, 3), v[0].prec());
                         return e * v[0] * v[1] + (4 + f * v[1]) / v[2];
                       });

  // E < 1 + log n for n > 36100 in both primes.
  for (int p : {2, 3}) {
    RealBall lp = ball_log(X(p));
    if (!certainly_lt(ball_log(lp) + Q(2, 5), X(1)) || !certainly_lt(lp * 10, 1 + l36100) ||
        !certainly_lt(X(10), 1 + l36100))
      throw CertificationError("E < 1 + log n not certified for p = " + std::to_string(p));
  }
  // 24 (1 + 1/log 36100)^2 6^4 log(alpha) h2
  RealBall blc = cb.add(pre + "bl_core", "bugeaud-laurent", pos ? "(log n)^3" : "(log n)^4",
                        pos ? "3.7e20" : "7.6e19", {{"h2", h2}, {"log_alpha", la}, {"log36100", l36100}},
                        [](const std::vector<RealBall>& v) {
                          RealBall e = 1 + 1 / v[2];
                          return 24 * e * e * 1296 * v[1] * v[0];
                        });

  const RealBall bl2 = cb.add(pre + "bl_p2", "bugeaud-laurent", "", std::nullopt,
                              {{"core", blc}, {"log2", l2}},
                              [](const std::vector<RealBall>& v) { return v[0] * 6 / ball_pow(v[1], 4); });
  const RealBall bl3 = cb.add(pre + "bl_p3", "bugeaud-laurent", "", std::nullopt,
                              {{"core", blc}, {"log3", l3}},
                              [](const std::vector<RealBall>& v) { return v[0] * 39 / (2 * ball_pow(v[1], 4)); });
  // Lower-order terms absorbed with n > 36100.
  const RealBall l2abs = l36100 * l36100;
  RealBall xmin = cb.add(pre + "smin", "bugeaud-laurent", pos ? "(log n)^3" : "(log n)^4", pos ? "1e22" : "2e21",
                         {{"bl_p2", bl2}, {"beta_val_2", beta2}, {"absorb", l2abs}},
                         [](const std::vector<RealBall>& v) { return v[0] + v[1] / v[2]; });
  RealBall ymin = cb.add(pre + "smin_3", "bugeaud-laurent", pos ? "(log n)^3" : "(log n)^4", pos ? "5e21" : "1.1e21",
                         {{"bl_p3", bl3}, {"beta_val_3", beta3}, {"absorb", l2abs}},
                         [](const std::vector<RealBall>& v) { return v[0] + v[1] / v[2]; });
  // Multiplicatively dependent case: nu_p < 3 log n, far below the above.
  const RealBall dep = RealBall::exact(3, prec) / ball_pow(l36100, pos ? 2 : 3);
  if (!certainly_lt(dep, ball_max(xmin, ymin))) throw CertificationError("dependent case dominates");

  RealBall xs = cb.add(pre + "X_small", "window", pos ? "(log n)^3" : "(log n)^4", pos ? "1.8e22" : "3.6e21",
                       {{"smin", xmin}, {"smin_3", ymin}, {"log2", l2}, {"log3", l3}},
                       [](const std::vector<RealBall>& v) { return (v[2] + v[3]) * ball_max(v[0], v[1]); });
  RealBall xtot;
  if (pos) {
    xtot = cb.add(pre + "X", "window", "(log n)^3", "2.44e30",
                  {{"X_small", xs}, {"X_gap", xgap}, {"log36100", l36100}},
                  [](const std::vector<RealBall>& v) { return v[0] + 3 * v[1] / v[2]; });
  } else {
    xtot = cb.add(pre + "X", "window", "(log n)^4", "3.61e21",
                  {{"X_small", xs}, {"X_gap", xgap}, {"log36100", l36100}},
                  [](const std::vector<RealBall>& v) { return v[0] + 4 * v[1] / ball_pow(v[2], 3); });
  }
  const unsigned long m = pos ? 3 : 4;
  RealBall T = cb.add(pre + "T", "window", "", pos ? "4.1e30" : "6e21",
                      {{"X", xtot}, {"log36100", l36100}, {"log_alpha", la}},
                      [m](const std::vector<RealBall>& v) { return (v[0] + 3 / ball_pow(v[1], m)) / v[2]; });
  RealBall nabs = cb.add(pre + "n_abs", "guzman-luca", "", pos ? "1.2e37" : "6.1e29", {{"T", T}},
                         [m](const std::vector<RealBall>& v) { return guzman_luca(static_cast<int>(m), v[0]); });
  RealBall xabs = cb.add(pre + "X_abs", "window", "", pos ? "7.4e36" : "3.8e29", {{"n_abs", nabs}},
                         [](const std::vector<RealBall>& v) { return x_window(v[0], v[0].prec()).second; });
  RealBall xb = cb.add(pre + "x_abs", "window", "", pos ? "1.1e37" : "5.5e29", {{"X_abs", xabs}, {"log2", l2}},
                       [](const std::vector<RealBall>& v) { return v[0] / v[1]; });
  RealBall yb = cb.add(pre + "y_abs", "window", "", pos ? "6.8e36" : "3.5e29", {{"X_abs", xabs}, {"log3", l3}},
                       [](const std::vector<RealBall>& v) { return v[0] / v[1]; });

  ChainResult res;
  res.scenario = sc;
  res.certs = cb.take();
  res.n_bound = ceil_upper(nabs);
  res.x_bound = ceil_upper(xb);
  res.y_bound = ceil_upper(yb);
  return res;
}

}  // namespace tripillai
