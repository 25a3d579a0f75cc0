#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tripillai/arithmetic.hpp"

namespace tripillai {

// 3x3 integer matrix, row major.
struct Mat3 {
  std::array<mpz_class, 9> a{};

  mpz_class& operator()(int i, int j) { return a[3 * i + j]; }
  const mpz_class& operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1;
    return m;
  }
  // Companion of X^3 - X^2 - X - 1 acting on (T_{k+2}, T_{k+1}, T_k).
  static Mat3 companion() {
    Mat3 m;
    m(0, 0) = m(0, 1) = m(0, 2) = 1;
    m(1, 0) = 1;
    m(2, 1) = 1;
    return m;
  }
};

// Product reduced into [0, mod) when mod > 0.
inline Mat3 mul(const Mat3& x, const Mat3& y, const mpz_class& mod = 0) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mpz_class s = x(i, 0) * y(0, j);
      s += x(i, 1) * y(1, j);
      s += x(i, 2) * y(2, j);
      if (mod > 0) mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), mod.get_mpz_t());
      r(i, j) = s;
    }
  return r;
}

inline Mat3 sub(const Mat3& x, const Mat3& y, const mpz_class& mod = 0) {
  Mat3 r;
  for (int k = 0; k < 9; ++k) {
    r.a[k] = x.a[k] - y.a[k];
    if (mod > 0) mpz_fdiv_r(r.a[k].get_mpz_t(), r.a[k].get_mpz_t(), mod.get_mpz_t());
  }
  return r;
}

inline Mat3 power(Mat3 base, mpz_class e, const mpz_class& mod = 0) {
  Mat3 r = Mat3::identity();
  if (mod > 0)
    for (auto& v : r.a) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mul(r, base, mod);
    e >>= 1;
    if (e > 0) base = mul(base, base, mod);
  }
  return r;
}

// T_n by the recurrence.
inline mpz_class trib(std::uint64_t n) {
  mpz_class a = 0, b = 1, c = 1;  // T_k, T_{k+1}, T_{k+2}
  for (std::uint64_t k = 0; k < n; ++k) {
    mpz_class d = a + b + c;
    a.swap(b);
    b.swap(c);
    c.swap(d);
  }
  return a;
}

// T_n as the bottom entry of C^n (1, 1, 0)^T.
inline mpz_class trib_matrix(const mpz_class& n, const mpz_class& mod = 0) {
  Mat3 p = power(Mat3::companion(), n, mod);
  mpz_class t = p(2, 0) + p(2, 1);
  if (mod > 0) mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), mod.get_mpz_t());
  return t;
}

inline mpz_class trib_mod(const mpz_class& n, const mpz_class& m) {
  require(n >= 0 && m >= 2, "trib_mod needs n >= 0, m >= 2");
  return trib_matrix(n, m);
}

inline std::uint64_t trib_mod(std::uint64_t n, std::uint64_t m) {
  require(m >= 2, "trib_mod needs m >= 2");
  using u128 = unsigned __int128;
  std::array<std::uint64_t, 9> r{1, 0, 0, 0, 1, 0, 0, 0, 1}, b{1, 1, 1, 1, 0, 0, 0, 1, 0};
  auto mm = [m](const std::array<std::uint64_t, 9>& x, const std::array<std::uint64_t, 9>& y) {
    std::array<std::uint64_t, 9> z{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        u128 s = 0;
        for (int k = 0; k < 3; ++k) s += static_cast<u128>(x[3 * i + k]) * y[3 * k + j] % m;
        z[3 * i + j] = static_cast<std::uint64_t>(s % m);
      }
    return z;
  };
  for (auto& v : r) v %= m;
  for (; n; n >>= 1) {
    if (n & 1) r = mm(r, b);
    if (n > 1) b = mm(b, b);
  }
  return static_cast<std::uint64_t>((static_cast<u128>(r[6]) + r[7]) % m);
}

// Least pi > 0 returning the state (T_0, T_1, T_2) mod m to itself.
inline std::uint64_t period_mod(std::uint64_t m) {
  require(m >= 2, "period_mod needs m >= 2");
  require(m < (1ull << 20), "modulus too large for a state scan");
  const std::uint64_t bound = 6 * m * m * m;
  std::uint64_t a = 0, b = 1 % m, c = 1 % m;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    std::uint64_t d = (a + b + c) % m;
    a = b;
    b = c;
    c = d;
    if (a == 0 && b == 1 % m && c == 1 % m) return k;
  }
  throw Error("period scan overflow");
}

struct TribWindow {
  std::uint64_t n0 = 0;
  std::vector<mpz_class> values;  // T_{n0}, T_{n0+1}, ...

  const mpz_class& at(std::uint64_t n) const { return values.at(n - n0); }
};

inline TribWindow trib_window(std::uint64_t n0, std::size_t len) {
  TribWindow w;
  w.n0 = n0;
  w.values.reserve(len);
  if (len == 0) return w;
  mpz_class a = trib(n0), b = trib(n0 + 1), c = trib(n0 + 2);
  for (std::size_t i = 0; i < len; ++i) {
    w.values.push_back(a);
    mpz_class d = a + b + c;
    a.swap(b);
    b.swap(c);
    c.swap(d);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Field constants

inline const PolyZ& psi_poly() {
  static const PolyZ p = PolyZ::from_leading({1, -1, -1, -1});
  return p;
}
inline const PolyZ& c_alpha_poly() {
  static const PolyZ p = PolyZ::from_leading({44, -44, 12, -1});
  return p;
}
inline const PolyZ& z_poly() {
  static const PolyZ p = PolyZ::from_leading({1, 1, 2, 3, 2, 1, 1});
  return p;
}

struct FieldConstants {
  RealBall alpha;
  RealBall beta_abs;    // |beta| = |gamma| = alpha^(-1/2)
  RealBall c_alpha;
  RealBall c_beta_abs;  // |C_beta| = |C_gamma| = (44 C_alpha)^(-1/2)
  PolyZ psi;
  PolyZ p_poly;
};

inline RealBall alpha_ball(prec_t prec) {
  return refine_root(psi_poly(), {mpq_class(1), mpq_class(2)}, static_cast<unsigned>(prec) + 8).with_prec(prec);
}
inline RealBall c_alpha_ball(prec_t prec) {
  return refine_root(c_alpha_poly(), {mpq_class(1, 2), mpq_class(1)}, static_cast<unsigned>(prec) + 8)
      .with_prec(prec);
}

inline FieldConstants field_constants(prec_t prec = 128) {
  FieldConstants f{alpha_ball(prec), RealBall(prec), c_alpha_ball(prec), RealBall(prec), psi_poly(), c_alpha_poly()};
  f.beta_abs = 1 / ball_sqrt(f.alpha);
  f.c_beta_abs = 1 / ball_sqrt(f.c_alpha * 44);
  return f;
}

// Memoized by precision; the cache only grows and entries never change.
inline const FieldConstants& cached_constants(prec_t prec) {
  static std::mutex mu;
  static std::map<prec_t, FieldConstants> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(prec);
  if (it == cache.end()) it = cache.emplace(prec, field_constants(prec)).first;
  return it->second;
}

inline RealBall log_alpha_ball(prec_t prec) {
  return ball_log(cached_constants(prec + 16).alpha).with_prec(prec);
}
inline LazyReal lazy_log_alpha() {
  return [](prec_t p) { return log_alpha_ball(p); };
}
inline LazyReal lazy_log_c_alpha() {
  return [](prec_t p) { return ball_log(cached_constants(p + 16).c_alpha).with_prec(p); };
}
// log(C_alpha (alpha^d - 1))
inline LazyReal lazy_log_c_alpha_shift(unsigned long d) {
  return [d](prec_t p) {
    const FieldConstants& f = cached_constants(p + 32);
    return ball_log(f.c_alpha * (ball_pow(f.alpha, d) - 1)).with_prec(p);
  };
}

// ---------------------------------------------------------------------------
// Certified checks

enum class Verdict { holds, fails, undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "undecided";
  }
}

struct CheckReport {
  bool ok = true;
  std::uint64_t checked = 0;
  std::optional<std::uint64_t> first_failure;
  std::string detail;
  prec_t max_prec = 0;
};

namespace detail {

// C_alpha * alpha^(n-1) at the given precision.
inline RealBall binet_main(std::uint64_t n, prec_t p) {
  const FieldConstants& f = cached_constants(p);
  if (n == 0) return f.c_alpha / f.alpha;
  return f.c_alpha * ball_pow(f.alpha, n - 1);
}

// alpha^k for integer k >= -1, exact when k == 0.
inline RealBall alpha_pow(long k, prec_t p) {
  const FieldConstants& f = cached_constants(p);
  if (k < 0) return 1 / ball_pow(f.alpha, static_cast<unsigned long>(-k));
  return ball_pow(f.alpha, static_cast<unsigned long>(k));
}

inline Verdict strict_less(const RealBall& a, const RealBall& b) {
  if (certainly_lt(a, b)) return Verdict::holds;
  if (certainly_le(b, a)) return Verdict::fails;
  return Verdict::undecided;
}

}  // namespace detail

// |T_n - C_alpha alpha^(n-1)| < 1/2 for 0 <= n <= n_max.
inline CheckReport binet_residual_check(std::uint64_t n_max, const PrecisionPolicy& pol = {}) {
  CheckReport rep;
  mpz_class t0 = 0, t1 = 1, t2 = 1;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    mpq_class lo = mpq_class(t0) - mpq_class(1, 2), hi = mpq_class(t0) + mpq_class(1, 2);
    Verdict v = Verdict::undecided;
    for (prec_t p = pol.start; p <= pol.cap && v == Verdict::undecided; p *= 2) {
      RealBall b = detail::binet_main(n, p);
      if (certainly_gt(b, lo) && certainly_lt(b, hi)) {
        v = Verdict::holds;
      } else if (mpfr_cmp_q(b.lower().get(), hi.get_mpq_t()) >= 0 ||
                 mpfr_cmp_q(b.upper().get(), lo.get_mpq_t()) <= 0) {
        v = Verdict::fails;
      }
      rep.max_prec = std::max(rep.max_prec, p);
    }
    ++rep.checked;
    if (v != Verdict::holds) {
      rep.ok = false;
      rep.first_failure = n;
      rep.detail = std::string("n=") + std::to_string(n) + ": " + verdict_name(v);
      return rep;
    }
    mpz_class t3 = t0 + t1 + t2;
    t0.swap(t1);
    t1.swap(t2);
    t2.swap(t3);
  }
  rep.detail = "all n <= " + std::to_string(n_max) + " certified";
  return rep;
}

struct GrowthOutcome {
  std::uint64_t n;
  Verdict left;   // alpha^(n-2) < T_n
  Verdict right;  // T_n < alpha^(n-1)
};

struct GrowthReport {
  bool strict_all = true;       // both strict inequalities for every 1 <= n <= n_max
  bool holds_from_3 = true;     // same, restricted to n >= 3
  std::vector<GrowthOutcome> edges;  // outcomes at n = 1, 2
  std::optional<std::uint64_t> first_failure_from_3;
  std::uint64_t checked = 0;
};

// alpha^(n-2) < T_n < alpha^(n-1) for 1 <= n <= n_max, edges reported.
inline GrowthReport growth_check(std::uint64_t n_max, const PrecisionPolicy& pol = {}) {
  GrowthReport rep;
  mpz_class t0 = 1, t1 = 1, t2 = 2;  // T_1, T_2, T_3
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    GrowthOutcome out{n, Verdict::undecided, Verdict::undecided};
    for (prec_t p = pol.start; p <= pol.cap; p *= 2) {
      RealBall tn = RealBall::exact(t0, p);
      if (out.left == Verdict::undecided)
        out.left = detail::strict_less(detail::alpha_pow(static_cast<long>(n) - 2, p), tn);
      if (out.right == Verdict::undecided)
        out.right = detail::strict_less(tn, detail::alpha_pow(static_cast<long>(n) - 1, p));
      if (out.left != Verdict::undecided && out.right != Verdict::undecided) break;
    }
    ++rep.checked;
    bool good = out.left == Verdict::holds && out.right == Verdict::holds;
    if (!good) rep.strict_all = false;
    if (n <= 2) {
      rep.edges.push_back(out);
    } else if (!good && !rep.first_failure_from_3) {
      rep.holds_from_3 = false;
      rep.first_failure_from_3 = n;
    }
    mpz_class t3 = t0 + t1 + t2;
    t0.swap(t1);
    t1.swap(t2);
    t2.swap(t3);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(alpha, gamma), basis alpha^i gamma^j (i < 3, j < 2).
// gamma satisfies gamma^2 + (alpha - 1) gamma + (alpha^2 - alpha - 1) = 0.

class SplitElem {
 public:
  SplitElem() = default;
  static SplitElem constant(long v) {
    SplitElem e;
    e.c_[0] = v;
    return e;
  }
  static SplitElem alpha() {
    SplitElem e;
    e.c_[1] = 1;
    return e;
  }
  static SplitElem gamma() {
    SplitElem e;
    e.c_[3] = 1;
    return e;
  }
  // alpha^-1 = alpha^2 - alpha - 1
  static SplitElem alpha_inv() {
    SplitElem e;
    e.c_[0] = -1;
    e.c_[1] = -1;
    e.c_[2] = 1;
    return e;
  }
  // gamma^-1 = alpha beta = alpha - alpha^2 - alpha gamma
  static SplitElem gamma_inv() {
    SplitElem e;
    e.c_[1] = 1;
    e.c_[2] = -1;
    e.c_[4] = -1;
    return e;
  }
  friend bool operator==(const SplitElem& a, const SplitElem& b) { return a.c_ == b.c_; }

  const mpz_class& coeff(int i, int j) const { return c_[i + 3 * j]; }
  bool is_zero() const {
    for (const auto& v : c_)
      if (v != 0) return false;
    return true;
  }

  friend SplitElem operator+(const SplitElem& a, const SplitElem& b) {
    SplitElem r;
    for (int k = 0; k < 6; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend SplitElem operator-(const SplitElem& a, const SplitElem& b) {
    SplitElem r;
    for (int k = 0; k < 6; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend SplitElem operator*(const SplitElem& a, const SplitElem& b) {
    // t[i][j]: coefficient of alpha^i gamma^j before reduction.
    mpz_class t[7][3];
    for (int i1 = 0; i1 < 3; ++i1)
      for (int j1 = 0; j1 < 2; ++j1) {
        if (a.c_[i1 + 3 * j1] == 0) continue;
        for (int i2 = 0; i2 < 3; ++i2)
          for (int j2 = 0; j2 < 2; ++j2) t[i1 + i2][j1 + j2] += a.c_[i1 + 3 * j1] * b.c_[i2 + 3 * j2];
      }
    // gamma^2 = (1 - alpha) gamma + (1 + alpha - alpha^2)
    for (int i = 0; i < 5; ++i) {
      const mpz_class g = t[i][2];
      if (g == 0) continue;
      t[i][1] += g;
      t[i + 1][1] -= g;
      t[i][0] += g;
      t[i + 1][0] += g;
      t[i + 2][0] -= g;
      t[i][2] = 0;
    }
    // alpha^3 = alpha^2 + alpha + 1
    for (int i = 6; i >= 3; --i)
      for (int j = 0; j < 2; ++j) {
        const mpz_class g = t[i][j];
        if (g == 0) continue;
        t[i - 1][j] += g;
        t[i - 2][j] += g;
        t[i - 3][j] += g;
        t[i][j] = 0;
      }
    SplitElem r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) r.c_[i + 3 * j] = t[i][j];
    return r;
  }

  SplitElem pow(unsigned long e) const {
    SplitElem r = constant(1), b = *this;
    for (; e; e >>= 1) {
      if (e & 1) r = r * b;
      if (e > 1) b = b * b;
    }
    return r;
  }

  // Norm down to Q: determinant of multiplication by this element.
  mpz_class norm() const {
    std::vector<std::vector<mpz_class>> m(6, std::vector<mpz_class>(6));
    for (int k = 0; k < 6; ++k) {
      SplitElem basis;
      basis.c_[k] = 1;
      SplitElem col = *this * basis;
      for (int r = 0; r < 6; ++r) m[r][k] = col.c_[r];
    }
    return bareiss_det(m);
  }

  static mpz_class bareiss_det(std::vector<std::vector<mpz_class>> m) {
    const int n = static_cast<int>(m.size());
    int sign = 1;
    mpz_class prev = 1;
    for (int k = 0; k < n - 1; ++k) {
      if (m[k][k] == 0) {
        int sw = -1;
        for (int i = k + 1; i < n; ++i)
          if (m[i][k] != 0) {
            sw = i;
            break;
          }
        if (sw < 0) return 0;
        std::swap(m[k], m[sw]);
        sign = -sign;
      }
      for (int i = k + 1; i < n; ++i)
        for (int j = k + 1; j < n; ++j) {
          m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
          mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
        }
      prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
  }

 private:
  std::array<mpz_class, 6> c_{};
};

struct GammaPair {
  unsigned u, v;
  bool differ;          // (1-gamma^v)/(1-gamma^u) != (1-alpha^v)/(1-alpha^u)
  mpz_class norm;       // norm of the cross difference; nonzero iff differ
  bool differ_inverse;  // same with gamma^-k, alpha^-k
};

// Exact cross difference (1-gamma^v)(1-alpha^u) - (1-alpha^v)(1-gamma^u).
inline GammaPair gamma_pair_check(unsigned u, unsigned v) {
  require(v >= 1 && u > v, "gamma check needs u > v >= 1");
  const SplitElem one = SplitElem::constant(1);
  auto cross = [&](const SplitElem& a, const SplitElem& g) {
    return (one - g.pow(v)) * (one - a.pow(u)) - (one - a.pow(v)) * (one - g.pow(u));
  };
  SplitElem e = cross(SplitElem::alpha(), SplitElem::gamma());
  SplitElem ei = cross(SplitElem::alpha_inv(), SplitElem::gamma_inv());
  return {u, v, !e.is_zero(), e.norm(), !ei.is_zero()};
}

struct GammaReport {
  bool ok = true;          // positive exponents, all pairs
  bool ok_inverse = true;  // negative exponents, all pairs
  std::vector<GammaPair> pairs;
};

// The finite box 1 <= v <= 4, 2 <= u <= 7, u > v.
inline GammaReport gamma_lemma_check() {
  GammaReport rep;
  for (unsigned v = 1; v <= 4; ++v)
    for (unsigned u = std::max(2u, v + 1); u <= 7; ++u) {
      GammaPair gp = gamma_pair_check(u, v);
      rep.ok = rep.ok && gp.differ && gp.norm != 0;
      rep.ok_inverse = rep.ok_inverse && gp.differ_inverse;
      rep.pairs.push_back(gp);
    }
  return rep;
}

}  // namespace tripillai
