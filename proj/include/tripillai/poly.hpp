#pragma once

#include <gmpxx.h>

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "tripillai/ball.hpp"
#include "tripillai/error.hpp"

namespace tripillai {

// Integer polynomial, coefficients stored constant term first:
// c[0] + c[1] X + ... + c[d] X^d with c[d] != 0.
class PolyZ {
 public:
  PolyZ() = default;
  explicit PolyZ(std::vector<mpz_class> c) : c_(std::move(c)) { trim(); }
  PolyZ(std::initializer_list<long> c) {
    for (long v : c) c_.emplace_back(v);
    trim();
  }
  // Leading coefficient first, as polynomials are usually written.
  static PolyZ from_leading(std::initializer_list<long> c) {
    std::vector<mpz_class> v;
    for (long x : c) v.emplace_back(x);
    return PolyZ(std::vector<mpz_class>(v.rbegin(), v.rend()));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const mpz_class& operator[](int i) const { return c_[i]; }
  const std::vector<mpz_class>& coeffs() const { return c_; }
  const mpz_class& leading() const { return c_.back(); }

  // Sign of P(num/den) for den > 0, computed as the integer
  // sum c_i num^i den^(d-i).
  int sign_at(const mpq_class& x) const {
    const mpz_class& num = x.get_num();
    const mpz_class& den = x.get_den();
    mpz_class acc = 0, dpow = 1;
    for (int i = degree(); i >= 0; --i) {
      acc = acc * num + c_[i] * dpow;
      dpow *= den;
    }
    return sgn(acc);
  }

  mpq_class eval(const mpq_class& x) const {
    mpq_class acc = 0;
    for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
    return acc;
  }

  RealBall eval(const RealBall& x) const {
    RealBall acc = RealBall::exact(0, x.prec());
    for (int i = degree(); i >= 0; --i) acc = acc * x + RealBall::exact(c_[i], x.prec());
    return acc;
  }

  PolyZ derivative() const {
    std::vector<mpz_class> d;
    for (int i = 1; i <= degree(); ++i) d.push_back(c_[i] * i);
    return PolyZ(d);
  }

  std::string str() const {
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      if (c_[i] == 0) continue;
      std::string a = c_[i].get_str();
      if (!s.empty() && c_[i] > 0) s += "+";
      if (i == 0)
        s += a;
      else {
        if (c_[i] == -1)
          s += "-";
        else if (c_[i] != 1)
          s += a + "*";
        s += i == 1 ? "X" : "X^" + std::to_string(i);
      }
    }
    return s.empty() ? "0" : s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
    require(!c_.empty(), "zero polynomial");
  }
  std::vector<mpz_class> c_;
};

namespace detail {

using PolyQ = std::vector<mpq_class>;  // constant term first

inline void trim(PolyQ& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline PolyQ remainder(PolyQ a, const PolyQ& b) {
  int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    int da = static_cast<int>(a.size()) - 1;
    mpq_class f = a[da] / b[db];
    for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
    a[da] = 0;
    trim(a);
  }
  return a;
}

inline int sign_q(const PolyQ& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return sgn(acc);
}

}  // namespace detail

// Sturm chain of P, used to count distinct real roots in (a, b].
class SturmChain {
 public:
  explicit SturmChain(const PolyZ& p) {
    chain_.emplace_back(p.coeffs().begin(), p.coeffs().end());
    if (p.degree() > 0) {
      PolyZ dp = p.derivative();
      chain_.emplace_back(dp.coeffs().begin(), dp.coeffs().end());
    }
    while (chain_.size() >= 2 && chain_.back().size() > 1) {
      detail::PolyQ r = detail::remainder(chain_[chain_.size() - 2], chain_.back());
      if (r.empty()) break;
      for (auto& c : r) c = -c;
      chain_.push_back(r);
    }
  }

  int variations(const mpq_class& x) const {
    int v = 0, last = 0;
    for (const auto& q : chain_) {
      int s = detail::sign_q(q, x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  }

  // Distinct real roots in (a, b].
  int count(const mpq_class& a, const mpq_class& b) const { return variations(a) - variations(b); }

 private:
  std::vector<detail::PolyQ> chain_;
};

// Ball of radius <= 2^-target_bits around the unique root of P in [a, b].
inline RealBall refine_root(const PolyZ& poly, const std::pair<mpq_class, mpq_class>& interval,
                            unsigned target_bits) {
  mpq_class a = interval.first, b = interval.second;
  require(a < b, "empty interval");
  int sa = poly.sign_at(a), sb = poly.sign_at(b);
  SturmChain sturm(poly);
  int roots = sturm.count(a, b) + (sa == 0 ? 1 : 0);
  if (sa != 0 && sb != 0 && sa == sb) {
    if (roots > 0) throw CertificationError("interval not isolating");
    throw CertificationError("root not isolated");
  }
  if (roots != 1) throw CertificationError("interval not isolating");

  prec_t prec = std::max<prec_t>(128, target_bits + 64);
  if (sa == 0) return RealBall::exact(a, prec);
  if (sb == 0) return RealBall::exact(b, prec);

  mpq_class width_goal(1);
  width_goal /= mpz_class(1) << target_bits;

  auto bisect_until = [&](const mpq_class& goal) {
    while (b - a > goal) {
      mpq_class m = (a + b) / 2;
      int sm = poly.sign_at(m);
      if (sm == 0) {
        a = b = m;
        return;
      }
      if (sm == sa)
        a = m;
      else
        b = m;
    }
  };

  // Coarse bisection, then Newton at full precision, then an exact
  // sign check on a bracket around the Newton iterate.
  mpq_class coarse(1);
  coarse /= mpz_class(1) << std::min(target_bits, 48u);
  bisect_until(coarse);
  if (a == b) return RealBall::exact(a, prec);

  if (b - a > width_goal) {
    PolyZ dp = poly.derivative();
    Float x = Float::from_q((a + b) / 2, prec, MPFR_RNDN);
    for (int it = 0; it < 64; ++it) {
      RealBall xb = RealBall::exact(x.to_q(), prec);
      Float fv = poly.eval(xb).mid(), dv = dp.eval(xb).mid();
      if (mpfr_zero_p(dv.get())) break;
      Float step(prec);
      mpfr_div(step.get(), fv.get(), dv.get(), MPFR_RNDN);
      mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
      if (mpfr_zero_p(step.get()) || mpfr_get_exp(step.get()) < -static_cast<long>(target_bits) - 8) break;
    }
    mpq_class xq = x.to_q();
    mpq_class half = width_goal / 2;
    mpq_class lo = xq - half, hi = xq + half;
    if (lo >= a && hi <= b) {
      int sl = poly.sign_at(lo), sh = poly.sign_at(hi);
      if (sl == 0) return RealBall::exact(lo, prec);
      if (sh == 0) return RealBall::exact(hi, prec);
      if (sl != sh) {
        a = lo;
        b = hi;
        sa = sl;
      }
    }
    bisect_until(width_goal);
    if (a == b) return RealBall::exact(a, prec);
  }
  return RealBall::from_endpoints(Float::from_q(a, prec, MPFR_RNDD), Float::from_q(b, prec, MPFR_RNDU), prec);
}

}  // namespace tripillai
