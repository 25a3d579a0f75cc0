#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "tripillai/error.hpp"

namespace tripillai {

using prec_t = mpfr_prec_t;

// Owning wrapper around mpfr_t. Copies keep the source precision.
class Float {
 public:
  explicit Float(prec_t prec = 128) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Float(const Float& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Float(Float&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Float& operator=(const Float& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Float& operator=(Float&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Float() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  prec_t prec() const { return mpfr_get_prec(v_); }

  static Float from_z(const mpz_class& z, prec_t prec, mpfr_rnd_t rnd) {
    Float f(prec);
    mpfr_set_z(f.v_, z.get_mpz_t(), rnd);
    return f;
  }
  static Float from_q(const mpq_class& q, prec_t prec, mpfr_rnd_t rnd) {
    Float f(prec);
    mpfr_set_q(f.v_, q.get_mpq_t(), rnd);
    return f;
  }

  mpq_class to_q() const {
    require(mpfr_number_p(v_), "non-finite value");
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

// Closed interval [mid - rad, mid + rad]. mid carries the working precision,
// rad is a 64-bit upper bound.
class RealBall {
 public:
  static constexpr prec_t kRadPrec = 64;

  explicit RealBall(prec_t prec = 128) : mid_(prec), rad_(kRadPrec) {}

  static RealBall exact(long v, prec_t prec = 128) { return exact(mpz_class(v), prec); }
  static RealBall exact(const mpz_class& v, prec_t prec = 128) {
    return from_endpoints(Float::from_z(v, prec, MPFR_RNDD), Float::from_z(v, prec, MPFR_RNDU), prec);
  }
  static RealBall exact(const mpq_class& v, prec_t prec = 128) {
    return from_endpoints(Float::from_q(v, prec, MPFR_RNDD), Float::from_q(v, prec, MPFR_RNDU), prec);
  }
  // Decimal literal such as "1.2e37"; the ball encloses the exact decimal.
  static RealBall decimal(const std::string& s, prec_t prec = 128) {
    Float lo(prec), hi(prec);
    if (mpfr_set_str(lo.get(), s.c_str(), 10, MPFR_RNDD) != 0 || !mpfr_number_p(lo.get()))
      throw PreconditionError("bad decimal literal: " + s);
    mpfr_set_str(hi.get(), s.c_str(), 10, MPFR_RNDU);
    return from_endpoints(lo, hi, prec);
  }
  // Smallest ball (up to rounding) containing [lo, hi].
  static RealBall from_endpoints(const Float& lo, const Float& hi, prec_t prec) {
    require(mpfr_number_p(lo.get()) && mpfr_number_p(hi.get()), "non-finite ball endpoint");
    require(mpfr_lessequal_p(lo.get(), hi.get()), "inverted ball endpoints");
    RealBall b(prec);
    Float sum(std::max(lo.prec(), hi.prec()) + 1);
    mpfr_add(sum.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(b.mid_.get(), sum.get(), 1, MPFR_RNDN);
    Float r1(kRadPrec), r2(kRadPrec);
    mpfr_sub(r1.get(), hi.get(), b.mid_.get(), MPFR_RNDU);
    mpfr_sub(r2.get(), b.mid_.get(), lo.get(), MPFR_RNDU);
    mpfr_max(b.rad_.get(), r1.get(), r2.get(), MPFR_RNDU);
    if (mpfr_sgn(b.rad_.get()) < 0) mpfr_set_zero(b.rad_.get(), 1);
    return b;
  }

  prec_t prec() const { return mid_.prec(); }
  const Float& mid() const { return mid_; }
  const Float& rad() const { return rad_; }

  Float lower() const {
    Float r(prec());
    mpfr_sub(r.get(), mid_.get(), rad_.get(), MPFR_RNDD);
    return r;
  }
  Float upper() const {
    Float r(prec());
    mpfr_add(r.get(), mid_.get(), rad_.get(), MPFR_RNDU);
    return r;
  }

  bool positive() const { return mpfr_sgn(lower().get()) > 0; }
  bool negative() const { return mpfr_sgn(upper().get()) < 0; }
  bool contains_zero() const { return !positive() && !negative(); }
  bool contains(const mpq_class& q) const {
    return mpfr_cmp_q(lower().get(), q.get_mpq_t()) <= 0 &&
           mpfr_cmp_q(upper().get(), q.get_mpq_t()) >= 0;
  }
  bool exact_point() const { return mpfr_zero_p(rad_.get()); }

  double to_double() const { return mid_.to_double(); }
  double radius_double() const { return mpfr_get_d(rad_.get(), MPFR_RNDU); }

  // Midpoint in scientific notation with the given number of digits.
  std::string str(int digits = 20) const {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "Re";
    mpfr_asprintf(&buf, fmt.c_str(), mid_.get());
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }
  std::string upper_str(int digits = 20) const {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "RUe";
    Float u = upper();
    mpfr_asprintf(&buf, fmt.c_str(), u.get());
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  RealBall with_prec(prec_t p) const { return from_endpoints(lower(), upper(), p); }

 private:
  Float mid_;
  Float rad_;
};

using LazyReal = std::function<RealBall(prec_t)>;

struct PrecisionPolicy {
  prec_t start = 128;
  prec_t cap = 8192;
};

// Runs attempt(prec) at start, 2*start, ... up to cap. attempt returns an
// empty optional when the precision was insufficient.
template <class F>
auto adaptive(F&& attempt, const PrecisionPolicy& pol, const std::string& failure)
    -> typename std::invoke_result_t<F, prec_t>::value_type {
  for (prec_t p = pol.start; p <= pol.cap; p *= 2) {
    auto r = attempt(p);
    if (r) return std::move(*r);
  }
  throw CertificationError(failure);
}

namespace detail {

inline prec_t join(const RealBall& a, const RealBall& b) { return std::max(a.prec(), b.prec()); }

inline Float rounded(int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t), const Float& x,
                     const Float& y, prec_t p, mpfr_rnd_t rnd) {
  Float r(p);
  op(r.get(), x.get(), y.get(), rnd);
  return r;
}

inline const Float& fmin2(const Float& a, const Float& b) { return mpfr_lessequal_p(a.get(), b.get()) ? a : b; }
inline const Float& fmax2(const Float& a, const Float& b) { return mpfr_lessequal_p(a.get(), b.get()) ? b : a; }

// Interval product or quotient over the four endpoint combinations.
inline RealBall corner_op(int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t), const RealBall& a,
                          const RealBall& b) {
  prec_t p = join(a, b);
  Float al = a.lower(), ah = a.upper(), bl = b.lower(), bh = b.upper();
  Float d1 = rounded(op, al, bl, p, MPFR_RNDD), d2 = rounded(op, al, bh, p, MPFR_RNDD);
  Float d3 = rounded(op, ah, bl, p, MPFR_RNDD), d4 = rounded(op, ah, bh, p, MPFR_RNDD);
  Float u1 = rounded(op, al, bl, p, MPFR_RNDU), u2 = rounded(op, al, bh, p, MPFR_RNDU);
  Float u3 = rounded(op, ah, bl, p, MPFR_RNDU), u4 = rounded(op, ah, bh, p, MPFR_RNDU);
  const Float& lo = fmin2(fmin2(d1, d2), fmin2(d3, d4));
  const Float& hi = fmax2(fmax2(u1, u2), fmax2(u3, u4));
  return RealBall::from_endpoints(lo, hi, p);
}

// Image of a nondecreasing function.
inline RealBall monotone(int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const RealBall& x) {
  prec_t p = x.prec();
  Float lo(p), hi(p);
  f(lo.get(), x.lower().get(), MPFR_RNDD);
  f(hi.get(), x.upper().get(), MPFR_RNDU);
  return RealBall::from_endpoints(lo, hi, p);
}

}  // namespace detail

inline RealBall operator+(const RealBall& a, const RealBall& b) {
  prec_t p = detail::join(a, b);
  return RealBall::from_endpoints(detail::rounded(mpfr_add, a.lower(), b.lower(), p, MPFR_RNDD),
                                  detail::rounded(mpfr_add, a.upper(), b.upper(), p, MPFR_RNDU), p);
}
inline RealBall operator-(const RealBall& a, const RealBall& b) {
  prec_t p = detail::join(a, b);
  return RealBall::from_endpoints(detail::rounded(mpfr_sub, a.lower(), b.upper(), p, MPFR_RNDD),
                                  detail::rounded(mpfr_sub, a.upper(), b.lower(), p, MPFR_RNDU), p);
}
inline RealBall operator-(const RealBall& a) {
  Float lo = a.upper(), hi = a.lower();
  mpfr_neg(lo.get(), lo.get(), MPFR_RNDN);
  mpfr_neg(hi.get(), hi.get(), MPFR_RNDN);
  return RealBall::from_endpoints(lo, hi, a.prec());
}
inline RealBall operator*(const RealBall& a, const RealBall& b) { return detail::corner_op(mpfr_mul, a, b); }
inline RealBall operator/(const RealBall& a, const RealBall& b) {
  if (b.contains_zero()) throw CertificationError("division by a ball containing zero");
  return detail::corner_op(mpfr_div, a, b);
}

inline RealBall operator+(const RealBall& a, long b) { return a + RealBall::exact(b, a.prec()); }
inline RealBall operator-(const RealBall& a, long b) { return a - RealBall::exact(b, a.prec()); }
inline RealBall operator*(const RealBall& a, long b) { return a * RealBall::exact(b, a.prec()); }
inline RealBall operator/(const RealBall& a, long b) { return a / RealBall::exact(b, a.prec()); }
inline RealBall operator+(long a, const RealBall& b) { return RealBall::exact(a, b.prec()) + b; }
inline RealBall operator-(long a, const RealBall& b) { return RealBall::exact(a, b.prec()) - b; }
inline RealBall operator*(long a, const RealBall& b) { return RealBall::exact(a, b.prec()) * b; }
inline RealBall operator/(long a, const RealBall& b) { return RealBall::exact(a, b.prec()) / b; }

inline RealBall ball_log(const RealBall& x) {
  if (!x.positive()) throw CertificationError("log of nonpositive");
  return detail::monotone(mpfr_log, x);
}
inline RealBall ball_exp(const RealBall& x) { return detail::monotone(mpfr_exp, x); }
inline RealBall ball_sqrt(const RealBall& x) {
  if (mpfr_sgn(x.lower().get()) < 0) throw CertificationError("sqrt of negative");
  return detail::monotone(mpfr_sqrt, x);
}

inline RealBall ball_abs(const RealBall& x) {
  if (!x.negative()) {
    if (x.positive()) return x;
    Float hi = detail::fmax2(x.upper(), (-x).upper());
    return RealBall::from_endpoints(Float(x.prec()), hi, x.prec());
  }
  return -x;
}

inline RealBall ball_pow(const RealBall& x, unsigned long n) {
  if (n == 0) return RealBall::exact(1, x.prec());
  if (mpfr_sgn(x.lower().get()) >= 0) {
    prec_t p = x.prec();
    Float lo(p), hi(p);
    mpfr_pow_ui(lo.get(), x.lower().get(), n, MPFR_RNDD);
    mpfr_pow_ui(hi.get(), x.upper().get(), n, MPFR_RNDU);
    return RealBall::from_endpoints(lo, hi, p);
  }
  RealBall r = RealBall::exact(1, x.prec()), base = x;
  for (; n; n >>= 1) {
    if (n & 1) r = r * base;
    if (n > 1) base = base * base;
  }
  return r;
}

// Real power x^y for x > 0.
inline RealBall ball_pow(const RealBall& x, const RealBall& y) { return ball_exp(y * ball_log(x)); }

inline RealBall ball_max(const RealBall& a, const RealBall& b) {
  prec_t p = detail::join(a, b);
  return RealBall::from_endpoints(detail::fmax2(a.lower(), b.lower()), detail::fmax2(a.upper(), b.upper()), p);
}

// Certified comparisons: true only when the order is decided.
inline bool certainly_lt(const RealBall& a, const RealBall& b) {
  return mpfr_less_p(a.upper().get(), b.lower().get());
}
inline bool certainly_le(const RealBall& a, const RealBall& b) {
  return mpfr_lessequal_p(a.upper().get(), b.lower().get());
}
inline bool certainly_lt(const RealBall& a, const mpq_class& q) {
  return mpfr_cmp_q(a.upper().get(), q.get_mpq_t()) < 0;
}
inline bool certainly_gt(const RealBall& a, const mpq_class& q) {
  return mpfr_cmp_q(a.lower().get(), q.get_mpq_t()) > 0;
}

// Floor of every point in the ball, if it is constant.
inline std::optional<mpz_class> certified_floor(const RealBall& x) {
  mpz_class lo, hi;
  mpfr_get_z(lo.get_mpz_t(), x.lower().get(), MPFR_RNDD);
  mpfr_get_z(hi.get_mpz_t(), x.upper().get(), MPFR_RNDD);
  if (lo != hi) return std::nullopt;
  return lo;
}

// Sound integer upper bound: floor of the upper endpoint.
inline mpz_class floor_upper(const RealBall& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.upper().get(), MPFR_RNDD);
  return z;
}
inline mpz_class ceil_upper(const RealBall& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.upper().get(), MPFR_RNDU);
  return z;
}

inline LazyReal lazy_exact(const mpq_class& q) {
  return [q](prec_t p) { return RealBall::exact(q, p); };
}

}  // namespace tripillai
