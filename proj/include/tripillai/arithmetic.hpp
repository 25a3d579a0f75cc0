#pragma once

#include <gmpxx.h>

#include "tripillai/ball.hpp"
#include "tripillai/error.hpp"
#include "tripillai/poly.hpp"

namespace tripillai {

namespace detail {

// Floor of M*eta when the ball pins it down, with M*rad(eta) < 1/4.
inline std::optional<mpz_class> try_floor_scaled(const RealBall& eta, const mpz_class& M) {
  Float mr(64);
  mpfr_mul_z(mr.get(), eta.rad().get(), M.get_mpz_t(), MPFR_RNDU);
  if (mpfr_cmp_d(mr.get(), 0.25) >= 0) return std::nullopt;
  prec_t p = eta.prec() + static_cast<prec_t>(mpz_sizeinbase(M.get_mpz_t(), 2)) + 8;
  RealBall scaled = eta.with_prec(p) * RealBall::exact(M, p);
  return certified_floor(scaled);
}

}  // namespace detail

// floor(M * eta) for an already evaluated ball; no refinement possible.
inline mpz_class floor_scaled(const RealBall& eta, const mpz_class& M) {
  require(M >= 1, "M must be >= 1");
  auto r = detail::try_floor_scaled(eta, M);
  if (!r) throw CertificationError("floor uncertifiable");
  return *r;
}

// floor(M * eta), re-evaluating eta at doubling precision until decided.
inline mpz_class floor_scaled(const LazyReal& eta, const mpz_class& M, const PrecisionPolicy& pol = {}) {
  require(M >= 1, "M must be >= 1");
  return adaptive([&](prec_t p) { return detail::try_floor_scaled(eta(p), M); }, pol, "floor uncertifiable");
}

inline LazyReal lazy_log(const mpq_class& q) {
  return [q](prec_t p) { return ball_log(RealBall::exact(q, p + 16)).with_prec(p); };
}

inline mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

// Parses "1e112", "10^113", "1.2e37" or a plain integer into an integer
// (decimal forms must denote integers).
inline mpz_class parse_integer(const std::string& s) {
  auto caret = s.find('^');
  if (caret != std::string::npos) {
    mpz_class base(s.substr(0, caret));
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), std::stoul(s.substr(caret + 1)));
    return r;
  }
  auto e = s.find_first_of("eE");
  if (e == std::string::npos && s.find('.') == std::string::npos) return mpz_class(s);
  std::string mant = e == std::string::npos ? s : s.substr(0, e);
  long ex = e == std::string::npos ? 0 : std::stol(s.substr(e + 1));
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    ex -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  mpq_class q{mpz_class(mant)};
  if (ex >= 0)
    q *= pow10(ex);
  else
    q /= pow10(-ex);
  q.canonicalize();
  require(q.get_den() == 1, "not an integer: " + s);
  return q.get_num();
}

}  // namespace tripillai
