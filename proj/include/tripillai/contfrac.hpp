#pragma once

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

#include "tripillai/arithmetic.hpp"

namespace tripillai {

struct CFExpansion {
  RealBall mu;
  std::vector<mpz_class> quotients;                      // a_0 ... a_N
  std::vector<std::pair<mpz_class, mpz_class>> convergents;  // (p_i, q_i)
  prec_t prec = 0;
};

namespace detail {

// Expands until q_N > M; nullopt when a quotient cannot be certified at this precision.
inline std::optional<CFExpansion> try_cf(const RealBall& mu, const mpz_class& M) {
  CFExpansion e;
  e.mu = mu;
  e.prec = mu.prec();
  RealBall x = mu;
  mpz_class p_prev = 0, q_prev = 1, p = 1, q = 0;  // p_{-2}, q_{-2}, p_{-1}, q_{-1}
  for (;;) {
    auto a = certified_floor(x);
    if (!a) return std::nullopt;
    mpz_class pn = *a * p + p_prev, qn = *a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    e.quotients.push_back(*a);
    e.convergents.emplace_back(p, q);
    if (q > M) return e;
    RealBall frac = x - RealBall::exact(*a, x.prec());
    if (!frac.positive()) return std::nullopt;
    x = 1 / frac;
  }
}

}  // namespace detail

// Fixed ball: no refinement available.
inline CFExpansion cf_expand(const RealBall& mu, const mpz_class& M) {
  require(M >= 1, "M must be >= 1");
  auto e = detail::try_cf(mu, M);
  if (!e) throw CertificationError("quotient uncertifiable");
  return *e;
}

// Restarts at doubled precision until every quotient is certified.
inline CFExpansion cf_expand(const LazyReal& mu, const mpz_class& M, const PrecisionPolicy& pol = {}) {
  require(M >= 1, "M must be >= 1");
  return adaptive([&](prec_t p) { return detail::try_cf(mu(p), M); }, pol, "quotient uncertifiable");
}

// Least N with q_N > M.
inline std::size_t cf_index(const CFExpansion& e, const mpz_class& M) {
  for (std::size_t i = 0; i < e.convergents.size(); ++i)
    if (e.convergents[i].second > M) return i;
  throw PreconditionError("expansion does not reach q_N > M");
}

inline mpz_class legendre_floor(const CFExpansion& e, const mpz_class& M) {
  std::size_t n = cf_index(e, M);
  mpz_class best = 0;
  for (std::size_t i = 0; i <= n; ++i)
    if (e.quotients[i] > best) best = e.quotients[i];
  return best;
}

// |mu - r/s| > gap / s^2 for 0 < s < M.
inline mpq_class legendre_gap(const CFExpansion& e, const mpz_class& M) {
  return mpq_class(1) / mpq_class(legendre_floor(e, M) + 2);
}

// Determinant identity and |mu - p_i/q_i| < 1/q_i^2 for every convergent.
inline bool verify_convergents(const CFExpansion& e) {
  for (std::size_t i = 1; i < e.convergents.size(); ++i) {
    const auto& [p1, q1] = e.convergents[i];
    const auto& [p0, q0] = e.convergents[i - 1];
    mpz_class d = p1 * q0 - p0 * q1;
    if (d != (i % 2 == 1 ? 1 : -1)) return false;
    if (i >= 2 && q1 <= q0) return false;
  }
  for (const auto& [p, q] : e.convergents) {
    RealBall diff = ball_abs(e.mu - RealBall::exact(mpq_class(p, q), e.mu.prec()));
    if (!certainly_lt(diff, RealBall::exact(mpq_class(mpz_class(1), q * q), e.mu.prec()))) return false;
  }
  return true;
}

}  // namespace tripillai
