#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tripillai/tribonacci.hpp"

namespace tripillai {

constexpr long kInfValuation = std::numeric_limits<long>::max();

inline long nu_p(const mpz_class& x, unsigned long p) {
  require(p >= 2, "p must be prime");
  if (x == 0) return kInfValuation;
  mpz_class t = x;
  return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), mpz_class(p).get_mpz_t()));
}

inline long nu_p(const mpq_class& x, unsigned long p) {
  if (x == 0) return kInfValuation;
  return nu_p(x.get_num(), p) - nu_p(x.get_den(), p);
}

inline long nu_p_factorial(unsigned long k, unsigned long p) {
  long v = 0;
  for (unsigned long q = p; q <= k; q *= p) v += static_cast<long>(k / q);
  return v;
}

// ---------------------------------------------------------------------------
// Residue scan

// n0 in [1, period(p^K0)] with p^K0 | T_{n0+d} - T_{n0}.
inline std::vector<std::uint64_t> scan_residues(std::uint64_t d, unsigned p, unsigned K0) {
  require(d >= 1, "d must be >= 1");
  require(p == 2 || p == 3, "p must be 2 or 3");
  std::uint64_t m = 1;
  for (unsigned i = 0; i < K0; ++i) m *= p;
  const std::uint64_t per = period_mod(m);
  require(per <= 1000000, "period too large for a direct scan");
  std::vector<std::uint64_t> t(per + d + 1);
  t[0] = 0;
  if (t.size() > 1) t[1] = 1 % m;
  if (t.size() > 2) t[2] = 1 % m;
  for (std::size_t i = 3; i < t.size(); ++i) t[i] = (t[i - 1] + t[i - 2] + t[i - 3]) % m;
  std::vector<std::uint64_t> out;
  for (std::uint64_t n0 = 1; n0 <= per; ++n0)
    if (t[n0 + d] == t[n0]) out.push_back(n0);
  return out;
}

// ---------------------------------------------------------------------------
// Context: truncated p-adic logarithm of C^e

struct PadicContext {
  unsigned p = 2;
  unsigned N = 128;        // results mod p^N
  unsigned slack = 64;     // extra digits absorbing divisions
  unsigned e = 4;          // period mod p; C^e = I mod p
  unsigned K0 = 8;         // scan exponent
  std::uint64_t period = 512;  // period mod p^K0 = e p^s
  unsigned s = 7;
  unsigned trunc_log = 120;
  unsigned trunc_exp = 18;
  long nu_n = 1;           // min valuation of the entries of I - C^e
  mpz_class mod, pn;       // p^(N+slack), p^N
  Mat3 log;                // log(C^e) mod p^(N+slack), exact to beyond p^N
  mpz_class A, B, C;       // trace, sum of principal 2-minors, det of log, mod p^(N+slack)
};

inline unsigned default_k0(unsigned p) { return p == 2 ? 8 : 5; }

inline PadicContext build_context(unsigned p, unsigned N = 128, unsigned K0 = 0) {
  require(p == 2 || p == 3, "p must be 2 or 3");
  require(N >= 8, "N too small");
  PadicContext ctx;
  ctx.p = p;
  ctx.N = N;
  ctx.K0 = K0 ? K0 : default_k0(p);
  ctx.e = static_cast<unsigned>(period_mod(p));
  std::uint64_t pk = 1;
  for (unsigned i = 0; i < ctx.K0; ++i) pk *= p;
  ctx.period = period_mod(pk);
  require(ctx.period % ctx.e == 0, "period structure unexpected");
  {
    std::uint64_t q = ctx.period / ctx.e;
    unsigned s = 0;
    while (q % p == 0) {
      q /= p;
      ++s;
    }
    require(q == 1, "period is not e times a power of p");
    ctx.s = s;
  }
  mpz_ui_pow_ui(ctx.mod.get_mpz_t(), p, N + ctx.slack);
  mpz_ui_pow_ui(ctx.pn.get_mpz_t(), p, N);

  Mat3 ce = power(Mat3::companion(), ctx.e, ctx.mod);
  Mat3 nm = sub(Mat3::identity(), ce, ctx.mod);
  ctx.nu_n = kInfValuation;
  for (const auto& v : nm.a) ctx.nu_n = std::min(ctx.nu_n, nu_p(v, p));
  require(ctx.nu_n >= 1 && ctx.nu_n != kInfValuation, "C^e is not congruent to I mod p");

  // A product of n factors of valuation >= nu_n has valuation >= n nu_n. An error
  // of valuation >= N - s in the log stays below p^N after scaling by p^(s k) / k!,
  // so the tail only needs n nu_n - nu_p(n) >= N - s.
  const long need = static_cast<long>(N) - static_cast<long>(ctx.s);
  unsigned tl = 1;
  for (unsigned n = 1; n < 4 * N + 64; ++n)
    if (static_cast<long>(n) * ctx.nu_n - nu_p(mpz_class(n), p) < need) tl = n;
  ctx.trunc_log = tl;

  // Exp tail: coefficient k has valuation >= k (s + nu_n) - nu_p(k!) once it exceeds N.
  unsigned te = 0;
  for (unsigned k = 1; k < 8 * N; ++k)
    if (static_cast<long>(k) * (static_cast<long>(ctx.s) + ctx.nu_n) - nu_p_factorial(k, p) < static_cast<long>(N))
      te = k;
  ctx.trunc_exp = te;

  // log(C^e) = -sum_{n >= 1} (I - C^e)^n / n
  Mat3 acc;
  Mat3 np = Mat3::identity();
  for (unsigned n = 1; n <= ctx.trunc_log; ++n) {
    np = mul(np, nm, ctx.mod);
    const long v = nu_p(mpz_class(n), p);
    if (v >= static_cast<long>(ctx.slack)) throw CertificationError("precision budget exceeded; raise N+slack");
    mpz_class pv, unit = n, inv;
    mpz_ui_pow_ui(pv.get_mpz_t(), p, static_cast<unsigned long>(v));
    unit /= pv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), ctx.mod.get_mpz_t());
    for (int k = 0; k < 9; ++k) {
      if (!mpz_divisible_p(np.a[k].get_mpz_t(), pv.get_mpz_t()))
        throw CertificationError("precision budget exceeded; raise N+slack");
      mpz_class term = np.a[k] / pv * inv;
      acc.a[k] -= term;
      mpz_fdiv_r(acc.a[k].get_mpz_t(), acc.a[k].get_mpz_t(), ctx.mod.get_mpz_t());
    }
  }
  ctx.log = acc;

  const Mat3& L = ctx.log;
  auto red = [&](mpz_class x) {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), ctx.mod.get_mpz_t());
    return x;
  };
  ctx.A = red(L(0, 0) + L(1, 1) + L(2, 2));
  ctx.B = red(L(0, 0) * L(1, 1) - L(0, 1) * L(1, 0) + L(0, 0) * L(2, 2) - L(0, 2) * L(2, 0) + L(1, 1) * L(2, 2) -
              L(1, 2) * L(2, 1));
  ctx.C = red(L(0, 0) * (L(1, 1) * L(2, 2) - L(1, 2) * L(2, 1)) - L(0, 1) * (L(1, 0) * L(2, 2) - L(1, 2) * L(2, 0)) +
              L(0, 2) * (L(1, 0) * L(2, 1) - L(1, 1) * L(2, 0)));
  return ctx;
}

// ---------------------------------------------------------------------------
// f(z) = sum_k (p^s z)^k u_k / k!  with  T_{n+d} - T_n = f(z), n = n0 + period z.

struct ValuationPoly {
  std::uint64_t d = 0, n0 = 0, period = 0;
  unsigned p = 2, N = 128;
  std::vector<mpz_class> coeffs;  // mod p^N, constant first
};

// u_k = e3^T C^n0 (C^d - I) L^k (1, 1, 0)^T, extended by Cayley-Hamilton for L.
inline std::vector<mpz_class> u_sequence(const PadicContext& ctx, std::uint64_t d, std::uint64_t n0, unsigned K) {
  Mat3 cd = power(Mat3::companion(), d, ctx.mod);
  Mat3 w = mul(power(Mat3::companion(), n0, ctx.mod), sub(cd, Mat3::identity(), ctx.mod), ctx.mod);
  std::vector<mpz_class> u;
  Mat3 lk = Mat3::identity();
  for (unsigned k = 0; k <= std::min(K, 2u); ++k) {
    Mat3 m = mul(w, lk, ctx.mod);
    mpz_class v = m(2, 0) + m(2, 1);
    mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), ctx.mod.get_mpz_t());
    u.push_back(v);
    lk = mul(lk, ctx.log, ctx.mod);
  }
  for (unsigned k = 3; k <= K; ++k) {
    mpz_class v = ctx.A * u[k - 1] - ctx.B * u[k - 2] + ctx.C * u[k - 3];
    mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), ctx.mod.get_mpz_t());
    u.push_back(v);
  }
  return u;
}

inline ValuationPoly valuation_poly(const PadicContext& ctx, std::uint64_t d, std::uint64_t n0) {
  require(d >= 1 && n0 >= 1, "d, n0 must be positive");
  ValuationPoly f;
  f.d = d;
  f.n0 = n0;
  f.period = ctx.period;
  f.p = ctx.p;
  f.N = ctx.N;
  std::vector<mpz_class> u = u_sequence(ctx, d, n0, ctx.trunc_exp);
  mpz_class fact = 1;
  for (unsigned k = 0; k <= ctx.trunc_exp; ++k) {
    if (k > 0) fact *= k;
    mpz_class num;
    mpz_ui_pow_ui(num.get_mpz_t(), ctx.p, static_cast<unsigned long>(ctx.s) * k);
    num *= u[k];
    mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), ctx.mod.get_mpz_t());
    const long vf = nu_p(fact, ctx.p);
    mpz_class pv;
    mpz_ui_pow_ui(pv.get_mpz_t(), ctx.p, static_cast<unsigned long>(vf));
    if (vf >= static_cast<long>(ctx.slack) || !mpz_divisible_p(num.get_mpz_t(), pv.get_mpz_t()))
      throw CertificationError("precision budget exceeded; raise N+slack");
    mpz_class unit = fact / pv, inv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), ctx.mod.get_mpz_t());
    mpz_class c = num / pv * inv;
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), ctx.pn.get_mpz_t());
    f.coeffs.push_back(c);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Hensel digit lifting

struct HenselResult {
  long max_valuation = -1;          // sup of nu_p(T_{n+d} - T_n) over the class, n < n_cap
  std::optional<mpz_class> witness; // smallest n attaining it
  std::size_t max_live = 0;
  unsigned depth = 0;
};

namespace detail {

// h(c + p t) mod p^N, computed as a Taylor shift then a scaling.
inline std::vector<mpz_class> shift_child(std::vector<mpz_class> h, unsigned long c, unsigned long p,
                                          const mpz_class& pn) {
  const std::size_t K = h.size();
  if (c != 0)
    for (std::size_t i = 0; i + 1 < K; ++i)
      for (std::size_t j = K - 1; j > i; --j) {
        h[j - 1] += h[j] * c;
        mpz_fdiv_r(h[j - 1].get_mpz_t(), h[j - 1].get_mpz_t(), pn.get_mpz_t());
      }
  mpz_class pk = 1;
  for (std::size_t i = 0; i < K; ++i) {
    h[i] *= pk;
    mpz_fdiv_r(h[i].get_mpz_t(), h[i].get_mpz_t(), pn.get_mpz_t());
    pk *= p;
  }
  return h;
}

}  // namespace detail

class PrecisionBudget : public CertificationError {
 public:
  PrecisionBudget() : CertificationError("precision budget exceeded; raise N+slack") {}
};

// Bounds nu_p(T_{n+d} - T_n) over n = n0 + period z < n_cap. The single pair with
// T_{n+d} = T_n, namely (n, d) = (1, 1), is excluded.
inline HenselResult hensel_bound(const ValuationPoly& f, const mpz_class& n_cap, std::size_t max_live = 256) {
  HenselResult res;
  const unsigned long p = f.p;
  mpz_class pn;
  mpz_ui_pow_ui(pn.get_mpz_t(), p, f.N);
  if (n_cap <= f.n0) return res;
  mpz_class zcap = n_cap - f.n0;
  mpz_cdiv_q_ui(zcap.get_mpz_t(), zcap.get_mpz_t(), f.period);

  struct Node {
    mpz_class r;
    unsigned j;
    mpz_class pj;
    std::vector<mpz_class> h;
  };
  auto record = [&](long v, const mpz_class& n) {
    if (v > res.max_valuation || (v == res.max_valuation && res.witness && n < *res.witness)) {
      res.max_valuation = v;
      res.witness = n;
    }
  };
  auto excluded = [&](const mpz_class& z) { return f.d == 1 && f.n0 == 1 && z == 0; };

  std::vector<Node> stack;
  stack.push_back({0, 0, 1, f.coeffs});
  while (!stack.empty()) {
    Node nd = std::move(stack.back());
    stack.pop_back();
    res.depth = std::max(res.depth, nd.j);
    if (nd.r >= zcap) continue;
    if (nd.pj >= zcap) {
      // Only z = r survives below the cap.
      if (excluded(nd.r)) continue;
      if (nd.h[0] == 0) throw PrecisionBudget();
      record(nu_p(nd.h[0], p), f.n0 + mpz_class(f.period) * nd.r);
      continue;
    }
    long V = kInfValuation;
    for (const auto& c : nd.h) V = std::min(V, nu_p(c, p));
    if (V >= static_cast<long>(f.N)) throw PrecisionBudget();
    mpz_class pv;
    mpz_ui_pow_ui(pv.get_mpz_t(), p, static_cast<unsigned long>(V));
    std::vector<unsigned long> hb;
    for (const auto& c : nd.h) {
      mpz_class t = c / pv;
      hb.push_back(mpz_fdiv_ui(t.get_mpz_t(), p));
    }
    for (unsigned long c = 0; c < p; ++c) {
      mpz_class rr = nd.r + nd.pj * c;
      if (rr >= zcap) continue;
      unsigned long val = 0, cp = 1;
      for (unsigned long b : hb) {
        val = (val + b * cp) % p;
        cp = cp * c % p;
      }
      if (val != 0) {
        record(V, f.n0 + mpz_class(f.period) * rr);
      } else {
        stack.push_back({rr, nd.j + 1, nd.pj * p, detail::shift_child(nd.h, c, p, pn)});
      }
    }
    res.max_live = std::max(res.max_live, stack.size());
    if (stack.size() > max_live) throw CertificationError("lifting ambiguous");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Per-d tables and the x_min / y_min caps

struct ClassBound {
  std::uint64_t n0;
  long bound;                       // max nu_p over the class
  std::optional<mpz_class> witness;
  unsigned N;                       // precision that resolved it
};

struct ShiftBound {
  std::uint64_t d;
  long bound;                       // max over all n < n_cap
  std::vector<ClassBound> classes;  // empty: bound is K0 - 1 for every n
};

struct PrimeTable {
  unsigned p;
  unsigned K0, N, trunc_log, trunc_exp, s;
  std::uint64_t period;
  long max_bound = -1;
  std::uint64_t argmax_d = 0;
  std::size_t nonempty = 0, classes = 0;
  std::vector<ShiftBound> shifts;
};

namespace detail {

class ContextCache {
 public:
  const PadicContext& get(unsigned p, unsigned N) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(p, N);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, std::make_unique<PadicContext>(build_context(p, N))).first;
    return *it->second;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<unsigned, unsigned>, std::unique_ptr<PadicContext>> cache_;
};

inline ContextCache& context_cache() {
  static ContextCache c;
  return c;
}

inline ShiftBound shift_bound(unsigned p, std::uint64_t d, const mpz_class& n_cap, unsigned N0, unsigned K0) {
  ShiftBound sb{d, static_cast<long>(K0) - 1, {}};
  // n = 0 lies outside the classes n0 in [1, period].
  long v0 = nu_p(trib(d), p);
  sb.bound = std::max(sb.bound, v0);
  for (std::uint64_t n0 : scan_residues(d, p, K0)) {
    for (unsigned N = N0;; N += 64) {
      if (N > N0 + 256) throw CertificationError("precision budget exceeded; raise N+slack");
      const PadicContext& ctx = context_cache().get(p, N);
      try {
        HenselResult h = hensel_bound(valuation_poly(ctx, d, n0), n_cap);
        sb.classes.push_back({n0, h.max_valuation, h.witness, N});
        sb.bound = std::max(sb.bound, h.max_valuation);
        break;
      } catch (const PrecisionBudget&) {
      }
    }
  }
  return sb;
}

}  // namespace detail

inline PrimeTable prime_table(unsigned p, std::uint64_t d_max, const mpz_class& n_cap, unsigned threads = 1,
                              unsigned N = 128) {
  const PadicContext& ctx = detail::context_cache().get(p, N);
  PrimeTable t{p, ctx.K0, N, ctx.trunc_log, ctx.trunc_exp, ctx.s, ctx.period, -1, 0, 0, 0, {}};
  t.max_bound = static_cast<long>(ctx.K0) - 1;
  t.shifts.resize(d_max);
  std::atomic<std::uint64_t> next{1};
  std::mutex err_mu;
  std::exception_ptr err;
  auto work = [&] {
    for (;;) {
      std::uint64_t d = next.fetch_add(1);
      if (d > d_max) return;
      try {
        t.shifts[d - 1] = detail::shift_bound(p, d, n_cap, N, ctx.K0);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < std::max(1u, threads); ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  for (const auto& sb : t.shifts) {
    if (!sb.classes.empty()) ++t.nonempty;
    t.classes += sb.classes.size();
    if (sb.bound > t.max_bound) {
      t.max_bound = sb.bound;
      t.argmax_d = sb.d;
    }
  }
  return t;
}

struct SminResult {
  long x_min_bound = 0;  // max nu_2(T_{n+d} - T_n)
  long y_min_bound = 0;  // max nu_3(T_{n+d} - T_n)
  PrimeTable two, three;
};

inline SminResult smin_bound(std::uint64_t d_max, const mpz_class& n_cap, unsigned threads = 1, unsigned N = 128) {
  require(n_cap >= 1, "n_cap must be positive");
  SminResult r;
  r.two = prime_table(2, d_max, n_cap, threads, N);
  r.three = prime_table(3, d_max, n_cap, threads, N);
  r.x_min_bound = r.two.max_bound;
  r.y_min_bound = r.three.max_bound;
  return r;
}

}  // namespace tripillai
