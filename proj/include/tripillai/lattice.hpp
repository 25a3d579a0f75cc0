#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tripillai/arithmetic.hpp"

namespace tripillai {

using VecZ = std::vector<mpz_class>;
using VecQ = std::vector<mpq_class>;

// Lattice spanned by the columns of a k x k integer matrix.
struct Lattice {
  std::vector<VecZ> cols;

  int rank() const { return static_cast<int>(cols.size()); }
  const mpz_class& at(int row, int col) const { return cols[col][row]; }

  static Lattice from_rows(const std::vector<VecZ>& rows) {
    const int k = static_cast<int>(rows.size());
    Lattice l;
    l.cols.assign(k, VecZ(k));
    for (int i = 0; i < k; ++i) {
      require(static_cast<int>(rows[i].size()) == k, "matrix must be square");
      for (int j = 0; j < k; ++j) l.cols[j][i] = rows[i][j];
    }
    return l;
  }
};

namespace detail {

inline mpz_class dot(const VecZ& a, const VecZ& b) {
  mpz_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline mpz_class det_bareiss(std::vector<VecZ> m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
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

inline mpz_class round_q(const mpq_class& q) {
  mpq_class h = q + mpq_class(1, 2);
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
  return r;
}

}  // namespace detail

inline mpz_class determinant(const Lattice& lat) {
  const int k = lat.rank();
  std::vector<VecZ> m(k, VecZ(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m[i][j] = lat.at(i, j);
  return detail::det_bareiss(m);
}

// Gram-Schmidt data in exact rationals: mu[i][j] (j < i) and B[i] = |b*_i|^2.
struct GramSchmidt {
  std::vector<VecQ> mu;
  VecQ B;
};

inline GramSchmidt gram_schmidt(const Lattice& lat) {
  const int k = lat.rank();
  GramSchmidt gs{std::vector<VecQ>(k, VecQ(k)), VecQ(k)};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < i; ++j) {
      mpq_class s = detail::dot(lat.cols[i], lat.cols[j]);
      for (int l = 0; l < j; ++l) s -= gs.mu[j][l] * gs.mu[i][l] * gs.B[l];
      gs.mu[i][j] = s / gs.B[j];
    }
    mpq_class s = detail::dot(lat.cols[i], lat.cols[i]);
    for (int j = 0; j < i; ++j) s -= gs.mu[i][j] * gs.mu[i][j] * gs.B[j];
    if (s == 0) throw PreconditionError("not a basis");
    gs.B[i] = s;
  }
  return gs;
}

// Size reduction and the Lovasz condition with factor 3/4, checked from scratch.
inline bool is_lll_reduced(const Lattice& lat) {
  GramSchmidt gs = gram_schmidt(lat);
  const mpq_class half(1, 2), delta(3, 4);
  for (int i = 0; i < lat.rank(); ++i) {
    for (int j = 0; j < i; ++j)
      if (abs(gs.mu[i][j]) > half) return false;
    if (i > 0 && gs.B[i] < (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.B[i - 1]) return false;
  }
  return true;
}

inline Lattice lll_reduce(Lattice lat) {
  const int n = lat.rank();
  require(n >= 1, "empty lattice");
  for (const auto& c : lat.cols) require(static_cast<int>(c.size()) == n, "matrix must be square");
  const mpz_class det0 = abs(determinant(lat));
  if (det0 == 0) throw PreconditionError("not a basis");
  if (n == 1) return lat;

  auto& b = lat.cols;
  std::vector<VecQ> mu(n, VecQ(n));
  VecQ B(n);
  const mpq_class half(1, 2), delta(3, 4);

  auto init_row = [&](int k) {
    for (int j = 0; j < k; ++j) {
      mpq_class s = detail::dot(b[k], b[j]);
      for (int i = 0; i < j; ++i) s -= mu[j][i] * mu[k][i] * B[i];
      mu[k][j] = s / B[j];
    }
    mpq_class s = detail::dot(b[k], b[k]);
    for (int j = 0; j < k; ++j) s -= mu[k][j] * mu[k][j] * B[j];
    if (s == 0) throw PreconditionError("not a basis");
    B[k] = s;
  };
  auto red = [&](int k, int l) {
    if (abs(mu[k][l]) <= half) return;
    mpz_class q = detail::round_q(mu[k][l]);
    for (int r = 0; r < n; ++r) b[k][r] -= q * b[l][r];
    mu[k][l] -= q;
    for (int i = 0; i < l; ++i) mu[k][i] -= q * mu[l][i];
  };

  B[0] = detail::dot(b[0], b[0]);
  int k = 1, kmax = 0;
  while (k < n) {
    if (k > kmax) {
      kmax = k;
      init_row(k);
    }
    red(k, k - 1);
    if (B[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      std::swap(b[k], b[k - 1]);
      for (int j = 0; j < k - 1; ++j) std::swap(mu[k][j], mu[k - 1][j]);
      mpq_class m = mu[k][k - 1];
      mpq_class Bn = B[k] + m * m * B[k - 1];
      mu[k][k - 1] = m * B[k - 1] / Bn;
      B[k] = B[k - 1] * B[k] / Bn;
      B[k - 1] = Bn;
      for (int i = k + 1; i <= kmax; ++i) {
        mpq_class t = mu[i][k];
        mu[i][k] = mu[i][k - 1] - m * t;
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
      }
      k = std::max(1, k - 1);
    } else {
      for (int l = k - 2; l >= 0; --l) red(k, l);
      ++k;
    }
  }

  if (abs(determinant(lat)) != det0) throw CertificationError("LLL changed the determinant");
  if (!is_lll_reduced(lat)) throw CertificationError("LLL output failed verification");
  return lat;
}

// Coordinates of v in the column basis, solved exactly.
inline VecQ coordinates(const Lattice& lat, const VecZ& v) {
  const int k = lat.rank();
  require(static_cast<int>(v.size()) == k, "dimension mismatch");
  std::vector<VecQ> m(k, VecQ(k + 1));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) m[i][j] = lat.at(i, j);
    m[i][k] = v[i];
  }
  for (int c = 0; c < k; ++c) {
    int piv = c;
    while (piv < k && m[piv][c] == 0) ++piv;
    if (piv == k) throw PreconditionError("not a basis");
    std::swap(m[c], m[piv]);
    for (int r = 0; r < k; ++r) {
      if (r == c || m[r][c] == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (int j = c; j <= k; ++j) m[r][j] -= f * m[c][j];
    }
  }
  VecQ z(k);
  for (int i = 0; i < k; ++i) z[i] = m[i][k] / m[i][i];
  return z;
}

struct LatticeGap {
  mpq_class c1_sq;     // max_j |b_1|^2 / |b*_j|^2
  mpq_class c2_sq;     // sigma^2 |b_1|^2 / c1^2 = sigma^2 min_j |b*_j|^2
  mpq_class sigma;
  bool in_lattice = false;
  int i0 = -1;         // index giving sigma, -1 when v is in the lattice
  mpq_class dist_sq;   // exact l(L, v)^2, filled by the reduction
};

// Lower bound c2 <= min over u in L (u != v) of |u - v|.
inline LatticeGap lattice_gap(const Lattice& lat, const VecZ& v, const GramSchmidt* gs_in = nullptr) {
  require(static_cast<int>(v.size()) == lat.rank(), "dimension mismatch");
  GramSchmidt local;
  if (!gs_in) local = gram_schmidt(lat);
  const GramSchmidt& gs = gs_in ? *gs_in : local;
  LatticeGap g;
  mpq_class b1 = detail::dot(lat.cols[0], lat.cols[0]);
  mpq_class bmin = gs.B[0];
  for (const auto& x : gs.B)
    if (x < bmin) bmin = x;
  g.c1_sq = b1 / bmin;

  VecQ z = coordinates(lat, v);
  for (int i = lat.rank() - 1; i >= 0; --i)
    if (z[i].get_den() != 1) {
      g.i0 = i;
      break;
    }
  if (g.i0 < 0) {
    g.in_lattice = true;
    g.sigma = 1;
  } else {
    mpq_class f = z[g.i0] - mpq_class(detail::round_q(z[g.i0]));
    g.sigma = abs(f);
  }
  g.c2_sq = g.sigma * g.sigma * bmin;
  return g;
}

namespace detail {

inline mpz_class isqrt_ceil(const mpq_class& q) {
  if (q <= 0) return 0;
  mpz_class f;
  mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
  if (r * r < f) ++r;
  return r;
}

inline mpz_class floor_q(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

}  // namespace detail

// Exact min |u - v|^2 over lattice points u (u != v when v is in the lattice),
// by Fincke-Pohst enumeration over the Gram-Schmidt data.
inline mpq_class closest_distance_sq(const Lattice& lat, const VecZ& v, const GramSchmidt* gs_in = nullptr) {
  const int k = lat.rank();
  require(static_cast<int>(v.size()) == k, "dimension mismatch");
  GramSchmidt local;
  if (!gs_in) local = gram_schmidt(lat);
  const GramSchmidt& gs = gs_in ? *gs_in : local;

  // v = sum y_j b*_j + (orthogonal part, zero for full rank)
  VecQ y(k);
  {
    std::vector<VecQ> bstar(k, VecQ(k));
    for (int j = 0; j < k; ++j) {
      for (int r = 0; r < k; ++r) bstar[j][r] = lat.cols[j][r];
      for (int i = 0; i < j; ++i)
        for (int r = 0; r < k; ++r) bstar[j][r] -= gs.mu[j][i] * bstar[i][r];
      mpq_class d = 0;
      for (int r = 0; r < k; ++r) d += bstar[j][r] * v[r];
      y[j] = d / gs.B[j];
    }
  }

  // Babai rounding gives the starting radius.
  std::vector<mpz_class> c(k);
  auto dist_of = [&](const std::vector<mpz_class>& cc) {
    mpq_class tot = 0;
    for (int r = 0; r < k; ++r) {
      mpz_class s = -v[r];
      for (int j = 0; j < k; ++j) s += cc[j] * lat.cols[j][r];
      tot += mpq_class(s * s);
    }
    return tot;
  };
  for (int j = k - 1; j >= 0; --j) {
    mpq_class t = y[j];
    for (int i = j + 1; i < k; ++i) t -= gs.mu[i][j] * c[i];
    c[j] = detail::round_q(t);
  }
  mpq_class best = dist_of(c);
  bool have = best > 0;
  if (!have) {
    // v is a lattice point: fall back to the longest basis vector as a bound.
    best = 0;
    for (const auto& col : lat.cols) {
      mpq_class n2 = detail::dot(col, col);
      if (n2 > best) best = n2;
    }
  }

  std::vector<mpz_class> cur(k);
  std::function<void(int, const mpq_class&)> rec = [&](int j, const mpq_class& partial) {
    mpq_class t = y[j];
    for (int i = j + 1; i < k; ++i) t -= gs.mu[i][j] * cur[i];
    mpq_class room = (best - partial) / gs.B[j];
    if (room < 0) return;
    mpz_class w = detail::isqrt_ceil(room);
    mpz_class lo = detail::floor_q(t) - w, hi = detail::floor_q(t) + w + 1;
    for (mpz_class cj = lo; cj <= hi; ++cj) {
      mpq_class d = mpq_class(cj) - t;
      mpq_class np = partial + gs.B[j] * d * d;
      if (np > best) continue;
      cur[j] = cj;
      if (j == 0) {
        if (np > 0 && np < best) best = np;
      } else {
        rec(j - 1, np);
      }
    }
  };
  rec(k - 1, 0);
  return best;
}

// |eta0 + a_1 eta_1 + ... + a_k eta_k| <= c3 exp(-c4 H) with |a_i| <= A_i.
struct ReductionProblem {
  std::vector<LazyReal> etas;
  LazyReal eta0;
  mpz_class M;
  std::vector<mpz_class> A;
  RealBall c3, c4;
};

// Identity top block, last row floor(M eta_i); target (0, ..., 0, -floor(M eta0)).
inline std::pair<Lattice, VecZ> build_approx_lattice(const ReductionProblem& prob, const PrecisionPolicy& pol = {}) {
  const int k = static_cast<int>(prob.etas.size());
  require(k >= 1, "need at least one eta");
  require(prob.M >= 1, "M must be >= 1");
  std::vector<VecZ> rows(k, VecZ(k));
  for (int i = 0; i + 1 < k; ++i) rows[i][i] = 1;
  for (int j = 0; j < k; ++j) rows[k - 1][j] = floor_scaled(prob.etas[j], prob.M, pol);
  VecZ v(k);
  if (prob.eta0) v[k - 1] = -floor_scaled(prob.eta0, prob.M, pol);
  return {Lattice::from_rows(rows), v};
}

struct DewegerResult {
  mpz_class H;                  // H <= this
  RealBall bound;               // the real-valued bound before flooring
  bool degenerate_possible = false;  // a_1 = ... = a_{k-1} = 0 branch not excluded
  LatticeGap gap;
  mpq_class S, T;
  mpz_class M;
  int retries = 0;
  Lattice reduced;
  VecZ v;
};

namespace detail {

inline void check_problem(const ReductionProblem& prob) {
  require(prob.etas.size() == prob.A.size(), "need one A_i per eta");
  for (const auto& a : prob.A) require(a >= 1, "A_i must be >= 1");
  require(prob.c3.positive() && prob.c4.positive(), "c3, c4 must be positive");
}

inline std::pair<mpq_class, mpq_class> s_and_t(const std::vector<mpz_class>& A) {
  mpq_class S = 0, sum = 1;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (i + 1 < A.size()) S += mpq_class(A[i] * A[i]);
    sum += A[i];
  }
  return {S, sum / 2};
}

// Bound from a reduced lattice and a target; throws the retry signal if the gap is too small.
inline DewegerResult deweger_from(const ReductionProblem& prob, const Lattice& red, const GramSchmidt& gs,
                                  const VecZ& v) {
  DewegerResult r;
  r.gap = lattice_gap(red, v, &gs);
  // The exact distance is the sharpest admissible lower bound for l(L, v).
  r.gap.dist_sq = closest_distance_sq(red, v, &gs);
  const mpq_class l2 = std::max(r.gap.c2_sq, r.gap.dist_sq);
  std::tie(r.S, r.T) = s_and_t(prob.A);
  if (l2 < r.T * r.T + r.S) throw ReductionError("M too small, enlarge M");
  prec_t p = std::max<prec_t>(256, prob.c3.prec());
  RealBall root = ball_sqrt(RealBall::exact(mpq_class(l2 - r.S), p)) - RealBall::exact(r.T, p);
  if (!root.positive()) throw ReductionError("M too small, enlarge M");
  RealBall lhs = ball_log(RealBall::exact(prob.M, p) * prob.c3.with_prec(p));
  r.bound = (lhs - ball_log(root)) / prob.c4.with_prec(p);
  r.H = floor_upper(r.bound);
  if (r.H < 0) r.H = 0;
  r.M = prob.M;
  r.reduced = red;
  r.v = v;
  return r;
}

}  // namespace detail

// De Weger reduction, enlarging M tenfold (at most three times) when the gap is too small.
inline DewegerResult deweger_bound(ReductionProblem prob, int max_retries = 3, const PrecisionPolicy& pol = {}) {
  detail::check_problem(prob);
  for (int attempt = 0;; ++attempt) {
    auto [lat, v] = build_approx_lattice(prob, pol);
    const mpz_class fk = lat.at(lat.rank() - 1, lat.rank() - 1);
    Lattice red = lll_reduce(lat);
    GramSchmidt gs = gram_schmidt(red);
    try {
      DewegerResult r = detail::deweger_from(prob, red, gs, v);
      r.retries = attempt;
      // The excluded branch needs floor(M eta_k) | floor(M eta_0).
      r.degenerate_possible = fk != 0 && mpz_divisible_p(v.back().get_mpz_t(), fk.get_mpz_t()) != 0;
      return r;
    } catch (const ReductionError&) {
      if (attempt >= max_retries) throw;
      prob.M *= 10;
    }
  }
}

struct BatchResult {
  mpz_class H_max;
  std::vector<DewegerResult> items;  // one per eta0, same order
};

// Same lattice, several targets: the lattice is reduced once per M.
inline BatchResult deweger_batch(const ReductionProblem& base, const std::vector<LazyReal>& eta0s,
                                 int max_retries = 3, const PrecisionPolicy& pol = {}) {
  detail::check_problem(base);
  ReductionProblem prob = base;
  prob.eta0 = nullptr;
  auto [lat, zero] = build_approx_lattice(prob, pol);
  const mpz_class fk = lat.at(lat.rank() - 1, lat.rank() - 1);
  Lattice red = lll_reduce(lat);
  GramSchmidt gs = gram_schmidt(red);
  BatchResult out;
  out.H_max = 0;
  for (const auto& e0 : eta0s) {
    VecZ v(zero.size());
    v.back() = -floor_scaled(e0, prob.M, pol);
    DewegerResult r;
    try {
      r = detail::deweger_from(prob, red, gs, v);
      r.degenerate_possible = fk != 0 && mpz_divisible_p(v.back().get_mpz_t(), fk.get_mpz_t()) != 0;
    } catch (const ReductionError&) {
      ReductionProblem single = base;
      single.eta0 = e0;
      single.M *= 10;
      r = deweger_bound(single, max_retries - 1, pol);
      ++r.retries;
    }
    if (r.H > out.H_max) out.H_max = r.H;
    out.items.push_back(std::move(r));
  }
  return out;
}

}  // namespace tripillai
