#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tripillai/baker.hpp"
#include "tripillai/contfrac.hpp"
#include "tripillai/lattice.hpp"
#include "tripillai/padic.hpp"
#include "tripillai/search.hpp"
#include "tripillai/tribonacci.hpp"

namespace tripillai {

using json = nlohmann::ordered_json;

struct PipelineConfig {
  Scenario scenario = Scenario::positive;
  prec_t precision_cap = 8192;
  prec_t chain_prec = 256;
  std::string M_first;   // empty: 1e112 positive, 1e90 negative
  std::string M_second;  // empty: 1e113 positive, 1e90 negative
  std::string M_cf = "1e48";
  int max_retries = 3;
  unsigned padic_N = 128;
  std::uint64_t padic_d_max = 0;  // 0: taken from the reduction
  unsigned threads = 1;
  std::string box = "final";      // final | desk
  std::optional<std::uint32_t> n_max, x_max, y_max;
  std::uint64_t smooth_n_max = 10000;
  std::filesystem::path out_dir;
  std::filesystem::path spill_dir;

  PrecisionPolicy policy() const { return {std::min<prec_t>(128, precision_cap), precision_cap}; }

  json to_json() const {
    json j;
    j["scenario"] = scenario_name(scenario);
    j["precision_cap"] = precision_cap;
    j["chain_prec"] = chain_prec;
    j["M_first"] = M_first;
    j["M_second"] = M_second;
    j["M_cf"] = M_cf;
    j["max_retries"] = max_retries;
    j["padic_N"] = padic_N;
    j["padic_d_max"] = padic_d_max;
    j["box"] = box;
    j["n_max"] = n_max ? json(*n_max) : json(nullptr);
    j["x_max"] = x_max ? json(*x_max) : json(nullptr);
    j["y_max"] = y_max ? json(*y_max) : json(nullptr);
    j["smooth_n_max"] = smooth_n_max;
    return j;
  }
};

struct Claim {
  std::string name;
  std::string kind;  // theorem | lemma | constant
  bool pass = false;
  std::string derived, reference, note;
};

struct RunReport {
  json doc = json::object();
  std::vector<Claim> claims;
  std::vector<std::string> errors;  // certification or configuration failures

  void claim(std::string name, std::string kind, bool pass, std::string derived, std::string reference,
             std::string note = {}) {
    claims.push_back({std::move(name), std::move(kind), pass, std::move(derived), std::move(reference),
                      std::move(note)});
  }
  void merge(RunReport other) {
    for (auto& [k, v] : other.doc.items()) doc[k] = v;
    for (auto& c : other.claims) claims.push_back(std::move(c));
    for (auto& e : other.errors) errors.push_back(std::move(e));
  }
  bool all_pass() const {
    for (const auto& c : claims)
      if (!c.pass) return false;
    return true;
  }
  int exit_code() const { return !errors.empty() ? 2 : all_pass() ? 0 : 1; }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(const RealBall& b) { return b.str(6); }

inline json cert_json(const BoundCertificate& c) {
  json j;
  j["name"] = c.name;
  j["rule"] = c.rule;
  j["shape"] = c.shape;
  j["value"] = fmt(c.value);
  j["reference"] = c.reference ? json(*c.reference) : json(nullptr);
  j["within_reference"] = c.within_reference();
  json in = json::object();
  for (const auto& [k, v] : c.inputs) in[k] = fmt(v);
  j["inputs"] = in;
  return j;
}

inline json record_json(const RepRecord& r) {
  json reps = json::array();
  for (const auto& p : r.reps) reps.push_back({p.n, p.x, p.y});
  return {{"c", r.c.get_str()}, {"reps", reps}};
}

inline std::string records_str(const std::vector<RepRecord>& recs) {
  std::string s;
  for (const auto& r : recs) {
    if (!s.empty()) s += "; ";
    s += r.c.get_str() + ":";
    for (const auto& p : r.reps)
      s += " (" + std::to_string(p.n) + "," + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
  }
  return s.empty() ? "none" : s;
}

inline const char* tag(Scenario s) { return s == Scenario::positive ? "pos" : s == Scenario::negative ? "neg" : "zero"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Final window algebra

struct FinalBox {
  RealBall X;         // x log 2 + y log 3 < X
  mpz_class X_int;    // X < X_int
  mpz_class n_lt, x_lt, y_lt;
};

// X < x_min log 2 + y_min log 3 + 2 c_X, then n log(alpha) - 3 < X.
inline FinalBox final_box(long x_min, long y_min, const mpz_class& c_X, prec_t prec = 256) {
  require(x_min >= 0 && y_min >= 0 && c_X >= 0, "final box needs nonnegative inputs");
  const RealBall l2 = ball_log(RealBall::exact(2, prec)), l3 = ball_log(RealBall::exact(3, prec));
  FinalBox b;
  b.X = RealBall::exact(x_min, prec) * l2 + RealBall::exact(y_min, prec) * l3 + RealBall::exact(mpz_class(2 * c_X), prec);
  b.X_int = ceil_upper(b.X);
  if (!certainly_lt(b.X, mpq_class(b.X_int))) b.X_int += 1;
  const RealBall Xi = RealBall::exact(b.X_int, prec);
  b.x_lt = ceil_upper(Xi / l2);
  b.y_lt = ceil_upper(Xi / l3);
  b.n_lt = ceil_upper((Xi + 3) / log_alpha_ball(prec));
  return b;
}

// ---------------------------------------------------------------------------
// Reduction stages

struct CFStage {
  mpz_class M;
  std::size_t N = 0;
  mpz_class a;
  mpq_class gap;
  RealBall tau_lo, K3, c3;
  mpz_class d_floor;  // K3 alpha^-d < 1/2 once d >= d_floor
};

struct ReductionOutcome {
  Scenario scenario = Scenario::positive;
  DewegerResult first;                 // positive: n - n_1; negative: X - X_1
  std::optional<BatchResult> second_batch;  // positive: X - X_1 over every d
  std::optional<DewegerResult> second;      // negative: n - n_1
  std::optional<CFStage> cf;
  mpz_class d_max, c_X;
  SminResult smin;
  FinalBox box;
  double seconds = 0;
};

inline CFStage cf_stage(const mpz_class& M, const mpz_class& y_bound, const PrecisionPolicy& pol, prec_t prec = 256) {
  CFStage s;
  s.M = M;
  require(y_bound >= 1 && y_bound < M, "continued fraction needs y bound below M");
  LazyReal mu = [](prec_t p) { return ball_log(RealBall::exact(3, p + 16)) / ball_log(RealBall::exact(2, p + 16)); };
  CFExpansion e = cf_expand(mu, M, pol);
  if (!verify_convergents(e)) throw CertificationError("convergent verification failed");
  s.N = cf_index(e, M);
  s.a = legendre_floor(e, M);
  s.gap = legendre_gap(e, M);
  // |x log 2 - y log 3| > log 2 gap / |y - y_1|
  const RealBall l2 = ball_log(RealBall::exact(2, prec));
  s.tau_lo = l2 * RealBall::exact(s.gap, prec) / RealBall::exact(y_bound, prec);
  const RealBall ca = cached_constants(prec + 16).c_alpha.with_prec(prec);
  s.K3 = (RealBall::exact(mpq_class(3, 2), prec) / s.tau_lo + 2) / ca;
  s.c3 = RealBall::exact(mpq_class(3, 2), prec) * s.K3;
  s.d_floor = ceil_upper(ball_log(2 * s.K3) / log_alpha_ball(prec));
  return s;
}

inline ReductionProblem base_problem(const ChainResult& chain, const mpz_class& M, prec_t prec) {
  ReductionProblem pr;
  pr.etas = {lazy_log(2), lazy_log(3), lazy_log_alpha()};
  pr.eta0 = lazy_log_c_alpha();
  pr.M = M;
  pr.A = {chain.x_bound, chain.y_bound, chain.n_bound};
  pr.c3 = RealBall::exact(1, prec);
  pr.c4 = RealBall::exact(1, prec);
  return pr;
}

inline ReductionOutcome run_reduction(const PipelineConfig& cfg, const ChainResult& chain) {
  require(chain.scenario != Scenario::zero, "the zero scenario has no reduction stage");
  auto t0 = std::chrono::steady_clock::now();
  const PrecisionPolicy pol = cfg.policy();
  const prec_t prec = 256;
  const bool pos = chain.scenario == Scenario::positive;
  ReductionOutcome out;
  out.scenario = chain.scenario;
  const mpz_class M1 = parse_integer(!cfg.M_first.empty() ? cfg.M_first : pos ? "1e112" : "1e90");
  const mpz_class M2 = parse_integer(!cfg.M_second.empty() ? cfg.M_second : pos ? "1e113" : "1e90");

  if (pos) {
    // |log C_alpha - x log 2 - y log 3 + (n-1) log alpha| < 15 alpha^-(n-n_1), n - n_1 >= 5
    ReductionProblem p1 = base_problem(chain, M1, prec);
    p1.c3 = RealBall::exact(15, prec);
    p1.c4 = log_alpha_ball(prec);
    out.first = deweger_bound(p1, cfg.max_retries, pol);
    out.d_max = std::max<mpz_class>(out.first.H, 4);

    // |(n_1-1) log alpha + log C_alpha (alpha^d - 1) - x log 2 - y log 3| < 4.5 e^-(X-X_1), X - X_1 >= 2
    require(out.d_max < 100000, "n - n_1 bound too large for the batch stage");
    ReductionProblem p2 = base_problem(chain, M2, prec);
    p2.c3 = RealBall::exact(mpq_class(9, 2), prec);
    p2.c4 = RealBall::exact(1, prec);
    std::vector<LazyReal> targets;
    for (unsigned long d = 1; d <= out.d_max.get_ui(); ++d) targets.push_back(lazy_log_c_alpha_shift(d));
    out.second_batch = deweger_batch(p2, targets, cfg.max_retries, pol);
    out.c_X = std::max<mpz_class>(out.second_batch->H_max, 1);
  } else {
    // |log C_alpha + (n-1) log alpha - x log 2 - y log 3| < 4.5 e^-(X-X_1)
    ReductionProblem p1 = base_problem(chain, M1, prec);
    p1.c3 = RealBall::exact(mpq_class(9, 2), prec);
    p1.c4 = RealBall::exact(1, prec);
    out.first = deweger_bound(p1, cfg.max_retries, pol);
    out.c_X = std::max<mpz_class>(out.first.H, 1);

    out.cf = cf_stage(parse_integer(cfg.M_cf), chain.y_bound, pol, prec);
    ReductionProblem p2 = base_problem(chain, M2, prec);
    p2.c3 = out.cf->c3;
    p2.c4 = log_alpha_ball(prec);
    out.second = deweger_bound(p2, cfg.max_retries, pol);
    out.d_max = std::max<mpz_class>(out.second->H, out.cf->d_floor - 1);
  }

  const std::uint64_t d_max = cfg.padic_d_max ? cfg.padic_d_max : out.d_max.get_ui();
  out.smin = smin_bound(d_max, chain.n_bound, cfg.threads, cfg.padic_N);
  out.box = final_box(out.smin.x_min_bound, out.smin.y_min_bound, out.c_X, prec);
  out.seconds = detail::seconds_since(t0);
  return out;
}

// Search box from the reduced bounds; the window lemma needs n > 310, so
// everything up to 310 is searched regardless.
inline SearchBox box_from(const FinalBox& b) {
  SearchBox s;
  s.n_max = static_cast<std::uint32_t>(std::max<mpz_class>(b.n_lt - 1, 310).get_ui());
  s.x_max = static_cast<std::uint32_t>(mpz_class(b.x_lt - 1).get_ui());
  s.y_max = static_cast<std::uint32_t>(mpz_class(b.y_lt - 1).get_ui());
  return s;
}

inline SearchBox desk_box() { return {350, 350, 225}; }

// ---------------------------------------------------------------------------
// Subcommands

inline RunReport cmd_bounds(const PipelineConfig& cfg, ChainResult* chain_out = nullptr) {
  RunReport rep;
  auto t0 = std::chrono::steady_clock::now();
  const char* tg = detail::tag(cfg.scenario);
  json j;
  if (cfg.scenario == Scenario::zero) {
    auto hits = smoothness_scan(cfg.smooth_n_max);
    json h = json::array();
    std::string s;
    for (const auto& x : hits) {
      h.push_back({x.n, x.x, x.y});
      s += (s.empty() ? "" : ",") + std::to_string(x.n);
    }
    j["smooth_n_max"] = cfg.smooth_n_max;
    j["smooth"] = h;
    rep.claim("zero/smooth_indices", "theorem", s == "1,2,3,4,7,9", "{" + s + "}", "{1,2,3,4,7,9}",
              "n <= " + std::to_string(cfg.smooth_n_max));
  } else {
    ChainResult ch = bound_chain(cfg.scenario, std::min(cfg.chain_prec, cfg.precision_cap));
    json certs = json::array();
    for (const auto& c : ch.certs) {
      certs.push_back(detail::cert_json(c));
      if (c.reference) rep.claim(c.name, "constant", c.within_reference(), detail::fmt(c.value), *c.reference, "5% slack");
    }
    j["certificates"] = certs;
    j["n_bound"] = ch.n_bound.get_str();
    j["x_bound"] = ch.x_bound.get_str();
    j["y_bound"] = ch.y_bound.get_str();
    if (chain_out) *chain_out = std::move(ch);
  }
  j["seconds"] = detail::seconds_since(t0);
  rep.doc[std::string(tg) + "/bounds"] = j;
  return rep;
}

struct ReferenceBox {
  long x_min_lt;  // published cap on the p-adic valuations (strict unless noted)
  bool inclusive;
  long c_X, d_max;
  long X_lt, n_lt, x_lt, y_lt;
};

inline ReferenceBox reference_box(Scenario s) {
  if (s == Scenario::positive) return {128, false, 174, 285, 578, 962, 834, 527};
  return {152, true, 138, 417, 549, 914, 793, 500};
}

inline RunReport cmd_reduce(const PipelineConfig& cfg, const ChainResult& chain, ReductionOutcome* out_ptr = nullptr) {
  RunReport rep;
  ReductionOutcome r = run_reduction(cfg, chain);
  const bool pos = r.scenario == Scenario::positive;
  const std::string tg = detail::tag(r.scenario);
  const ReferenceBox ref = reference_box(r.scenario);
  auto within10 = [](const mpz_class& h, long ref) { return h * 10 <= mpz_class(ref) * 11; };

  json j;
  auto dw = [](const DewegerResult& d) {
    json x;
    x["H"] = d.H.get_str();
    x["bound"] = detail::fmt(d.bound);
    x["M"] = d.M.get_str();
    x["retries"] = d.retries;
    x["c2_sq"] = mpq_class(d.gap.c2_sq).get_d();
    x["dist_sq"] = mpq_class(d.gap.dist_sq).get_d();
    x["T"] = d.T.get_d();
    x["S"] = d.S.get_d();
    x["degenerate_possible"] = d.degenerate_possible;
    return x;
  };
  j["first"] = dw(r.first);
  if (pos) {
    json items = json::array();
    for (const auto& it : r.second_batch->items) items.push_back(it.H.get_str());
    j["second"] = {{"H_max", r.second_batch->H_max.get_str()}, {"per_d", items}};
    rep.claim(tg + "/lll_n_gap", "constant", within10(r.first.H, ref.d_max), r.first.H.get_str(),
              std::to_string(ref.d_max), "10% slack; M escalations: " + std::to_string(r.first.retries));
    rep.claim(tg + "/lll_X_gap", "constant", within10(r.c_X, ref.c_X), r.c_X.get_str(), std::to_string(ref.c_X),
              "10% slack");
  } else {
    j["second"] = dw(*r.second);
    const CFStage& cf = *r.cf;
    j["cf"] = {{"M", cf.M.get_str()},     {"N", cf.N},
               {"a", cf.a.get_str()},     {"tau_lo", detail::fmt(cf.tau_lo)},
               {"K3", detail::fmt(cf.K3)}, {"c3", detail::fmt(cf.c3)},
               {"d_floor", cf.d_floor.get_str()}};
    rep.claim(tg + "/lll_X_gap", "constant", within10(r.c_X, ref.c_X), r.c_X.get_str(), std::to_string(ref.c_X),
              "10% slack");
    rep.claim(tg + "/cf_a", "constant", cf.a == 55, cf.a.get_str(), "55", "N = " + std::to_string(cf.N));
    rep.claim(tg + "/lll_n_gap", "constant", within10(r.d_max, ref.d_max), r.d_max.get_str(),
              std::to_string(ref.d_max), "10% slack; derived c3 = " + detail::fmt(cf.c3));
  }
  j["d_max"] = r.d_max.get_str();
  j["c_X"] = r.c_X.get_str();

  auto table_json = [](const PrimeTable& t) {
    json x;
    x["p"] = t.p;
    x["K0"] = t.K0;
    x["N"] = t.N;
    x["trunc_log"] = t.trunc_log;
    x["trunc_exp"] = t.trunc_exp;
    x["s"] = t.s;
    x["period"] = t.period;
    x["max_bound"] = t.max_bound;
    x["argmax_d"] = t.argmax_d;
    x["nonempty"] = t.nonempty;
    x["classes"] = t.classes;
    if (t.argmax_d)
      for (const auto& c : t.shifts[t.argmax_d - 1].classes)
        if (c.bound == t.max_bound && c.witness) x["witness_n"] = c.witness->get_str();
    return x;
  };
  j["padic"] = {{"two", table_json(r.smin.two)}, {"three", table_json(r.smin.three)}};
  auto cap_ok = [&](long v) { return ref.inclusive ? v <= ref.x_min_lt : v < ref.x_min_lt; };
  const std::string cap = std::string(ref.inclusive ? "<= " : "< ") + std::to_string(ref.x_min_lt);
  rep.claim(tg + "/x_min", "constant", cap_ok(r.smin.x_min_bound), std::to_string(r.smin.x_min_bound), cap,
            "max nu_2 at d = " + std::to_string(r.smin.two.argmax_d));
  rep.claim(tg + "/y_min", "constant", cap_ok(r.smin.y_min_bound), std::to_string(r.smin.y_min_bound), cap,
            "max nu_3 at d = " + std::to_string(r.smin.three.argmax_d));

  j["final"] = {{"X", detail::fmt(r.box.X)},
                {"X_lt", r.box.X_int.get_str()},
                {"n_lt", r.box.n_lt.get_str()},
                {"x_lt", r.box.x_lt.get_str()},
                {"y_lt", r.box.y_lt.get_str()}};
  // The published box only needs to contain ours.
  auto inside = [](const mpz_class& a, long b) { return a <= b; };
  rep.claim(tg + "/final_X", "constant", inside(r.box.X_int, ref.X_lt), "X < " + r.box.X_int.get_str(),
            "X < " + std::to_string(ref.X_lt));
  rep.claim(tg + "/final_box", "constant",
            inside(r.box.n_lt, ref.n_lt) && inside(r.box.x_lt, ref.x_lt) && inside(r.box.y_lt, ref.y_lt),
            "n < " + r.box.n_lt.get_str() + ", x < " + r.box.x_lt.get_str() + ", y < " + r.box.y_lt.get_str(),
            "n < " + std::to_string(ref.n_lt) + ", x < " + std::to_string(ref.x_lt) + ", y < " +
                std::to_string(ref.y_lt));
  j["seconds"] = r.seconds;
  rep.doc[tg + "/reduce"] = j;
  if (out_ptr) *out_ptr = std::move(r);
  return rep;
}

inline void write_records_csv(const std::filesystem::path& path, const std::vector<RepRecord>& recs) {
  std::ofstream os(path);
  os << "c,n,x,y\n";
  for (const auto& r : recs)
    for (const auto& p : r.reps) os << r.c.get_str() << ',' << p.n << ',' << p.x << ',' << p.y << '\n';
}

inline RunReport cmd_search(const PipelineConfig& cfg, SearchBox box, const std::optional<SearchBox>& full = {}) {
  RunReport rep;
  if (cfg.n_max) box.n_max = *cfg.n_max;
  if (cfg.x_max) box.x_max = *cfg.x_max;
  if (cfg.y_max) box.y_max = *cfg.y_max;
  const std::string tg = detail::tag(cfg.scenario);
  const TheoremSpec* spec = nullptr;
  auto specs = theorem_specs();
  for (const auto& s : specs)
    if (s.name == scenario_name(cfg.scenario)) spec = &s;
  require(spec != nullptr, "no theorem for scenario");
  SearchOptions opt;
  opt.threads = cfg.threads;
  opt.spill_dir = cfg.spill_dir;
  TheoremCheck chk = verify_theorem(*spec, box, opt);

  std::string note = "box n <= " + std::to_string(box.n_max) + ", x <= " + std::to_string(box.x_max) +
                     ", y <= " + std::to_string(box.y_max);
  const bool reduced = full && (box.n_max < full->n_max || box.x_max < full->x_max || box.y_max < full->y_max);
  if (reduced) note += "; reduced box";
  if (chk.empty_box) note += "; empty box, vacuous";
  rep.claim(tg + "/theorem", "theorem", chk.pass, detail::records_str(chk.found), detail::records_str(spec->expected),
            note);

  json j;
  j["box"] = {{"n_max", box.n_max}, {"x_max", box.x_max}, {"y_max", box.y_max}, {"sign", sign_name(spec->sign)},
              {"min_multiplicity", spec->min_multiplicity}};
  j["reduced_box"] = reduced;
  j["enumerated"] = chk.stats.enumerated;
  j["spilled"] = chk.stats.spilled;
  json recs = json::array();
  for (const auto& r : chk.found) recs.push_back(detail::record_json(r));
  j["records"] = recs;
  json miss = json::array(), extra = json::array();
  for (const auto& r : chk.missing) miss.push_back(detail::record_json(r));
  for (const auto& r : chk.extra) extra.push_back(detail::record_json(r));
  j["missing"] = miss;
  j["extra"] = extra;
  j["seconds"] = chk.stats.seconds;
  rep.doc[tg + "/search"] = j;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_records_csv(cfg.out_dir / ("records_" + tg + ".csv"), chk.found);
  }
  return rep;
}

inline RunReport cmd_padic(unsigned p, std::uint64_t d_max, const mpz_class& n_cap, unsigned N, unsigned threads) {
  require(p == 2 || p == 3, "p must be 2 or 3");
  require(d_max >= 1, "d_max must be >= 1");
  RunReport rep;
  auto t0 = std::chrono::steady_clock::now();
  PrimeTable t = prime_table(p, d_max, n_cap, threads, N);
  json j;
  j["p"] = p;
  j["d_max"] = d_max;
  j["n_cap"] = n_cap.get_str();
  j["K0"] = t.K0;
  j["N"] = t.N;
  j["trunc_log"] = t.trunc_log;
  j["trunc_exp"] = t.trunc_exp;
  j["s"] = t.s;
  j["period"] = t.period;
  j["max_bound"] = t.max_bound;
  j["argmax_d"] = t.argmax_d;
  j["nonempty"] = t.nonempty;
  j["classes"] = t.classes;
  json per = json::array();
  for (const auto& sb : t.shifts) {
    json cl = json::array();
    for (const auto& c : sb.classes)
      cl.push_back({{"n0", c.n0}, {"bound", c.bound}, {"N", c.N},
                    {"witness", c.witness ? json(c.witness->get_str()) : json(nullptr)}});
    per.push_back({{"d", sb.d}, {"bound", sb.bound}, {"classes", cl}});
  }
  j["shifts"] = per;
  j["seconds"] = detail::seconds_since(t0);
  rep.doc["padic"] = j;
  return rep;
}

// Order of the companion matrix mod m, from its factorization.
inline bool matrix_order_is(std::uint64_t m, std::uint64_t pi) {
  const Mat3 C = Mat3::companion();
  const mpz_class mod = m;
  auto is_id = [&](std::uint64_t e) {
    Mat3 r = power(C, e, mod);
    Mat3 id = power(Mat3::identity(), 1, mod);
    return r.a == id.a;
  };
  if (!is_id(pi)) return false;
  std::uint64_t rest = pi;
  for (std::uint64_t q = 2; rest > 1; ++q) {
    if (q * q > rest) q = rest;
    if (rest % q) continue;
    while (rest % q == 0) rest /= q;
    if (is_id(pi / q)) return false;
  }
  return true;
}

inline RunReport cmd_period(unsigned k2_max = 10, unsigned k3_max = 5) {
  RunReport rep;
  json rows = json::array();
  auto check = [&](std::uint64_t m, std::uint64_t expect, const std::string& name) {
    std::uint64_t pi = period_mod(m);
    bool ok = pi == expect && matrix_order_is(m, pi);
    rows.push_back({{"m", m}, {"period", pi}, {"expected", expect}, {"order_check", matrix_order_is(m, pi)}});
    rep.claim(name, "lemma", ok, std::to_string(pi), std::to_string(expect));
  };
  for (unsigned k = 1; k <= k2_max; ++k)
    check(1ull << k, 1ull << (k + 1), "period/2^" + std::to_string(k));
  std::uint64_t p3 = 1;
  for (unsigned k = 0; k <= k3_max; ++k, p3 *= 3)
    check(3 * p3, 13 * p3, "period/3^" + std::to_string(k + 1));
  rep.doc["periods"] = rows;
  return rep;
}

// "log3/log2", "log3", or a rational/decimal literal.
inline LazyReal parse_mu(const std::string& s) {
  auto log_of = [](const std::string& t) -> std::optional<mpq_class> {
    if (t.rfind("log", 0) != 0) return std::nullopt;
    mpq_class q(t.substr(3));
    q.canonicalize();
    if (q <= 0 || q == 1) throw PreconditionError("log argument must be positive and not 1: " + t);
    return q;
  };
  try {
    auto slash = s.find('/');
    if (s.rfind("log", 0) == 0) {
      auto num = log_of(s.substr(0, slash));
      std::optional<mpq_class> den;
      if (slash != std::string::npos) den = log_of(s.substr(slash + 1));
      if (slash != std::string::npos && !den) throw PreconditionError("bad mu: " + s);
      return [num, den](prec_t p) {
        RealBall a = ball_log(RealBall::exact(*num, p + 16));
        return den ? a / ball_log(RealBall::exact(*den, p + 16)) : a;
      };
    }
    mpq_class q;
    if (s.find_first_of(".eE") != std::string::npos) {
      return [s](prec_t p) { return RealBall::decimal(s, p); };
    }
    q = mpq_class(s);
    q.canonicalize();
    return lazy_exact(q);
  } catch (const std::invalid_argument&) {
    throw PreconditionError("bad mu: " + s);
  }
}

inline RunReport cmd_cf(const std::string& mu_text, const std::string& M_text, const PrecisionPolicy& pol = {}) {
  RunReport rep;
  const mpz_class M = parse_integer(M_text);
  CFExpansion e = cf_expand(parse_mu(mu_text), M, pol);
  const std::size_t N = cf_index(e, M);
  const mpz_class a = legendre_floor(e, M);
  json q = json::array();
  for (std::size_t i = 0; i <= N; ++i) q.push_back(e.quotients[i].get_str());
  rep.doc["cf"] = {{"mu", mu_text},  {"M", M.get_str()}, {"N", N},       {"a", a.get_str()},
                   {"gap", legendre_gap(e, M).get_str()}, {"prec", e.prec}, {"quotients", q}};
  rep.claim("cf/convergents", "lemma", verify_convergents(e), "verified", "determinant and Legendre inequality");
  if (mu_text == "log3/log2" && M == parse_integer("1e48"))
    rep.claim("cf/a", "constant", a == 55, a.get_str(), "55", "N = " + std::to_string(N));
  return rep;
}

inline RunReport cmd_lemmas(const PrecisionPolicy& pol = {}) {
  RunReport rep;
  CheckReport b = binet_residual_check(1000, pol);
  rep.claim("lemma/binet", "lemma", b.ok, b.detail, "n <= 1000");
  GrowthReport g = growth_check(1000, pol);
  std::string edges;
  for (const auto& e : g.edges)
    edges += "n=" + std::to_string(e.n) + ": left " + verdict_name(e.left) + ", right " + verdict_name(e.right) + "; ";
  rep.claim("lemma/growth", "lemma", g.holds_from_3, g.holds_from_3 ? "holds for 3 <= n <= 1000" : "fails",
            "1 <= n <= 1000", edges);
  GammaReport gm = gamma_lemma_check();
  std::string bad, bad_inv;
  for (const auto& p : gm.pairs) {
    if (!p.differ) bad += "(" + std::to_string(p.u) + "," + std::to_string(p.v) + ")";
    if (!p.differ_inverse) bad_inv += "(" + std::to_string(p.u) + "," + std::to_string(p.v) + ")";
  }
  std::size_t held = 0;
  for (const auto& p : gm.pairs) held += p.differ;
  rep.claim("lemma/gamma", "lemma", gm.ok, std::to_string(held) + "/" + std::to_string(gm.pairs.size()) + " pairs",
            "18/18 pairs",
            "equal at " + (bad.empty() ? std::string("none") : bad) + "; with negative exponents equal at " +
                (bad_inv.empty() ? std::string("none") : bad_inv));
  rep.merge(cmd_period());
  return rep;
}

// bounds -> reduce -> search for each scenario, plus the standalone checks.
inline RunReport cmd_verify_paper(const PipelineConfig& cfg, const std::vector<Scenario>& scenarios) {
  RunReport rep;
  auto t0 = std::chrono::steady_clock::now();
  try {
    rep.merge(cmd_lemmas(cfg.policy()));
  } catch (const Error& e) {
    rep.errors.push_back(std::string("lemmas: ") + e.what());
  }
  std::optional<SearchBox> positive_full;
  for (Scenario sc : scenarios) {
    PipelineConfig c = cfg;
    c.scenario = sc;
    try {
      if (sc == Scenario::zero) {
        rep.merge(cmd_bounds(c));
        SearchBox full = positive_full ? *positive_full : SearchBox{961, 833, 526};
        SearchBox box = cfg.box == "desk" ? desk_box() : full;
        rep.merge(cmd_search(c, box, full));
        continue;
      }
      ChainResult chain;
      rep.merge(cmd_bounds(c, &chain));
      ReductionOutcome red;
      rep.merge(cmd_reduce(c, chain, &red));
      SearchBox full = box_from(red.box);
      if (sc == Scenario::positive) positive_full = full;
      SearchBox box = cfg.box == "desk" ? desk_box() : full;
      rep.merge(cmd_search(c, box, full));
    } catch (const Error& e) {
      rep.errors.push_back(std::string(scenario_name(sc)) + ": " + e.what());
    }
  }
  rep.doc["seconds"] = detail::seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fingerprint(const PipelineConfig& cfg) {
  std::string s = cfg.to_json().dump() + "|gmp " + gmp_version + "|mpfr " + mpfr_get_version();
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(s);
  return os.str();
}

inline json report_json(const RunReport& rep, const PipelineConfig& cfg) {
  json j;
  j["config"] = cfg.to_json();
  j["fingerprint"] = fingerprint(cfg);
  j["software"] = {{"gmp", gmp_version}, {"mpfr", mpfr_get_version()}};
  json cl = json::array();
  for (const auto& c : rep.claims)
    cl.push_back({{"name", c.name}, {"kind", c.kind}, {"pass", c.pass}, {"derived", c.derived},
                  {"reference", c.reference}, {"note", c.note}});
  j["claims"] = cl;
  j["errors"] = rep.errors;
  j["results"] = rep.doc;
  j["exit_code"] = rep.exit_code();
  return j;
}

inline std::string report_text(const RunReport& rep) {
  std::ostringstream os;
  std::size_t w = 4;
  for (const auto& c : rep.claims) w = std::max(w, c.name.size());
  for (const auto& c : rep.claims) {
    os << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(static_cast<int>(w)) << c.name << "  " << c.derived
       << "  [reference " << c.reference << "]";
    if (!c.note.empty()) os << "  " << c.note;
    os << '\n';
  }
  for (const auto& e : rep.errors) os << "ERROR " << e << '\n';
  return os.str();
}

inline void write_report(const RunReport& rep, const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream(cfg.out_dir / "report.json") << report_json(rep, cfg).dump(2) << '\n';
  std::ofstream(cfg.out_dir / "report.txt") << report_text(rep);
}

}  // namespace tripillai
