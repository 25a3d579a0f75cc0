#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tripillai/pipeline.hpp"

using namespace tripillai;

namespace {

void add_common(CLI::App* sub, PipelineConfig& cfg, std::string& out) {
  sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", out, "report directory");
  sub->add_option("--precision-cap", cfg.precision_cap, "max working precision in bits")->check(CLI::Range(16, 1 << 20));
}

void add_scenario(CLI::App* sub, std::string& scenario) {
  sub->add_option("--scenario", scenario, "positive | negative | zero")
      ->check(CLI::IsMember({"positive", "negative", "zero", "positive_c", "negative_c", "zero_c", "all"}));
}

void add_reduction(CLI::App* sub, PipelineConfig& cfg) {
  sub->add_option("--M1", cfg.M_first, "scaling for the first lattice (default by scenario)");
  sub->add_option("--M2", cfg.M_second, "scaling for the second lattice (default by scenario)");
  sub->add_option("--M-cf", cfg.M_cf, "continued fraction threshold");
  sub->add_option("--max-retries", cfg.max_retries, "tenfold M escalations")->check(CLI::NonNegativeNumber);
  sub->add_option("--padic-N", cfg.padic_N, "p-adic working digits")->check(CLI::Range(32u, 4096u));
  sub->add_option("--padic-d-max", cfg.padic_d_max, "override the shift range of the valuation tables");
}

int finish(const RunReport& rep, const PipelineConfig& cfg) {
  std::cout << report_text(rep);
  write_report(rep, cfg);
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified pipeline for T_n - 2^x 3^y = c"};
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string out, scenario = "positive";

  auto* bounds = app.add_subcommand("bounds", "absolute bounds from linear forms in logarithms");
  add_common(bounds, cfg, out);
  add_scenario(bounds, scenario);
  bounds->add_option("--smooth-n-max", cfg.smooth_n_max, "scan range for the zero scenario");

  auto* reduce = app.add_subcommand("reduce", "lattice, continued fraction and p-adic reduction");
  add_common(reduce, cfg, out);
  add_scenario(reduce, scenario);
  add_reduction(reduce, cfg);

  std::uint32_t n_max = 350, x_max = 350, y_max = 225, min_reps = 0;
  std::string sign = "positive";
  auto* search = app.add_subcommand("search", "exhaustive search of a box");
  add_common(search, cfg, out);
  search->add_option("--n-max", n_max, "largest n")->capture_default_str();
  search->add_option("--x-max", x_max, "largest x")->capture_default_str();
  search->add_option("--y-max", y_max, "largest y")->capture_default_str();
  search->add_option("--min-reps", min_reps, "multiplicity threshold (default: the theorem's)");
  search->add_option("--sign", sign, "all | positive | negative | zero")
      ->check(CLI::IsMember({"all", "positive", "negative", "zero"}));
  search->add_option("--spill-dir", cfg.spill_dir, "directory for spill files and checkpoints");

  unsigned p = 2;
  std::uint64_t d_max = 285;
  std::string n_cap = "1.2e37";
  auto* padic = app.add_subcommand("padic", "valuation table of T_{n+d} - T_n");
  add_common(padic, cfg, out);
  padic->add_option("--p", p, "2 or 3")->check(CLI::IsMember({2u, 3u}));
  padic->add_option("--d-max", d_max, "largest shift")->check(CLI::PositiveNumber);
  padic->add_option("--n-cap", n_cap, "n < n_cap");
  padic->add_option("--N", cfg.padic_N, "working digits")->check(CLI::Range(32u, 4096u));

  unsigned k2 = 10, k3 = 5;
  auto* period = app.add_subcommand("period", "Pisano-type periods mod 2^k and 3^k");
  add_common(period, cfg, out);
  period->add_option("--k2-max", k2, "moduli 2^1 .. 2^k")->check(CLI::Range(1u, 18u));
  period->add_option("--k3-max", k3, "moduli 3^1 .. 3^(k+1)")->check(CLI::Range(0u, 10u));

  std::string mu = "log3/log2", M = "1e48";
  auto* cf = app.add_subcommand("cf", "continued fraction and Legendre gap");
  add_common(cf, cfg, out);
  cf->add_option("--mu", mu, "logA/logB, logA, or a number");
  cf->add_option("--M", M, "expand until q_N > M");

  auto* verify = app.add_subcommand("verify-paper", "bounds, reduction and search for every scenario");
  add_common(verify, cfg, out);
  scenario = "all";
  add_scenario(verify, scenario);
  add_reduction(verify, cfg);
  verify->add_option("--box", cfg.box, "final | desk")->check(CLI::IsMember({"final", "desk"}));
  verify->add_option("--spill-dir", cfg.spill_dir, "directory for spill files and checkpoints");
  verify->add_option("--smooth-n-max", cfg.smooth_n_max, "scan range for the zero scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  cfg.out_dir = out;

  try {
    if (*verify) {
      std::vector<Scenario> list;
      if (scenario == "all")
        list = {Scenario::zero, Scenario::positive, Scenario::negative};
      else
        list = {parse_scenario(scenario)};
      cfg.scenario = list.front();
      return finish(cmd_verify_paper(cfg, list), cfg);
    }
    if (scenario == "all") scenario = "positive";
    cfg.scenario = parse_scenario(scenario);

    if (*bounds) return finish(cmd_bounds(cfg), cfg);
    if (*reduce) {
      require(cfg.scenario != Scenario::zero, "the zero scenario has no reduction stage");
      ChainResult chain;
      RunReport rep = cmd_bounds(cfg, &chain);
      rep.merge(cmd_reduce(cfg, chain));
      return finish(rep, cfg);
    }
    if (*search) {
      SearchBox box{n_max, x_max, y_max, parse_sign(sign)};
      if (sign != "all") {
        cfg.scenario = parse_scenario(sign);
        const TheoremSpec* spec = nullptr;
        auto specs = theorem_specs();
        for (const auto& s : specs)
          if (s.name == sign) spec = &s;
        if (min_reps == 0 || min_reps == spec->min_multiplicity) return finish(cmd_search(cfg, box), cfg);
      }
      box.min_multiplicity = std::max<std::uint32_t>(1, min_reps);
      SearchOptions opt;
      opt.threads = cfg.threads;
      opt.spill_dir = cfg.spill_dir;
      SearchStats st;
      auto recs = count_representations(box, opt, &st);
      std::cout << recs.size() << " values of c with >= " << box.min_multiplicity << " representations ("
                << st.enumerated << " combinations, " << st.seconds << " s)\n";
      for (const auto& r : recs) std::cout << detail::records_str({r}) << '\n';
      if (!out.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_records_csv(cfg.out_dir / "records.csv", recs);
      }
      return 0;
    }
    if (*padic) {
      RunReport rep = cmd_padic(p, d_max, parse_integer(n_cap), cfg.padic_N, cfg.threads);
      const json& j = rep.doc["padic"];
      std::cout << "p=" << p << " d<=" << d_max << " n<" << n_cap << ": max " << j["max_bound"] << " at d=" << j["argmax_d"]
                << ", nonempty d " << j["nonempty"] << ", classes " << j["classes"] << ", K0 " << j["K0"]
                << ", trunc_log " << j["trunc_log"] << ", trunc_exp " << j["trunc_exp"] << '\n';
      return finish(rep, cfg);
    }
    if (*period) return finish(cmd_period(k2, k3), cfg);
    if (*cf) {
      RunReport rep = cmd_cf(mu, M, cfg.policy());
      const json& j = rep.doc["cf"];
      std::cout << "N=" << j["N"] << " a(M)=" << j["a"].get<std::string>() << " gap=" << j["gap"].get<std::string>()
                << '\n';
      return finish(rep, cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
