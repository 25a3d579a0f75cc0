#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tripillai/pipeline.hpp"

using namespace tripillai;
namespace fs = std::filesystem;

namespace {

struct Reduced {
  ChainResult chain;
  RunReport report;
  ReductionOutcome out;
};

// The reductions take a few seconds each; run them once per scenario.
const Reduced& reduced(Scenario s) {
  static std::map<Scenario, Reduced> cache;
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  PipelineConfig cfg;
  cfg.scenario = s;
  cfg.threads = 4;
  Reduced r;
  r.report = cmd_bounds(cfg, &r.chain);
  r.report.merge(cmd_reduce(cfg, r.chain, &r.out));
  return cache.emplace(s, std::move(r)).first->second;
}

const Claim* find_claim(const RunReport& rep, const std::string& name) {
  for (const auto& c : rep.claims)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(FinalBox, ReferenceInputs) {
  FinalBox p = final_box(128, 128, 174);
  EXPECT_EQ(p.X_int, 578);
  EXPECT_EQ(p.x_lt, 834);
  EXPECT_EQ(p.y_lt, 527);
  EXPECT_EQ(p.n_lt, 954);
  FinalBox n = final_box(152, 152, 138);
  EXPECT_EQ(n.X_int, 549);
  EXPECT_EQ(n.x_lt, 793);
  EXPECT_EQ(n.y_lt, 500);
  EXPECT_EQ(n.n_lt, 906);
  EXPECT_THROW(final_box(-1, 0, 0), PreconditionError);
}

TEST(Bounds, ZeroScenarioScan) {
  PipelineConfig cfg;
  cfg.scenario = Scenario::zero;
  cfg.smooth_n_max = 2000;
  RunReport rep = cmd_bounds(cfg);
  ASSERT_EQ(rep.claims.size(), 1u);
  EXPECT_EQ(rep.claims[0].name, "zero/smooth_indices");
  EXPECT_TRUE(rep.claims[0].pass);
  EXPECT_EQ(rep.claims[0].derived, "{1,2,3,4,7,9}");
}

TEST(Bounds, ChainsWithinReference) {
  for (Scenario s : {Scenario::positive, Scenario::negative}) {
    const Reduced& r = reduced(s);
    std::size_t constants = 0;
    for (const auto& c : r.report.claims)
      if (c.note == "5% slack") {
        ++constants;
        EXPECT_TRUE(c.pass) << c.name << " " << c.derived << " vs " << c.reference;
      }
    EXPECT_GE(constants, 10u);
  }
}

TEST(Reduce, Positive) {
  const Reduced& r = reduced(Scenario::positive);
  EXPECT_EQ(r.out.first.H, 294);
  EXPECT_EQ(r.out.first.M, parse_integer("1e113"));
  EXPECT_EQ(r.out.d_max, 294);
  EXPECT_EQ(r.out.c_X, 182);
  EXPECT_EQ(r.out.second_batch->items.size(), 294u);
  EXPECT_EQ(r.out.smin.x_min_bound, 131);
  EXPECT_EQ(r.out.smin.y_min_bound, 84);
  EXPECT_EQ(r.out.box.X_int, 548);
  EXPECT_EQ(r.out.box.n_lt, 905);
  EXPECT_EQ(r.out.box.x_lt, 791);
  EXPECT_EQ(r.out.box.y_lt, 499);
  // The valuation cap is exceeded; the box is still inside the published one.
  EXPECT_FALSE(find_claim(r.report, "pos/x_min")->pass);
  EXPECT_TRUE(find_claim(r.report, "pos/final_box")->pass);
  SearchBox b = box_from(r.out.box);
  EXPECT_EQ(b.n_max, 904u);
  EXPECT_EQ(b.x_max, 790u);
  EXPECT_EQ(b.y_max, 498u);
}

TEST(Reduce, Negative) {
  const Reduced& r = reduced(Scenario::negative);
  EXPECT_EQ(r.out.first.H, 142);
  EXPECT_EQ(r.out.c_X, 142);
  ASSERT_TRUE(r.out.cf.has_value());
  EXPECT_EQ(r.out.cf->N, 100u);
  EXPECT_EQ(r.out.cf->a, 55);
  EXPECT_EQ(r.out.d_max, 351);
  EXPECT_EQ(r.out.smin.x_min_bound, 110);
  EXPECT_EQ(r.out.smin.y_min_bound, 67);
  EXPECT_EQ(r.out.box.X_int, 434);
  EXPECT_EQ(r.out.box.n_lt, 718);
  EXPECT_EQ(r.out.box.x_lt, 627);
  EXPECT_EQ(r.out.box.y_lt, 396);
  for (const auto& c : r.report.claims) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Reduce, LowPrecisionCapIsControlled) {
  PipelineConfig cfg;
  cfg.scenario = Scenario::positive;
  cfg.precision_cap = 32;
  EXPECT_THROW(cmd_reduce(cfg, reduced(Scenario::positive).chain), CertificationError);
}

TEST(Reduce, VerifyReportsCertificationErrors) {
  PipelineConfig cfg;
  cfg.precision_cap = 32;
  cfg.box = "desk";
  RunReport rep = cmd_verify_paper(cfg, {Scenario::negative});
  EXPECT_FALSE(rep.errors.empty());
  EXPECT_EQ(rep.exit_code(), 2);
}

TEST(Search, ReducedBoxIsFlagged) {
  PipelineConfig cfg;
  cfg.scenario = Scenario::negative;
  RunReport rep = cmd_search(cfg, SearchBox{30, 30, 20}, SearchBox{717, 626, 395});
  ASSERT_EQ(rep.claims.size(), 1u);
  EXPECT_TRUE(rep.claims[0].pass);
  EXPECT_NE(rep.claims[0].note.find("reduced box"), std::string::npos);
  EXPECT_TRUE(rep.doc["neg/search"]["reduced_box"].get<bool>());
}

TEST(Search, OverridesApply) {
  PipelineConfig cfg;
  cfg.scenario = Scenario::positive;
  cfg.n_max = 0;
  RunReport rep = cmd_search(cfg, desk_box(), desk_box());
  EXPECT_NE(rep.claims[0].note.find("empty box"), std::string::npos);
}

TEST(Search, CsvWritten) {
  fs::path dir = fs::temp_directory_path() / "tripillai-test-csv";
  fs::remove_all(dir);
  PipelineConfig cfg;
  cfg.scenario = Scenario::zero;
  cfg.out_dir = dir;
  cmd_search(cfg, SearchBox{20, 10, 10});
  std::ifstream in(dir / "records_zero.csv");
  std::string all((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(all.find("9,0,4"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Standalone, ContinuedFraction) {
  RunReport rep = cmd_cf("log3/log2", "1e48");
  EXPECT_TRUE(rep.all_pass());
  EXPECT_EQ(rep.doc["cf"]["N"].get<int>(), 100);
  EXPECT_EQ(rep.doc["cf"]["gap"].get<std::string>(), "1/57");
}

TEST(Standalone, Periods) {
  RunReport rep = cmd_period();
  EXPECT_EQ(rep.claims.size(), 16u);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_TRUE(matrix_order_is(8, 16));
  EXPECT_FALSE(matrix_order_is(8, 32));
}

TEST(Standalone, Lemmas) {
  RunReport rep = cmd_lemmas();
  EXPECT_TRUE(find_claim(rep, "lemma/binet")->pass);
  EXPECT_TRUE(find_claim(rep, "lemma/growth")->pass);
  const Claim* g = find_claim(rep, "lemma/gamma");
  EXPECT_FALSE(g->pass);
  EXPECT_EQ(g->derived, "17/18 pairs");
  EXPECT_NE(g->note.find("(4,3)"), std::string::npos);
  EXPECT_EQ(rep.exit_code(), 1);
}

TEST(ParseMu, Forms) {
  auto near = [](const LazyReal& f, double v) { return std::abs(f(128).to_double() - v) < 1e-12; };
  EXPECT_TRUE(near(parse_mu("log3/log2"), std::log(3.0) / std::log(2.0)));
  EXPECT_TRUE(near(parse_mu("log5"), std::log(5.0)));
  EXPECT_TRUE(near(parse_mu("1.25"), 1.25));
  EXPECT_TRUE(near(parse_mu("7/4"), 1.75));
  EXPECT_THROW(parse_mu("log1"), PreconditionError);
  EXPECT_THROW(parse_mu("log3/x"), PreconditionError);
  EXPECT_THROW(parse_mu("abc"), PreconditionError);
}

TEST(Report, TextAndFingerprint) {
  RunReport rep;
  rep.claim("a", "constant", true, "1", "1");
  rep.claim("bb", "lemma", false, "2", "3", "why");
  EXPECT_EQ(report_text(rep), "PASS a     1  [reference 1]\nFAIL bb    2  [reference 3]  why\n");
  EXPECT_EQ(rep.exit_code(), 1);
  rep.errors.push_back("boom");
  EXPECT_EQ(rep.exit_code(), 2);

  PipelineConfig a, b;
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  b.padic_N = 192;
  EXPECT_NE(fingerprint(a), fingerprint(b));
  b = a;
  b.threads = 8;  // not part of the result
  EXPECT_EQ(fingerprint(a), fingerprint(b));
}

TEST(Report, FilesWritten) {
  fs::path dir = fs::temp_directory_path() / "tripillai-test-report";
  fs::remove_all(dir);
  PipelineConfig cfg;
  cfg.out_dir = dir;
  RunReport rep = cmd_period(2, 0);
  write_report(rep, cfg);
  std::ifstream in(dir / "report.json");
  json j = json::parse(in);
  EXPECT_EQ(j["exit_code"].get<int>(), 0);
  EXPECT_EQ(j["claims"].size(), 3u);
  EXPECT_EQ(j["fingerprint"].get<std::string>(), fingerprint(cfg));
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
  fs::remove_all(dir);
}
