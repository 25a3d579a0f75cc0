#include <gtest/gtest.h>

#include <filesystem>
#include <map>

#include "tripillai/search.hpp"

using namespace tripillai;
namespace fs = std::filesystem;

namespace {

// Direct oracle: every (n, x, y) with a plain sign test, grouped in a map.
std::vector<RepRecord> naive(const SearchBox& box) {
  std::map<mpz_class, std::vector<Rep>> m;
  for (std::uint32_t n = 0; n <= box.n_max; ++n) {
    if (n == 1) continue;
    mpz_class t = trib(n);
    for (std::uint32_t x = 0; x <= box.x_max; ++x)
      for (std::uint32_t y = 0; y <= box.y_max; ++y) {
        mpz_class s;
        mpz_ui_pow_ui(s.get_mpz_t(), 2, x);
        mpz_class s3;
        mpz_ui_pow_ui(s3.get_mpz_t(), 3, y);
        mpz_class c = t - s * s3;
        int sg = sgn(c);
        bool keep = box.sign == SignClass::all || (box.sign == SignClass::positive && sg > 0) ||
                    (box.sign == SignClass::negative && sg < 0) || (box.sign == SignClass::zero && sg == 0);
        if (keep) m[c].push_back({n, x, y});
      }
  }
  std::vector<RepRecord> out;
  for (auto& [c, reps] : m)
    if (reps.size() >= box.min_multiplicity) {
      std::sort(reps.begin(), reps.end());
      out.push_back({c, reps});
    }
  return out;
}

void expect_same(const std::vector<RepRecord>& a, const std::vector<RepRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(same_record(a[i], b[i])) << "at " << i << " c=" << a[i].c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tripillai-test-" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(Search, ZeroSolutions) {
  SearchBox box{9, 3, 4, SignClass::zero};
  auto recs = count_representations(box);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].c, 0);
  EXPECT_EQ(recs[0].reps, (std::vector<Rep>{{2, 0, 0}, {3, 1, 0}, {4, 2, 0}, {7, 3, 1}, {9, 0, 4}}));
}

TEST(Search, CombinationCount) {
  SearchBox box{10, 10, 10};
  SearchStats st;
  count_representations(box, {}, &st);
  EXPECT_EQ(st.enumerated, 1210u);
  std::uint64_t seen = 0;
  enumerate(box, [&](const mpz_class&, std::uint32_t n, std::uint32_t, std::uint32_t) {
    EXPECT_NE(n, 1u);
    ++seen;
  });
  EXPECT_EQ(seen, 1210u);
}

TEST(Search, OnlyIndexZero) {
  SearchBox box{0, 3, 3};
  auto recs = count_representations(box);
  EXPECT_EQ(recs.size(), 16u);
  for (const auto& r : recs) {
    ASSERT_EQ(r.reps.size(), 1u);
    EXPECT_EQ(r.reps[0].n, 0u);
    EXPECT_LT(r.c, 0);
  }
}

TEST(Search, MatchesNaiveOracle) {
  for (SignClass s : {SignClass::all, SignClass::positive, SignClass::negative, SignClass::zero})
    for (std::uint32_t mult : {1u, 2u, 3u}) {
      SearchBox box{40, 25, 16, s, mult};
      expect_same(count_representations(box), naive(box));
    }
}

TEST(Search, SignPruningAgreesWithFilter) {
  SearchBox all{60, 60, 40, SignClass::all, 1};
  auto every = count_representations(all);
  for (SignClass s : {SignClass::positive, SignClass::negative, SignClass::zero}) {
    SearchBox box = all;
    box.sign = s;
    std::vector<RepRecord> filtered;
    for (const auto& r : every) {
      int sg = sgn(r.c);
      if ((s == SignClass::positive && sg > 0) || (s == SignClass::negative && sg < 0) || (s == SignClass::zero && sg == 0))
        filtered.push_back(r);
    }
    expect_same(count_representations(box), filtered);
  }
}

TEST(Search, ThreadCountDoesNotMatter) {
  SearchBox box{120, 100, 70, SignClass::negative, 3};
  SearchOptions o1, o4, o8;
  o4.threads = 4;
  o8.threads = 8;
  auto a = count_representations(box, o1);
  expect_same(a, count_representations(box, o4));
  expect_same(a, count_representations(box, o8));
}

TEST(Search, SpillPathMatchesMemory) {
  TempDir tmp("spill");
  SearchBox box{150, 120, 80, SignClass::positive, 2};
  auto mem = count_representations(box);
  SearchOptions opt;
  opt.in_memory_limit = 0;
  opt.threads = 4;
  opt.partitions = 16;
  opt.spill_dir = tmp.path;
  opt.keep_spill = true;
  SearchStats st;
  auto disk = count_representations(box, opt, &st);
  EXPECT_TRUE(st.spilled);
  EXPECT_EQ(st.chunks_resumed, 0u);
  expect_same(mem, disk);

  // A second run finds the checkpoints and skips the work.
  SearchStats again;
  auto resumed = count_representations(box, opt, &again);
  EXPECT_EQ(again.chunks_resumed, again.chunks);
  EXPECT_EQ(again.partitions_resumed, 16u);
  expect_same(mem, resumed);
}

TEST(Search, SpillResumesAfterPartialRun) {
  TempDir tmp("partial");
  SearchBox box{150, 120, 80, SignClass::negative, 2};
  SearchOptions opt;
  opt.in_memory_limit = 0;
  opt.partitions = 8;
  opt.spill_dir = tmp.path;
  opt.keep_spill = true;
  SearchStats st;
  auto full = count_representations(box, opt, &st);
  // Drop some chunk files and every result marker, as if the run had been interrupted.
  std::size_t removed = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp.path)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("part_", 0) == 0 || (name.rfind("chunk_", 0) == 0 && removed++ % 2 == 0)) fs::remove(e.path());
  }
  SearchStats again;
  auto resumed = count_representations(box, opt, &again);
  EXPECT_GT(again.chunks_resumed, 0u);
  EXPECT_LT(again.chunks_resumed, again.chunks);
  EXPECT_EQ(again.partitions_resumed, 0u);
  expect_same(full, resumed);
}

TEST(Search, DesktopBoxTheorems) {
  SearchBox box{350, 350, 225};
  SearchOptions opt;
  opt.threads = 4;
  for (const auto& spec : theorem_specs()) {
    TheoremCheck chk = verify_theorem(spec, box, opt);
    EXPECT_TRUE(chk.pass) << spec.name;
    EXPECT_FALSE(chk.empty_box);
    EXPECT_TRUE(chk.missing.empty());
    EXPECT_TRUE(chk.extra.empty());
  }
}

TEST(Search, TheoremMismatchDetected) {
  TheoremSpec spec = theorem_specs()[1];
  spec.min_multiplicity = 3;
  TheoremCheck chk = verify_theorem(spec, SearchBox{60, 60, 40});
  EXPECT_FALSE(chk.pass);
  EXPECT_FALSE(chk.extra.empty());
}

TEST(Search, EmptyBoxIsFlagged) {
  // Nothing is positive at n = 0: the check passes vacuously and says so.
  TheoremCheck chk = verify_theorem(theorem_specs()[1], SearchBox{0, 5, 5});
  EXPECT_TRUE(chk.empty_box);
  EXPECT_TRUE(chk.pass);
  TheoremCheck small = verify_theorem(theorem_specs()[2], SearchBox{0, 0, 0});
  EXPECT_FALSE(small.empty_box);
  EXPECT_FALSE(small.pass);
  EXPECT_EQ(small.missing.size(), 2u);
}

TEST(Smoothness, Scan) {
  auto hits = smoothness_scan(10000);
  std::vector<std::uint64_t> ns;
  for (const auto& h : hits) ns.push_back(h.n);
  EXPECT_EQ(ns, (std::vector<std::uint64_t>{1, 2, 3, 4, 7, 9}));
  EXPECT_EQ(hits[4].x, 3u);
  EXPECT_EQ(hits[4].y, 1u);
  EXPECT_EQ(hits[5].x, 0u);
  EXPECT_EQ(hits[5].y, 4u);
  EXPECT_TRUE(smoothness_scan(0).empty());
  EXPECT_EQ(smoothness_scan(12).size(), 6u);
}

TEST(Search, GuardsRejectBadInput) {
  EXPECT_THROW(count_representations(SearchBox{10, 10, 10, SignClass::all, 0}), PreconditionError);
  EXPECT_THROW(parse_sign("both"), PreconditionError);
}
