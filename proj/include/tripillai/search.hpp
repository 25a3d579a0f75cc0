#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "tripillai/tribonacci.hpp"

namespace tripillai {

enum class SignClass { all, positive, negative, zero };

inline const char* sign_name(SignClass s) {
  switch (s) {
    case SignClass::positive: return "positive";
    case SignClass::negative: return "negative";
    case SignClass::zero: return "zero";
    default: return "all";
  }
}
inline SignClass parse_sign(const std::string& s) {
  if (s == "all") return SignClass::all;
  if (s == "positive" || s == "positive_c" || s == "pos") return SignClass::positive;
  if (s == "negative" || s == "negative_c" || s == "neg") return SignClass::negative;
  if (s == "zero" || s == "zero_c") return SignClass::zero;
  throw PreconditionError("unknown sign class: " + s);
}

struct SearchBox {
  std::uint32_t n_max = 0, x_max = 0, y_max = 0;  // inclusive
  SignClass sign = SignClass::all;
  std::uint32_t min_multiplicity = 1;

  // Combinations before sign pruning; n = 1 never counts.
  std::uint64_t combinations() const {
    std::uint64_t ns = n_max + 1ull - (n_max >= 1 ? 1 : 0);
    return ns * (x_max + 1ull) * (y_max + 1ull);
  }
};

struct Rep {
  std::uint32_t n, x, y;
  friend bool operator<(const Rep& a, const Rep& b) { return std::tie(a.n, a.x, a.y) < std::tie(b.n, b.x, b.y); }
  friend bool operator==(const Rep& a, const Rep& b) { return a.n == b.n && a.x == b.x && a.y == b.y; }
};

struct RepRecord {
  mpz_class c;
  std::vector<Rep> reps;  // sorted, distinct
};

inline mpz_class smooth_value(std::uint32_t x, std::uint32_t y) {
  mpz_class a, b;
  mpz_ui_pow_ui(a.get_mpz_t(), 2, x);
  mpz_ui_pow_ui(b.get_mpz_t(), 3, y);
  return a * b;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

struct Tables {
  std::vector<mpz_class> trib;                // T_0 .. T_{n_max}
  std::vector<std::vector<mpz_class>> smooth; // [x][y] = 2^x 3^y
};

inline Tables make_tables(const SearchBox& box) {
  Tables t;
  TribWindow w = trib_window(0, box.n_max + 1);
  t.trib = std::move(w.values);
  t.smooth.resize(box.x_max + 1);
  mpz_class row = 1;
  for (std::uint32_t x = 0; x <= box.x_max; ++x) {
    auto& r = t.smooth[x];
    r.reserve(box.y_max + 1);
    mpz_class v = row;
    for (std::uint32_t y = 0; y <= box.y_max; ++y) {
      r.push_back(v);
      v *= 3;
    }
    row <<= 1;
  }
  return t;
}

// y range [lo, hi) of the sign class for fixed (n, x); exact comparisons only.
inline std::pair<std::uint32_t, std::uint32_t> y_range(const Tables& t, const SearchBox& box, std::uint32_t n,
                                                       std::uint32_t x) {
  const auto& row = t.smooth[x];
  const mpz_class& tn = t.trib[n];
  const std::uint32_t end = box.y_max + 1;
  if (box.sign == SignClass::all) return {0, end};
  // first y with 2^x 3^y > T_n
  std::uint32_t lo = 0, hi = end;
  while (lo < hi) {
    std::uint32_t mid = lo + (hi - lo) / 2;
    if (row[mid] > tn)
      hi = mid;
    else
      lo = mid + 1;
  }
  const std::uint32_t first_above = lo;
  switch (box.sign) {
    case SignClass::negative: return {first_above, end};
    case SignClass::positive: {
      // values with 2^x 3^y < T_n, dropping an exact tie
      std::uint32_t e = first_above;
      if (e > 0 && row[e - 1] == tn) --e;
      return {0, e};
    }
    case SignClass::zero: {
      if (first_above > 0 && row[first_above - 1] == tn) return {first_above - 1, first_above};
      return {0, 0};
    }
    default: return {0, end};
  }
}

template <class F>
void enumerate_rows(const Tables& t, const SearchBox& box, std::uint32_t n_lo, std::uint32_t n_hi, F&& f) {
  mpz_class c;
  for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
    if (n == 1) continue;
    for (std::uint32_t x = 0; x <= box.x_max; ++x) {
      auto [ylo, yhi] = y_range(t, box, n, x);
      for (std::uint32_t y = ylo; y < yhi; ++y) {
        mpz_sub(c.get_mpz_t(), t.trib[n].get_mpz_t(), t.smooth[x][y].get_mpz_t());
        f(c, n, x, y);
      }
    }
  }
}

}  // namespace detail

// Calls f(c, n, x, y) for every combination in the box and sign class.
template <class F>
void enumerate(const SearchBox& box, F&& f) {
  detail::Tables t = detail::make_tables(box);
  detail::enumerate_rows(t, box, 0, box.n_max, f);
}

// ---------------------------------------------------------------------------
// Hashing and spill records

struct Hash128 {
  std::uint64_t hi, lo;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline Hash128 hash_c(const mpz_class& c) {
  const mpz_srcptr z = c.get_mpz_t();
  const int size = z->_mp_size;
  std::uint64_t a = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(size));
  std::uint64_t b = 0xc2b2ae3d27d4eb4full + static_cast<std::uint64_t>(static_cast<std::int64_t>(size));
  const int n = size < 0 ? -size : size;
  for (int i = 0; i < n; ++i) {
    std::uint64_t limb = static_cast<std::uint64_t>(z->_mp_d[i]);
    a = detail::mix64(a ^ limb);
    b = detail::mix64(b + limb * 0xff51afd7ed558ccdull);
  }
  return {a, b};
}

struct SpillRecord {
  std::uint64_t lo;
  std::uint64_t packed;  // n << 40 | x << 20 | y

  static SpillRecord make(std::uint64_t lo, std::uint32_t n, std::uint32_t x, std::uint32_t y) {
    return {lo, (static_cast<std::uint64_t>(n) << 40) | (static_cast<std::uint64_t>(x) << 20) | y};
  }
  Rep rep() const {
    return {static_cast<std::uint32_t>(packed >> 40), static_cast<std::uint32_t>((packed >> 20) & 0xfffff),
            static_cast<std::uint32_t>(packed & 0xfffff)};
  }
  friend bool operator<(const SpillRecord& a, const SpillRecord& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.packed < b.packed);
  }
};
static_assert(sizeof(SpillRecord) == 16);

struct SearchOptions {
  unsigned threads = 1;
  std::uint64_t in_memory_limit = 10'000'000;  // combinations
  std::uint32_t partitions = 64;
  std::filesystem::path spill_dir;             // default: temp dir keyed by the box
  bool keep_spill = false;
};

struct SearchStats {
  std::uint64_t enumerated = 0;
  std::uint64_t chunks = 0, chunks_resumed = 0;
  std::uint64_t partitions_resumed = 0;
  bool spilled = false;
  double seconds = 0;
};

namespace detail {

// Exact regrouping of records whose hashes agree.
inline void regroup(const Tables& t, const std::vector<SpillRecord>& recs, std::uint32_t min_mult,
                    std::vector<RepRecord>& out) {
  std::size_t i = 0;
  while (i < recs.size()) {
    std::size_t j = i;
    while (j < recs.size() && recs[j].lo == recs[i].lo) ++j;
    if (j - i >= min_mult) {
      std::map<mpz_class, std::vector<Rep>> exact;
      for (std::size_t k = i; k < j; ++k) {
        Rep r = recs[k].rep();
        exact[t.trib[r.n] - t.smooth[r.x][r.y]].push_back(r);
      }
      for (auto& [c, reps] : exact)
        if (reps.size() >= min_mult) {
          std::sort(reps.begin(), reps.end());
          reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
          if (reps.size() >= min_mult) out.push_back({c, std::move(reps)});
        }
    }
    i = j;
  }
}

inline std::string box_key(const SearchBox& b, std::uint32_t parts) {
  return "box_n" + std::to_string(b.n_max) + "_x" + std::to_string(b.x_max) + "_y" + std::to_string(b.y_max) + "_" +
         sign_name(b.sign) + "_p" + std::to_string(parts);
}

inline void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("spill write failed: " + tmp.string());
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!os) throw Error("spill write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

template <class Work>
void run_pool(unsigned threads, std::uint64_t count, Work&& work) {
  std::atomic<std::uint64_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  auto loop = [&] {
    for (;;) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < std::max(1u, threads); ++i) pool.emplace_back(loop);
  loop();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// Every c in the box with at least box.min_multiplicity representations, sorted by c.
inline std::vector<RepRecord> count_representations(const SearchBox& box, const SearchOptions& opt = {},
                                                    SearchStats* stats = nullptr) {
  require(box.min_multiplicity >= 1, "min_multiplicity must be >= 1");
  require(box.x_max < (1u << 20) && box.y_max < (1u << 20) && box.n_max < (1u << 24), "box too large to pack");
  require(opt.partitions >= 1, "need at least one partition");
  auto t0 = std::chrono::steady_clock::now();
  SearchStats st;
  detail::Tables t = detail::make_tables(box);
  std::vector<RepRecord> out;

  const std::uint64_t per_n = (box.x_max + 1ull) * (box.y_max + 1ull);
  const std::uint32_t chunk_n = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, 1'000'000 / per_n));
  const std::uint64_t chunks = box.n_max / chunk_n + 1;
  st.chunks = chunks;

  if (box.combinations() < opt.in_memory_limit) {
    std::vector<std::vector<SpillRecord>> parts(chunks);
    detail::run_pool(opt.threads, chunks, [&](std::uint64_t ci) {
      std::uint32_t lo = static_cast<std::uint32_t>(ci * chunk_n);
      std::uint32_t hi = std::min<std::uint32_t>(box.n_max, lo + chunk_n - 1);
      auto& v = parts[ci];
      detail::enumerate_rows(t, box, lo, hi, [&](const mpz_class& c, std::uint32_t n, std::uint32_t x, std::uint32_t y) {
        v.push_back(SpillRecord::make(hash_c(c).lo, n, x, y));
      });
    });
    std::vector<SpillRecord> all;
    for (auto& v : parts) all.insert(all.end(), v.begin(), v.end());
    st.enumerated = all.size();
    std::sort(all.begin(), all.end());
    detail::regroup(t, all, box.min_multiplicity, out);
  } else {
    st.spilled = true;
    namespace fs = std::filesystem;
    fs::path dir = opt.spill_dir.empty() ? fs::temp_directory_path() / "tripillai-spill" : opt.spill_dir;
    dir /= detail::box_key(box, opt.partitions);
    fs::create_directories(dir);
    const std::uint32_t P = opt.partitions;
    std::atomic<std::uint64_t> enumerated{0}, resumed{0};

    // Phase 1: each chunk writes one file of records bucketed by partition,
    // prefixed with P + 1 offsets. The rename marks the chunk complete.
    detail::run_pool(opt.threads, chunks, [&](std::uint64_t ci) {
      fs::path path = dir / ("chunk_" + std::to_string(ci) + ".bin");
      if (fs::exists(path)) {
        resumed.fetch_add(1);
        return;
      }
      std::uint32_t lo = static_cast<std::uint32_t>(ci * chunk_n);
      std::uint32_t hi = std::min<std::uint32_t>(box.n_max, lo + chunk_n - 1);
      std::vector<std::vector<SpillRecord>> buckets(P);
      std::uint64_t count = 0;
      detail::enumerate_rows(t, box, lo, hi, [&](const mpz_class& c, std::uint32_t n, std::uint32_t x, std::uint32_t y) {
        Hash128 h = hash_c(c);
        buckets[h.hi % P].push_back(SpillRecord::make(h.lo, n, x, y));
        ++count;
      });
      std::vector<std::uint64_t> blob(P + 1);
      for (std::uint32_t p = 0; p < P; ++p) blob[p + 1] = blob[p] + buckets[p].size();
      std::vector<SpillRecord> flat;
      flat.reserve(blob[P]);
      for (auto& b : buckets) flat.insert(flat.end(), b.begin(), b.end());
      std::string bytes(reinterpret_cast<const char*>(blob.data()), blob.size() * sizeof(std::uint64_t));
      bytes.append(reinterpret_cast<const char*>(flat.data()), flat.size() * sizeof(SpillRecord));
      detail::write_file_atomic(path, bytes.data(), bytes.size());
      enumerated.fetch_add(count);
    });
    st.chunks_resumed = resumed.load();

    // Phase 2: group each partition across all chunk files.
    std::vector<std::vector<RepRecord>> results(P);
    std::atomic<std::uint64_t> parts_resumed{0};
    detail::run_pool(opt.threads, P, [&](std::uint64_t p) {
      fs::path res_path = dir / ("part_" + std::to_string(p) + ".res");
      if (fs::exists(res_path)) {
        std::ifstream is(res_path);
        std::string line;
        while (std::getline(is, line)) {
          // c n x y n x y ...
          std::istringstream ls(line);
          std::string cs;
          ls >> cs;
          RepRecord r{mpz_class(cs), {}};
          Rep rp;
          while (ls >> rp.n >> rp.x >> rp.y) r.reps.push_back(rp);
          results[p].push_back(std::move(r));
        }
        parts_resumed.fetch_add(1);
        return;
      }
      std::vector<SpillRecord> recs;
      for (std::uint64_t ci = 0; ci < chunks; ++ci) {
        std::ifstream is(dir / ("chunk_" + std::to_string(ci) + ".bin"), std::ios::binary);
        if (!is) throw Error("missing spill chunk " + std::to_string(ci));
        std::vector<std::uint64_t> off(P + 1);
        is.read(reinterpret_cast<char*>(off.data()), static_cast<std::streamsize>(off.size() * sizeof(std::uint64_t)));
        const std::uint64_t begin = off[p], end = off[p + 1];
        is.seekg(static_cast<std::streamoff>((P + 1) * sizeof(std::uint64_t) + begin * sizeof(SpillRecord)));
        std::size_t old = recs.size();
        recs.resize(old + (end - begin));
        is.read(reinterpret_cast<char*>(recs.data() + old), static_cast<std::streamsize>((end - begin) * sizeof(SpillRecord)));
        if (!is) throw Error("spill read failed for chunk " + std::to_string(ci));
      }
      std::sort(recs.begin(), recs.end());
      detail::regroup(t, recs, box.min_multiplicity, results[p]);
      std::string text;
      for (const auto& r : results[p]) {
        text += r.c.get_str();
        for (const auto& rp : r.reps)
          text += " " + std::to_string(rp.n) + " " + std::to_string(rp.x) + " " + std::to_string(rp.y);
        text += "\n";
      }
      detail::write_file_atomic(res_path, text.data(), text.size());
    });
    st.partitions_resumed = parts_resumed.load();
    st.enumerated = enumerated.load();
    for (auto& v : results)
      for (auto& r : v) out.push_back(std::move(r));
    if (!opt.keep_spill) fs::remove_all(dir);
  }

  std::sort(out.begin(), out.end(), [](const RepRecord& a, const RepRecord& b) { return a.c < b.c; });
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return out;
}

// ---------------------------------------------------------------------------
// Smoothness and theorem checks

struct SmoothHit {
  std::uint64_t n;
  unsigned long x, y;
};

// n <= n_max with T_n = 2^x 3^y (T_0 = 0 excluded).
inline std::vector<SmoothHit> smoothness_scan(std::uint64_t n_max) {
  std::vector<SmoothHit> out;
  mpz_class a = 0, b = 1, c = 1, r;
  const mpz_class two = 2, three = 3;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      r = a;
      unsigned long x = mpz_remove(r.get_mpz_t(), r.get_mpz_t(), two.get_mpz_t());
      unsigned long y = mpz_remove(r.get_mpz_t(), r.get_mpz_t(), three.get_mpz_t());
      if (r == 1) out.push_back({n, x, y});
    }
    mpz_class d = a + b + c;
    a.swap(b);
    b.swap(c);
    c.swap(d);
  }
  return out;
}

struct TheoremSpec {
  std::string name;
  SignClass sign;
  std::uint32_t min_multiplicity;
  std::vector<RepRecord> expected;
};

inline std::vector<TheoremSpec> theorem_specs() {
  return {
      {"zero", SignClass::zero, 1, {{0, {{2, 0, 0}, {3, 1, 0}, {4, 2, 0}, {7, 3, 1}, {9, 0, 4}}}}},
      {"positive", SignClass::positive, 4, {{1, {{3, 0, 0}, {4, 0, 1}, {5, 1, 1}, {6, 2, 1}}}}},
      {"negative",
       SignClass::negative,
       5,
       {{-8, {{0, 3, 0}, {2, 0, 2}, {4, 2, 1}, {7, 5, 0}, {12, 9, 0}}},
        {-2, {{0, 1, 0}, {2, 0, 1}, {3, 2, 0}, {4, 1, 1}, {5, 0, 2}}}}},
  };
}

struct TheoremCheck {
  std::string name;
  SearchBox box;
  bool pass = false;
  bool empty_box = false;
  std::vector<RepRecord> found, missing, extra;
  SearchStats stats;
};

inline bool same_record(const RepRecord& a, const RepRecord& b) { return a.c == b.c && a.reps == b.reps; }

inline TheoremCheck verify_theorem(const TheoremSpec& spec, SearchBox box, const SearchOptions& opt = {}) {
  box.sign = spec.sign;
  box.min_multiplicity = spec.min_multiplicity;
  TheoremCheck chk;
  chk.name = spec.name;
  chk.box = box;
  chk.found = count_representations(box, opt, &chk.stats);
  chk.empty_box = chk.stats.enumerated == 0;
  for (const auto& e : spec.expected)
    if (std::none_of(chk.found.begin(), chk.found.end(), [&](const RepRecord& f) { return same_record(f, e); }))
      chk.missing.push_back(e);
  for (const auto& f : chk.found)
    if (std::none_of(spec.expected.begin(), spec.expected.end(), [&](const RepRecord& e) { return same_record(f, e); }))
      chk.extra.push_back(f);
  // An empty box passes vacuously; callers flag it.
  chk.pass = chk.empty_box || (chk.missing.empty() && chk.extra.empty());
  return chk;
}

}  // namespace tripillai
