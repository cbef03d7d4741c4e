// One pass/fail line per acceptance criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sp4lab/averaging.hpp"
#include "sp4lab/fourier.hpp"
#include "sp4lab/haar.hpp"
#include "sp4lab/suite.hpp"
#include "sp4lab/verifiers.hpp"
#include "sp4lab/zigzag.hpp"

using namespace sp4lab;

namespace {

// Pinned tolerances and limits.
constexpr double kCellSeconds = 300;          // criterion 1
constexpr std::uint64_t kCellBudget = 1'600'000;  // exhaustive up to this many residue tuples per cell
constexpr std::uint64_t kCellSamples = 20'000;    // seeded samples beyond the budget
constexpr std::uint64_t kNonSphBudget = 50'000;
constexpr std::uint64_t kNonSphSamples = 2'000;
constexpr std::uint64_t kIdentitySamples = 1'000;
constexpr int kMaxBlocks = 30;
constexpr std::uint64_t kGenerationSamples = 1'000;
constexpr std::uint64_t kAveragingTrials = 1'000;
constexpr double kNormTol = 1e-9;
constexpr double kFftTol = 1e-8;
constexpr std::uint64_t kFftTrials = 10'000;
constexpr std::uint64_t kFftAscent = 300;
constexpr double kRewriteTol = 1e-12;
constexpr int kZigzagMaxSum = 300;
constexpr int kZigzagBlockedMaxSum = 3;  // spherical regimes: only degenerate corner cells may be blocked
constexpr double kZigzagSeconds = 60;
constexpr double kMassTol = 1e-12;
constexpr std::uint64_t kParitySamples = 5'000;
constexpr std::uint64_t kSeed = 42;

struct Line {
  bool pass = true;
  std::string shortfall;  // part of the criterion that cannot be checked; reported, not counted
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [" << why << "]";
    }
  }
};

int failures = 0, shortfalls = 0;

void emit(int n, const std::string& title, Line& l) {
  bool ok = l.pass && l.shortfall.empty();
  std::cout << "criterion " << n << " " << (ok ? "PASS" : "FAIL") << " " << title << ":" << l.detail.str();
  if (!l.shortfall.empty()) std::cout << " [short of the criterion: " << l.shortfall << "]";
  std::cout << std::endl;
  failures += !l.pass;
  shortfalls += l.pass && !l.shortfall.empty();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CellTally {
  int cells = 0, exhaustive = 0, sampled = 0;
  std::vector<std::string> sampled_cells;
  VerificationReport merged;
};

void run_cell(CellTally& t, LemmaId l, Field f, int i, int j, int k, std::uint64_t budget, std::uint64_t samples) {
  try {
    make_context(l, f, i, j, k);
  } catch (const PreconditionError&) {
    return;
  }
  auto r = verify_cell_lemma(l, f, i, j, k, Enumeration::automatic(budget, samples, kSeed));
  ++t.cells;
  if (r.params.value("mode", "") == "exhaustive") {
    ++t.exhaustive;
  } else {
    ++t.sampled;
    t.sampled_cells.push_back(lemma_name(l) + "/" + f.name() + "(" + std::to_string(i) + "," + std::to_string(j) +
                              (k ? ";k=" + std::to_string(k) : "") + ")");
  }
  for (auto& c : r.counterexamples) c.tuple = {{"lemma", lemma_name(l)}, {"field", f.name()}, {"cell", {i, j, k}}, {"tuple", c.tuple}};
  t.merged.merge(r);
}

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  CellTally t;
  for (const char* fs : {"Q3", "Q5"}) {
    Field f = parse_field(fs);
    int v0 = two_valuation(f);
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= i && i + j <= 8; ++j)
        if (i - j >= v0 + 1) run_cell(t, LemmaId::SPHER01, f, i, j, 0, kCellBudget, kCellSamples);
  }
  for (const char* fs : {"Q3", "F2((t))", "F4((t))"})
    for (int j = 2; j <= 4; ++j)
      for (int i = j; i <= 8; ++i) run_cell(t, LemmaId::SPHER1M1, parse_field(fs), i, j, 0, kCellBudget, kCellSamples);
  for (const char* fs : {"F2((t))", "F4((t))"})
    for (int d = 2; d <= 6; ++d)
      for (int j = 0; j <= 3; ++j) run_cell(t, LemmaId::CHAR2_02, parse_field(fs), j + d, j, 0, kCellBudget, kCellSamples);
  double s = seconds_since(t0);
  Line l;
  l.detail << " " << t.cells << " cells (" << t.exhaustive << " exhaustive, " << t.sampled << " sampled beyond "
           << kCellBudget << " tuples with " << kCellSamples << " samples), " << t.merged.cases_run << " tuples, "
           << t.merged.violations << " counterexamples, " << s << " s (limit " << kCellSeconds << " s)";
  l.require(t.merged.violations == 0, "counterexamples");
  l.require(s < kCellSeconds, "time limit");
  if (t.sampled)
    l.shortfall = std::to_string(t.sampled) + " cells exceed " + std::to_string(kCellBudget) +
                  " tuples and were sampled, not enumerated";
  l.detail << "; sampled:";
  for (const auto& c : t.sampled_cells) l.detail << " " << c;
  for (const auto& c : t.merged.counterexamples) l.detail << " " << c.tuple.dump() << " " << c.check << "=" << c.observed;
  emit(1, "cell claims SPHER01 / SPHER1M1 / CHAR2_02", l);
}

void criterion2() {
  CellTally t;
  for (int k : {1, 2}) {
    for (const char* fs : {"Q2", "Q3", "Q5", "F3((t))", "F5((t))"}) {
      Field f = parse_field(fs);
      int v0 = two_valuation(f);
      for (int d = 2 * k + v0; d <= 2 * k + v0 + 2; ++d)
        for (int j = 0; j <= 2; ++j) run_cell(t, LemmaId::NONSPHER01, f, j + d, j, k, kNonSphBudget, kNonSphSamples);
    }
    for (const char* fs : {"Q2", "Q3", "Q5", "F2((t))", "F3((t))", "F4((t))", "F5((t))"})
      for (int j = 2 * k + 2; j <= 2 * k + 3; ++j)
        for (int i = j - 1; i <= j + 2; ++i)
          run_cell(t, LemmaId::NONSPHER1M1, parse_field(fs), i, j, k, kNonSphBudget, kNonSphSamples);
    for (const char* fs : {"F2((t))", "F4((t))"})
      for (int d = 4 * k + 2; d <= 4 * k + 3; ++d)
        for (int j = 0; j <= 2; ++j) run_cell(t, LemmaId::CHAR2_02, parse_field(fs), j + d, j, k, kNonSphBudget, kNonSphSamples);
  }
  auto tally = [&](const char* key) { return t.merged.tallies.count(key) ? t.merged.tallies.at(key) : 0; };
  Line l;
  l.detail << " " << t.cells << " cells (" << t.exhaustive << " exhaustive, " << t.sampled << " sampled beyond "
           << kNonSphBudget << " tuples), k in {1,2}, " << t.merged.cases_run << " tuples, k1 in K checked "
           << tally("checked_k1_in_K") << "x, scaled products " << tally("checked_scaled_products")
           << "x, congruences " << tally("checked_congruence") << "x, " << t.merged.violations << " violations";
  l.require(t.merged.violations == 0, "violations");
  l.require(tally("checked_congruence") > 0 && tally("checked_scaled_products") > 0, "checks did not run");
  for (const auto& c : t.merged.counterexamples) l.detail << " " << c.tuple.dump() << " " << c.check;
  emit(2, "non-spherical layers", l);
}

void criterion3() {
  Line l;
  struct Id {
    LemmaId lemma;
    const char* f;
    int i, j;
  };
  std::uint64_t cases = 0, viol = 0;
  for (Id c : {Id{LemmaId::SPHER01, "Q3", 4, 1}, Id{LemmaId::SPHER1M1, "Q3", 3, 3},
               Id{LemmaId::NONSPHER01, "Q5", 5, 1}, Id{LemmaId::NONSPHER1M1, "Q5", 3, 4},
               Id{LemmaId::CHAR2_02, "F4((t))", 6, 2}}) {
    auto r = verify_witness_identities(c.lemma, parse_field(c.f), c.i, c.j, kIdentitySamples, kSeed);
    cases += r.cases_run;
    viol += r.violations;
    l.require(r.cases_run == kIdentitySamples && r.violations == 0, lemma_name(c.lemma) + " identities");
  }
  l.detail << " identities on " << cases << " sampled tuples, " << viol << " violations;";
  for (Mutation m : catalogued_mutations()) {
    auto res = run_suite("quick", kSeed, m, 1);
    std::size_t caught = res.summary["failed"].size();
    l.detail << " " << mutation_name(m) << ": exit " << res.exit_code << " (" << caught << " tasks)";
    l.require(res.exit_code == 1, mutation_name(m) + " not caught");
  }
  emit(3, "exact identities and mutation sensitivity", l);
}

void criterion4() {
  Line l;
  auto res = verify_generation_residue(parse_field("F2((t))"));
  l.require(res.cases_run == 720 && res.violations == 0, "Sp4(F2)");
  double max_blocks = res.margins.count("max_block_count") ? res.margins.at("max_block_count") : 0;
  l.detail << " Sp4(F2): " << res.cases_run << " elements, " << res.violations << " failures;";
  for (const char* fs : {"Q2", "F2((t))", "Q3", "F3((t))"}) {
    auto r = verify_generation_random(parse_field(fs), 3, kGenerationSamples, kSeed);
    l.require(r.cases_run == kGenerationSamples && r.violations == 0, std::string(fs) + " lifts");
    max_blocks = std::max(max_blocks, r.margins.count("max_block_count") ? r.margins.at("max_block_count") : 0.0);
    std::uint64_t fallback = r.tallies.count("route_fallback") ? r.tallies.at("route_fallback") : 0;
    l.detail << " " << fs << ": " << r.cases_run << " lifts, " << r.violations << " failures, " << fallback
             << " fallback routes;";
  }
  l.require(max_blocks <= kMaxBlocks, "block count");
  l.detail << " max block_count " << max_blocks << " (limit " << kMaxBlocks << ")";
  emit(4, "generation by K1/K2", l);
}

void criterion5() {
  Line l;
  for (auto rep : {make_s3_standard(), make_d4_standard()}) {
    int n = minimal_cover(rep);
    auto r = verify_averaging(rep, n, kAveragingTrials, kSeed);
    l.require(n > 0 && covers(rep, n), rep.name + " coverage");
    l.require(r.cases_run == kAveragingTrials && r.violations == 0, rep.name + " violations");
    l.detail << " " << rep.name << ": N=" << n << ", " << r.cases_run << " trials, " << r.violations
             << " violations, max ratio " << r.margins["max_ratio_projection"] << ";";
  }
  emit(5, "averaging inequality", l);
}

void criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  Line l;
  double max_err = 0;
  for (const char* fs : {"Q2", "Q3", "F2((t))", "F3((t))"})
    for (int h : {1, 2})
      for (int d : {1, 2, 4}) {
        Field f = parse_field(fs);
        auto b = transform_norm(f, h, SpaceSpec{2, d}, SearchStrategy::exact());
        max_err = std::max(max_err, std::abs(b.lower - std::pow(f.q(), -h / 2.0)));
      }
  l.require(max_err <= kNormTol, "Hilbert norm");
  l.detail << " Hilbert norm error " << max_err << " (tol " << kNormTol << ");";

  double exact_ratio = 0, random_ratio = 0;
  std::uint64_t random_trials = 0, skipped = 0;
  for (const char* fs : {"Q2", "Q3", "F2((t))", "F3((t))"})
    for (int n : {2, 3})
      for (int k : {0, 1}) {
        if (n - 2 * k < 1) {
          // pi^{n-1} eps0 must lie in pi^{2k} R; confirm the library refuses the point.
          bool refused = false;
          try {
            check_fft_lemma(parse_field(fs), 1, n, k, 1, SpaceSpec{2, 1}, FftStrategy::exact());
          } catch (const PreconditionError&) {
            refused = true;
          }
          l.require(refused, "(n,k)=(2,1) accepted");
          ++skipped;
          continue;
        }
        auto e = check_fft_lemma(parse_field(fs), 1, n, k, 1, SpaceSpec{2, 1}, FftStrategy::exact());
        exact_ratio = std::max(exact_ratio, e.margins.at("max_ratio"));
        l.require(e.violations == 0, std::string("exact ") + fs);
        for (double p : {1.5, 2.0}) {
          auto r = check_fft_lemma(parse_field(fs), 1, n, k, 1, SpaceSpec{p, 2},
                                   FftStrategy::random(kFftTrials, kFftAscent, kSeed));
          random_ratio = std::max(random_ratio, r.margins.at("max_ratio"));
          random_trials += r.cases_run;
          l.require(r.violations == 0, std::string("random ") + fs);
        }
      }
  l.require(exact_ratio <= 1 + kFftTol && random_ratio <= 1 + kFftTol, "FFT ratio");
  if (skipped)
    l.shortfall = "at (n,k)=(2,1) the hypothesis pi^{n-1} eps0 in pi^{2k} O/pi^n is empty, so no inequality is checked there";
  l.detail << " FFT max ratio exact " << exact_ratio << ", random+ascent " << random_ratio << " over " << random_trials
           << " trials (tol 1+" << kFftTol << "); " << skipped << " grid points with n-2k<1 outside the lemma domain;";

  double rewrite = 0;
  for (const char* fs : {"Q2", "Q3", "F2((t))", "F3((t))"})
    rewrite = std::max(rewrite, fft_rewrite_error(parse_field(fs), 3, 1, 1, 2, 50, kSeed));
  rewrite = std::max(rewrite, fft_rewrite_error(parse_field("F2((t))"), 5, 2, 1, 2, 20, kSeed));
  l.require(rewrite <= kRewriteTol, "rewriting identity");
  l.detail << " rewriting error " << rewrite << " (tol " << kRewriteTol << "); " << seconds_since(t0) << " s";
  emit(6, "Fourier norms and the FFT lemma", l);
}

void criterion7() {
  auto t0 = std::chrono::steady_clock::now();
  Line l;
  std::uint64_t blocked_total = 0;
  for (Regime r : {Regime::char_ne2(0), Regime::char_ne2(1), Regime::char_two()}) {
    std::vector<BoundParams> grid;
    std::ostringstream rates;
    for (double a : {0.3, 0.7})
      for (double h : {1.0, 2.0})
        for (double beta : {0.0, 0.9 * (r.char2 ? a / (4 * h) : a / (2 * h))}) {
          grid.push_back({a, h, beta, 0});
          rates << " " << decay_rate(grid.back(), r);
        }
    auto rep = zigzag_sweep(r, kZigzagMaxSum, grid);
    double sup = -1e300;
    for (const auto& [k, v] : rep.margins)
      if (k.rfind("max_log_constant", 0) == 0) sup = std::max(sup, v);
    std::uint64_t blocked = rep.tallies.count("blocked") ? rep.tallies.at("blocked") : 0;
    double blocked_sum = rep.margins.count("max_blocked_start_sum") ? rep.margins.at("max_blocked_start_sum") : -1;
    blocked_total += blocked;
    l.require(rep.violations == 0, r.to_string() + " illegal path or non-monotone ledger");
    l.require(std::isfinite(sup), r.to_string() + " constant");
    l.require(blocked_sum <= kZigzagBlockedMaxSum, r.to_string() + " blocked start beyond the corner");
    l.detail << " " << r.to_string() << ": " << rep.cases_run << "/" << rep.cases_total << " starts legal ("
             << blocked << " degenerate starts with i+j<=" << blocked_sum << " blocked), sup log C^=" << sup
             << ", t in {" << rates.str() << " };";
  }
  // Characteristic 2: i + j mod 2 is constant along every planned path.
  std::uint64_t parity_paths = 0, parity_breaks = 0;
  for (int i = 0; i <= kZigzagMaxSum; ++i)
    for (int j = 0; j <= i && i + j <= kZigzagMaxSum; ++j) {
      ZigzagPath p;
      try {
        p = plan_path({i, j}, Regime::char_two());
      } catch (const PreconditionError&) {
        continue;
      }
      ++parity_paths;
      for (const auto& c : p.cells) parity_breaks += (c.i + c.j) % 2 != (i + j) % 2;
    }
  l.require(parity_breaks == 0, "char-2 parity");
  l.detail << " char-2 parity of i+j constant on " << parity_paths << " paths (" << parity_breaks << " breaks);";
  if (blocked_total)
    l.shortfall = std::to_string(blocked_total) +
                  " corner starts have no legal route to the diagonal under the regime's move lemmas";
  double s = seconds_since(t0);
  l.require(s < kZigzagSeconds, "time limit");
  l.detail << " " << s << " s";
  emit(7, "zig-zag planner and bound ledger", l);
}

void criterion8() {
  Line l;
  Field f = parse_field("F2((t))");
  // Independent count of undecided depth-1 classes: every 2x2 minor of the first
  // two columns of g k has valuation >= 1 - 2i.
  auto undecided_count = [&](const GroupElement& g, int i) {
    std::uint64_t n = 0;
    for (const auto& k : enumerate_residue_points(f)) {
      Matrix gk = g.matrix() * k.matrix();
      int best = kInfiniteValuation;
      for (int r1 = 0; r1 < 4; ++r1)
        for (int r2 = r1 + 1; r2 < 4; ++r2) best = std::min(best, minor2(gk, r1, r2, 0, 1).valuation());
      n += best >= 1 - 2 * i;
    }
    return n;
  };
  struct Probe {
    const char* name;
    GroupElement g;
    int i;
  };
  for (const auto& [name, g, i] : {Probe{"identity", GroupElement::trusted(identity_matrix(f)), 0},
                                   Probe{"D(1,0)", gen_D(f, 1, 0), 1}, Probe{"D(2,1)", gen_D(f, 2, 1), 2}}) {
    auto v = parity_volumes_exhaustive(g, 1);
    std::uint64_t expected = undecided_count(g, i);
    l.require(v.cases == 720, std::string(name) + " class count");
    l.require(v.even + v.odd + v.undecided == v.cases, std::string(name) + " partition");
    l.require(v.undecided == expected, std::string(name) + " undecided count");
    l.require(std::abs(v.alpha.lo + v.beta.hi - 1) <= kMassTol && std::abs(v.beta.lo + v.alpha.hi - 1) <= kMassTol,
              std::string(name) + " endpoints");
    l.detail << " " << name << " depth 1: alpha [" << v.alpha.lo << ", " << v.alpha.hi << "], undecided "
             << v.undecided << " = independent " << expected << ";";
  }

  auto prof = parity_volumes_sampled(gen_D(f, 1, 0), 5, kParitySamples, kSeed);
  bool mono = true, ends = true;
  for (std::size_t n = 1; n < prof.size(); ++n)
    mono = mono && prof[n].undecided <= prof[n - 1].undecided && prof[n].even >= prof[n - 1].even &&
           prof[n].odd >= prof[n - 1].odd;
  for (const auto& p : prof) ends = ends && std::abs(p.alpha.lo + p.beta.hi - 1) <= kMassTol;
  l.require(mono, "depth refinement");
  l.require(ends, "sampled endpoints");
  l.detail << " D(1,0) depths 1..5 on " << kParitySamples << " samples: undecided";
  for (const auto& p : prof) l.detail << " " << p.undecided;
  l.detail << ", alpha at depth 5 [" << prof.back().alpha.lo << ", " << prof.back().alpha.hi << "] +/- "
           << prof.back().radius;
  emit(8, "char-2 parity volumes", l);
}

void criterion9() {
  Line l;
  auto dump = [](const SuiteResult& r) {
    std::string s;
    for (const auto& rep : r.reports) s += rep.to_json(false).dump() + "\n";
    return s + r.summary.dump() + "\n";
  };
  auto a = run_suite("quick", kSeed, Mutation::None, 1);
  auto b = run_suite("quick", kSeed, Mutation::None, 2);
  auto c = run_suite("quick", kSeed + 1, Mutation::None, 1);
  std::string da = dump(a), db = dump(b), dc = dump(c);
  l.require(a.exit_code == 0, "quick suite fails");
  l.require(da == db, "reruns differ");
  l.detail << " quick suite " << a.reports.size() << " reports, " << da.size()
           << " bytes; rerun with 2 workers byte-identical: " << (da == db ? "yes" : "no")
           << "; another seed changes the sampled reports: " << (da != dc ? "yes" : "no");
  emit(9, "determinism", l);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                            criterion6, criterion7, criterion8, criterion9};
  std::vector<int> pick;
  for (int a = 1; a < argc; ++a) pick.push_back(std::atoi(argv[a]));
  for (std::size_t n = 0; n < all.size(); ++n) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), int(n + 1)) == pick.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    try {
      all[n]();
    } catch (const std::exception& e) {
      std::cout << "criterion " << n + 1 << " FAIL raised: " << e.what() << std::endl;
      ++failures;
    }
    std::fprintf(stderr, "criterion %zu took %.1f s\n", n + 1, seconds_since(t0));
  }
  std::cout << "acceptance: " << failures << " failed, " << shortfalls
            << " short of the criterion with no violation found" << std::endl;
  return failures ? 1 : 0;
}
