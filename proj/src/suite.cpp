#include "sp4lab/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "sp4lab/averaging.hpp"
#include "sp4lab/fourier.hpp"
#include "sp4lab/verifiers.hpp"
#include "sp4lab/zigzag.hpp"

namespace sp4lab {

namespace {

struct Scale {
  bool full = false;
  std::uint64_t budget, samples, identity_samples, generation_samples, averaging_trials, fft_trials, fft_ascent,
      parity_samples;
  int max_sum;
};

Scale quick_scale() { return {false, 20'000, 500, 300, 100, 1'000, 40, 10, 1'000, 120}; }
Scale full_scale() { return {true, 1'100'000, 20'000, 1'000, 1'000, 1'000, 10'000, 300, 5'000, 300}; }

// Every admissible cell with i <= max_i that `keep` accepts, checked and merged.
VerificationReport cell_grid(const std::string& id, LemmaId lemma, const char* field, std::vector<int> ks, int max_i,
                             const std::function<bool(int, int)>& keep, const Scale& sc, std::uint64_t seed,
                             Mutation mutation) {
  Field f = parse_field(field);
  VerificationReport out;
  Json cells = Json::array();
  for (int k : ks)
    for (int i = 0; i <= max_i; ++i)
      for (int j = 0; j <= i + 1; ++j) {
        if (!keep(i, j)) continue;
        try {
          make_context(lemma, f, i, j, k);
        } catch (const PreconditionError&) {
          continue;
        }
        auto rep = verify_cell_lemma(lemma, f, i, j, k, Enumeration::automatic(sc.budget, sc.samples, seed), mutation);
        for (auto& c : rep.counterexamples) c.tuple = {{"cell", {i, j, k}}, {"tuple", c.tuple}};
        for (auto& n : rep.notes) n = CartanPair{i, j}.to_string() + " k=" + std::to_string(k) + ": " + n;
        out.merge(rep);
        cells.push_back({i, j, k});
      }
  out.task = id;
  out.params = {{"lemma", lemma_name(lemma)}, {"field", field}, {"cells", cells}, {"budget", sc.budget},
                {"samples", sc.samples}, {"mutation", mutation_name(mutation)}};
  return out;
}

VerificationReport identities(const std::string& id, LemmaId lemma, const char* field, int i, int j, const Scale& sc,
                              std::uint64_t seed, Mutation mutation) {
  auto rep = verify_witness_identities(lemma, parse_field(field), i, j, sc.identity_samples, seed, mutation);
  rep.task = id;
  return rep;
}

VerificationReport parity_identity() {
  Field f = parse_field("F2((t))");
  auto v = parity_volumes_exhaustive(GroupElement::trusted(identity_matrix(f)), 1);
  VerificationReport rep;
  rep.task = "parity.identity.F2";
  rep.params = {{"field", "F2((t))"}, {"depth", 1}, {"volumes", v.to_json()}};
  rep.cases_total = rep.cases_run = v.cases;
  rep.tallies = {{"even", v.even}, {"odd", v.odd}, {"wedge_undecided", v.undecided}};
  if (v.even + v.odd + v.undecided != v.cases) rep.fail({}, "class count", "mismatch", "even+odd+undecided = cases");
  if (v.even_mass() + v.odd_mass() > 1 + 1e-12) rep.fail({}, "decided mass", "> 1", "<= 1");
  if (std::abs(v.alpha.lo + v.beta.hi - 1) > 1e-12 || std::abs(v.beta.lo + v.alpha.hi - 1) > 1e-12)
    rep.fail({}, "endpoint consistency", "alpha + beta != 1", "1");
  return rep;
}

VerificationReport parity_profile(const Scale& sc, std::uint64_t seed) {
  Field f = parse_field("F2((t))");
  auto prof = parity_volumes_sampled(gen_D(f, 1, 0), 5, sc.parity_samples, seed);
  VerificationReport rep;
  rep.task = "parity.sampled.F2";
  Json p = Json::array();
  for (const auto& v : prof) p.push_back(v.to_json());
  rep.params = {{"field", "F2((t))"}, {"g", "D(1,0)"}, {"samples", sc.parity_samples}, {"profile", p}};
  rep.cases_total = rep.cases_run = sc.parity_samples;
  for (std::size_t n = 1; n < prof.size(); ++n)
    if (prof[n].undecided > prof[n - 1].undecided || prof[n].even < prof[n - 1].even || prof[n].odd < prof[n - 1].odd)
      rep.fail({{"depth", n + 1}}, "depth refinement", "decided counts shrink", "monotone");
  for (const auto& v : prof)
    if (std::abs(v.alpha.lo + v.beta.hi - 1) > 1e-12) rep.fail({{"depth", v.depth}}, "endpoint consistency", "", "1");
  if (prof.back().undecided != 0) rep.fail({{"depth", 5}}, "uniform depth decides", "undecided left", "0");
  return rep;
}

VerificationReport hilbert_norms() {
  VerificationReport rep;
  rep.task = "fourier.hilbert";
  for (const char* f : {"Q2", "Q3", "F2((t))", "F3((t))"})
    for (int h : {1, 2})
      for (int d : {1, 2, 4}) {
        Field fld = parse_field(f);
        auto b = transform_norm(fld, h, SpaceSpec{2, d}, SearchStrategy::exact());
        double err = std::abs(b.lower - std::pow(fld.q(), -h / 2.0));
        ++rep.cases_total, ++rep.cases_run;
        rep.margin_max("max_abs_error", err);
        if (err > 1e-9)
          rep.fail({{"field", f}, {"h", h}, {"d", d}}, "norm = q^{-h/2}", std::to_string(b.lower), "q^{-h/2}");
      }
  rep.params = {{"fields", {"Q2", "Q3", "F2((t))", "F3((t))"}}, {"h", {1, 2}}, {"d", {1, 2, 4}}, {"tolerance", 1e-9}};
  return rep;
}

// (n, k) = (2, 1) is outside the lemma's domain: pi^{n-1} eps0 is not in pi^{2k} R.
VerificationReport fft_grid(bool exact, const Scale& sc, std::uint64_t seed) {
  VerificationReport rep;
  for (const char* f : {"Q2", "Q3", "F2((t))", "F3((t))"})
    for (int n : {2, 3})
      for (int k : {0, 1})
        for (double p : exact ? std::vector<double>{2} : std::vector<double>{1.5, 2}) {
          if (n - 2 * k < 1) {
            rep.tallies["outside_domain"]++;
            continue;
          }
          auto strat = exact ? FftStrategy::exact() : FftStrategy::random(sc.fft_trials, sc.fft_ascent, seed);
          SpaceSpec space{p, exact ? 1 : 2};
          auto r = check_fft_lemma(parse_field(f), 1, n, k, 1, space, strat);
          for (auto& c : r.counterexamples)
            c.tuple = {{"field", f}, {"n", n}, {"k", k}, {"space", space.to_string()}, {"tuple", c.tuple}};
          rep.merge(r);
        }
  rep.task = exact ? "fourier.fft.exact" : "fourier.fft.random";
  rep.params = {{"fields", {"Q2", "Q3", "F2((t))", "F3((t))"}}, {"h", 1}, {"n", {2, 3}}, {"k", {0, 1}},
                {"eps0", 1}, {"tolerance", 1e-8}};
  if (!exact) rep.params["trials"] = sc.fft_trials, rep.params["ascent_steps"] = sc.fft_ascent;
  rep.notes.push_back("(n,k) = (2,1) skipped: pi^{n-1} eps0 lies outside pi^{2k} R");
  return rep;
}

VerificationReport fft_rewrite(std::uint64_t seed) {
  VerificationReport rep;
  rep.task = "fourier.rewrite";
  struct Case {
    const char* f;
    int n, k, eps0, dim;
  };
  for (Case c : {Case{"Q3", 3, 1, 1, 2}, Case{"Q2", 3, 1, 1, 2}, Case{"F2((t))", 5, 2, 1, 3}, Case{"Q5", 3, 1, 2, 1},
                 Case{"F3((t))", 4, 1, 2, 2}}) {
    double e = fft_rewrite_error(parse_field(c.f), c.n, c.k, static_cast<FiniteField::Elem>(c.eps0), c.dim, 20, seed);
    ++rep.cases_total, ++rep.cases_run;
    rep.margin_max("max_rewrite_error", e);
    if (!(e <= 1e-12)) rep.fail({{"field", c.f}, {"n", c.n}, {"k", c.k}}, "k-variant rewriting", std::to_string(e), "<= 1e-12");
  }
  for (const char* f : {"Q2", "Q3", "Q5", "F4((t))"}) {
    Field fld = parse_field(f);
    for (int e = 1; e < fld.q(); ++e) {
      auto eps = static_cast<FiniteField::Elem>(e);
      double d = std::abs(c2_constant(fld, eps) - c2_direct(fld, eps));
      ++rep.cases_total, ++rep.cases_run;
      rep.margin_max("max_c2_mismatch", d);
      if (d > 1e-9) rep.fail({{"field", f}, {"eps0", e}}, "C2 expansion", std::to_string(d), "0");
    }
  }
  rep.params = {{"tolerance", 1e-12}};
  return rep;
}

VerificationReport type_constant(std::uint64_t seed) {
  VerificationReport rep;
  rep.task = "fourier.type";
  auto h = estimate_type_constant(SpaceSpec{2, 4}, 2, 6, 50, seed);
  auto l = estimate_type_constant(SpaceSpec{1.5, 3}, 1.5, 5, 50, seed);
  rep.cases_total = rep.cases_run = h.trials + l.trials;
  rep.margins = {{"max_ratio_l2", h.max_ratio}, {"max_ratio_l1.5", l.max_ratio}};
  if (std::abs(h.max_ratio - 1) > 1e-9) rep.fail({{"space", "l2:4"}}, "type 2 constant of a Hilbert space", std::to_string(h.max_ratio), "1");
  rep.params = {{"l2:4", h.to_json()}, {"l1.5:3", l.to_json()}};
  return rep;
}

std::vector<BoundParams> zigzag_grid(const Regime& r) {
  std::vector<BoundParams> g;
  for (double a : {0.3, 0.7})
    for (double h : {1.0, 2.0}) {
      double cap = r.char2 ? a / (4 * h) : a / (2 * h);
      for (double b : {0.0, 0.9 * cap}) g.push_back({a, h, b, 0});
    }
  return g;
}

std::vector<SuiteTask> build(const Scale& sc) {
  std::vector<SuiteTask> t;
  auto cells = [&](std::string id, std::string claim, LemmaId l, const char* f, std::vector<int> ks, int max_i,
                   std::function<bool(int, int)> keep) {
    t.push_back({id, {claim}, [=](std::uint64_t seed, Mutation m) {
                   return cell_grid(id, l, f, ks, max_i, keep, sc, seed, m);
                 }});
  };
  const int top = sc.full ? 8 : 6;
  auto sum_le = [top](int i, int j) { return i + j <= top; };
  auto m1m = [top](int i, int j) { return j >= 2 && j <= (top == 8 ? 4 : 3) && i >= j && i <= top; };
  auto c02 = [top](int i, int j) { return i - j >= 2 && i - j <= (top == 8 ? 6 : 5) && j <= (top == 8 ? 3 : 1); };
  cells("cells.SPHER01.Q3", "SPHER01.cells", LemmaId::SPHER01, "Q3", {0}, top, sum_le);
  cells("cells.SPHER01.Q5", "SPHER01.cells", LemmaId::SPHER01, "Q5", {0}, top, sum_le);
  for (const char* f : {"Q3", "F2((t))", "F4((t))"})
    cells(std::string("cells.SPHER1M1.") + parse_field(f).name(), "SPHER1M1.cells", LemmaId::SPHER1M1, f, {0}, top, m1m);
  for (const char* f : {"F2((t))", "F4((t))"})
    cells(std::string("cells.CHAR2_02.") + parse_field(f).name(), "CHAR2_02.cells", LemmaId::CHAR2_02, f, {0}, 10, c02);

  // Non-spherical layers, k = 1 (quick) or k in {1, 2} (full); NONSPHER1M1 also at k = 0.
  std::vector<int> ks = sc.full ? std::vector<int>{1, 2} : std::vector<int>{1};
  const int nmax = sc.full ? 9 : 5;
  auto small = [nmax](int i, int j) { return i + j <= nmax; };
  for (const char* f : {"Q3", "Q5", "F3((t))", "F5((t))"})
    cells(std::string("cells.NONSPHER01.") + parse_field(f).name(), "NONSPHER01.cells", LemmaId::NONSPHER01, f, ks, nmax,
          small);
  std::vector<int> ks1 = ks;
  ks1.insert(ks1.begin(), 0);
  for (const char* f : {"Q3", "Q5", "F3((t))"})
    cells(std::string("cells.NONSPHER1M1.") + parse_field(f).name(), "NONSPHER1M1.cells", LemmaId::NONSPHER1M1, f, ks1,
          nmax, small);
  for (const char* f : {"F2((t))", "F4((t))"})
    cells(std::string("cells.CHAR2_02_k.") + parse_field(f).name(), "CHAR2_02.nonspherical", LemmaId::CHAR2_02, f, ks,
          sc.full ? 12 : 8, [](int i, int j) { return j <= 2 && i - j <= 10; });

  struct Id {
    const char* id;
    const char* claim;
    LemmaId l;
    const char* f;
    int i, j;
  };
  for (Id c : {Id{"identities.SPHER01.Q3", "SPHER01.identities", LemmaId::SPHER01, "Q3", 4, 1},
               Id{"identities.SPHER01.Q5", "SPHER01.identities", LemmaId::SPHER01, "Q5", 5, 1},
               Id{"identities.SPHER1M1.Q3", "SPHER1M1.identities", LemmaId::SPHER1M1, "Q3", 3, 3},
               Id{"identities.SPHER1M1.F4", "SPHER1M1.identities", LemmaId::SPHER1M1, "F4((t))", 4, 2},
               Id{"identities.NONSPHER01.Q3", "NONSPHER01.identities", LemmaId::NONSPHER01, "Q3", 4, 1},
               Id{"identities.NONSPHER1M1.Q5", "NONSPHER1M1.identities", LemmaId::NONSPHER1M1, "Q5", 3, 4},
               Id{"identities.CHAR2_02.F4", "CHAR2_02.identities", LemmaId::CHAR2_02, "F4((t))", 6, 2}})
    t.push_back({c.id, {c.claim}, [=](std::uint64_t seed, Mutation m) {
                   return identities(c.id, c.l, c.f, c.i, c.j, sc, seed, m);
                 }});

  t.push_back({"generation.residue.F2", {"generation"}, [](std::uint64_t seed, Mutation) {
                 auto r = verify_generation_residue(parse_field("F2((t))"));
                 r.task = "generation.residue.F2";
                 r.seed = seed;
                 return r;
               }});
  for (const char* f : {"F2((t))", "Q2", "Q3"}) {
    std::string id = std::string("generation.random.") + parse_field(f).name();
    t.push_back({id, {"generation"}, [=](std::uint64_t seed, Mutation) {
                   auto r = verify_generation_random(parse_field(f), 3, sc.generation_samples, seed);
                   r.task = id;
                   return r;
                 }});
  }
  t.push_back({"averaging.S3", {"averaging"}, [=](std::uint64_t seed, Mutation) {
                 auto r = verify_averaging(make_s3_standard(), 0, sc.averaging_trials, seed);
                 r.task = "averaging.S3";
                 return r;
               }});
  t.push_back({"averaging.D4", {"averaging"}, [=](std::uint64_t seed, Mutation) {
                 auto r = verify_averaging(make_d4_standard(), 0, sc.averaging_trials, seed);
                 r.task = "averaging.D4";
                 return r;
               }});
  t.push_back({"parity.identity.F2", {"parity"}, [](std::uint64_t, Mutation) { return parity_identity(); }});
  t.push_back({"parity.sampled.F2", {"parity"}, [=](std::uint64_t seed, Mutation) { return parity_profile(sc, seed); }});
  t.push_back({"fourier.hilbert", {"fourier.norm"}, [](std::uint64_t, Mutation) { return hilbert_norms(); }});
  t.push_back({"fourier.fft.exact", {"fft.plain", "fft.eps0"}, [=](std::uint64_t seed, Mutation) {
                 return fft_grid(true, sc, seed);
               }});
  t.push_back({"fourier.fft.random", {"fft.plain", "fft.eps0"}, [=](std::uint64_t seed, Mutation) {
                 return fft_grid(false, sc, seed);
               }});
  t.push_back({"fourier.rewrite", {"fft.rewrite", "fft.c2"}, [](std::uint64_t seed, Mutation) { return fft_rewrite(seed); }});
  t.push_back({"fourier.type", {"type"}, [](std::uint64_t seed, Mutation) { return type_constant(seed); }});
  for (Regime r : {Regime::char_ne2(0), Regime::char_ne2(1), Regime::char_two()}) {
    std::string id = "zigzag." + r.to_string();
    t.push_back({id, {r.char2 ? "zigzag.char2" : "zigzag.char-ne-2"}, [=](std::uint64_t, Mutation) {
                   auto rep = zigzag_sweep(r, sc.max_sum, zigzag_grid(r));
                   rep.task = id;
                   return rep;
                 }});
  }
  std::sort(t.begin(), t.end(), [](const SuiteTask& a, const SuiteTask& b) { return a.id < b.id; });
  return t;
}

}  // namespace

std::vector<SuiteTask> suite_tasks(const std::string& profile) {
  if (profile == "quick") return build(quick_scale());
  if (profile == "full") return build(full_scale());
  throw ConfigError("unknown suite profile '" + profile + "' (expected quick or full)");
}

const std::vector<std::string>& coverage_manifest() {
  static const std::vector<std::string> claims = {
      "SPHER01.cells",        "SPHER01.identities",    "SPHER1M1.cells",    "SPHER1M1.identities",
      "NONSPHER01.cells",     "NONSPHER01.identities", "NONSPHER1M1.cells", "NONSPHER1M1.identities",
      "CHAR2_02.cells",       "CHAR2_02.identities",   "CHAR2_02.nonspherical",
      "generation",           "averaging",             "parity",            "fourier.norm",
      "fft.plain",            "fft.eps0",              "fft.rewrite",       "fft.c2",
      "type",                 "zigzag.char-ne-2",      "zigzag.char2"};
  return claims;
}

int default_threads() {
  if (const char* s = std::getenv("SP4LAB_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

SuiteResult run_suite(const std::string& profile, std::uint64_t seed, Mutation mutation, int threads) {
  auto tasks = suite_tasks(profile);
  if (threads < 1) throw ConfigError("threads must be >= 1");
  SuiteResult out;
  out.reports.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next++) < tasks.size();) {
      VerificationReport r;
      try {
        r = tasks[t].run(seed, mutation);
      } catch (const std::exception& e) {
        r = VerificationReport{};
        r.fail({}, "task completed", std::string("error: ") + e.what(), "no error");
      }
      r.task = tasks[t].id;
      r.seed = seed;
      out.reports[t] = std::move(r);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min<int>(threads, static_cast<int>(tasks.size())); ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Json failed = Json::array();
  double elapsed = 0;
  for (const auto& r : out.reports) {
    elapsed += r.elapsed_ms;
    if (r.status() != Status::Pass) failed.push_back(r.task);
  }
  out.exit_code = failed.empty() ? 0 : 1;
  out.summary = {{"task", "summary"},           {"profile", profile},
                 {"seed", seed},                {"mutation", mutation_name(mutation)},
                 {"tasks", out.reports.size()}, {"failed", failed},
                 {"status", failed.empty() ? "pass" : "violated"}};
  return out;
}

}  // namespace sp4lab
