#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sp4lab/averaging.hpp"
#include "sp4lab/decompose.hpp"
#include "sp4lab/fourier.hpp"
#include "sp4lab/suite.hpp"
#include "sp4lab/verifiers.hpp"
#include "sp4lab/zigzag.hpp"

using namespace sp4lab;

namespace {

struct Globals {
  std::string field = "Q3";
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  bool timing = true;
};

struct Output {
  const Globals* g;
  std::ostream* os = nullptr;
  std::ofstream file;

  explicit Output(const Globals& globals) : g(&globals) {}

  // Opened on first use, after the global flags are parsed.
  std::ostream& stream() {
    if (!os) {
      os = &std::cout;
      if (!g->out.empty()) {
        file.open(g->out);
        if (!file) throw ConfigError("cannot open " + g->out);
        os = &file;
      }
    }
    return *os;
  }

  void json(const Json& j) { stream() << j.dump() << '\n'; }

  void report(const VerificationReport& r) {
    stream();
    if (g->format == "json") return json(r.to_json(g->timing));
    *os << r.task << ": " << status_name(r.status()) << "  cases " << r.cases_run << "/" << r.cases_total
        << "  violations " << r.violations;
    if (r.undecided) *os << "  undecided " << r.undecided;
    for (const auto& [k, v] : r.margins) *os << "  " << k << "=" << v;
    *os << '\n';
    for (const auto& c : r.counterexamples)
      *os << "    counterexample " << c.tuple.dump() << " " << c.check << ": " << c.observed << " (expected "
          << c.expected << ")\n";
    for (const auto& n : r.notes) *os << "    note: " << n << '\n';
  }

  // Plain objects: JSON line, or key: value lines.
  void object(const Json& j) {
    stream();
    if (g->format == "json") return json(j);
    for (const auto& [k, v] : j.items()) *os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
};

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (const auto& r : m) {
    Json row = Json::array();
    for (const auto& e : r) row.push_back(e.to_string());
    rows.push_back(row);
  }
  return rows;
}

// "D:3,1 mu21:1/3 w21", multiplied left to right; or a JSON matrix of entry strings.
GroupElement parse_element(Field f, const std::string& word, const std::string& matrix) {
  if (!matrix.empty()) {
    Json j;
    try {
      j = Json::parse(matrix);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("bad --matrix: ") + e.what());
    }
    return GroupElement::from_strings(f, j.get<std::vector<std::vector<std::string>>>());
  }
  GroupElement g = GroupElement::trusted(identity_matrix(f));
  std::istringstream in(word);
  for (std::string tok; in >> tok;) {
    auto colon = tok.find(':');
    std::vector<std::string> params;
    if (colon != std::string::npos) {
      std::istringstream ps(tok.substr(colon + 1));
      for (std::string p; std::getline(ps, p, ',');) params.push_back(p);
    }
    g = g * generator(f, tok.substr(0, colon), params);
  }
  return g;
}

int status_code(const VerificationReport& r) { return r.status() == Status::Pass ? 0 : 1; }

CartanPair parse_pair(const std::string& s) {
  auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected i,j but got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sp4lab: exact checks of the Sp4 move lemmas, generation, averaging, Fourier and zig-zag bounds"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value file with the same keys as the flags");
  Globals g;
  app.add_option("--field", g.field, "Q<p> or F<q>((t))");
  app.add_option("--format", g.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", g.seed);
  app.add_option("--threads", g.threads, "workers (default SP4LAB_THREADS or 1)");
  app.add_option("--out", g.out, "write reports here instead of stdout");
  app.add_flag("!--no-timing", g.timing, "omit elapsed_ms from reports");

  Output out(g);
  int code = 0;
  auto field = [&] { return parse_field(g.field); };

  auto* info = app.add_subcommand("field-info", "describe the field");
  info->callback([&] {
    Field f = field();
    Json j = {{"field", f.name()}, {"kind", f.kind() == FieldKind::MixedChar ? "mixed" : "equal"}, {"p", f.p()},
              {"f", f.f()}, {"q", f.q()}, {"characteristic", f.characteristic()}};
    if (!f.is_char2()) j["v2"] = two_valuation(f);
    out.object(j);
  });

  std::string word, matrix;
  auto* cartan = app.add_subcommand("cartan", "Cartan cell of a product of generators");
  cartan->add_option("--g", word, "generator word, e.g. \"D:3,1 mu21:1/3 w21\"");
  cartan->add_option("--matrix", matrix, "JSON 4x4 array of entry strings");
  cartan->callback([&] {
    auto e = parse_element(field(), word, matrix);
    auto c = cartan_invariants(e);
    out.object({{"matrix", matrix_json(e.matrix())}, {"cell", {c.cell.i, c.cell.j}}, {"norm_exp", c.norm_exp},
                {"wedge_norm_exp", c.wedge_norm_exp}, {"length", c.length}});
  });

  std::string lemma_s;
  int wi = 0, wj = 0, wk = 0;
  std::uint64_t wa = 0, wb = 0, wx = 0;
  unsigned weps = 0;
  auto* witness = app.add_subcommand("witness", "dump the matrices of one lemma witness");
  witness->add_option("lemma", lemma_s)->required();
  witness->add_option("--i", wi)->required();
  witness->add_option("--j", wj)->required();
  witness->add_option("--k", wk);
  witness->add_option("--a", wa);
  witness->add_option("--b", wb);
  witness->add_option("--x", wx);
  witness->add_option("--eps", weps);
  witness->callback([&] {
    auto w = build_witness(parse_lemma(lemma_s), field(), wi, wj, wk, wa, wb, wx,
                           static_cast<FiniteField::Elem>(weps));
    Json j = {{"lemma", lemma_name(w.lemma)}, {"cell", {w.cell.i, w.cell.j}}, {"k", w.k}, {"m", w.m},
              {"level", w.level}, {"a", w.sa.to_string()}, {"b", w.sb.to_string()}, {"x", w.sx.to_string()},
              {"y", w.sy.to_string()}, {"beta_inv", matrix_json(w.beta_inv)}, {"alpha", matrix_json(w.alpha)},
              {"product", matrix_json(w.product)}};
    if (w.eps) j["eps"] = *w.eps;
    if (w.minor_formula) j["minor_formula"] = w.minor_formula->to_string();
    if (w.eps1) j["eps1"] = w.eps1->to_string();
    if (w.a1) j["a1"] = w.a1->to_string();
    if (w.k1) j["k1"] = matrix_json(*w.k1);
    if (w.g1) j["g1"] = matrix_json(*w.g1);
    if (w.expected_cell) j["expected_cell"] = {w.expected_cell->i, w.expected_cell->j};
    auto c = cartan_invariants(w.product);
    j["observed_cell"] = {c.cell.i, c.cell.j};
    out.object(j);
  });

  std::string mode = "auto", mutation_s = "none";
  std::uint64_t samples = 1000, budget = 1'100'000;
  bool ids = false;
  auto* verify = app.add_subcommand("verify", "check the cell claims of one lemma at (i, j, k)");
  verify->add_option("lemma", lemma_s)->required();
  verify->add_option("--i", wi)->required();
  verify->add_option("--j", wj)->required();
  verify->add_option("--k", wk);
  verify->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "sample", "auto"}));
  verify->add_option("--samples", samples);
  verify->add_option("--budget", budget);
  verify->add_option("--mutation", mutation_s);
  verify->add_flag("--identities", ids, "check the displayed identities on sampled tuples instead");
  verify->callback([&] {
    LemmaId l = parse_lemma(lemma_s);
    Mutation m = parse_mutation(mutation_s);
    VerificationReport r;
    if (ids) {
      r = verify_witness_identities(l, field(), wi, wj, samples, g.seed, m);
    } else {
      Enumeration e = mode == "exhaustive" ? Enumeration::exhaustive(budget)
                      : mode == "sample"   ? Enumeration::sample(samples, g.seed)
                                           : Enumeration::automatic(budget, samples, g.seed);
      r = verify_cell_lemma(l, field(), wi, wj, wk, e, m);
    }
    r.seed = g.seed;
    out.report(r);
    code = status_code(r);
  });

  auto* decompose = app.add_subcommand("decompose", "write an element of K as alternating K1/K2 factors");
  decompose->add_option("--g", word);
  decompose->add_option("--matrix", matrix);
  decompose->callback([&] {
    Field f = field();
    auto e = parse_element(f, word, matrix);
    auto fl = decompose_K1K2(e);
    Json fs = Json::array();
    for (const auto& x : fl.factors)
      fs.push_back({{"subgroup", x.tag == Subgroup::K1 ? "K1" : "K2"}, {"label", x.label},
                    {"matrix", matrix_json(x.element.matrix())}});
    bool ok = fl.product(f) == e;
    out.object({{"route", fl.route}, {"block_count", fl.block_count}, {"factors", fs}, {"reconstructs", ok},
                {"notes", fl.notes}});
    code = ok && fl.block_count <= 30 ? 0 : 1;
  });

  int depth = 1;
  std::uint64_t psamples = 0;
  auto* parity = app.add_subcommand("parity", "parity volumes alpha(g), beta(g) in characteristic 2");
  parity->add_option("--g", word);
  parity->add_option("--matrix", matrix);
  parity->add_option("--depth", depth);
  parity->add_option("--samples", psamples, "0 for exhaustive enumeration");
  parity->callback([&] {
    auto e = parse_element(field(), word, matrix);
    if (psamples == 0) {
      out.object(parity_volumes_exhaustive(e, depth).to_json());
    } else {
      Json prof = Json::array();
      for (const auto& v : parity_volumes_sampled(e, depth, psamples, g.seed)) prof.push_back(v.to_json());
      out.object({{"profile", prof}});
    }
  });

  std::string space_s = "l2:1";
  int h = 1;
  std::uint64_t iters = 0;
  auto* fnorm = app.add_subcommand("fourier-norm", "norm of the finite Fourier transform on O/pi^h tensor E");
  fnorm->add_option("--space", space_s);
  fnorm->add_option("--h", h);
  fnorm->add_option("--iters", iters, "search iterations (0: exact, Hilbert spaces only)");
  fnorm->callback([&] {
    auto s = iters ? SearchStrategy::search(iters, g.seed) : SearchStrategy::exact();
    auto b = transform_norm(field(), h, parse_space(space_s), s);
    Json j = b.to_json();
    j["field"] = g.field;
    out.object(j);
  });

  int n = 2;
  unsigned eps0 = 1;
  std::uint64_t trials = 0, ascent = 0;
  auto* fft = app.add_subcommand("fft-check", "the FFT-lemma inequality on (O/pi^n)^2 families");
  fft->add_option("--h", h);
  fft->add_option("--n", n);
  fft->add_option("--k", wk);
  fft->add_option("--eps0", eps0);
  fft->add_option("--space", space_s);
  fft->add_option("--trials", trials, "random trials (0: exact, Hilbert spaces only)");
  fft->add_option("--ascent", ascent);
  fft->callback([&] {
    auto s = trials ? FftStrategy::random(trials, ascent, g.seed) : FftStrategy::exact();
    auto r = check_fft_lemma(field(), h, n, wk, static_cast<FiniteField::Elem>(eps0), parse_space(space_s), s);
    r.seed = g.seed;
    out.report(r);
    code = status_code(r);
  });

  double tp = 2;
  int nvec = 4;
  auto* type = app.add_subcommand("type-const", "estimate the Rademacher type-p constant of l_p^d");
  type->add_option("--space", space_s);
  type->add_option("--p", tp);
  type->add_option("--n", nvec);
  type->add_option("--trials", trials);
  type->callback([&] {
    out.object(estimate_type_constant(parse_space(space_s), tp, nvec, trials ? trials : 100, g.seed).to_json());
  });

  std::string start_s, regime_s = "char-ne-2";
  BoundParams bp;
  int grid = 0;
  auto* zig = app.add_subcommand("zigzag", "zig-zag paths and their bound ledgers");
  zig->require_subcommand(1);
  auto* plan = zig->add_subcommand("plan", "plan a legal path to the diagonal");
  plan->add_option("--start", start_s)->required();
  plan->add_option("--regime", regime_s, "char-ne-2[:v0[:k]] or char2[:k]");
  plan->callback([&] {
    auto p = plan_path(parse_pair(start_s), parse_regime(regime_s));
    Json j = p.to_json();
    j["problems"] = check_path(p);
    j["strip_discipline"] = strip_discipline(p);
    out.object(j);
    code = check_path(p).empty() ? 0 : 1;
  });
  auto* bound = zig->add_subcommand("bound", "ledger of one path (--start) or a sweep (--grid)");
  bound->add_option("--start", start_s);
  bound->add_option("--regime", regime_s);
  bound->add_option("--alpha", bp.alpha);
  bound->add_option("--h", bp.h);
  bound->add_option("--beta", bp.beta);
  bound->add_option("--C", bp.C);
  bound->add_option("--grid", grid, "sweep all starts with i + j <= grid");
  bound->callback([&] {
    Regime r = parse_regime(regime_s);
    if (grid > 0) {
      auto rep = zigzag_sweep(r, grid, {bp});
      out.report(rep);
      code = status_code(rep);
      return;
    }
    if (start_s.empty()) throw ConfigError("zigzag bound needs --start or --grid");
    auto p = plan_path(parse_pair(start_s), r);
    auto led = bound_ledger(p, bp);
    Json j = led.to_json();
    j["path"] = p.to_json();
    j["decay_rate"] = decay_rate(bp, r);
    out.object(j);
  });

  std::string profile;
  auto* suite = app.add_subcommand("suite", "run a task profile (quick or full)");
  suite->add_option("profile", profile)->required();
  suite->add_option("--mutation", mutation_s);
  suite->callback([&] {
    Mutation m = parse_mutation(mutation_s);
    int threads = g.threads > 0 ? g.threads : default_threads();
    auto res = run_suite(profile, g.seed, m, threads);
    for (const auto& r : res.reports) out.report(r);
    out.object(res.summary);
    code = res.exit_code;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "sp4lab: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "sp4lab: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "sp4lab: " << e.what() << '\n';
    return 2;
  }
  return code;
}
