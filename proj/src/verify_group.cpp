#include <chrono>
#include <cmath>

#include "sp4lab/decompose.hpp"
#include "sp4lab/haar.hpp"
#include "sp4lab/verifiers.hpp"

namespace sp4lab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Json element_json(const GroupElement& g) { return g.to_strings(); }

}  // namespace

VerificationReport verify_decompositions(const std::vector<GroupElement>& elements, const std::string& task) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.task = task;
  rep.cases_total = elements.size();
  for (const auto& g : elements) {
    ++rep.cases_run;
    FactorList fl;
    try {
      fl = decompose_K1K2(g);
    } catch (const std::exception& e) {
      rep.fail(element_json(g), "decomposition", e.what(), "alternating K1/K2 factors");
      continue;
    }
    Field f = g.field();
    if (!(fl.product(f) == g)) rep.fail(element_json(g), "reconstruction", "product differs", "exact product");
    for (std::size_t k = 0; k < fl.factors.size(); ++k) {
      const auto& x = fl.factors[k];
      if (k && x.tag == fl.factors[k - 1].tag) rep.fail(element_json(g), "alternation", "repeated tag", "alternating tags");
      if (!subgroup_membership(x.element, x.tag)) rep.fail(element_json(g), "factor membership", x.label, "in its tagged subgroup");
    }
    if (fl.block_count > 30)
      rep.fail(element_json(g), "block_count <= 30", std::to_string(fl.block_count), "<= 30");
    rep.margin_max("max_block_count", fl.block_count);
    rep.tallies["route_" + fl.route]++;
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

VerificationReport verify_generation_residue(Field f) {
  auto t0 = Clock::now();
  auto rep = verify_decompositions(enumerate_residue_points(f), "generation_residue");
  rep.params = {{"field", f.name()}, {"mode", "exhaustive"}};
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

VerificationReport verify_generation_random(Field f, int max_depth, std::uint64_t samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  KSampler sampler(f, seed);
  std::vector<GroupElement> elems;
  for (std::uint64_t s = 0; s < samples; ++s) elems.push_back(sampler.sample(1 + int(s % max_depth)));
  auto rep = verify_decompositions(elems, "generation_random");
  rep.params = {{"field", f.name()}, {"mode", "sample"}, {"max_depth", max_depth}};
  rep.seed = seed;
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

// ---- parity volumes ------------------------------------------------------------

Json ParityVolumes::to_json() const {
  return {{"depth", depth},
          {"cases", cases},
          {"even", even},
          {"odd", odd},
          {"undecided", undecided},
          {"uniform_bound", uniform_bound},
          {"alpha", {alpha.lo, alpha.hi}},
          {"beta", {beta.lo, beta.hi}},
          {"radius", radius}};
}

int first_columns_wedge_valuation(const Matrix& g, const Matrix& k) {
  FieldElem cols[4][2];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) {
      FieldElem s = FieldElem::zero(g[0][0].field());
      for (int t = 0; t < 4; ++t)
        if (!g[r][t].is_zero() && !k[t][c].is_zero()) s = s + g[r][t] * k[t][c];
      cols[r][c] = s;
    }
  int best = kInfiniteValuation;
  for (int r1 = 0; r1 < 4; ++r1)
    for (int r2 = r1 + 1; r2 < 4; ++r2) {
      FieldElem m = cols[r1][0] * cols[r2][1] - cols[r1][1] * cols[r2][0];
      if (!m.is_zero()) best = std::min(best, m.valuation());
    }
  return best;
}

namespace {

void finish(ParityVolumes& pv) {
  double n = pv.cases ? double(pv.cases) : 1;
  pv.alpha = {pv.even / n, 1 - pv.odd / n};
  pv.beta = {pv.odd / n, 1 - pv.even / n};
}

// The class of k mod pi^depth fixes the wedge valuation v when v < depth - 2i:
// perturbing k by pi^depth moves each minor by at most q^{2i - depth}.
void tally(ParityVolumes& pv, int v, int i) {
  ++pv.cases;
  if (v >= pv.depth - 2 * i)
    ++pv.undecided;
  else if (v % 2 == 0)
    ++pv.even;
  else
    ++pv.odd;
}

}  // namespace

ParityVolumes parity_volumes_exhaustive(const GroupElement& g, int depth) {
  Field f = g.field();
  if (!f.is_char2()) throw PreconditionError("parity volumes require characteristic 2");
  if (depth < 1) throw PreconditionError("depth must be >= 1");
  auto cell = cartan_invariants(g).cell;
  ParityVolumes pv;
  pv.depth = depth;
  pv.uniform_bound = depth >= 3 * cell.i + cell.j + 1;
  auto base = enumerate_residue_points(f);
  auto kicks = enumerate_kicks(f, depth);
  for (const auto& k0 : base) {
    Matrix gk0 = g.matrix() * k0.matrix();
    for (const auto& kk : kicks) tally(pv, first_columns_wedge_valuation(gk0, kk.matrix()), cell.i);
  }
  finish(pv);
  return pv;
}

std::vector<ParityVolumes> parity_volumes_sampled(const GroupElement& g, int max_depth, std::uint64_t samples,
                                                  std::uint64_t seed) {
  Field f = g.field();
  if (!f.is_char2()) throw PreconditionError("parity volumes require characteristic 2");
  if (max_depth < 1) throw PreconditionError("depth must be >= 1");
  auto cell = cartan_invariants(g).cell;
  std::vector<ParityVolumes> out(max_depth);
  for (int d = 0; d < max_depth; ++d) {
    out[d].depth = d + 1;
    out[d].uniform_bound = d + 1 >= 3 * cell.i + cell.j + 1;
  }
  KSampler sampler(f, seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    GroupElement k = sampler.sample(max_depth);
    int v = first_columns_wedge_valuation(g.matrix(), k.matrix());
    for (auto& pv : out) tally(pv, v, cell.i);
  }
  for (auto& pv : out) {
    finish(pv);
    double spread = 0;
    for (double p : {pv.even_mass(), pv.odd_mass(), pv.undecided_mass()}) spread = std::max(spread, p * (1 - p));
    pv.radius = samples ? 1.96 * std::sqrt(spread / samples) : 1;
  }
  return out;
}

}  // namespace sp4lab
