#pragma once

// Exhaustive and sampled checks of the discrete claims: Cartan cells of the
// move lemmas, memberships in K, congruences, the displayed identities, the
// K1/K2 generation, the averaging inequality and char-2 parity volumes.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sp4lab/lemma_witnesses.hpp"
#include "sp4lab/report.hpp"

namespace sp4lab {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Enumeration {
  enum class Kind { Exhaustive, Sample, Auto };
  Kind kind = Kind::Exhaustive;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  std::uint64_t budget = 10'000'000;  // exhaustive limit on residue tuples

  static Enumeration exhaustive(std::uint64_t budget = 10'000'000) { return {Kind::Exhaustive, 0, 0, budget}; }
  static Enumeration sample(std::uint64_t n, std::uint64_t seed) { return {Kind::Sample, n, seed, 0}; }
  // Exhaustive up to the budget, sampled beyond it (recorded in the notes).
  static Enumeration automatic(std::uint64_t budget, std::uint64_t n, std::uint64_t seed) {
    return {Kind::Auto, n, seed, budget};
  }
};

// SplitMix64 step; sampled tuple s of a run with seed S depends only on (S, s).
std::uint64_t mix64(std::uint64_t x);

// Number of (a, b, x, eps) tuples in the lemma's domain.
std::uint64_t tuple_count(const LemmaContext& ctx);

// Checks tuples [begin, end) of the enumeration order. Partitions merge into
// the same report as a single run.
VerificationReport verify_cell_range(const LemmaContext& ctx, std::uint64_t begin, std::uint64_t end);

VerificationReport verify_cell_lemma(LemmaId lemma, Field field, int i, int j, int k, Enumeration mode,
                                     Mutation mutation = Mutation::None);

VerificationReport verify_witness_identities(LemmaId lemma, Field field, int i, int j, std::uint64_t samples,
                                             std::uint64_t seed, Mutation mutation = Mutation::None);

// ---- generation lemma --------------------------------------------------------

// Decomposes each element and checks reconstruction, alternation, factor
// membership and block_count <= 30. Counts paper-route versus fallback uses.
VerificationReport verify_decompositions(const std::vector<GroupElement>& elements, const std::string& task);
VerificationReport verify_generation_residue(Field f);  // all of Sp4(F_q), q <= 3
VerificationReport verify_generation_random(Field f, int max_depth, std::uint64_t samples, std::uint64_t seed);

// ---- parity volumes ------------------------------------------------------------

struct Interval {
  double lo = 0, hi = 1;
};

struct ParityVolumes {
  int depth = 0;
  std::uint64_t cases = 0;
  std::uint64_t even = 0, odd = 0, undecided = 0;
  bool uniform_bound = false;  // depth >= 3i + j + 1
  Interval alpha, beta;        // [decided mass, 1 - opposite decided mass]
  double radius = 0;           // binomial 95% radius (sampled runs)

  double even_mass() const { return cases ? double(even) / cases : 0; }
  double odd_mass() const { return cases ? double(odd) / cases : 0; }
  double undecided_mass() const { return cases ? double(undecided) / cases : 0; }
  Json to_json() const;
};

// Valuation of the wedge of the first two columns of g k (kInfiniteValuation if zero).
int first_columns_wedge_valuation(const Matrix& g, const Matrix& k);

// Exhaustive over Sp4(O/pi^depth); feasible for q = 2 and depth <= 2.
ParityVolumes parity_volumes_exhaustive(const GroupElement& g, int depth);
// One profile entry per depth 1..max_depth, all evaluated on the same samples.
std::vector<ParityVolumes> parity_volumes_sampled(const GroupElement& g, int max_depth, std::uint64_t samples,
                                                  std::uint64_t seed);

// ---- averaging lemma -------------------------------------------------------------

struct FiniteRep;  // defined in averaging.hpp

VerificationReport verify_averaging(const FiniteRep& rep, int N, std::uint64_t trials, std::uint64_t seed);

}  // namespace sp4lab
