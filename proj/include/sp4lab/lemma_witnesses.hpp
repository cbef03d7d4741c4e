#pragma once

// Explicit matrices of the five move lemmas, transcribed as printed, with
// independently recomputed products and the expected Cartan cells.

#include <optional>
#include <string>

#include "sp4lab/exactfield.hpp"
#include "sp4lab/sp4.hpp"

namespace sp4lab {

enum class LemmaId { SPHER01, SPHER1M1, NONSPHER01, NONSPHER1M1, CHAR2_02 };

std::string lemma_name(LemmaId id);
LemmaId parse_lemma(const std::string& name);  // throws ConfigError

// Deliberate formula corruptions used to demonstrate verifier sensitivity.
enum class Mutation { None, MinorSignFlip, DScalingExponent, DropEps1, WrongN1, MinorRowPair };

std::string mutation_name(Mutation m);
Mutation parse_mutation(const std::string& name);  // throws ConfigError
const std::vector<Mutation>& catalogued_mutations();

struct BuildOptions {
  Mutation mutation = Mutation::None;
  // Assemble the printed merged displays as well (identity layer).
  bool printed = true;
  // Optional non-canonical section at the lemma's residue level.
  const Section* section = nullptr;
};

// Per-(lemma, field, i, j, k) data shared by every residue tuple.
struct LemmaContext {
  LemmaId lemma;
  Field field;
  int i = 0, j = 0, k = 0;
  int m = 0;      // floor((i+j)/2) where used
  int level = 0;  // n1, j-1 or m-j-1
  int v0 = -1;    // valuation of 2; -1 in characteristic 2
  FiniteField::Elem eps_designated = 1;  // eps0 for NONSPHER01, 1 otherwise
  bool formal_level0 = false;            // CHAR2_02 with i-j in {2,3}
  ResidueRing ring;
  BuildOptions options;

  // Residues allowed for a, x and for b in the congruence layer.
  std::vector<ResidueElem> ax_domain() const;
  std::vector<ResidueElem> b_domain() const;
};

// Validates the lemma hypotheses; throws PreconditionError naming the
// violated hypothesis.
LemmaContext make_context(LemmaId lemma, Field field, int i, int j, int k, BuildOptions options = {});

struct LemmaWitness {
  LemmaId lemma;
  CartanPair cell;
  int k = 0, m = 0, level = 0;
  ResidueElem a, b, x, y;
  std::optional<FiniteField::Elem> eps;  // empty for free-y witnesses
  FieldElem sa, sb, sx, sy;

  Matrix beta_inv;
  Matrix alpha;
  Matrix product;          // beta_inv * alpha, recomputed
  Matrix printed_product;  // merged display (when options.printed)

  std::optional<FieldElem> minor_formula;  // SPHER01 family rows 3,4 cols 1,2
  std::optional<FieldElem> eps1;
  std::optional<FieldElem> a1;
  std::optional<Matrix> k1;
  std::optional<Matrix> g1;          // k1 * product, recomputed
  std::optional<Matrix> printed_g1;  // merged display
  std::optional<Matrix> scaled_zero;          // D-scaling for the eps = 0 branch
  std::optional<Matrix> scaled_designated;    // D-scaling for the designated eps
  std::optional<Matrix> printed_scaled_zero;
  std::optional<Matrix> printed_scaled_designated;
  std::optional<Matrix> congruence_target;    // k1 reduced mod pi^k (k > 0)
  std::optional<Matrix> printed_congruence;   // printed mod pi^k display

  std::optional<CartanPair> expected_cell;
};

LemmaWitness build_witness(const LemmaContext& ctx, ResidueElem a, ResidueElem b, ResidueElem x,
                           FiniteField::Elem eps);
// Debug entry point with a free y instead of y = ax + b + pi^{level-1} eps.
LemmaWitness build_witness_free_y(const LemmaContext& ctx, ResidueElem a, ResidueElem b, ResidueElem x,
                                  ResidueElem y);
// Convenience overload taking integers as residue indices.
LemmaWitness build_witness(LemmaId lemma, Field field, int i, int j, int k, std::uint64_t a, std::uint64_t b,
                           std::uint64_t x, FiniteField::Elem eps, BuildOptions options = {});

// Cell that the lemma predicts for the given eps (empty if the paper pins none).
std::optional<CartanPair> expected_cell(const LemmaContext& ctx, FiniteField::Elem eps);

// Dominant representative of (i, j) under the Weyl group.
CartanPair dominant(int i, int j);

}  // namespace sp4lab
