#pragma once

// Writing elements of K as alternating products of K1 and K2 factors.

#include <optional>
#include <string>
#include <vector>

#include "sp4lab/sp4.hpp"

namespace sp4lab {

struct Factor {
  Subgroup tag;  // K1 or K2
  GroupElement element;
  std::string label;
};

struct FactorList {
  std::vector<Factor> factors;
  int block_count = 0;  // number of K1 K2 pairs
  std::string route;    // "identity", "bruhat" or "fallback"
  std::vector<std::string> notes;

  GroupElement product(Field f) const;
};

// g = u n b over F with u, b lower unitriangular and n monomial, u in the
// normal-form part U^- cap n U^+ n^-1. All three are symplectic.
struct BruhatForm {
  Matrix u, n, b;
  int weyl = -1;  // index into weyl_group
};
std::optional<BruhatForm> bruhat_lower(const Matrix& g);

// Parameters (a, b, c, d) with v = mu21(a) mu32(b) mu31(c) mu41(d); throws
// std::logic_error if v is not a lower unitriangular symplectic matrix.
std::array<FieldElem, 4> lower_unipotent_params(const Matrix& v);

// Throws PreconditionError unless g lies in K.
FactorList decompose_K1K2(const GroupElement& g);

// Merges neighbours with equal tags, drops identities and recounts blocks.
void normalize(FactorList& list);

}  // namespace sp4lab
