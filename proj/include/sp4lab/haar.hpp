#pragma once

// Uniform sampling and enumeration of K = Sp4(O) modulo pi^n.
//
// A class mod pi^n is drawn as g0 * kappa: g0 = u w b is a Bruhat point of
// Sp4(F_q) (cell chosen with weight q^len(w), u and b uniform in the lower
// unipotent and lower Borel groups) lifted by the canonical section, and
// kappa = u^-(pi O) t(1 + pi O) u^+(pi O) runs through the congruence kernel
// in Iwahori coordinates. Both pieces are exact elements of K.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sp4lab/exactfield.hpp"
#include "sp4lab/sp4.hpp"

namespace sp4lab {

struct WeylElement {
  std::vector<std::string> word;  // letters "w21" / "w32", shortest
  int length = 0;
  GroupElement element;
};

// The eight cosets of N(T)/T, one signed-permutation representative each.
const std::vector<WeylElement>& weyl_group(Field f);
// Index into weyl_group(f) of the coset whose support pattern matches m; -1 if m is not monomial.
int weyl_index(const Matrix& m);

// mu21(a) mu32(b) mu31(c) mu41(d)
Matrix lower_unipotent(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d);

std::uint64_t sp4_residue_order(std::uint64_t q);

// Residue classes of an integral matrix entrywise at the given depth.
std::vector<std::uint64_t> residue_key(const ResidueRing& ring, const Matrix& m);

class KSampler {
 public:
  KSampler(Field field, std::uint64_t seed);

  Field field() const { return field_; }
  GroupElement residue_point();
  GroupElement kick(int depth);
  GroupElement sample(int depth);  // depth >= 1

 private:
  FieldElem residue_lift();        // sigma of a uniform residue
  FieldElem unit_lift();           // sigma of a uniform nonzero residue
  FieldElem deep_lift(int depth);  // pi * sigma(uniform O/pi^{depth-1})

  Field field_;
  std::mt19937_64 rng_;
};

// One exact lift for each element of Sp4(F_q), distinct mod pi. Intended for q <= 3.
std::vector<GroupElement> enumerate_residue_points(Field f);
// Every class of the congruence kernel K(pi)/K(pi^depth); q^{10(depth-1)} elements.
std::vector<GroupElement> enumerate_kicks(Field f, int depth);

}  // namespace sp4lab
