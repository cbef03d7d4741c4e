#pragma once

// The group G = Sp_4(F) for the skew form
//
//        [  0  0  0  1 ]
//   J =  [  0  0  1  0 ]
//        [  0 -1  0  0 ]
//        [ -1  0  0  0 ]
//
// together with Cartan invariants read off from (||g||, ||Lambda^2 g||) and
// the named generators used by the move lemmas and the generation lemma.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sp4lab/exactfield.hpp"

namespace sp4lab {

using Matrix = std::array<std::array<FieldElem, 4>, 4>;
using Matrix2 = std::array<std::array<FieldElem, 2>, 2>;

Matrix zero_matrix(Field f);
Matrix identity_matrix(Field f);
Matrix diagonal_matrix(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scale(const Matrix& a, const FieldElem& s);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
bool matrices_equal(const Matrix& a, const Matrix& b);

// Determinant of rows {r1,r2} x cols {c1,c2} (0-based).
FieldElem minor2(const Matrix& m, int r1, int r2, int c1, int c2);
// -min valuation over entries, i.e. ||m|| = q^result. Zero matrix: INT_MIN.
int norm_exponent(const Matrix& m);
// -min valuation over all 36 2x2 minors, i.e. ||Lambda^2 m|| = q^result.
int wedge_norm_exponent(const Matrix& m);
bool is_integral(const Matrix& m);

struct CartanPair {
  int i = 0;
  int j = 0;
  friend bool operator==(const CartanPair&, const CartanPair&) = default;
  friend auto operator<=>(const CartanPair&, const CartanPair&) = default;
  std::string to_string() const { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }
};

struct CartanInfo {
  CartanPair cell;
  int norm_exp = 0;        // ||g|| = q^norm_exp
  int wedge_norm_exp = 0;  // ||Lambda^2 g|| = q^wedge_norm_exp
  int length = 0;          // i + j
};

struct SymplecticFailure {
  int row = 0;  // first violated entry of (m^t J m - J), 0-based
  int col = 0;
  std::string detail;
};

// A matrix certified to satisfy m^t J m = J exactly.
class GroupElement {
 public:
  // Throws PreconditionError if m is not symplectic.
  static GroupElement certify(const Matrix& m);
  // Skips the check; use only for products/inverses of certified elements.
  static GroupElement trusted(const Matrix& m) { return GroupElement(m); }

  const Matrix& matrix() const { return m_; }
  const FieldElem& operator()(int r, int c) const { return m_[r][c]; }
  Field field() const;

  GroupElement inverse() const;  // -J g^t J
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.m_ * b.m_);
  }
  friend bool operator==(const GroupElement& a, const GroupElement& b) { return matrices_equal(a.m_, b.m_); }

  std::vector<std::vector<std::string>> to_strings() const;
  static GroupElement from_strings(Field f, const std::vector<std::vector<std::string>>& rows);

 private:
  explicit GroupElement(const Matrix& m) : m_(m) {}
  Matrix m_;
};

struct SymplecticCheck {
  bool ok() const { return !failure.has_value(); }
  // Throws PreconditionError describing the failure when !ok().
  GroupElement element() const;
  Matrix matrix;
  std::optional<SymplecticFailure> failure;
};

SymplecticCheck symplectic_check(const Matrix& m);

// Cell (i,j) with i = -min entry valuation and i + j = -min minor valuation.
// Throws std::logic_error if the computed pair is not dominant, which cannot
// happen for a genuinely symplectic matrix.
CartanInfo cartan_invariants(const GroupElement& g);
CartanInfo cartan_invariants(const Matrix& m);

// ---- generators -------------------------------------------------------------

Matrix J_matrix(Field f);
GroupElement gen_J(Field f);
// diag(pi^-i, pi^-j, pi^j, pi^i)
GroupElement gen_D(Field f, int i, int j);
GroupElement gen_w21(Field f);
GroupElement gen_w32(Field f);
GroupElement gen_mu21(const FieldElem& a, Field f);
GroupElement gen_mu32(const FieldElem& a, Field f);
GroupElement gen_mu31(const FieldElem& a, Field f);
GroupElement gen_mu41(const FieldElem& a, Field f);
// diag(e, f, f^-1, e^-1); e and f must be units of O.
GroupElement gen_diagEF(const FieldElem& e, const FieldElem& f);
// diag(A, Q A^-t Q) with Q antidiagonal; A in GL_2(O).
GroupElement gen_K1embed(const Matrix2& A);
// diag(1, B, 1); B in SL_2(O).
GroupElement gen_K2embed(const Matrix2& B);

// By-name entry point used by the CLI. Parameters: D: {i, j} as integers in
// strings; mu*: {a}; diagEF: {e, f}; K1embed/K2embed: four entries row-major.
GroupElement generator(Field f, const std::string& name, const std::vector<std::string>& params);

enum class Subgroup { K, K1, K2, B1, B2, Blow };
bool subgroup_membership(const GroupElement& g, Subgroup tag);
bool subgroup_membership(const Matrix& m, Subgroup tag);
Subgroup parse_subgroup(const std::string& name);

}  // namespace sp4lab
