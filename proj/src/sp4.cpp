#include "sp4lab/sp4.hpp"

#include <climits>
#include <stdexcept>

namespace sp4lab {

namespace {

Field field_of(const Matrix& m) {
  for (const auto& row : m)
    for (const auto& x : row)
      if (x.field_data()) return Field(x.field_data());
  throw PreconditionError("matrix carries no field information");
}

FieldElem det2(const Matrix2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

}  // namespace

Matrix zero_matrix(Field f) {
  Matrix m;
  for (auto& row : m)
    for (auto& x : row) x = FieldElem::zero(f);
  return m;
}

Matrix identity_matrix(Field f) {
  Matrix m = zero_matrix(f);
  for (int k = 0; k < 4; ++k) m[k][k] = FieldElem::one(f);
  return m;
}

Matrix diagonal_matrix(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d) {
  Field f = a.field();
  Matrix m = zero_matrix(f);
  m[0][0] = a;
  m[1][1] = b;
  m[2][2] = c;
  m[3][3] = d;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix r;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < 4; ++j) {
        if (b[k][j].is_zero()) continue;
        r[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  Field f = field_of(a);
  for (auto& row : r)
    for (auto& x : row)
      if (x.is_zero()) x = FieldElem::zero(f);
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[j][i];
  return r;
}

Matrix scale(const Matrix& a, const FieldElem& s) {
  Matrix r = a;
  for (auto& row : r)
    for (auto& x : row) x = x * s;
  return r;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

bool matrices_equal(const Matrix& a, const Matrix& b) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (a[i][j] != b[i][j]) return false;
  return true;
}

FieldElem minor2(const Matrix& m, int r1, int r2, int c1, int c2) {
  return m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
}

int norm_exponent(const Matrix& m) {
  int best = INT_MIN;
  for (const auto& row : m)
    for (const auto& x : row)
      if (!x.is_zero()) best = std::max(best, -x.valuation());
  return best;
}

int wedge_norm_exponent(const Matrix& m) {
  int best = INT_MIN;
  for (int r1 = 0; r1 < 4; ++r1)
    for (int r2 = r1 + 1; r2 < 4; ++r2)
      for (int c1 = 0; c1 < 4; ++c1)
        for (int c2 = c1 + 1; c2 < 4; ++c2) {
          // Valuation lower bound first: skip minors that cannot beat best.
          const auto& a = m[r1][c1];
          const auto& b = m[r2][c2];
          const auto& c = m[r1][c2];
          const auto& d = m[r2][c1];
          long long bound = INT_MIN;
          if (!a.is_zero() && !b.is_zero()) bound = std::max<long long>(bound, -(static_cast<long long>(a.valuation()) + b.valuation()));
          if (!c.is_zero() && !d.is_zero()) bound = std::max<long long>(bound, -(static_cast<long long>(c.valuation()) + d.valuation()));
          if (bound <= best) continue;
          FieldElem x = minor2(m, r1, r2, c1, c2);
          if (!x.is_zero()) best = std::max(best, -x.valuation());
        }
  return best;
}

bool is_integral(const Matrix& m) {
  for (const auto& row : m)
    for (const auto& x : row)
      if (!x.is_integral()) return false;
  return true;
}

Matrix J_matrix(Field f) {
  Matrix m = zero_matrix(f);
  m[0][3] = FieldElem::one(f);
  m[1][2] = FieldElem::one(f);
  m[2][1] = FieldElem::from_int(f, -1);
  m[3][0] = FieldElem::from_int(f, -1);
  return m;
}

SymplecticCheck symplectic_check(const Matrix& m) {
  SymplecticCheck out;
  out.matrix = m;
  Field f = field_of(m);
  Matrix form = transpose(m) * J_matrix(f) * m;
  Matrix J = J_matrix(f);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (form[r][c] != J[r][c]) {
        out.failure = SymplecticFailure{r, c,
                                        "entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                            ") of m^t J m is " + form[r][c].to_string() + ", expected " +
                                            J[r][c].to_string()};
        return out;
      }
  return out;
}

GroupElement SymplecticCheck::element() const {
  if (failure) throw PreconditionError("matrix is not symplectic: " + failure->detail);
  return GroupElement::trusted(matrix);
}

GroupElement GroupElement::certify(const Matrix& m) { return symplectic_check(m).element(); }

Field GroupElement::field() const { return field_of(m_); }

GroupElement GroupElement::inverse() const {
  Matrix J = J_matrix(field());
  return GroupElement(scale(J * transpose(m_) * J, FieldElem::from_int(field(), -1)));
}

std::vector<std::vector<std::string>> GroupElement::to_strings() const {
  std::vector<std::vector<std::string>> rows(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rows[r].push_back(m_[r][c].to_string());
  return rows;
}

GroupElement GroupElement::from_strings(Field f, const std::vector<std::vector<std::string>>& rows) {
  if (rows.size() != 4) throw PreconditionError("matrix must have 4 rows");
  Matrix m = zero_matrix(f);
  for (int r = 0; r < 4; ++r) {
    if (rows[r].size() != 4) throw PreconditionError("matrix rows must have 4 entries");
    for (int c = 0; c < 4; ++c) m[r][c] = FieldElem::parse(f, rows[r][c]);
  }
  return certify(m);
}

CartanInfo cartan_invariants(const Matrix& m) {
  CartanInfo info;
  info.norm_exp = norm_exponent(m);
  info.wedge_norm_exp = wedge_norm_exponent(m);
  info.cell = {info.norm_exp, info.wedge_norm_exp - info.norm_exp};
  info.length = info.wedge_norm_exp;
  if (info.cell.j > info.cell.i || info.cell.j < 0)
    throw std::logic_error("internal soundness failure: non-dominant Cartan pair " + info.cell.to_string());
  return info;
}

CartanInfo cartan_invariants(const GroupElement& g) { return cartan_invariants(g.matrix()); }

// ---- generators -------------------------------------------------------------

GroupElement gen_J(Field f) { return GroupElement::trusted(J_matrix(f)); }

GroupElement gen_D(Field f, int i, int j) {
  return GroupElement::trusted(diagonal_matrix(FieldElem::pi_power(f, -i), FieldElem::pi_power(f, -j),
                                               FieldElem::pi_power(f, j), FieldElem::pi_power(f, i)));
}

GroupElement gen_w21(Field f) {
  Matrix m = zero_matrix(f);
  auto one = FieldElem::one(f);
  m[0][1] = one;
  m[1][0] = one;
  m[2][3] = one;
  m[3][2] = one;
  return GroupElement::trusted(m);
}

GroupElement gen_w32(Field f) {
  Matrix m = zero_matrix(f);
  auto one = FieldElem::one(f);
  m[0][0] = one;
  m[1][2] = one;
  m[2][1] = -one;
  m[3][3] = one;
  return GroupElement::trusted(m);
}

GroupElement gen_mu21(const FieldElem& a, Field f) {
  Matrix m = identity_matrix(f);
  m[1][0] = a;
  m[3][2] = -a;
  return GroupElement::trusted(m);
}

GroupElement gen_mu32(const FieldElem& a, Field f) {
  Matrix m = identity_matrix(f);
  m[2][1] = a;
  return GroupElement::trusted(m);
}

GroupElement gen_mu31(const FieldElem& a, Field f) {
  Matrix m = identity_matrix(f);
  m[2][0] = a;
  m[3][1] = a;
  return GroupElement::trusted(m);
}

GroupElement gen_mu41(const FieldElem& a, Field f) {
  Matrix m = identity_matrix(f);
  m[3][0] = a;
  return GroupElement::trusted(m);
}

GroupElement gen_diagEF(const FieldElem& e, const FieldElem& f) {
  if (!e.is_unit() || !f.is_unit()) throw PreconditionError("diagEF requires unit parameters");
  return GroupElement::trusted(diagonal_matrix(e, f, f.inverse(), e.inverse()));
}

GroupElement gen_K1embed(const Matrix2& A) {
  for (const auto& row : A)
    for (const auto& x : row)
      if (!x.is_integral()) throw PreconditionError("K1embed requires A with entries in O");
  FieldElem d = det2(A);
  if (!d.is_unit()) throw PreconditionError("K1embed requires A in GL_2(O)");
  Field f = d.field();
  // Q A^-t Q = (1/d) [[a00, -a01], [-a10, a11]]
  FieldElem di = d.inverse();
  Matrix m = zero_matrix(f);
  m[0][0] = A[0][0];
  m[0][1] = A[0][1];
  m[1][0] = A[1][0];
  m[1][1] = A[1][1];
  m[2][2] = A[0][0] * di;
  m[2][3] = -A[0][1] * di;
  m[3][2] = -A[1][0] * di;
  m[3][3] = A[1][1] * di;
  return GroupElement::certify(m);
}

GroupElement gen_K2embed(const Matrix2& B) {
  for (const auto& row : B)
    for (const auto& x : row)
      if (!x.is_integral()) throw PreconditionError("K2embed requires B with entries in O");
  FieldElem d = det2(B);
  Field f = d.field();
  if (d != FieldElem::one(f)) throw PreconditionError("K2embed requires det B = 1");
  Matrix m = identity_matrix(f);
  m[1][1] = B[0][0];
  m[1][2] = B[0][1];
  m[2][1] = B[1][0];
  m[2][2] = B[1][1];
  return GroupElement::trusted(m);
}

GroupElement generator(Field f, const std::string& name, const std::vector<std::string>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw PreconditionError("generator " + name + " takes " + std::to_string(n) + " parameters");
  };
  auto elem = [&](std::size_t k) { return FieldElem::parse(f, params[k]); };
  auto mat2 = [&]() {
    need(4);
    return Matrix2{{{elem(0), elem(1)}, {elem(2), elem(3)}}};
  };
  if (name == "J") return need(0), gen_J(f);
  if (name == "D") {
    need(2);
    return gen_D(f, std::stoi(params[0]), std::stoi(params[1]));
  }
  if (name == "w21") return need(0), gen_w21(f);
  if (name == "w32") return need(0), gen_w32(f);
  if (name == "mu21") return need(1), gen_mu21(elem(0), f);
  if (name == "mu32") return need(1), gen_mu32(elem(0), f);
  if (name == "mu31") return need(1), gen_mu31(elem(0), f);
  if (name == "mu41") return need(1), gen_mu41(elem(0), f);
  if (name == "diagEF") return need(2), gen_diagEF(elem(0), elem(1));
  if (name == "K1embed") return gen_K1embed(mat2());
  if (name == "K2embed") return gen_K2embed(mat2());
  throw ConfigError("unknown generator: " + name);
}

// ---- membership -------------------------------------------------------------

bool subgroup_membership(const Matrix& m, Subgroup tag) {
  if (!is_integral(m)) return false;
  auto zero = [&](int r, int c) { return m[r][c].is_zero(); };
  auto in_pi = [&](int r, int c) { return m[r][c].is_zero() || m[r][c].valuation() >= 1; };
  auto k1_shape = [&]() {
    for (int r = 0; r < 2; ++r)
      for (int c = 2; c < 4; ++c)
        if (!zero(r, c) || !zero(c, r)) return false;
    return (m[0][0] * m[1][1] - m[0][1] * m[1][0]).is_unit();
  };
  switch (tag) {
    case Subgroup::K:
      return true;
    case Subgroup::K1:
      return k1_shape();
    case Subgroup::K2: {
      Field f = field_of(m);
      auto one = FieldElem::one(f);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          bool middle = (r == 1 || r == 2) && (c == 1 || c == 2);
          if (middle) continue;
          if (r == c ? m[r][c] != one : !zero(r, c)) return false;
        }
      return true;
    }
    case Subgroup::B1:
      return k1_shape() && m[0][0].is_unit() && m[1][1].is_unit() && in_pi(0, 1);
    case Subgroup::B2:
      return k1_shape() && m[0][0].is_unit() && m[1][1].is_unit() && in_pi(1, 0);
    case Subgroup::Blow:
      for (int r = 0; r < 4; ++r) {
        if (!m[r][r].is_unit()) return false;
        for (int c = r + 1; c < 4; ++c)
          if (!zero(r, c)) return false;
      }
      return true;
  }
  return false;
}

bool subgroup_membership(const GroupElement& g, Subgroup tag) { return subgroup_membership(g.matrix(), tag); }

Subgroup parse_subgroup(const std::string& name) {
  if (name == "K") return Subgroup::K;
  if (name == "K1") return Subgroup::K1;
  if (name == "K2") return Subgroup::K2;
  if (name == "B1") return Subgroup::B1;
  if (name == "B2") return Subgroup::B2;
  if (name == "Blow") return Subgroup::Blow;
  throw ConfigError("unknown subgroup tag: " + name);
}

}  // namespace sp4lab
