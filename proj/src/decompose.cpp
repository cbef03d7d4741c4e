#include "sp4lab/decompose.hpp"

#include <stdexcept>

#include "sp4lab/haar.hpp"

namespace sp4lab {

namespace {

Field field_of(const Matrix& m) { return m[0][0].field(); }

bool is_identity(const Matrix& m) { return matrices_equal(m, identity_matrix(field_of(m))); }

bool lower_unitriangular(const Matrix& m) {
  FieldElem one = FieldElem::one(field_of(m));
  for (int r = 0; r < 4; ++r) {
    if (m[r][r] != one) return false;
    for (int c = r + 1; c < 4; ++c)
      if (!m[r][c].is_zero()) return false;
  }
  return true;
}

// Inverse of a unitriangular (or any invertible) 4x4 matrix by Gauss-Jordan.
Matrix invert(Matrix a) {
  Field f = field_of(a);
  Matrix inv = identity_matrix(f);
  for (int c = 0; c < 4; ++c) {
    int p = c;
    while (p < 4 && a[p][c].is_zero()) ++p;
    if (p == 4) throw ArithmeticError("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    FieldElem s = a[c][c].inverse();
    for (int k = 0; k < 4; ++k) {
      a[c][k] = a[c][k] * s;
      inv[c][k] = inv[c][k] * s;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      FieldElem t = a[r][c];
      for (int k = 0; k < 4; ++k) {
        a[r][k] = a[r][k] - t * a[c][k];
        inv[r][k] = inv[r][k] - t * inv[c][k];
      }
    }
  }
  return inv;
}

Matrix reversal(Field f) {
  Matrix p = zero_matrix(f);
  for (int k = 0; k < 4; ++k) p[k][3 - k] = FieldElem::one(f);
  return p;
}

// Doolittle LU without pivoting: m = l * u, l unit lower triangular.
std::optional<std::pair<Matrix, Matrix>> lu(const Matrix& m) {
  Field f = field_of(m);
  Matrix l = identity_matrix(f), u = zero_matrix(f);
  for (int i = 0; i < 4; ++i) {
    for (int k = i; k < 4; ++k) {
      FieldElem s = m[i][k];
      for (int t = 0; t < i; ++t) s = s - l[i][t] * u[t][k];
      u[i][k] = s;
    }
    if (u[i][i].is_zero()) return std::nullopt;
    for (int k = i + 1; k < 4; ++k) {
      FieldElem s = m[k][i];
      for (int t = 0; t < i; ++t) s = s - l[k][t] * u[t][i];
      l[k][i] = s / u[i][i];
    }
  }
  return std::make_pair(l, u);
}

std::string fmt(const FieldElem& x) { return x.to_string(); }

Factor k1(const GroupElement& g, std::string label) { return {Subgroup::K1, g, std::move(label)}; }
Factor k2(const GroupElement& g, std::string label) { return {Subgroup::K2, g, std::move(label)}; }

void append(std::vector<Factor>& out, const std::vector<Factor>& more) { out.insert(out.end(), more.begin(), more.end()); }

std::vector<Factor> mu41_factors(const FieldElem& d) {
  Field f = d.field();
  if (d.is_zero()) return {};
  return {k1(gen_w21(f), "w21"), k2(gen_mu32(d, f), "mu32(" + fmt(d) + ")"), k1(gen_w21(f), "w21")};
}

// mu31(c) = mu21(-c) mu32(1) mu21(c) mu32(-1) mu41(-c^2)
std::vector<Factor> mu31_factors(const FieldElem& c) {
  Field f = c.field();
  if (c.is_zero()) return {};
  FieldElem one = FieldElem::one(f);
  std::vector<Factor> out = {k1(gen_mu21(-c, f), "mu21(" + fmt(-c) + ")"), k2(gen_mu32(one, f), "mu32(1)"),
                             k1(gen_mu21(c, f), "mu21(" + fmt(c) + ")"), k2(gen_mu32(-one, f), "mu32(-1)")};
  append(out, mu41_factors(-c * c));
  return out;
}

std::vector<Factor> lower_unipotent_factors(const Matrix& v) {
  auto [a, b, c, d] = lower_unipotent_params(v);
  Field f = field_of(v);
  std::vector<Factor> out;
  if (!a.is_zero()) out.push_back(k1(gen_mu21(a, f), "mu21(" + fmt(a) + ")"));
  if (!b.is_zero()) out.push_back(k2(gen_mu32(b, f), "mu32(" + fmt(b) + ")"));
  append(out, mu31_factors(c));
  append(out, mu41_factors(d));
  return out;
}

// Factors of v^t from those of v: reversed order, each transposed.
std::vector<Factor> transposed(const std::vector<Factor>& fs) {
  std::vector<Factor> out;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it)
    out.push_back({it->tag, GroupElement::trusted(transpose(it->element.matrix())), it->label + "^t"});
  return out;
}

std::vector<Factor> inverted(const std::vector<Factor>& fs) {
  std::vector<Factor> out;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) out.push_back({it->tag, it->element.inverse(), it->label + "^-1"});
  return out;
}

// B in SL2(O) with B (p, q)^t = (h, 0)^t.
Matrix2 clear_pair(const FieldElem& p, const FieldElem& q) {
  Field f = p.field();
  FieldElem zero = FieldElem::zero(f), one = FieldElem::one(f);
  if (q.is_zero()) return {{{one, zero}, {zero, one}}};
  if (!p.is_zero() && p.valuation() <= q.valuation()) return {{{one, zero}, {-(q / p), one}}};
  return {{{zero, one}, {-one, p / q}}};
}

std::vector<Factor> rows14(const Matrix2& B) {
  Field f = B[0][0].field();
  return {k1(gen_w21(f), "w21"), k2(gen_K2embed(B), "K2embed"), k1(gen_w21(f), "w21")};
}

GroupElement product_of(const std::vector<Factor>& fs, Field f) {
  GroupElement g = GroupElement::trusted(identity_matrix(f));
  for (const auto& x : fs) g = g * x.element;
  return g;
}

std::optional<std::vector<Factor>> bruhat_route(const Matrix& g, std::string& why) {
  auto form = bruhat_lower(g);
  if (!form) {
    why = "no Bruhat normal form";
    return std::nullopt;
  }
  if (!is_integral(form->u) || !is_integral(form->b)) {
    why = "Bruhat factors not integral";
    return std::nullopt;
  }
  for (const auto& row : form->n)
    for (const auto& x : row)
      if (!x.is_zero() && !x.is_unit()) {
        why = "monomial part has a non-unit entry";
        return std::nullopt;
      }
  Field f = field_of(g);
  const auto& w = weyl_group(f)[form->weyl];
  Matrix t = form->n * w.element.inverse().matrix();
  std::vector<Factor> out = lower_unipotent_factors(form->u);
  if (!is_identity(t)) out.push_back(k1(gen_diagEF(t[0][0], t[1][1]), "diagEF(" + fmt(t[0][0]) + "," + fmt(t[1][1]) + ")"));
  for (const auto& letter : w.word)
    out.push_back(letter == "w21" ? k1(gen_w21(f), "w21") : k2(gen_w32(f), "w32"));
  append(out, lower_unipotent_factors(form->b));
  return out;
}

std::vector<Factor> fallback_route(const Matrix& g0) {
  Field f = field_of(g0);
  FieldElem one = FieldElem::one(f), zero = FieldElem::zero(f);
  GroupElement g = GroupElement::trusted(g0);
  std::vector<std::vector<Factor>> ops;  // applied on the left, in order
  auto apply = [&](std::vector<Factor> op) {
    g = product_of(op, f) * g;
    ops.push_back(std::move(op));
  };
  auto col = [&](int r) { return g.matrix()[r][0]; };

  apply({k2(gen_K2embed(clear_pair(col(1), col(2))), "K2embed")});
  apply(rows14(clear_pair(col(0), col(3))));
  // Rows 3 and 4 of the first column are zero now, so K1 keeps them zero.
  apply({k1(gen_K1embed(clear_pair(col(0), col(1))), "K1embed")});
  FieldElem u = col(0);
  if (!u.is_unit()) throw std::logic_error("first column is not primitive");
  apply({k1(gen_K1embed({{{u.inverse(), zero}, {zero, one}}}), "K1embed")});
  const Matrix& m = g.matrix();
  Matrix2 M23 = {{{m[1][1], m[1][2]}, {m[2][1], m[2][2]}}};
  apply({k2(gen_K2embed({{{M23[1][1], -M23[0][1]}, {-M23[1][0], M23[0][0]}}}), "K2embed")});

  // Now F_n ... F_1 g = V is upper unitriangular, so g = F_1^-1 ... F_n^-1 V.
  std::vector<Factor> ordered;
  for (const auto& op : ops) append(ordered, inverted(op));
  append(ordered, transposed(lower_unipotent_factors(transpose(g.matrix()))));
  return ordered;
}

}  // namespace

std::array<FieldElem, 4> lower_unipotent_params(const Matrix& v) {
  if (!lower_unitriangular(v)) throw std::logic_error("not lower unitriangular");
  Field f = field_of(v);
  FieldElem a = v[1][0], b = v[2][1], c = v[2][0];
  Matrix rest = (gen_mu31(-c, f) * gen_mu32(-b, f) * gen_mu21(-a, f)).matrix() * v;
  FieldElem d = rest[3][0];
  if (!matrices_equal(rest, gen_mu41(d, f).matrix())) throw std::logic_error("not a symplectic lower unitriangular matrix");
  return {a, b, c, d};
}

GroupElement FactorList::product(Field f) const { return product_of(factors, f); }

std::optional<BruhatForm> bruhat_lower(const Matrix& g) {
  Field f = field_of(g);
  Matrix m = g;
  Matrix left = identity_matrix(f);  // m = left * g * (lower unitriangular column ops)
  bool used_col[4] = {false, false, false, false};
  for (int r = 0; r < 4; ++r) {
    int c = 3;
    while (c >= 0 && (used_col[c] || m[r][c].is_zero())) --c;
    if (c < 0) return std::nullopt;
    used_col[c] = true;
    for (int c2 = 0; c2 < c; ++c2) {
      if (m[r][c2].is_zero()) continue;
      FieldElem lam = m[r][c2] / m[r][c];
      for (int k = 0; k < 4; ++k) {
        m[k][c2] = m[k][c2] - lam * m[k][c];
      }
    }
    for (int r2 = r + 1; r2 < 4; ++r2) {
      if (m[r2][c].is_zero()) continue;
      FieldElem lam = m[r2][c] / m[r][c];
      for (int k = 0; k < 4; ++k) {
        m[r2][k] = m[r2][k] - lam * m[r][k];
        left[r2][k] = left[r2][k] - lam * left[r][k];
      }
    }
  }
  const Matrix& n = m;
  Matrix L1 = invert(left);
  Matrix ninv = invert(n);
  Matrix P = reversal(f);
  auto fact = lu(P * (ninv * L1 * n) * P);
  if (!fact) return std::nullopt;
  Matrix upper = P * fact->first * P;  // n^-1 u n
  Matrix u = n * upper * ninv;
  Matrix b = ninv * invert(u) * g;
  if (!lower_unitriangular(u) || !lower_unitriangular(b)) return std::nullopt;
  if (!symplectic_check(u).ok() || !symplectic_check(n).ok() || !symplectic_check(b).ok()) return std::nullopt;
  BruhatForm out{u, n, b, weyl_index(n)};
  if (out.weyl < 0) return std::nullopt;
  return out;
}

void normalize(FactorList& list) {
  if (list.factors.empty()) {
    list.block_count = 0;
    return;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Factor> out;
    for (const auto& x : list.factors) {
      if (is_identity(x.element.matrix())) {
        changed = true;
        continue;
      }
      if (!out.empty() && out.back().tag == x.tag) {
        out.back().element = out.back().element * x.element;
        out.back().label += " " + x.label;
        changed = true;
      } else {
        out.push_back(x);
      }
    }
    list.factors = std::move(out);
  }
  std::size_t len = list.factors.size();
  if (!list.factors.empty() && list.factors.front().tag == Subgroup::K2) ++len;
  list.block_count = static_cast<int>((len + 1) / 2);
}

FactorList decompose_K1K2(const GroupElement& g) {
  const Matrix& m = g.matrix();
  if (!is_integral(m) || !symplectic_check(m).ok()) throw PreconditionError("decompose_K1K2 requires g in K");
  Field f = g.field();
  FactorList list;
  if (is_identity(m)) {
    list.route = "identity";
    return list;
  }
  std::string why;
  if (auto fs = bruhat_route(m, why)) {
    list.factors = *fs;
    list.route = "bruhat";
  } else {
    list.factors = fallback_route(m);
    list.route = "fallback";
    list.notes.push_back("route failed (" + why + "), fallback used");
  }
  normalize(list);
  if (!(list.product(f) == g)) throw std::logic_error("factor product does not reconstruct the input");
  return list;
}

}  // namespace sp4lab
