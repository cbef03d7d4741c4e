#include "sp4lab/lemma_witnesses.hpp"

#include <cstdlib>

namespace sp4lab {

namespace {

struct Builder {
  Field f;
  FieldElem zero, one;

  explicit Builder(Field field) : f(field), zero(FieldElem::zero(field)), one(FieldElem::one(field)) {}

  FieldElem P(int e) const { return FieldElem::pi_power(f, e); }
  FieldElem n(long long v) const { return FieldElem::from_int(f, v); }

  Matrix mat(std::initializer_list<std::initializer_list<FieldElem>> rows) const {
    Matrix m;
    int r = 0;
    for (const auto& row : rows) {
      int c = 0;
      for (const auto& x : row) m[r][c++] = x.is_zero() ? zero : x;
      ++r;
    }
    return m;
  }

  Matrix diag(int e0, int e1, int e2, int e3) const { return diagonal_matrix(P(e0), P(e1), P(e2), P(e3)); }
};

// Left multiplication by diag(pi^e0, ..., pi^e3) is a row scaling.
Matrix scale_rows(const Builder& B, const Matrix& m, int e0, int e1, int e2, int e3) {
  Matrix r = m;
  const int e[4] = {e0, e1, e2, e3};
  for (int row = 0; row < 4; ++row) {
    FieldElem s = B.P(e[row]);
    for (auto& x : r[row]) x = x.is_zero() ? B.zero : x * s;
  }
  return r;
}

void build_spher01_family(const LemmaContext& ctx, LemmaWitness& w) {
  Builder B(ctx.field);
  const int i = ctx.i, j = ctx.j, m = ctx.m;
  const auto& sa = w.sa;
  const auto& sb = w.sb;
  const auto& sx = w.sx;
  const auto& sy = w.sy;
  const auto two = B.n(2);
  const bool flip = ctx.options.mutation == Mutation::MinorSignFlip;

  Matrix U = B.mat({{B.one, B.zero, B.zero, B.zero},
                    {B.zero, B.one, B.zero, B.zero},
                    {sa, B.one, B.one, B.zero},
                    {flip ? sa * sa + two * sb : sa * sa - two * sb, sa, B.zero, B.one}});
  w.beta_inv = B.diag(m, i - m + j, -i + m - j, -m) * U;

  Matrix V = B.mat({{B.one, B.zero, B.zero, B.zero},
                    {B.zero, B.one, B.zero, B.zero},
                    {sx, B.zero, B.one, B.zero},
                    {sx * sx + two * sy, sx, B.zero, B.one}});
  if (ctx.options.mutation == Mutation::DScalingExponent)
    w.alpha = V * B.diag(-m + j - 1, -m + j, m - j, m - j + 1);
  else
    w.alpha = V * B.diag(-m + j, -m + j, m - j, m - j);
  w.product = w.beta_inv * w.alpha;

  const FieldElem s = sa + sx;
  const FieldElem defect = sy - sa * sx - sb;
  w.minor_formula = -two * B.P(-i - 2 * m + j) * defect;

  if (ctx.lemma == LemmaId::SPHER01) {
    if (ctx.options.printed) {
      Matrix W = B.mat({{B.one, B.zero, B.zero, B.zero},
                        {B.zero, B.one, B.zero, B.zero},
                        {s, B.one, B.one, B.zero},
                        {sa * sa - two * sb + sx * sx + two * sy, s, B.zero, B.one}});
      w.printed_product = B.diag(m, i - m + j, -i + m - j, -m) * W * B.diag(-m + j, -m + j, m - j, m - j);
    }
    return;
  }

  // NONSPHER01
  const FieldElem eps1 = two * B.P(-2 * m + 2 * j + 1) * defect;
  w.eps1 = eps1;
  auto k1_formula = [&](const FieldElem& s_) {
    return B.mat({{B.zero, B.zero, B.one, B.zero},
                  {B.zero, B.zero, -B.P(i - 2 * m + j) * s_, B.one},
                  {-B.one, B.zero, -B.P(i - 2 * m + 3 * j + 1) * s_, B.P(2 * j + 1)},
                  {-B.P(i - 2 * m + j) * s_, -B.one, B.P(2 * i - 2 * m + 2 * j), B.zero}});
  };
  w.k1 = k1_formula(s);
  w.g1 = *w.k1 * w.product;
  w.scaled_zero = scale_rows(B, *w.g1, i, j, -j, -i);
  w.scaled_designated = scale_rows(B, *w.g1, i, j + 1, -j - 1, -i);
  if (ctx.k > 0) w.congruence_target = k1_formula(B.zero);
  if (ctx.options.printed) {
    w.printed_product = B.mat({{B.P(j), B.zero, B.zero, B.zero},
                               {B.zero, B.P(i - 2 * m + 2 * j), B.zero, B.zero},
                               {B.P(-i) * s, B.P(-i), B.P(-i + 2 * m - 2 * j), B.zero},
                               {B.P(-2 * m + j) * s * s + B.P(-j - 1) * eps1, B.P(-2 * m + j) * s, B.zero, B.P(-j)}});
    w.printed_g1 = B.mat({{B.P(-i) * s, B.P(-i), B.P(-i + 2 * m - 2 * j), B.zero},
                          {B.P(-j - 1) * eps1, B.zero, -B.P(-j) * s, B.P(-j)},
                          {B.P(j) * (eps1 - B.one), B.zero, -B.P(j + 1) * s, B.P(j + 1)},
                          {B.zero, B.zero, B.P(i), B.zero}});
    w.printed_scaled_zero = B.mat({{s, B.one, B.P(2 * m - 2 * j), B.zero},
                                   {B.P(-1) * eps1, B.zero, -s, B.one},
                                   {eps1 - B.one, B.zero, -B.P(1) * s, B.P(1)},
                                   {B.zero, B.zero, B.one, B.zero}});
    w.printed_scaled_designated = B.mat({{s, B.one, B.P(2 * m - 2 * j), B.zero},
                                         {eps1, B.zero, -B.P(1) * s, B.P(1)},
                                         {B.P(-1) * (eps1 - B.one), B.zero, -s, B.one},
                                         {B.zero, B.zero, B.one, B.zero}});
    w.printed_congruence = B.mat({{B.zero, B.zero, B.one, B.zero},
                                  {B.zero, B.zero, B.zero, B.one},
                                  {-B.one, B.zero, B.zero, B.P(2 * j + 1)},
                                  {B.zero, -B.one, B.zero, B.zero}});
  }
}

void build_spher1m1_family(const LemmaContext& ctx, LemmaWitness& w) {
  Builder B(ctx.field);
  const int i = ctx.i, j = ctx.j;
  const auto& sa = w.sa;
  const auto& sb = w.sb;
  const auto& sx = w.sx;
  const auto& sy = w.sy;
  const FieldElem a1 = B.one + B.P(1) * sa;
  w.a1 = a1;

  Matrix U = B.mat({{B.one, B.zero, B.zero, B.zero},
                    {a1, B.one, B.zero, B.zero},
                    {B.zero, B.zero, B.one, B.zero},
                    {-B.P(1) * sb, B.zero, -a1, B.one}});
  w.beta_inv = B.diag(i, 0, 0, -i) * U;
  Matrix V = B.mat({{B.one, B.zero, B.zero, B.zero},
                    {B.zero, B.one, B.zero, B.zero},
                    {sx, B.zero, B.one, B.zero},
                    {B.P(1) * sy + sx, sx, B.zero, B.one}});
  w.alpha = V * B.diag(-j, 0, 0, j);
  w.product = w.beta_inv * w.alpha;
  const FieldElem defect = sy - sa * sx - sb;

  if (ctx.lemma == LemmaId::SPHER1M1) {
    if (ctx.options.printed) {
      Matrix W = B.mat({{B.one, B.zero, B.zero, B.zero},
                        {a1, B.one, B.zero, B.zero},
                        {sx, B.zero, B.one, B.zero},
                        {B.P(1) * defect, sx, -a1, B.one}});
      w.printed_product = B.diag(i, 0, 0, -i) * W * B.diag(-j, 0, 0, j);
    }
    return;
  }

  // NONSPHER1M1
  const FieldElem eps1 = B.P(-j + 2) * defect;
  w.eps1 = eps1;
  const bool drop = ctx.options.mutation == Mutation::DropEps1;
  auto k1_formula = [&](const FieldElem& a1_, const FieldElem& sx_, const FieldElem& e1) {
    FieldElem ai = a1_.inverse();
    FieldElem k32 = drop ? -ai * sx_ : -B.P(j - 1) * ai * ai * e1 - ai * sx_;
    return B.mat({{B.zero, B.zero, B.zero, B.one},
                  {B.zero, B.one, B.zero, -B.P(i - j + 1) * a1_},
                  {B.zero, k32, B.one, B.P(i) * ai},
                  {-B.one, B.P(i) * ai * (B.one - e1) - B.P(i - j + 1) * sx_, B.P(i - j + 1) * a1_,
                   B.P(2 * i - j + 1)}});
  };
  w.k1 = k1_formula(a1, sx, eps1);
  w.g1 = *w.k1 * w.product;
  w.scaled_zero = scale_rows(B, *w.g1, i, j, -j, -i);
  w.scaled_designated = scale_rows(B, *w.g1, i + 1, j - 1, -j + 1, -i - 1);
  if (ctx.k > 0) w.congruence_target = k1_formula(B.one, B.zero, B.zero);
  if (ctx.options.printed) {
    const FieldElem ai = a1.inverse();
    w.printed_product = B.mat({{B.P(i - j), B.zero, B.zero, B.zero},
                               {B.P(-j) * a1, B.one, B.zero, B.zero},
                               {B.P(-j) * sx, B.zero, B.one, B.zero},
                               {B.P(-i - 1) * eps1, B.P(-i) * sx, -B.P(-i) * a1, B.P(-i + j)}});
    w.printed_g1 = B.mat({{B.P(-i - 1) * eps1, B.P(-i) * sx, -B.P(-i) * a1, B.P(-i + j)},
                          {B.P(-j) * a1 * (B.one - eps1), B.one - B.P(-j + 1) * a1 * sx, B.P(-j + 1) * a1 * a1,
                           -B.P(1) * a1},
                          {B.zero, -B.P(j - 1) * ai * ai * eps1, B.zero, B.P(j) * ai},
                          {B.zero, B.P(i) * ai * (B.one - eps1), B.zero, B.P(i + 1)}});
    w.printed_scaled_zero = B.mat({{B.P(-1) * eps1, sx, -a1, B.P(j)},
                                   {a1 * (B.one - eps1), B.P(j) - B.P(1) * a1 * sx, B.P(1) * a1 * a1,
                                    -B.P(j + 1) * a1},
                                   {B.zero, -B.P(-1) * ai * ai * eps1, B.zero, ai},
                                   {B.zero, ai * (B.one - eps1), B.zero, B.P(1)}});
    w.printed_scaled_designated = B.mat({{eps1, B.P(1) * sx, -B.P(1) * a1, B.P(j + 1)},
                                         {B.P(-1) * a1 * (B.one - eps1), B.P(j - 1) - a1 * sx, a1 * a1,
                                          -B.P(j) * a1},
                                         {B.zero, -ai * ai * eps1, B.zero, B.P(1) * ai},
                                         {B.zero, B.P(-1) * ai * (B.one - eps1), B.zero, B.one}});
    w.printed_congruence = B.mat({{B.zero, B.zero, B.zero, B.one},
                                  {B.zero, B.one, B.zero, -B.P(i - j + 1)},
                                  {B.zero, B.zero, B.one, B.zero},
                                  {-B.one, B.zero, B.P(i - j + 1), B.zero}});
  }
}

void build_char2(const LemmaContext& ctx, LemmaWitness& w) {
  Builder B(ctx.field);
  const int i = ctx.i, j = ctx.j, m = ctx.m;
  const auto& sa = w.sa;
  const auto& sb = w.sb;
  const auto& sx = w.sx;
  const auto& sy = w.sy;
  const FieldElem u = B.one + B.P(1) * sa;
  const FieldElem u2 = u * u;
  const FieldElem u2i = u2.inverse();

  w.beta_inv = B.mat({{B.P(m), B.zero, B.zero, B.zero},
                      {B.zero, B.P(i - m + j), B.zero, B.zero},
                      {B.P(-i + m - j + 1) * sb, B.P(-i + m - j) * u2, B.P(-i + m - j), B.zero},
                      {B.zero, B.P(-m + 1) * sb, B.zero, B.P(-m)}});
  const FieldElem xy = sx + B.P(1) * sy;
  w.alpha = B.mat({{B.P(-m + j), B.zero, B.zero, B.zero},
                   {B.zero, B.P(-m + j), B.zero, B.zero},
                   {B.P(-m + j) * xy, B.zero, B.P(m - j), B.zero},
                   {B.P(-m + j) * sx * sx, B.P(-m + j) * xy, B.zero, B.P(m - j)}});
  w.product = w.beta_inv * w.alpha;

  const FieldElem wv = B.P(1) * sb + sx + B.P(1) * sy;
  const FieldElem a1 = wv * u2i;
  const FieldElem eps1 = B.P(-m + j + 2) * (sy + sa * sx + sb);
  w.a1 = a1;
  w.eps1 = eps1;
  auto k1_formula = [&](const FieldElem& a1_, const FieldElem& u2i_) {
    return B.mat({{B.zero, B.zero, B.one, B.zero},
                  {B.zero, B.zero, B.P(i - 2 * m + j) * a1_, B.one},
                  {B.one, B.zero, B.P(i - 2 * m + 3 * j + 2) * a1_, B.P(2 * j + 2)},
                  {B.P(i - 2 * m + j) * a1_, B.one, B.P(2 * i - 2 * m + 2 * j) * u2i_, B.zero}});
  };
  w.k1 = k1_formula(a1, u2i);
  w.g1 = *w.k1 * w.product;
  w.scaled_zero = scale_rows(B, *w.g1, i, j, -j, -i);
  w.scaled_designated = scale_rows(B, *w.g1, i, j + 2, -j - 2, -i);
  if (ctx.k > 0) w.congruence_target = k1_formula(B.zero, B.one);
  if (ctx.options.printed) {
    const FieldElem e2 = eps1 * eps1 * u2i;
    w.printed_product = B.mat({{B.P(j), B.zero, B.zero, B.zero},
                               {B.zero, B.P(i - 2 * m + 2 * j), B.zero, B.zero},
                               {B.P(-i) * wv, B.P(-i) * u2, B.P(-i + 2 * m - 2 * j), B.zero},
                               {B.P(-2 * m + j) * sx * sx, B.P(-2 * m + j) * wv, B.zero, B.P(-j)}});
    w.printed_g1 = B.mat({{B.P(-i) * a1 * u2, B.P(-i) * u2, B.P(-i + 2 * m - 2 * j), B.zero},
                          {B.P(-j - 2) * e2, B.zero, B.P(-j) * a1, B.P(-j)},
                          {B.P(j) * e2 + B.P(j), B.zero, B.P(j + 2) * a1, B.P(j + 2)},
                          {B.zero, B.zero, B.P(i) * u2i, B.zero}});
    w.printed_scaled_zero = B.mat({{a1 * u2, u2, B.P(2 * m - 2 * j), B.zero},
                                   {B.P(-2) * e2, B.zero, a1, B.one},
                                   {e2 + B.one, B.zero, B.P(2) * a1, B.P(2)},
                                   {B.zero, B.zero, u2i, B.zero}});
    w.printed_scaled_designated = B.mat({{a1 * u2, u2, B.P(2 * m - 2 * j), B.zero},
                                         {e2, B.zero, B.P(2) * a1, B.P(2)},
                                         {B.P(-2) * (e2 + B.one), B.zero, a1, B.one},
                                         {B.zero, B.zero, u2i, B.zero}});
    w.printed_congruence = B.mat({{B.zero, B.zero, B.one, B.zero},
                                  {B.zero, B.zero, B.zero, B.one},
                                  {B.one, B.zero, B.zero, B.P(2 * j + 2)},
                                  {B.zero, B.one, B.zero, B.zero}});
  }
}

LemmaWitness assemble(const LemmaContext& ctx, ResidueElem a, ResidueElem b, ResidueElem x, ResidueElem y,
                      std::optional<FiniteField::Elem> eps) {
  LemmaWitness w;
  w.lemma = ctx.lemma;
  w.cell = {ctx.i, ctx.j};
  w.k = ctx.k;
  w.m = ctx.m;
  w.level = ctx.level;
  w.a = a;
  w.b = b;
  w.x = x;
  w.y = y;
  w.eps = eps;
  auto sigma = [&](ResidueElem r) { return ctx.options.section ? (*ctx.options.section)(r) : ctx.ring.lift(r); };
  w.sa = sigma(a);
  w.sb = sigma(b);
  w.sx = sigma(x);
  w.sy = sigma(y);
  if (ctx.formal_level0) {
    // O/pi^0 is the zero ring; y carries eps through the formal lift pi^-1 eps.
    w.sy = eps ? FieldElem::pi_power(ctx.field, -1) * FieldElem::from_residue(ctx.field, *eps)
               : FieldElem::zero(ctx.field);
  }
  switch (ctx.lemma) {
    case LemmaId::SPHER01:
    case LemmaId::NONSPHER01:
      build_spher01_family(ctx, w);
      break;
    case LemmaId::SPHER1M1:
    case LemmaId::NONSPHER1M1:
      build_spher1m1_family(ctx, w);
      break;
    case LemmaId::CHAR2_02:
      build_char2(ctx, w);
      break;
  }
  if (eps) w.expected_cell = expected_cell(ctx, *eps);
  return w;
}

}  // namespace

std::string lemma_name(LemmaId id) {
  switch (id) {
    case LemmaId::SPHER01: return "SPHER01";
    case LemmaId::SPHER1M1: return "SPHER1M1";
    case LemmaId::NONSPHER01: return "NONSPHER01";
    case LemmaId::NONSPHER1M1: return "NONSPHER1M1";
    case LemmaId::CHAR2_02: return "CHAR2_02";
  }
  return "?";
}

LemmaId parse_lemma(const std::string& name) {
  for (auto id : {LemmaId::SPHER01, LemmaId::SPHER1M1, LemmaId::NONSPHER01, LemmaId::NONSPHER1M1, LemmaId::CHAR2_02})
    if (lemma_name(id) == name) return id;
  throw ConfigError("unknown lemma id: " + name);
}

std::string mutation_name(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::MinorSignFlip: return "minor-sign-flip";
    case Mutation::DScalingExponent: return "d-scaling-exponent";
    case Mutation::DropEps1: return "drop-eps1";
    case Mutation::WrongN1: return "wrong-n1";
    case Mutation::MinorRowPair: return "minor-row-pair";
  }
  return "?";
}

const std::vector<Mutation>& catalogued_mutations() {
  static const std::vector<Mutation> all = {Mutation::MinorSignFlip, Mutation::DScalingExponent, Mutation::DropEps1,
                                            Mutation::WrongN1, Mutation::MinorRowPair};
  return all;
}

Mutation parse_mutation(const std::string& name) {
  if (name == "none") return Mutation::None;
  for (auto m : catalogued_mutations())
    if (mutation_name(m) == name) return m;
  throw ConfigError("unknown mutation id: " + name);
}

CartanPair dominant(int i, int j) {
  i = std::abs(i);
  j = std::abs(j);
  return i >= j ? CartanPair{i, j} : CartanPair{j, i};
}

std::vector<ResidueElem> LemmaContext::ax_domain() const { return ring.multiples_of_pi_power(k); }

std::vector<ResidueElem> LemmaContext::b_domain() const { return ring.multiples_of_pi_power(2 * k); }

LemmaContext make_context(LemmaId lemma, Field field, int i, int j, int k, BuildOptions options) {
  auto fail = [&](const std::string& why) {
    throw PreconditionError(lemma_name(lemma) + " at (" + std::to_string(i) + "," + std::to_string(j) +
                            ") k=" + std::to_string(k) + ": " + why);
  };
  if (k < 0) fail("k must be >= 0");
  const bool char2 = field.is_char2();
  int m = 0, level = 0, v0 = -1;
  FiniteField::Elem eps_designated = 1;
  bool formal = false;
  switch (lemma) {
    case LemmaId::SPHER01:
    case LemmaId::NONSPHER01: {
      if (char2) fail("lemma requires characteristic != 2");
      if (lemma == LemmaId::SPHER01 && k != 0) fail("spherical lemma takes k = 0");
      v0 = two_valuation(field);
      if (j < 0 || i < j) fail("(i,j) must lie in the Weyl chamber");
      if (k == 0 && i - j < v0 + 1)
        fail("i-j = " + std::to_string(i - j) + " < v0+1 = " + std::to_string(v0 + 1));
      if (k > 0 && i - j < 2 * k + v0)
        fail("i-j = " + std::to_string(i - j) + " < 2k+v0 = " + std::to_string(2 * k + v0));
      m = (i + j) / 2;
      level = 2 * m - 2 * j - v0;
      if (level < 1) fail("n1 = " + std::to_string(level) + " < 1");
      if (options.mutation == Mutation::WrongN1) level += 1;
      if (lemma == LemmaId::NONSPHER01) {
        ResidueRing r1(field, 1);
        FieldElem e0 = FieldElem::pi_power(field, v0) / FieldElem::from_int(field, 2);
        eps_designated = static_cast<FiniteField::Elem>(r1.reduce(e0).index);
      }
      break;
    }
    case LemmaId::SPHER1M1:
    case LemmaId::NONSPHER1M1: {
      if (lemma == LemmaId::SPHER1M1) {
        if (k != 0) fail("spherical lemma takes k = 0");
        if (j < 2) fail("j = " + std::to_string(j) + " < 2");
        if (i < j) fail("(i,j) must lie in the Weyl chamber");
      } else {
        if (j < 2 * k + 2 || j < 2) fail("j = " + std::to_string(j) + " < 2k+2 = " + std::to_string(2 * k + 2));
        if (i < j - 1) fail("i < j-1");
      }
      level = j - 1;
      break;
    }
    case LemmaId::CHAR2_02: {
      if (!char2) fail("lemma requires characteristic 2");
      if (j < 0 || i < j) fail("(i,j) must lie in the Weyl chamber");
      if (i - j < 2) fail("i-j = " + std::to_string(i - j) + " < 2");
      if (k > 0 && i - j < 4 * k + 2)
        fail("i-j = " + std::to_string(i - j) + " < 4k+2 = " + std::to_string(4 * k + 2));
      m = (i + j) / 2;
      level = m - j - 1;
      formal = level == 0;
      break;
    }
  }
  LemmaContext ctx{lemma, field, i, j, k, m, level, v0, eps_designated, formal, ResidueRing(field, level), options};
  if (options.section && options.section->ring().level() != level) fail("section level does not match the lemma level");
  return ctx;
}

std::optional<CartanPair> expected_cell(const LemmaContext& ctx, FiniteField::Elem eps) {
  switch (ctx.lemma) {
    case LemmaId::SPHER01:
    case LemmaId::NONSPHER01:
      return eps == 0 ? CartanPair{ctx.i, ctx.j} : CartanPair{ctx.i, ctx.j + 1};
    case LemmaId::SPHER1M1:
    case LemmaId::NONSPHER1M1:
      return eps == 0 ? dominant(ctx.i, ctx.j) : dominant(ctx.i + 1, ctx.j - 1);
    case LemmaId::CHAR2_02:
      if (eps == 0) return CartanPair{ctx.i, ctx.j};
      if (eps == 1) return CartanPair{ctx.i, ctx.j + 2};
      return std::nullopt;
  }
  return std::nullopt;
}

LemmaWitness build_witness(const LemmaContext& ctx, ResidueElem a, ResidueElem b, ResidueElem x,
                           FiniteField::Elem eps) {
  if (eps >= ctx.field.q()) throw PreconditionError("eps out of range for the residue field");
  const auto& R = ctx.ring;
  ResidueElem y = R.add(R.add(R.mul(a, x), b), ctx.level >= 1 ? R.shift(R.from_residue(eps), ctx.level - 1) : R.zero());
  return assemble(ctx, a, b, x, y, eps);
}

LemmaWitness build_witness_free_y(const LemmaContext& ctx, ResidueElem a, ResidueElem b, ResidueElem x,
                                  ResidueElem y) {
  return assemble(ctx, a, b, x, y, std::nullopt);
}

LemmaWitness build_witness(LemmaId lemma, Field field, int i, int j, int k, std::uint64_t a, std::uint64_t b,
                           std::uint64_t x, FiniteField::Elem eps, BuildOptions options) {
  LemmaContext ctx = make_context(lemma, field, i, j, k, options);
  return build_witness(ctx, ctx.ring.elem(a), ctx.ring.elem(b), ctx.ring.elem(x), eps);
}

}  // namespace sp4lab
