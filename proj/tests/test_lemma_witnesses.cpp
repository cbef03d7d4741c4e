#include "doctest.h"

#include <functional>
#include <random>

#include "oracles.hpp"
#include "sp4lab/lemma_witnesses.hpp"

using namespace sp4lab;

namespace {

FieldElem pi(Field f, int e) { return FieldElem::pi_power(f, e); }

bool congruent(const Matrix& a, const Matrix& b, int k) {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      FieldElem d = a[r][c] - b[r][c];
      if (!d.is_zero() && d.valuation() < k) return false;
    }
  return true;
}

bool in_k(const Matrix& m) { return is_integral(m) && symplectic_check(m).ok(); }

// Every (a, b, x, eps) when the family is small, a fixed random sample otherwise.
void for_each_tuple(const LemmaContext& ctx, const std::function<void(const LemmaWitness&)>& fn) {
  auto ax = ctx.ax_domain();
  auto bd = ctx.b_domain();
  const unsigned q = ctx.field.q();
  const double total = double(ax.size()) * ax.size() * bd.size() * q;
  if (total <= 3000) {
    for (auto a : ax)
      for (auto b : bd)
        for (auto x : ax)
          for (unsigned e = 0; e < q; ++e) fn(build_witness(ctx, a, b, x, FiniteField::Elem(e)));
    return;
  }
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::size_t> pa(0, ax.size() - 1), pb(0, bd.size() - 1);
  std::uniform_int_distribution<unsigned> pe(0, q - 1);
  for (int s = 0; s < 300; ++s) {
    auto e = FiniteField::Elem(s < 2 ? (s == 0 ? 0 : ctx.eps_designated) : pe(rng));
    fn(build_witness(ctx, ax[pa(rng)], bd[pb(rng)], ax[pa(rng)], e));
  }
}

struct Case {
  const char* field;
  LemmaId lemma;
  int i, j, k;
};

const Case kCases[] = {
    {"Q3", LemmaId::SPHER01, 2, 0, 0},      {"Q3", LemmaId::SPHER01, 3, 1, 0},
    {"Q3", LemmaId::SPHER01, 4, 1, 0},      {"Q5", LemmaId::SPHER01, 4, 2, 0},
    {"Q2", LemmaId::SPHER01, 3, 1, 0},      {"Q2", LemmaId::SPHER01, 5, 1, 0},
    {"F3((t))", LemmaId::SPHER01, 4, 0, 0}, {"Q3", LemmaId::NONSPHER01, 3, 1, 0},
    {"Q3", LemmaId::NONSPHER01, 5, 2, 0},   {"Q2", LemmaId::NONSPHER01, 5, 1, 0},
    {"Q3", LemmaId::NONSPHER01, 5, 1, 1},   {"Q3", LemmaId::NONSPHER01, 6, 2, 1},
    {"Q2", LemmaId::NONSPHER01, 6, 1, 1},   {"F5((t))", LemmaId::NONSPHER01, 4, 2, 0},
    {"F9((t))", LemmaId::NONSPHER01, 3, 1, 0}, {"F2((t))", LemmaId::SPHER1M1, 2, 2, 0},
    {"F2((t))", LemmaId::SPHER1M1, 5, 3, 0}, {"Q3", LemmaId::SPHER1M1, 3, 3, 0},
    {"Q2", LemmaId::SPHER1M1, 4, 4, 0},     {"F2((t))", LemmaId::NONSPHER1M1, 1, 2, 0},
    {"Q3", LemmaId::NONSPHER1M1, 3, 3, 0},  {"Q2", LemmaId::NONSPHER1M1, 3, 4, 1},
    {"F2((t))", LemmaId::NONSPHER1M1, 5, 4, 1}, {"Q3", LemmaId::NONSPHER1M1, 4, 4, 1},
    {"F2((t))", LemmaId::CHAR2_02, 2, 0, 0}, {"F2((t))", LemmaId::CHAR2_02, 3, 1, 0},
    {"F2((t))", LemmaId::CHAR2_02, 4, 0, 0}, {"F2((t))", LemmaId::CHAR2_02, 7, 1, 0},
    {"F4((t))", LemmaId::CHAR2_02, 6, 0, 0}, {"F2((t))", LemmaId::CHAR2_02, 6, 0, 1},
    {"F2((t))", LemmaId::CHAR2_02, 9, 1, 1},
};

}  // namespace

TEST_CASE("worked examples") {
  Field q3 = parse_field("Q3");
  auto ctx = make_context(LemmaId::SPHER01, q3, 3, 1, 0);
  CHECK(ctx.m == 2);
  CHECK(ctx.level == 2);
  auto w = build_witness(ctx, ctx.ring.zero(), ctx.ring.zero(), ctx.ring.zero(), 1);
  CHECK(w.sy == pi(q3, 1));
  CHECK(*w.minor_formula == FieldElem::from_int(q3, -2) * pi(q3, -6) * pi(q3, 1));
  CHECK(minor2(w.product, 2, 3, 0, 1) == *w.minor_formula);
  CHECK(*w.expected_cell == CartanPair{3, 2});

  Field f2 = parse_field("F2((t))");
  auto w2 = build_witness(LemmaId::SPHER1M1, f2, 3, 2, 0, 0, 0, 0, 1);
  CHECK(*w2.expected_cell == CartanPair{4, 1});
  CHECK(oracle::smith_cell(w2.product) == CartanPair{4, 1});

  CHECK_THROWS_AS(make_context(LemmaId::SPHER01, parse_field("Q2"), 2, 1, 0), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::CHAR2_02, q3, 4, 0, 0), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::SPHER01, f2, 4, 0, 0), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::SPHER1M1, q3, 3, 1, 0), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::NONSPHER1M1, q3, 5, 3, 1), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::NONSPHER01, q3, 4, 2, 2), PreconditionError);
  CHECK_THROWS_AS(make_context(LemmaId::CHAR2_02, f2, 7, 1, 2), PreconditionError);
  CHECK_NOTHROW(make_context(LemmaId::NONSPHER1M1, q3, 1, 2, 0));
  CHECK_THROWS_AS(parse_lemma("SPHER02"), ConfigError);
  CHECK(parse_mutation("drop-eps1") == Mutation::DropEps1);
}

TEST_CASE("designated eps") {
  auto ctx = make_context(LemmaId::NONSPHER01, parse_field("Q3"), 3, 1, 0);
  CHECK(ctx.eps_designated == 2);  // 1/2 = 2 mod 3
  auto ctx5 = make_context(LemmaId::NONSPHER01, parse_field("Q5"), 3, 1, 0);
  CHECK(ctx5.eps_designated == 3);
  auto ctx2 = make_context(LemmaId::NONSPHER01, parse_field("Q2"), 3, 0, 0);
  CHECK(ctx2.eps_designated == 1);  // 2/2
  CHECK(make_context(LemmaId::CHAR2_02, parse_field("F2((t))"), 3, 1, 0).formal_level0);
}

TEST_CASE("dominant representative") {
  CHECK(dominant(2, 3) == CartanPair{3, 2});
  CHECK(dominant(4, -5) == CartanPair{5, 4});
  CHECK(dominant(3, 1) == CartanPair{3, 1});
}

TEST_CASE("printed displays agree with recomputed products") {
  for (const auto& cs : kCases) {
    Field f = parse_field(cs.field);
    auto ctx = make_context(cs.lemma, f, cs.i, cs.j, cs.k);
    CAPTURE(cs.field);
    CAPTURE(lemma_name(cs.lemma));
    CAPTURE(cs.i);
    CAPTURE(cs.j);
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      REQUIRE(matrices_equal(w.product, w.printed_product));
      if (w.g1) {
        REQUIRE(matrices_equal(*w.g1, *w.printed_g1));
        REQUIRE(matrices_equal(*w.scaled_zero, *w.printed_scaled_zero));
        REQUIRE(matrices_equal(*w.scaled_designated, *w.printed_scaled_designated));
      }
    });
  }
}

TEST_CASE("factors are symplectic and cells match the independent Smith form") {
  for (const auto& cs : kCases) {
    Field f = parse_field(cs.field);
    auto ctx = make_context(cs.lemma, f, cs.i, cs.j, cs.k);
    CAPTURE(cs.field);
    CAPTURE(lemma_name(cs.lemma));
    CAPTURE(cs.i);
    CAPTURE(cs.j);
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      CAPTURE(*w.eps);
      REQUIRE(symplectic_check(w.beta_inv).ok());
      REQUIRE(symplectic_check(w.alpha).ok());
      auto cell = oracle::smith_cell(w.product);
      if (w.expected_cell) CHECK(cell == *w.expected_cell);
      if (w.k1) {
        REQUIRE(in_k(*w.k1));
        if (*w.eps == 0) CHECK(in_k(*w.scaled_zero));
        if (*w.eps == ctx.eps_designated) CHECK(in_k(*w.scaled_designated));
      }
    });
  }
}

TEST_CASE("eps1 reduces to the expected residue") {
  for (const auto& cs : kCases) {
    if (cs.lemma == LemmaId::SPHER01 || cs.lemma == LemmaId::SPHER1M1) continue;
    Field f = parse_field(cs.field);
    auto ctx = make_context(cs.lemma, f, cs.i, cs.j, cs.k);
    ResidueRing r1(f, 1);
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      REQUIRE(w.eps1->is_integral());
      FieldElem e1 = *w.eps1;
      if (cs.lemma == LemmaId::NONSPHER01) e1 = e1 * pi(f, ctx.v0) / FieldElem::from_int(f, 2);
      CHECK(r1.reduce(e1).index == *w.eps);
    });
  }
}

TEST_CASE("norm identities") {
  for (const auto& cs : kCases) {
    if (cs.k != 0 || cs.lemma == LemmaId::CHAR2_02) continue;
    Field f = parse_field(cs.field);
    auto ctx = make_context(cs.lemma, f, cs.i, cs.j, 0);
    const int i = cs.i, j = cs.j, m = ctx.m;
    const auto& R = ctx.ring;
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      Matrix beta = GroupElement::trusted(w.beta_inv).inverse().matrix();
      int v = R.valuation(R.sub(w.y, R.add(R.mul(w.a, w.x), w.b)));
      if (cs.lemma == LemmaId::SPHER01 || cs.lemma == LemmaId::NONSPHER01) {
        CHECK(wedge_norm_exponent(beta) == i + j);
        CHECK(wedge_norm_exponent(w.alpha) == 2 * m - 2 * j);
        CHECK(norm_exponent(w.product) == i);
        CHECK(wedge_norm_exponent(w.product) == std::max(i + 2 * m - j - (v + ctx.v0), i + j));
        CHECK(minor2(w.product, 2, 3, 0, 1) == *w.minor_formula);
      } else {
        CHECK(wedge_norm_exponent(beta) == i);
        CHECK(wedge_norm_exponent(w.alpha) == j);
        CHECK(wedge_norm_exponent(w.product) == i + j);
        if (i >= j) CHECK(norm_exponent(w.product) == std::max(i, i + j - v - 1));
      }
    });
  }
}

TEST_CASE("congruence layer") {
  for (const auto& cs : kCases) {
    if (cs.k == 0) continue;
    Field f = parse_field(cs.field);
    auto ctx = make_context(cs.lemma, f, cs.i, cs.j, cs.k);
    CAPTURE(lemma_name(cs.lemma));
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      REQUIRE(w.congruence_target);
      CHECK(congruent(*w.k1, *w.congruence_target, cs.k));
      CHECK(congruent(*w.printed_congruence, *w.congruence_target, cs.k));
    });
  }
}

TEST_CASE("custom section gives the same cells") {
  Field f = parse_field("Q3");
  ResidueRing R(f, 2);
  std::vector<FieldElem> table;
  for (std::uint64_t n = 0; n < R.size(); ++n) table.push_back(R.lift(R.elem(n)) + pi(f, 2) * FieldElem::from_int(f, 7));
  Section sec(R, table);
  auto ctx = make_context(LemmaId::SPHER01, f, 3, 1, 0, {Mutation::None, true, &sec});
  for_each_tuple(ctx, [&](const LemmaWitness& w) {
    CHECK(matrices_equal(w.product, w.printed_product));
    CHECK(oracle::smith_cell(w.product) == *w.expected_cell);
  });
}

TEST_CASE("mutations break something") {
  Field q3 = parse_field("Q3");
  auto broken = [&](LemmaId lemma, int i, int j, Mutation mu) {
    auto ctx = make_context(lemma, q3, i, j, 0, {mu, true, nullptr});
    bool any = false;
    for_each_tuple(ctx, [&](const LemmaWitness& w) {
      if (!matrices_equal(w.product, w.printed_product) || !symplectic_check(w.alpha).ok() ||
          (w.g1 && !matrices_equal(*w.g1, *w.printed_g1)) ||
          (w.expected_cell && oracle::smith_cell(w.product) != *w.expected_cell))
        any = true;
    });
    return any;
  };
  CHECK(broken(LemmaId::SPHER01, 3, 1, Mutation::MinorSignFlip));
  CHECK(broken(LemmaId::SPHER01, 3, 1, Mutation::DScalingExponent));
  CHECK(broken(LemmaId::NONSPHER1M1, 3, 3, Mutation::DropEps1));
  CHECK(broken(LemmaId::SPHER01, 3, 1, Mutation::WrongN1));
}
