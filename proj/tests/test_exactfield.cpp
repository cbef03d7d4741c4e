#include "doctest.h"

#include <random>

#include "sp4lab/exactfield.hpp"

using namespace sp4lab;

namespace {

// p-adic valuation of a nonzero integer, counted by repeated division.
int vp(long long n, int p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// Naive polynomial remainder over F_p with small int vectors (low-to-high).
std::vector<int> rem_mod_p(std::vector<int> a, const std::vector<int>& b, int p) {
  auto deg = [](const std::vector<int>& x) {
    int d = static_cast<int>(x.size()) - 1;
    while (d >= 0 && x[d] == 0) --d;
    return d;
  };
  int db = deg(b);
  int inv = 1;
  while ((b[db] * inv) % p != 1) ++inv;
  for (int da = deg(a); da >= db; da = deg(a)) {
    int c = (a[da] * inv) % p;
    for (int k = 0; k <= db; ++k) a[da - db + k] = ((a[da - db + k] - c * b[k]) % p + p) % p;
  }
  return a;
}

FieldElem random_elem(Field f, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> e(-4, 4);
  if (f.kind() == FieldKind::MixedChar) {
    std::uniform_int_distribution<long long> n(-2000, 2000), d(1, 500);
    long long nn = n(rng);
    return FieldElem::from_rational(f, nn, d(rng)) * FieldElem::pi_power(f, e(rng));
  }
  std::uniform_int_distribution<int> c(0, f.q() - 1), len(0, 5);
  Poly num(len(rng) + 1), den(len(rng) + 1);
  for (auto& x : num) x = static_cast<FiniteField::Elem>(c(rng));
  for (auto& x : den) x = static_cast<FiniteField::Elem>(c(rng));
  den.back() = 1;
  FieldElem dd = FieldElem::from_poly(f, den);
  if (dd.is_zero()) dd = FieldElem::one(f);
  return FieldElem::from_poly(f, num) / dd * FieldElem::pi_power(f, e(rng));
}

}  // namespace

TEST_CASE("make_field validates its arguments") {
  Field q3 = make_field(FieldKind::MixedChar, 3, 1);
  CHECK(q3.q() == 3);
  CHECK(q3.name() == "Q3");
  Field f4 = make_field(FieldKind::EqualChar, 2, 2);
  CHECK(f4.q() == 4);
  CHECK(f4.name() == "F4((t))");
  CHECK_THROWS_AS(make_field(FieldKind::MixedChar, 4, 1), ConfigError);
  CHECK_THROWS_AS(make_field(FieldKind::MixedChar, 3, 2), ConfigError);
  CHECK_THROWS_AS(make_field(FieldKind::EqualChar, 17, 2), ConfigError);
  CHECK(make_field(FieldKind::MixedChar, 3, 1) == q3);
}

TEST_CASE("parse_field grammar") {
  CHECK(parse_field("Q3").p() == 3);
  CHECK(parse_field("F4((t))").f() == 2);
  CHECK(parse_field("F9((t))").p() == 3);
  CHECK_THROWS_AS(parse_field("q3"), ConfigError);
  CHECK_THROWS_AS(parse_field("F6((t))"), ConfigError);
  CHECK_THROWS_AS(parse_field("F4"), ConfigError);
  CHECK_THROWS_AS(parse_field("Q"), ConfigError);
}

TEST_CASE("stored irreducibles have no factors of lower degree") {
  const std::pair<int, int> entries[] = {{2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {2, 7}, {2, 8}, {3, 2},
                                         {3, 3}, {3, 4}, {3, 5}, {5, 2}, {5, 3}, {7, 2}, {11, 2}, {13, 2}};
  for (auto [p, f] : entries) {
    auto m = stored_irreducible(p, f);
    REQUIRE(static_cast<int>(m.size()) == f + 1);
    CHECK(m.back() == 1);
    for (int d = 1; d <= f / 2; ++d) {
      int count = 1;
      for (int k = 0; k < d; ++k) count *= p;
      for (int code = 0; code < count; ++code) {
        std::vector<int> g(d + 1, 0);
        int c = code;
        for (int k = 0; k < d; ++k, c /= p) g[k] = c % p;
        g[d] = 1;
        auto r = rem_mod_p(m, g, p);
        bool zero = true;
        for (int x : r) zero = zero && x == 0;
        CHECK_MESSAGE(!zero, "p=" << p << " f=" << f << " divisor code " << code);
      }
    }
  }
}

TEST_CASE("finite field tables satisfy the field axioms") {
  for (auto [p, f] : {std::pair{2, 2}, {2, 3}, {3, 2}, {5, 1}, {2, 4}}) {
    FiniteField F(p, f);
    int q = F.q();
    for (int a = 0; a < q; ++a) {
      if (a) CHECK(F.mul(a, F.inv(a)) == 1);
      CHECK(F.add(a, F.neg(a)) == 0);
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c) {
          CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
          CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
        }
    }
    // The trace is F_p-linear and surjective.
    std::vector<int> hits(p, 0);
    for (int a = 0; a < q; ++a) ++hits[F.trace(a)];
    for (int h : hits) CHECK(h == q / p);
  }
}

TEST_CASE("valuation examples") {
  Field q2 = parse_field("Q2");
  CHECK(valuation_and_norm(FieldElem::from_int(q2, 8)).valuation == 3);
  Field f3 = parse_field("F3((t))");
  auto x = FieldElem::parse(f3, "t^-2*(1+t)");
  CHECK(valuation_and_norm(x).valuation == -2);
  CHECK(valuation_and_norm(x).norm_exponent == 2);
  auto z = valuation_and_norm(FieldElem::zero(f3));
  CHECK(z.zero);
  CHECK(z.valuation == kInfiniteValuation);
}

TEST_CASE("two_valuation") {
  CHECK(two_valuation(parse_field("Q2")) == 1);
  CHECK(two_valuation(parse_field("Q5")) == 0);
  CHECK(two_valuation(parse_field("F3((t))")) == 0);
  CHECK_THROWS_AS(two_valuation(parse_field("F2((t))")), PreconditionError);
}

TEST_CASE("reduce and lift examples") {
  Field q3 = parse_field("Q3");
  ResidueRing r1(q3, 1);
  auto c = r1.reduce(FieldElem::from_int(q3, 5));
  CHECK(c.index == 2);
  CHECK(r1.lift(c) == FieldElem::from_int(q3, 2));
  CHECK_THROWS_AS(r1.reduce(FieldElem::from_rational(q3, 1, 3)), ArithmeticError);

  Field f2 = parse_field("F2((t))");
  ResidueRing r2(f2, 2);
  auto d = r2.reduce(FieldElem::parse(f2, "1+t+t^3"));
  CHECK(r2.lift(d) == FieldElem::parse(f2, "1+t"));

  // Units are inverted modulo p^n: 1/2 = 5 mod 9.
  ResidueRing r9(q3, 2);
  CHECK(r9.reduce(FieldElem::from_rational(q3, 1, 2)).index == 5);
  // 1/(1+t) = 1+t+t^2+... in F2[[t]].
  ResidueRing r3(f2, 3);
  CHECK(r3.lift(r3.reduce(FieldElem::parse(f2, "1/(1+t)"))) == FieldElem::parse(f2, "1+t+t^2"));
}

TEST_CASE("reduce inverts the section exhaustively at small levels") {
  for (const char* spec : {"Q2", "Q3", "F2((t))", "F3((t))", "F4((t))"}) {
    Field f = parse_field(spec);
    for (int n = 1; n <= 4; ++n) {
      ResidueRing ring(f, n);
      for (std::uint64_t idx = 0; idx < ring.size(); ++idx) {
        auto r = ring.elem(idx);
        FieldElem s = ring.lift(r);
        CHECK(ring.reduce(s) == r);
        CHECK(s.is_integral());
        if (f.kind() == FieldKind::EqualChar && !s.is_zero()) {
          CHECK(s.p_unit()->den == Poly{1});
          CHECK(static_cast<int>(s.p_unit()->num.size()) + s.valuation() <= n);
        }
      }
    }
  }
}

TEST_CASE("residue ring arithmetic agrees with field arithmetic") {
  std::mt19937_64 rng(7);
  for (const char* spec : {"Q3", "Q5", "F4((t))", "F3((t))"}) {
    Field f = parse_field(spec);
    ResidueRing ring(f, 3);
    std::uniform_int_distribution<std::uint64_t> pick(0, ring.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
      auto a = ring.elem(pick(rng)), b = ring.elem(pick(rng));
      FieldElem A = ring.lift(a), B = ring.lift(b);
      CHECK(ring.add(a, b) == ring.reduce(A + B));
      CHECK(ring.sub(a, b) == ring.reduce(A - B));
      CHECK(ring.mul(a, b) == ring.reduce(A * B));
      CHECK(ring.shift(a, 1) == ring.reduce(A * FieldElem::pi_power(f, 1)));
      int v = A.is_zero() ? 3 : std::min(A.valuation(), 3);
      CHECK(ring.valuation(a) == v);
    }
  }
}

TEST_CASE("valuation axioms on random pairs") {
  std::mt19937_64 rng(2024);
  for (const char* spec : {"Q2", "Q3", "Q5", "F2((t))", "F3((t))", "F4((t))"}) {
    Field f = parse_field(spec);
    for (int trial = 0; trial < 10000; ++trial) {
      FieldElem x = random_elem(f, rng), y = random_elem(f, rng);
      if (x.is_zero() || y.is_zero()) continue;
      CHECK(valuation_and_norm(x * y).valuation == x.valuation() + y.valuation());
      FieldElem s = x + y;
      if (!s.is_zero()) CHECK(s.valuation() >= std::min(x.valuation(), y.valuation()));
      if (x.valuation() != y.valuation()) CHECK(s.valuation() == std::min(x.valuation(), y.valuation()));
      CHECK((x - x).is_zero());
      CHECK(x * x.inverse() == FieldElem::one(f));
      CHECK((x + y) - y == x);
    }
  }
}

TEST_CASE("rational valuations match an independent count") {
  Field f = parse_field("Q3");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> n(1, 100000);
  for (int trial = 0; trial < 1000; ++trial) {
    long long a = n(rng), b = n(rng);
    CHECK(FieldElem::from_rational(f, a, b).valuation() == vp(a, 3) - vp(b, 3));
  }
}

TEST_CASE("element strings round-trip") {
  for (const char* spec : {"Q3", "F4((t))", "F5((t))"}) {
    Field f = parse_field(spec);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      FieldElem x = random_elem(f, rng);
      CHECK(FieldElem::parse(f, x.to_string()) == x);
    }
  }
  Field q3 = parse_field("Q3");
  CHECK(FieldElem::parse(q3, "-4/18").to_string() == "-2/9");
  CHECK(FieldElem::parse(q3, "p^-2").valuation() == -2);
  CHECK_THROWS_AS(FieldElem::parse(q3, "t"), ConfigError);
  CHECK_THROWS_AS(FieldElem::parse(parse_field("F2((t))"), "3"), ConfigError);
}

TEST_CASE("custom sections must be sections") {
  Field f = parse_field("Q3");
  ResidueRing ring(f, 1);
  std::vector<FieldElem> table = {FieldElem::from_int(f, 3), FieldElem::from_int(f, -2), FieldElem::from_int(f, 5)};
  Section s(ring, table);
  CHECK(s(ring.elem(1)) == FieldElem::from_int(f, -2));
  table[2] = FieldElem::from_int(f, 4);
  CHECK_THROWS_AS(Section(ring, table), PreconditionError);
}
