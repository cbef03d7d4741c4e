#include "sp4lab/exactfield.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace sp4lab {

namespace {

// ---- integer helpers --------------------------------------------------------

BigInt big_gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

BigInt ipow(long long base, int e) { return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(e)); }

std::string int_to_string(const BigInt& v) { return v.str(); }

// Removes all factors p from x (x != 0), returning the count.
int strip_p(BigInt& x, int p) {
  int c = 0;
  for (;;) {
    BigInt q, r;
    boost::multiprecision::divide_qr(x, BigInt(p), q, r);
    if (r != 0) return c;
    x = std::move(q);
    ++c;
  }
}

// ---- polynomials over F_q ---------------------------------------------------

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly padd(const FiniteField& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    auto x = k < a.size() ? a[k] : FiniteField::Elem(0);
    auto y = k < b.size() ? b[k] : FiniteField::Elem(0);
    r[k] = F.add(x, y);
  }
  trim(r);
  return r;
}

Poly pneg(const FiniteField& F, Poly a) {
  for (auto& c : a) c = F.neg(c);
  return a;
}

Poly pmul(const FiniteField& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

Poly pscale(const FiniteField& F, Poly a, FiniteField::Elem c) {
  for (auto& x : a) x = F.mul(x, c);
  trim(a);
  return a;
}

Poly pshift(const Poly& a, int e) {
  if (a.empty() || e == 0) return a;
  Poly r(e, 0);
  r.insert(r.end(), a.begin(), a.end());
  return r;
}

bool is_one(const Poly& a) { return a.size() == 1 && a[0] == 1; }

// a = q*b + r.
void pdivmod(const FiniteField& F, Poly a, const Poly& b, Poly& quot, Poly& rem) {
  quot.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  auto lead_inv = F.inv(b.back());
  while (!a.empty() && a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    auto c = F.mul(a.back(), lead_inv);
    quot[shift] = c;
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] = F.sub(a[shift + k], F.mul(c, b[k]));
    trim(a);
  }
  trim(quot);
  rem = std::move(a);
}

Poly pgcd(const FiniteField& F, Poly a, Poly b) {
  while (!b.empty()) {
    Poly q, r;
    pdivmod(F, a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

int strip_t(Poly& a) {
  int c = 0;
  while (c < static_cast<int>(a.size()) && a[c] == 0) ++c;
  a.erase(a.begin(), a.begin() + c);
  return c;
}

std::string poly_to_string(const Poly& a) {
  if (a.empty()) return "0";
  std::string s;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0) continue;
    if (!s.empty()) s += "+";
    if (k == 0) {
      s += std::to_string(a[k]);
      continue;
    }
    if (a[k] != 1) s += std::to_string(a[k]) + "*";
    s += "t";
    if (k > 1) s += "^" + std::to_string(k);
  }
  return s;
}

// ---- field registry ---------------------------------------------------------

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::tuple<int, int, int>, std::unique_ptr<detail::FieldData>>& registry() {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<detail::FieldData>> r;
  return r;
}

}  // namespace

// ---- FiniteField ------------------------------------------------------------

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<int> stored_irreducible(int p, int f) {
  if (f == 1) return {0, 1};
  static const std::map<std::pair<int, int>, std::vector<int>> table = {
      {{2, 2}, {1, 1, 1}},
      {{2, 3}, {1, 1, 0, 1}},
      {{2, 4}, {1, 1, 0, 0, 1}},
      {{2, 5}, {1, 0, 1, 0, 0, 1}},
      {{2, 6}, {1, 1, 0, 1, 1, 0, 1}},
      {{2, 7}, {1, 1, 0, 0, 0, 0, 0, 1}},
      {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
      {{3, 2}, {2, 2, 1}},
      {{3, 3}, {1, 2, 0, 1}},
      {{3, 4}, {2, 0, 0, 2, 1}},
      {{3, 5}, {1, 2, 0, 0, 0, 1}},
      {{5, 2}, {2, 4, 1}},
      {{5, 3}, {3, 3, 0, 1}},
      {{7, 2}, {3, 6, 1}},
      {{11, 2}, {2, 7, 1}},
      {{13, 2}, {2, 12, 1}},
  };
  auto it = table.find({p, f});
  return it == table.end() ? std::vector<int>{} : it->second;
}

FiniteField::FiniteField(int p, int f) : p_(p), f_(f), q_(1) {
  for (int k = 0; k < f; ++k) q_ *= p;
  modulus_ = stored_irreducible(p, f);
  if (modulus_.empty()) throw ConfigError("no stored irreducible polynomial for q = " + std::to_string(q_));

  auto digits = [&](int a) {
    std::vector<int> d(f, 0);
    for (int k = 0; k < f; ++k, a /= p) d[k] = a % p;
    return d;
  };
  auto encode = [&](const std::vector<int>& d) {
    int a = 0;
    for (int k = f - 1; k >= 0; --k) a = a * p + d[k];
    return static_cast<Elem>(a);
  };

  add_.resize(q_ * q_);
  mul_.resize(q_ * q_);
  neg_.resize(q_);
  inv_.assign(q_, 0);
  trace_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    auto da = digits(a);
    std::vector<int> dn(f);
    for (int k = 0; k < f; ++k) dn[k] = (p - da[k]) % p;
    neg_[a] = encode(dn);
    for (int b = 0; b < q_; ++b) {
      auto db = digits(b);
      std::vector<int> s(f);
      for (int k = 0; k < f; ++k) s[k] = (da[k] + db[k]) % p;
      add_[a * q_ + b] = encode(s);
      std::vector<int> prod(2 * f, 0);
      for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
      for (int k = 2 * f - 1; k >= f; --k) {
        int c = prod[k];
        if (c == 0) continue;
        for (int r = 0; r <= f; ++r) prod[k - f + r] = ((prod[k - f + r] - c * modulus_[r]) % p + p) % p;
      }
      prod.resize(f);
      mul_[a * q_ + b] = encode(prod);
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  for (int a = 0; a < q_; ++a) {
    Elem x = static_cast<Elem>(a), s = 0;
    for (int k = 0; k < f; ++k) {
      s = add(s, x);
      Elem y = 1;
      for (int r = 0; r < p; ++r) y = mul(y, x);
      x = y;
    }
    if (s >= p) throw ConfigError("trace not in prime field; stored modulus is not irreducible");
    trace_[a] = s;
  }
}

FiniteField::Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw ArithmeticError("inverse of zero in residue field");
  return inv_[a];
}

FiniteField::Elem FiniteField::from_int(long long n) const {
  long long r = ((n % p_) + p_) % p_;
  return static_cast<Elem>(r);
}

// ---- Field ------------------------------------------------------------------

Field make_field(FieldKind kind, int p, int f) {
  if (!is_prime(p)) throw ConfigError(std::to_string(p) + " is not prime");
  if (f < 1) throw ConfigError("residue degree must be >= 1");
  if (kind == FieldKind::MixedChar && f != 1) throw ConfigError("mixed characteristic requires f = 1");
  long long q = 1;
  for (int k = 0; k < f; ++k) {
    q *= p;
    if (q > 256) throw ConfigError("unsupported residue field size (q > 256)");
  }
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto key = std::make_tuple(static_cast<int>(kind), p, f);
  auto& slot = registry()[key];
  if (!slot) {
    std::string name = kind == FieldKind::MixedChar ? "Q" + std::to_string(p)
                                                    : "F" + std::to_string(q) + "((t))";
    slot = std::make_unique<detail::FieldData>(
        detail::FieldData{kind, p, f, static_cast<int>(q), FiniteField(p, f), std::move(name)});
  }
  return Field(slot.get());
}

Field parse_field(std::string_view spec) {
  auto parse_int = [&](std::string_view s) {
    if (s.empty() || s.size() > 6) throw ConfigError("bad field spec: " + std::string(spec));
    long long v = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ConfigError("bad field spec: " + std::string(spec));
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (spec.size() >= 2 && spec[0] == 'Q') {
    long long p = parse_int(spec.substr(1));
    return make_field(FieldKind::MixedChar, static_cast<int>(p), 1);
  }
  const std::string_view suffix = "((t))";
  if (spec.size() > 1 + suffix.size() && spec[0] == 'F' && spec.ends_with(suffix)) {
    long long q = parse_int(spec.substr(1, spec.size() - 1 - suffix.size()));
    for (int p = 2; p <= q; ++p) {
      if (!is_prime(p) || q % p != 0) continue;
      long long r = q;
      int f = 0;
      while (r % p == 0) {
        r /= p;
        ++f;
      }
      if (r != 1) break;
      return make_field(FieldKind::EqualChar, p, f);
    }
    throw ConfigError(std::to_string(q) + " is not a prime power");
  }
  throw ConfigError("bad field spec: " + std::string(spec) + " (expected Q<p> or F<q>((t)))");
}

int two_valuation(Field field) {
  if (field.kind() == FieldKind::EqualChar) {
    if (field.p() == 2) throw PreconditionError("v0 undefined in characteristic 2");
    return 0;
  }
  return field.p() == 2 ? 1 : 0;
}

// ---- FieldElem --------------------------------------------------------------

FieldElem FieldElem::make_q(const detail::FieldData* f, int v, BigInt num, BigInt den) {
  FieldElem r;
  r.field_ = f;
  if (num == 0) return r;
  if (den == 0) throw ArithmeticError("division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  v += strip_p(num, f->p);
  v -= strip_p(den, f->p);
  if (den != 1) {
    BigInt g = big_gcd(num, den);
    if (g != 1) {
      num /= g;
      den /= g;
    }
  }
  r.val_ = v;
  r.unit_ = QUnit{num, den};
  return r;
}

FieldElem FieldElem::make_p(const detail::FieldData* f, int v, Poly num, Poly den) {
  FieldElem r;
  r.field_ = f;
  trim(num);
  trim(den);
  if (num.empty()) return r;
  if (den.empty()) throw ArithmeticError("division by zero");
  const auto& F = f->residue;
  v += strip_t(num);
  v -= strip_t(den);
  if (den.size() > 1) {
    Poly g = pgcd(F, num, den);
    if (g.size() > 1) {
      Poly q, rem;
      pdivmod(F, num, g, q, rem);
      num = std::move(q);
      pdivmod(F, den, g, q, rem);
      den = std::move(q);
    }
  }
  if (den[0] != 1) {
    auto c = F.inv(den[0]);
    num = pscale(F, std::move(num), c);
    den = pscale(F, std::move(den), c);
  }
  r.val_ = v;
  r.unit_ = PUnit{std::move(num), std::move(den)};
  return r;
}

FieldElem FieldElem::zero(Field f) {
  FieldElem r;
  r.field_ = f.data();
  return r;
}

FieldElem FieldElem::one(Field f) { return from_int(f, 1); }

FieldElem FieldElem::from_int(Field f, long long n) {
  if (f.kind() == FieldKind::MixedChar) return make_q(f.data(), 0, n, 1);
  return make_p(f.data(), 0, Poly{f.residue().from_int(n)}, Poly{1});
}

FieldElem FieldElem::from_rational(Field f, long long n, long long d) {
  if (d == 0) throw ArithmeticError("division by zero");
  if (f.kind() == FieldKind::MixedChar) return make_q(f.data(), 0, n, d);
  return from_int(f, n) / from_int(f, d);
}

FieldElem FieldElem::pi_power(Field f, int e) {
  if (f.kind() == FieldKind::MixedChar) return make_q(f.data(), e, 1, 1);
  return make_p(f.data(), e, Poly{1}, Poly{1});
}

FieldElem FieldElem::from_poly(Field f, const Poly& coeffs) {
  if (f.kind() != FieldKind::EqualChar) throw PreconditionError("from_poly requires an equal-characteristic field");
  for (auto c : coeffs)
    if (c >= f.q()) throw PreconditionError("coefficient out of range for F_q");
  return make_p(f.data(), 0, coeffs, Poly{1});
}

FieldElem FieldElem::from_residue(Field f, FiniteField::Elem e) {
  if (e >= f.q()) throw PreconditionError("residue code out of range");
  if (f.kind() == FieldKind::MixedChar) return make_q(f.data(), 0, e, 1);
  return make_p(f.data(), 0, Poly{e}, Poly{1});
}

FieldElem FieldElem::operator-() const {
  FieldElem r = *this;
  if (auto* u = std::get_if<QUnit>(&r.unit_)) {
    u->num = -u->num;
  } else if (auto* w = std::get_if<PUnit>(&r.unit_)) {
    w->num = pneg(field_->residue, std::move(w->num));
  }
  return r;
}

FieldElem FieldElem::inverse() const {
  if (is_zero()) throw ArithmeticError("inverse of zero");
  if (auto* u = q_unit()) return make_q(field_, -val_, u->den, u->num);
  auto* w = p_unit();
  return make_p(field_, -val_, w->den, w->num);
}

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
  if (a.is_zero()) return b.is_zero() && !b.field_ ? FieldElem::zero(Field(a.field_)) : b;
  if (b.is_zero()) return a;
  if (a.field_ != b.field_) throw PreconditionError("field mismatch");
  const auto* f = a.field_;
  int v = std::min(a.val_, b.val_);
  int da = a.val_ - v, db = b.val_ - v;
  if (auto* ua = a.q_unit()) {
    auto* ub = b.q_unit();
    BigInt pa = ipow(f->p, da), pb = ipow(f->p, db);
    BigInt num, den;
    if (ua->den == ub->den) {
      num = ua->num * pa + ub->num * pb;
      den = ua->den;
    } else {
      num = ua->num * ub->den * pa + ub->num * ua->den * pb;
      den = ua->den * ub->den;
    }
    return FieldElem::make_q(f, v, num, den);
  }
  const auto& F = f->residue;
  auto* ua = a.p_unit();
  auto* ub = b.p_unit();
  if (is_one(ua->den) && is_one(ub->den)) return FieldElem::make_p(f, v, padd(F, pshift(ua->num, da), pshift(ub->num, db)), Poly{1});
  Poly num = padd(F, pshift(pmul(F, ua->num, ub->den), da), pshift(pmul(F, ub->num, ua->den), db));
  return FieldElem::make_p(f, v, std::move(num), pmul(F, ua->den, ub->den));
}

FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  if (a.is_zero() || b.is_zero()) {
    FieldElem r;
    r.field_ = a.field_ ? a.field_ : b.field_;
    return r;
  }
  if (a.field_ != b.field_) throw PreconditionError("field mismatch");
  const auto* f = a.field_;
  if (auto* ua = a.q_unit()) {
    auto* ub = b.q_unit();
    BigInt n1 = ua->num, d1 = ua->den, n2 = ub->num, d2 = ub->den;
    if (d2 != 1) {
      BigInt g = big_gcd(n1, d2);
      n1 /= g;
      d2 /= g;
    }
    if (d1 != 1) {
      BigInt g = big_gcd(n2, d1);
      n2 /= g;
      d1 /= g;
    }
    FieldElem r;
    r.field_ = f;
    r.val_ = a.val_ + b.val_;
    r.unit_ = FieldElem::QUnit{n1 * n2, d1 * d2};
    return r;
  }
  const auto& F = f->residue;
  auto* ua = a.p_unit();
  auto* ub = b.p_unit();
  if (is_one(ua->den) && is_one(ub->den)) {
    FieldElem r;
    r.field_ = f;
    r.val_ = a.val_ + b.val_;
    r.unit_ = FieldElem::PUnit{pmul(F, ua->num, ub->num), Poly{1}};
    return r;
  }
  return FieldElem::make_p(f, a.val_ + b.val_, pmul(F, ua->num, ub->num), pmul(F, ua->den, ub->den));
}

FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }

bool operator==(const FieldElem& a, const FieldElem& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.val_ != b.val_) return false;
  if (auto* ua = a.q_unit()) {
    auto* ub = b.q_unit();
    if (!ub) return false;
    return ua->num == ub->num && ua->den == ub->den;
  }
  auto* ua = a.p_unit();
  auto* ub = b.p_unit();
  if (!ub) return false;
  const auto& F = a.field_->residue;
  return pmul(F, ua->num, ub->den) == pmul(F, ub->num, ua->den);
}

FieldElem FieldElem::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  FieldElem base = *this;
  FieldElem r = FieldElem::one(Field(field_));
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

std::string FieldElem::to_string() const {
  if (is_zero()) return "0";
  if (auto* u = q_unit()) {
    BigInt num = u->num, den = u->den;
    if (val_ >= 0) num *= ipow(field_->p, val_);
    else den *= ipow(field_->p, -val_);
    if (den == 1) return int_to_string(num);
    return int_to_string(num) + "/" + int_to_string(den);
  }
  auto* w = p_unit();
  Poly num = pshift(w->num, std::max(val_, 0));
  Poly den = pshift(w->den, std::max(-val_, 0));
  if (is_one(den)) return poly_to_string(num);
  return "(" + poly_to_string(num) + ")/(" + poly_to_string(den) + ")";
}

// ---- parsing ----------------------------------------------------------------

namespace {

class ElemParser {
 public:
  ElemParser(Field f, std::string_view text) : f_(f) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_.push_back(c);
  }

  FieldElem run() {
    if (s_.empty()) fail("empty expression");
    FieldElem r = expr();
    if (pos_ != s_.size()) fail("unexpected character");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw ConfigError("cannot parse element '" + s_ + "': " + why);
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  FieldElem expr() {
    FieldElem r;
    if (eat('-')) r = -term();
    else {
      eat('+');
      r = term();
    }
    for (;;) {
      if (eat('+')) r = r + term();
      else if (eat('-')) r = r - term();
      else break;
    }
    return r.is_zero() ? FieldElem::zero(f_) : r;
  }

  FieldElem term() {
    FieldElem r = factor();
    for (;;) {
      if (eat('*')) r = r * factor();
      else if (eat('/')) {
        FieldElem d = factor();
        if (d.is_zero()) fail("division by zero");
        r = r / d;
      } else break;
    }
    return r;
  }

  long long integer() {
    bool neg = eat('-');
    std::size_t start = pos_;
    long long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_++] - '0');
      if (v > (1LL << 40)) fail("integer too large");
    }
    if (pos_ == start) fail("expected integer");
    return neg ? -v : v;
  }

  FieldElem factor() {
    FieldElem base;
    if (eat('(')) {
      base = expr();
      if (!eat(')')) fail("missing ')'");
    } else if (eat('t')) {
      if (f_.kind() != FieldKind::EqualChar) fail("'t' only valid in F_q((t))");
      base = FieldElem::pi_power(f_, 1);
    } else if (eat('p')) {
      if (f_.kind() != FieldKind::MixedChar) fail("'p' only valid in Q_p");
      base = FieldElem::pi_power(f_, 1);
    } else if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      long long n = integer();
      if (f_.kind() == FieldKind::MixedChar) {
        base = FieldElem::from_int(f_, n);
      } else {
        if (n >= f_.q()) fail("coefficient code must lie in [0, q)");
        base = n == 0 ? FieldElem::zero(f_) : FieldElem::from_residue(f_, static_cast<FiniteField::Elem>(n));
      }
    } else {
      fail("unexpected token");
    }
    if (eat('^')) {
      long long e = integer();
      if (base.is_zero()) {
        if (e <= 0) fail("zero to a non-positive power");
        return base;
      }
      base = base.pow(static_cast<int>(e));
    }
    return base;
  }

  Field f_;
  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

FieldElem FieldElem::parse(Field f, std::string_view text) { return ElemParser(f, text).run(); }

ValuationNorm valuation_and_norm(const FieldElem& x) {
  if (x.is_zero()) return {true, kInfiniteValuation, 0};
  return {false, x.valuation(), -x.valuation()};
}

// ---- ResidueRing ------------------------------------------------------------

ResidueRing::ResidueRing(Field field, int level) : field_(field), level_(level), size_(1) {
  if (level < 0) throw PreconditionError("residue level must be >= 0");
  for (int k = 0; k < level; ++k) {
    if (size_ > (std::uint64_t{1} << 56) / field.q()) throw PreconditionError("residue ring too large");
    size_ *= field.q();
  }
}

ResidueElem ResidueRing::elem(std::uint64_t index) const {
  if (index >= size_) throw PreconditionError("residue index out of range");
  return {level_, index};
}

std::vector<FiniteField::Elem> ResidueRing::digits(std::uint64_t index) const {
  std::vector<FiniteField::Elem> d(level_);
  for (int k = 0; k < level_; ++k, index /= field_.q()) d[k] = static_cast<FiniteField::Elem>(index % field_.q());
  return d;
}

std::uint64_t ResidueRing::encode(const std::vector<FiniteField::Elem>& d) const {
  std::uint64_t r = 0;
  for (int k = level_ - 1; k >= 0; --k) r = r * field_.q() + d[k];
  return r;
}

ResidueElem ResidueRing::add(ResidueElem a, ResidueElem b) const {
  if (field_.kind() == FieldKind::MixedChar) return {level_, (a.index + b.index) % size_};
  const auto& F = field_.residue();
  auto da = digits(a.index), db = digits(b.index);
  for (int k = 0; k < level_; ++k) da[k] = F.add(da[k], db[k]);
  return {level_, encode(da)};
}

ResidueElem ResidueRing::neg(ResidueElem a) const {
  if (field_.kind() == FieldKind::MixedChar) return {level_, (size_ - a.index) % size_};
  const auto& F = field_.residue();
  auto da = digits(a.index);
  for (auto& c : da) c = F.neg(c);
  return {level_, encode(da)};
}

ResidueElem ResidueRing::sub(ResidueElem a, ResidueElem b) const { return add(a, neg(b)); }

ResidueElem ResidueRing::mul(ResidueElem a, ResidueElem b) const {
  if (field_.kind() == FieldKind::MixedChar) {
    unsigned __int128 r = static_cast<unsigned __int128>(a.index) * b.index % size_;
    return {level_, static_cast<std::uint64_t>(r)};
  }
  const auto& F = field_.residue();
  auto da = digits(a.index), db = digits(b.index);
  std::vector<FiniteField::Elem> r(level_, 0);
  for (int i = 0; i < level_; ++i) {
    if (da[i] == 0) continue;
    for (int j = 0; i + j < level_; ++j) r[i + j] = F.add(r[i + j], F.mul(da[i], db[j]));
  }
  return {level_, encode(r)};
}

ResidueElem ResidueRing::shift(ResidueElem a, int e) const {
  if (e < 0) throw PreconditionError("negative shift in residue ring");
  if (e >= level_) return zero();
  std::uint64_t pe = 1;
  for (int k = 0; k < e; ++k) pe *= field_.q();
  if (field_.kind() == FieldKind::MixedChar) {
    unsigned __int128 r = static_cast<unsigned __int128>(a.index) * pe % size_;
    return {level_, static_cast<std::uint64_t>(r)};
  }
  return {level_, (a.index * pe) % size_};
}

ResidueElem ResidueRing::from_residue(FiniteField::Elem e) const {
  if (level_ == 0) return zero();
  return {level_, static_cast<std::uint64_t>(e)};
}

int ResidueRing::valuation(ResidueElem a) const {
  if (a.index == 0) return level_;
  int v = 0;
  std::uint64_t x = a.index;
  while (x % field_.q() == 0) {
    x /= field_.q();
    ++v;
  }
  return v;
}

ResidueElem ResidueRing::reduce(const FieldElem& x) const {
  if (x.is_zero()) return zero();
  if (x.valuation() < 0) throw ArithmeticError("reduction of a non-integral element (valuation " +
                                               std::to_string(x.valuation()) + ")");
  int v = x.valuation();
  if (v >= level_) return zero();
  if (auto* u = x.q_unit()) {
    BigInt m = size_;
    BigInt num = ((u->num % m) + m) % m;
    BigInt den = u->den % m;
    // inverse of den modulo p^n by extended Euclid
    BigInt r0 = m, r1 = den, s0 = 0, s1 = 1;
    while (r1 != 0) {
      BigInt qq = r0 / r1;
      BigInt t = r0 - qq * r1;
      r0 = r1;
      r1 = t;
      t = s0 - qq * s1;
      s0 = s1;
      s1 = t;
    }
    BigInt inv = ((s0 % m) + m) % m;
    BigInt r = num * inv % m;
    for (int k = 0; k < v; ++k) r = r * field_.p() % m;
    return {level_, r.convert_to<std::uint64_t>()};
  }
  const auto& F = field_.residue();
  auto* w = x.p_unit();
  int need = level_ - v;
  std::vector<FiniteField::Elem> series(need, 0);
  // num / den as a power series; den(0) == 1
  std::vector<FiniteField::Elem> rem(need, 0);
  for (int k = 0; k < need && k < static_cast<int>(w->num.size()); ++k) rem[k] = w->num[k];
  for (int k = 0; k < need; ++k) {
    auto c = rem[k];
    series[k] = c;
    if (c == 0) continue;
    for (int r = 1; r < static_cast<int>(w->den.size()) && k + r < need; ++r)
      rem[k + r] = F.sub(rem[k + r], F.mul(c, w->den[r]));
  }
  std::vector<FiniteField::Elem> d(level_, 0);
  for (int k = 0; k < need; ++k) d[v + k] = series[k];
  return {level_, encode(d)};
}

FieldElem ResidueRing::lift(ResidueElem r) const {
  if (r.index == 0) return FieldElem::zero(field_);
  if (field_.kind() == FieldKind::MixedChar) return FieldElem::from_int(field_, static_cast<long long>(r.index));
  auto d = digits(r.index);
  return FieldElem::from_poly(field_, Poly(d.begin(), d.end()));
}

std::vector<ResidueElem> ResidueRing::multiples_of_pi_power(int k) const {
  std::vector<ResidueElem> out;
  if (k >= level_) {
    out.push_back(zero());
    return out;
  }
  std::uint64_t step = 1;
  for (int e = 0; e < k; ++e) step *= field_.q();
  for (std::uint64_t idx = 0; idx < size_; idx += step) out.push_back({level_, idx});
  return out;
}

std::string ResidueRing::to_string(ResidueElem r) const {
  return lift(r).to_string() + " mod " + (field_.kind() == FieldKind::MixedChar ? std::string("p") : std::string("t")) +
         "^" + std::to_string(level_);
}

// ---- Section ----------------------------------------------------------------

Section::Section(const ResidueRing& ring) : ring_(ring) {}

Section::Section(const ResidueRing& ring, std::vector<FieldElem> table) : ring_(ring), table_(std::move(table)) {
  if (table_.size() != ring_.size()) throw PreconditionError("section table has wrong size");
  for (std::uint64_t idx = 0; idx < ring_.size(); ++idx) {
    if (!table_[idx].is_integral() || ring_.reduce(table_[idx]).index != idx)
      throw PreconditionError("section table entry " + std::to_string(idx) + " does not reduce to its class");
  }
}

FieldElem Section::operator()(ResidueElem r) const {
  if (table_.empty()) return ring_.lift(r);
  return table_.at(r.index);
}

}  // namespace sp4lab
