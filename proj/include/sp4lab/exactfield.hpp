#pragma once

// Exact arithmetic in a global model of a non-archimedean local field.
//
// Two field kinds are supported:
//   * MixedChar  - Q_p, modelled by the rationals with the p-adic valuation.
//   * EqualChar  - F_q((t)), modelled by rational functions over F_q with the
//                  t-adic valuation.
//
// Every nonzero element is stored as pi^v * u with u a unit of the valuation
// ring, so the valuation is always available in O(1).

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sp4lab {

// Configuration problems (bad field spec, unsupported q, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented hypothesis of an operation does not hold for the inputs.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact arithmetic went outside its domain (division by zero, reduction of
// a non-integral element, ...).
class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class FieldKind { MixedChar, EqualChar };

inline constexpr int kInfiniteValuation = std::numeric_limits<int>::max();

// Finite field F_q = F_p[x]/(m(x)) with a stored irreducible m. Elements are
// encoded as integers in [0, q): the base-p digits are the coefficients in
// the polynomial basis.
class FiniteField {
 public:
  using Elem = std::uint16_t;

  FiniteField(int p, int f);

  int p() const { return p_; }
  int f() const { return f_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem inv(Elem a) const;
  Elem from_int(long long n) const;
  // Absolute trace F_q -> F_p, returned as an integer in [0, p).
  int trace(Elem a) const { return trace_[a]; }

 private:
  int p_, f_, q_;
  std::vector<int> modulus_;
  std::vector<Elem> add_, mul_, neg_, inv_;
  std::vector<int> trace_;
};

// Stored irreducible for F_{p^f} (low-to-high coefficients, monic), or an
// empty vector when (p, f) has no stored entry. f = 1 returns {0, 1}.
std::vector<int> stored_irreducible(int p, int f);

bool is_prime(long long n);

namespace detail {
struct FieldData {
  FieldKind kind;
  int p;
  int f;
  int q;
  FiniteField residue;
  std::string name;
};
}  // namespace detail

// Handle to an interned field description (FieldSpec). Cheap to copy; the
// underlying data lives for the whole program.
class Field {
 public:
  Field() = default;
  explicit Field(const detail::FieldData* d) : data_(d) {}

  FieldKind kind() const { return data_->kind; }
  int p() const { return data_->p; }
  int f() const { return data_->f; }
  int q() const { return data_->q; }
  const FiniteField& residue() const { return data_->residue; }
  const std::string& name() const { return data_->name; }
  bool valid() const { return data_ != nullptr; }
  // Characteristic of F itself (0 for Q_p).
  int characteristic() const { return kind() == FieldKind::MixedChar ? 0 : p(); }
  bool is_char2() const { return characteristic() == 2; }

  const detail::FieldData* data() const { return data_; }
  friend bool operator==(Field a, Field b) { return a.data_ == b.data_; }

 private:
  const detail::FieldData* data_ = nullptr;
};

// Validates (kind, p, f) and returns the interned field. Throws ConfigError.
Field make_field(FieldKind kind, int p, int f);

// Parses "Q<p>" or "F<q>((t))" (case-sensitive). Throws ConfigError.
Field parse_field(std::string_view spec);

// Valuation v_pi(2); throws PreconditionError in characteristic 2.
int two_valuation(Field field);

// Polynomial over F_q, low-to-high coefficients, no trailing zeros.
using Poly = std::vector<FiniteField::Elem>;

using BigInt = boost::multiprecision::cpp_int;

class FieldElem {
 public:
  FieldElem() = default;  // the zero element, field adopted on first use

  static FieldElem zero(Field f);
  static FieldElem one(Field f);
  static FieldElem from_int(Field f, long long n);
  // n / d (MixedChar only; for EqualChar integers are mapped into F_p).
  static FieldElem from_rational(Field f, long long n, long long d);
  // pi^e, the uniformizer power (p^e resp. t^e).
  static FieldElem pi_power(Field f, int e);
  // sum_k coeffs[k] t^k (EqualChar only).
  static FieldElem from_poly(Field f, const Poly& coeffs);
  // Embeds a residue-field element as a constant (its Teichmuller-free
  // digit lift: the integer in [0, p) resp. the constant polynomial).
  static FieldElem from_residue(Field f, FiniteField::Elem e);
  // Parses "a/b" integers (MixedChar) or a polynomial/rational function in
  // t such as "1+t^2", "2*t^-1+1", "(1+t)/(1+t^3)" (EqualChar).
  static FieldElem parse(Field f, std::string_view text);

  Field field() const { return Field(field_); }
  bool is_zero() const { return std::holds_alternative<std::monostate>(unit_); }
  int valuation() const { return is_zero() ? kInfiniteValuation : val_; }
  bool is_integral() const { return valuation() >= 0; }
  bool is_unit() const { return !is_zero() && val_ == 0; }

  FieldElem operator-() const;
  FieldElem inverse() const;
  friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b);
  FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
  FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
  FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }
  friend bool operator==(const FieldElem& a, const FieldElem& b);
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }
  FieldElem pow(int e) const;

  std::string to_string() const;

  // Internal representation, exposed for reduction routines.
  struct QUnit {
    BigInt num;  // coprime to p
    BigInt den;  // positive, coprime to p
  };
  struct PUnit {
    Poly num;  // num(0) != 0
    Poly den;  // den(0) == 1
  };
  const detail::FieldData* field_data() const { return field_; }
  const QUnit* q_unit() const { return std::get_if<QUnit>(&unit_); }
  const PUnit* p_unit() const { return std::get_if<PUnit>(&unit_); }

 private:
  static FieldElem make_q(const detail::FieldData* f, int v, BigInt num, BigInt den);
  static FieldElem make_p(const detail::FieldData* f, int v, Poly num, Poly den);

  const detail::FieldData* field_ = nullptr;
  int val_ = 0;
  std::variant<std::monostate, QUnit, PUnit> unit_;
};

struct ValuationNorm {
  bool zero = false;
  int valuation = kInfiniteValuation;  // v(x)
  int norm_exponent = 0;               // |x| = q^{norm_exponent}, i.e. -v(x)
};
ValuationNorm valuation_and_norm(const FieldElem& x);

struct ResidueElem {
  int level = 0;
  std::uint64_t index = 0;  // integer in [0, p^n) resp. base-q digits
  friend bool operator==(const ResidueElem&, const ResidueElem&) = default;
};

// The ring O / pi^n O.
class ResidueRing {
 public:
  ResidueRing(Field field, int level);

  Field field() const { return field_; }
  int level() const { return level_; }
  std::uint64_t size() const { return size_; }

  ResidueElem elem(std::uint64_t index) const;
  ResidueElem zero() const { return {level_, 0}; }
  ResidueElem add(ResidueElem a, ResidueElem b) const;
  ResidueElem sub(ResidueElem a, ResidueElem b) const;
  ResidueElem neg(ResidueElem a) const;
  ResidueElem mul(ResidueElem a, ResidueElem b) const;
  // pi^e * a (0 when e >= level).
  ResidueElem shift(ResidueElem a, int e) const;
  ResidueElem from_residue(FiniteField::Elem e) const;
  // Valuation of a class; equals level() for the zero class.
  int valuation(ResidueElem a) const;
  bool is_unit(ResidueElem a) const { return valuation(a) == 0; }

  // x mod pi^n; requires v(x) >= 0.
  ResidueElem reduce(const FieldElem& x) const;
  // Canonical digit / truncation section sigma.
  FieldElem lift(ResidueElem r) const;
  // The elements of pi^k (O/pi^n O), in increasing index order.
  std::vector<ResidueElem> multiples_of_pi_power(int k) const;

  std::string to_string(ResidueElem r) const;

 private:
  std::vector<FiniteField::Elem> digits(std::uint64_t index) const;
  std::uint64_t encode(const std::vector<FiniteField::Elem>& d) const;

  Field field_;
  int level_;
  std::uint64_t size_;
};

// A section O/pi^n -> O. The canonical section is the digit lift; custom
// tables let verifiers confirm that results do not depend on the choice.
class Section {
 public:
  explicit Section(const ResidueRing& ring);  // canonical
  // table[r.index] must reduce back to r; throws PreconditionError otherwise.
  Section(const ResidueRing& ring, std::vector<FieldElem> table);

  FieldElem operator()(ResidueElem r) const;
  const ResidueRing& ring() const { return ring_; }
  bool canonical() const { return table_.empty(); }

 private:
  ResidueRing ring_;
  std::vector<FieldElem> table_;
};

inline FieldElem reduce_then_lift(const ResidueRing& ring, const FieldElem& x) {
  return ring.lift(ring.reduce(x));
}

}  // namespace sp4lab
