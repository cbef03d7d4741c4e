#pragma once

// The finite-ring Fourier transform T_{O/pi^h} (x) 1_E on E-valued functions,
// the FFT-lemma inequalities, and a Rademacher type-constant estimator.
// Function spaces carry expectation norms on both source and target.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sp4lab/exactfield.hpp"
#include "sp4lab/report.hpp"

namespace sp4lab {

using Complex = std::complex<double>;

// l_p^d over C; "l<p>:<d>", e.g. l2:4 or l1.5:3.
struct SpaceSpec {
  double p = 2;
  int dim = 1;

  bool hilbert() const { return p == 2; }
  double norm(const Complex* v) const;
  std::string to_string() const;
};

SpaceSpec parse_space(std::string_view s);

// chi_b(a) for a, b in O/pi^n: exp(2 pi i ab / p^n) on Z/p^n, and
// exp(2 pi i Tr(top digit of ab) / p) on F_q[t]/t^n.
class CharacterTable {
 public:
  CharacterTable(Field field, int level);

  Field field() const { return ring_.field(); }
  int level() const { return ring_.level(); }
  std::uint64_t size() const { return ring_.size(); }
  const ResidueRing& ring() const { return ring_; }
  Complex operator()(std::uint64_t b, std::uint64_t a) const { return values_[b * size() + a]; }

  // max |sum_a chi_b(a) conj(chi_b'(a)) - |R| [b = b']|
  double orthogonality_error() const;

 private:
  ResidueRing ring_;
  std::vector<Complex> values_;
};

struct NormBracket {
  double lower = 0, upper = 0;
  std::string certificate;  // "exact" or "search"
  bool converged = true;
  Json to_json() const;
};

struct SearchStrategy {
  enum class Kind { Exact, Search };
  Kind kind = Kind::Exact;
  std::uint64_t iters = 200;
  std::uint64_t seed = 1;

  static SearchStrategy exact() { return {}; }
  static SearchStrategy search(std::uint64_t iters, std::uint64_t seed) { return {Kind::Search, iters, seed}; }
};

// Exact for p = 2 (q^{-h/2}); otherwise [search lower bound, interpolation upper bound].
NormBracket transform_norm(Field field, int h, const SpaceSpec& space, SearchStrategy strategy);

// Upper bound for ||T (x) 1|| on l_p: q^{-h min(1 - 1/p, 1/p)}.
double transform_norm_upper(int q, int h, double p);

struct FftStrategy {
  enum class Kind { Exact, Random };
  Kind kind = Kind::Exact;
  std::uint64_t trials = 0;
  std::uint64_t ascent_steps = 0;
  std::uint64_t seed = 1;

  static FftStrategy exact() { return {}; }
  static FftStrategy random(std::uint64_t trials, std::uint64_t ascent_steps, std::uint64_t seed) {
    return {Kind::Random, trials, ascent_steps, seed};
  }
};

// k = 0: the plain lemma for every nontrivial chi of the residue field.
// k > 0: the eps0 variant with C2 = (sum_{chi != 1} |f_chi|)^2.
// alpha = -log(transform_norm_upper) for the space.
VerificationReport check_fft_lemma(Field field, int h, int n, int k, FiniteField::Elem eps0, const SpaceSpec& space,
                                   FftStrategy strategy);

// C2 from f_chi = conj(chi(eps0)) - 1, and from a direct expansion of f = q delta_eps0 - q delta_0.
double c2_constant(Field field, FiniteField::Elem eps0);
double c2_direct(Field field, FiniteField::Elem eps0);

// Max |LHS_k(xi) - LHS_0(xi')| over random families, xi' the z-averaged family on O/pi^{n-2k}.
double fft_rewrite_error(Field field, int n, int k, FiniteField::Elem eps0, int dim, std::uint64_t trials,
                         std::uint64_t seed);

struct TypeStats {
  double max_ratio = 0;
  double mean_ratio = 0;
  std::uint64_t trials = 0;
  bool exact_signs = true;  // sign expectation exact (n <= 12) or Monte Carlo
  Json to_json() const;
};

// (E ||sum eps_i x_i||^2)^{1/2} / (sum ||x_i||^p)^{1/p} for real random x_i;
// the basis family e_1..e_n is included when n <= dim.
TypeStats estimate_type_constant(const SpaceSpec& space, double p, int n_vectors, std::uint64_t trials,
                                 std::uint64_t seed);

}  // namespace sp4lab
