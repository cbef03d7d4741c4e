#pragma once

// Weyl-chamber walks licensed by the move lemmas, and the exponent ledger of
// the decay bounds summed along them.

#include <optional>
#include <string>
#include <vector>

#include "sp4lab/lemma_witnesses.hpp"
#include "sp4lab/report.hpp"
#include "sp4lab/sp4.hpp"

namespace sp4lab {

enum class MoveKind { ZeroOne, OneMinusOne, ZeroTwo };

std::string move_name(MoveKind m);

struct Regime {
  bool char2 = false;
  int v0 = 0;  // v(2); unused in characteristic 2
  int k = 0;   // non-spherical level, 0 for the spherical lemmas

  static Regime char_ne2(int v0, int k = 0) { return {false, v0, k}; }
  static Regime char_two(int k = 0) { return {true, 0, k}; }
  std::string to_string() const;
};

Regime parse_regime(const std::string& s);  // "char-ne-2[:v0[:k]]" or "char2[:k]"

struct Move {
  MoveKind kind;
  bool reversed = false;  // walked against the lemma direction
  CartanPair from, to;

  CartanPair source() const { return reversed ? to : from; }  // where the lemma is applied
  LemmaId lemma(const Regime& r) const;
};

struct ZigzagPath {
  CartanPair start;
  Regime regime;
  std::vector<CartanPair> cells;
  std::vector<Move> moves;
  std::size_t approach_moves = 0;  // moves before the diagonal step
  int chosen_k = -1;               // odd-i choice in characteristic != 2
  bool both_k = false;
  std::vector<std::string> notes;

  CartanPair diagonal_cell() const { return cells[approach_moves]; }
  Json to_json() const;
};

bool in_lambda(CartanPair c);
bool in_strip(CartanPair c, int a);  // 0 <= i - 2j <= a

// Why the lemma for `kind` cannot be applied at `source`; nullopt if it can.
std::optional<std::string> move_blocker(const Regime& r, MoveKind kind, CartanPair source);

// Throws PreconditionError if start is outside Lambda or no legal route exists.
ZigzagPath plan_path(CartanPair start, const Regime& r);

// Independent re-check; returns the list of problems (empty if the path is legal).
std::vector<std::string> check_path(const ZigzagPath& p);
// Whether the path stays in S_4 (resp. S_8 in characteristic 2) once it enters S_3 (resp. S_4).
bool strip_discipline(const ZigzagPath& p);

struct BoundParams {
  double alpha = 0.7;
  double h = 1;
  double beta = 0;
  double C = 0;
};

// beta < alpha/(2h) (characteristic != 2) or alpha/(4h) (characteristic 2), alpha > 0, h >= 1.
void check_admissible(const BoundParams& b, const Regime& r);
// Exponent of the lemma bound for one move applied at `source` (unit C').
double move_exponent(MoveKind kind, CartanPair source, const BoundParams& b);
// t = alpha/h - 2 beta, or alpha/(2h) - 2 beta in characteristic 2.
double decay_rate(const BoundParams& b, const Regime& r);

struct LedgerTotals {
  std::vector<double> exponents;  // one per path move
  double log_tail = 0;            // diagonal steps after the path, summed in closed form
  double log_total = 0;
  double log_closed = 0;  // 2C - t i_start
  double log_ratio = 0;   // log of the implied constant
  Json to_json() const;
};

LedgerTotals bound_ledger(const ZigzagPath& p, const BoundParams& b);

// Plans every start with i + j <= max_sum and sums the ledger for each parameter set.
VerificationReport zigzag_sweep(const Regime& r, int max_sum, const std::vector<BoundParams>& grid);

}  // namespace sp4lab
