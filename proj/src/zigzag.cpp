#include "sp4lab/zigzag.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

namespace sp4lab {

namespace {

struct Step {
  MoveKind kind;
  bool reversed;
};

CartanPair delta(MoveKind k) {
  switch (k) {
    case MoveKind::ZeroOne: return {0, 1};
    case MoveKind::OneMinusOne: return {1, -1};
    case MoveKind::ZeroTwo: return {0, 2};
  }
  return {0, 0};
}

CartanPair apply(CartanPair c, Step s) {
  CartanPair d = delta(s.kind);
  return s.reversed ? CartanPair{c.i - d.i, c.j - d.j} : CartanPair{c.i + d.i, c.j + d.j};
}

std::string cell(CartanPair c) { return c.to_string(); }

std::vector<MoveKind> kinds(const Regime& r) {
  if (r.char2) return {MoveKind::ZeroTwo, MoveKind::OneMinusOne};
  return {MoveKind::ZeroOne, MoveKind::OneMinusOne};
}

// The diagonal step (2j, j) -> (2j+2, j+1), resp. (2j+4, j+2) in characteristic 2.
std::vector<Step> diagonal_template(const Regime& r) {
  const MoveKind a = MoveKind::OneMinusOne;
  if (r.char2) {
    const MoveKind z = MoveKind::ZeroTwo;
    return {{a, false}, {a, false}, {z, false}, {a, false}, {a, false}, {z, false}, {z, false}};
  }
  const MoveKind z = MoveKind::ZeroOne;
  return {{a, false}, {z, false}, {a, false}, {z, false}, {z, false}};
}

bool on_diagonal(CartanPair c) { return c.i == 2 * c.j; }

class Planner {
 public:
  Planner(CartanPair start, const Regime& r) {
    path_.start = start;
    path_.regime = r;
    path_.cells = {start};
  }

  ZigzagPath& path() { return path_; }
  CartanPair here() const { return path_.cells.back(); }

  std::optional<std::string> blocker(Step s) const {
    CartanPair to = apply(here(), s);
    if (!in_lambda(to)) return "move " + move_name(s.kind) + " from " + cell(here()) + " leaves Lambda";
    return move_blocker(path_.regime, s.kind, s.reversed ? to : here());
  }

  void push(Step s) {
    CartanPair to = apply(here(), s);
    path_.moves.push_back({s.kind, s.reversed, here(), to});
    path_.cells.push_back(to);
  }

  // Runs a template; on the first blocked move, detours to `target` by search.
  void run(const std::vector<Step>& steps, CartanPair target, const std::string& phase) {
    for (const auto& s : steps) {
      if (auto why = blocker(s)) {
        path_.notes.push_back(phase + " template blocked (" + *why + "); searched detour to " + cell(target));
        detour(target);
        return;
      }
      push(s);
    }
  }

  // Shortest legal route to `target`; failing that, to the nearest diagonal cell with i >= target.i.
  void detour(CartanPair target) {
    if (search(target, false)) return;
    if (search(target, true)) {
      path_.notes.push_back("no route to " + cell(target) + "; continued from diagonal cell " + cell(here()));
      return;
    }
    std::string why;
    for (MoveKind k : kinds(path_.regime))
      if (auto b = move_blocker(path_.regime, k, here())) why += (why.empty() ? "" : "; ") + *b;
    throw PreconditionError("no legal route from " + cell(here()) + " to the diagonal" + (why.empty() ? "" : ": " + why));
  }

  bool search(CartanPair target, bool any_diagonal) {
    const Regime& r = path_.regime;
    const int max_i = std::max(here().i, target.i) + 12;
    auto goal = [&](CartanPair c) { return any_diagonal ? on_diagonal(c) && c.i >= target.i : c == target; };
    std::map<CartanPair, std::pair<CartanPair, Step>> parent;
    std::deque<CartanPair> queue = {here()};
    parent.emplace(here(), std::make_pair(here(), Step{MoveKind::ZeroOne, false}));
    std::optional<CartanPair> found;
    if (goal(here())) found = here();
    while (!queue.empty() && !found) {
      CartanPair c = queue.front();
      queue.pop_front();
      for (MoveKind k : kinds(r))
        for (bool rev : {false, true}) {
          Step s{k, rev};
          CartanPair to = apply(c, s);
          if (!in_lambda(to) || to.i > max_i || parent.count(to)) continue;
          if (move_blocker(r, k, rev ? to : c)) continue;
          parent.emplace(to, std::make_pair(c, s));
          if (!found && goal(to)) found = to;
          queue.push_back(to);
        }
    }
    if (!found) return false;
    std::vector<Step> route;
    for (CartanPair c = *found; !(c == here()); c = parent.at(c).first) route.push_back(parent.at(c).second);
    std::reverse(route.begin(), route.end());
    for (const auto& s : route) push(s);
    return true;
  }

 private:
  ZigzagPath path_;
};

void plan_char_ne2(Planner& P) {
  const MoveKind up = MoveKind::ZeroOne, side = MoveKind::OneMinusOne;
  CartanPair c = P.here();
  // Above the line i = 2j: (1,-1) moves into S_3.
  if (2 * c.j > c.i) {
    int n = (2 * c.j - c.i + 2) / 3;
    P.run(std::vector<Step>(n, Step{side, false}), {c.i + n, c.j - n}, "approach into S_3");
  }
  c = P.here();
  // Below it: (0,1) moves up to (i, floor(i/2)).
  if (c.j < c.i / 2) P.run(std::vector<Step>(c.i / 2 - c.j, Step{up, false}), {c.i, c.i / 2}, "approach into S_2");
  c = P.here();
  if (c.i % 2 == 1) {
    // (i,j) -> (i,j+k) -> (i+1,j+k-1) -> (i+1,(i+1)/2), smallest legal k.
    std::vector<Step> k0 = {{side, false}, {up, false}, {up, false}};
    std::vector<Step> k1 = {{up, false}, {side, false}, {up, false}};
    auto legal = [&](const std::vector<Step>& steps) {
      Planner trial(P.here(), P.path().regime);
      for (const auto& s : steps) {
        if (trial.blocker(s)) return false;
        trial.push(s);
      }
      return true;
    };
    bool l0 = legal(k0), l1 = legal(k1);
    auto& path = P.path();
    path.both_k = l0 && l1;
    path.chosen_k = l0 ? 0 : (l1 ? 1 : -1);
    CartanPair target{c.i + 1, (c.i + 1) / 2};
    if (l0)
      P.run(k0, target, "odd step");
    else if (l1)
      P.run(k1, target, "odd step");
    else {
      path.notes.push_back("odd step: neither k = 0 nor k = 1 is legal at " + cell(c) + "; searched detour");
      P.detour(target);
    }
  }
}

void plan_char2(Planner& P) {
  const MoveKind up = MoveKind::ZeroTwo, side = MoveKind::OneMinusOne;
  CartanPair c = P.here();
  if (2 * c.j > c.i) {
    int n = (2 * c.j - c.i + 2) / 3;
    P.run(std::vector<Step>(n, Step{side, false}), {c.i + n, c.j - n}, "approach into S_3");
  }
  c = P.here();
  if (c.i - 2 * c.j >= 4) {
    int n = (c.i - 2 * c.j) / 4;
    P.run(std::vector<Step>(n, Step{up, false}), {c.i, c.j + 2 * n}, "approach into S_4");
  }
  c = P.here();
  const int j = c.j;
  switch (c.i - 2 * j) {
    case 1:  // (2j+1,j) -> (2j+2,j-1) -> (2j+2,j+1)
      P.run({{side, false}, {up, false}}, {2 * j + 2, j + 1}, "case i-2j=1");
      break;
    case 2:  // (2j+2,j) -> (2j+4,j-2) -> (2j+4,j+2)
      P.run({{side, false}, {side, false}, {up, false}, {up, false}}, {2 * j + 4, j + 2}, "case i-2j=2");
      break;
    case 3:  // (2j+3,j) -> (2j+2,j+1)
      P.run({{side, true}}, {2 * j + 2, j + 1}, "case i-2j=3");
      break;
    default: break;
  }
}

double logsumexp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

std::string move_name(MoveKind m) {
  switch (m) {
    case MoveKind::ZeroOne: return "(0,1)";
    case MoveKind::OneMinusOne: return "(1,-1)";
    case MoveKind::ZeroTwo: return "(0,2)";
  }
  return "?";
}

std::string Regime::to_string() const {
  if (char2) return "char2:" + std::to_string(k);
  return "char-ne-2:" + std::to_string(v0) + ":" + std::to_string(k);
}

Regime parse_regime(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  auto num = [&](std::size_t idx) {
    if (idx >= parts.size()) return 0;
    try {
      std::size_t used = 0;
      int v = std::stoi(parts[idx], &used);
      if (used != parts[idx].size() || v < 0) throw ConfigError("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad regime '" + s + "'");
    }
  };
  if (parts.empty()) throw ConfigError("empty regime");
  if (parts[0] == "char2" && parts.size() <= 2) return Regime::char_two(num(1));
  if (parts[0] == "char-ne-2" && parts.size() <= 3) return Regime::char_ne2(num(1), num(2));
  throw ConfigError("bad regime '" + s + "' (expected char-ne-2[:v0[:k]] or char2[:k])");
}

LemmaId Move::lemma(const Regime& r) const {
  switch (kind) {
    case MoveKind::ZeroOne: return r.k ? LemmaId::NONSPHER01 : LemmaId::SPHER01;
    case MoveKind::OneMinusOne: return r.k ? LemmaId::NONSPHER1M1 : LemmaId::SPHER1M1;
    case MoveKind::ZeroTwo: return LemmaId::CHAR2_02;
  }
  return LemmaId::SPHER01;
}

bool in_lambda(CartanPair c) { return c.j >= 0 && c.i >= c.j; }
bool in_strip(CartanPair c, int a) { return in_lambda(c) && c.i - 2 * c.j >= 0 && c.i - 2 * c.j <= a; }

std::optional<std::string> move_blocker(const Regime& r, MoveKind kind, CartanPair s) {
  const std::string at = " at " + s.to_string();
  switch (kind) {
    case MoveKind::ZeroOne: {
      if (r.char2) return "(0,1) needs characteristic != 2";
      if (!in_lambda(s)) return "(0,1)" + at + " starts outside Lambda";
      int need = r.k ? 2 * r.k + r.v0 : r.v0 + 1;
      if (s.i - s.j < need) return "(0,1)" + at + " needs i-j >= " + std::to_string(need);
      return std::nullopt;
    }
    case MoveKind::OneMinusOne: {
      if (s.j < 0 || s.i < s.j - 1) return "(1,-1)" + at + " starts outside Lambda (i = j-1 admitted)";
      int need = r.k ? 2 * r.k + 2 : 2;
      if (s.j < need) return "(1,-1)" + at + " needs j >= " + std::to_string(need);
      return std::nullopt;
    }
    case MoveKind::ZeroTwo: {
      if (!r.char2) return "(0,2) needs characteristic 2";
      if (!in_lambda(s)) return "(0,2)" + at + " starts outside Lambda";
      int need = r.k ? 4 * r.k + 2 : 2;
      if (s.i - s.j < need) return "(0,2)" + at + " needs i-j >= " + std::to_string(need);
      return std::nullopt;
    }
  }
  return "unknown move";
}

ZigzagPath plan_path(CartanPair start, const Regime& r) {
  if (!in_lambda(start)) throw PreconditionError("start " + start.to_string() + " is not in Lambda");
  if (r.v0 < 0 || r.k < 0) throw ConfigError("regime parameters must be >= 0");
  Planner P(start, r);
  if (r.char2)
    plan_char2(P);
  else
    plan_char_ne2(P);
  CartanPair d = P.here();
  if (!on_diagonal(d)) P.detour({2 * ((d.i + 1) / 2), (d.i + 1) / 2});
  d = P.here();
  P.path().approach_moves = P.path().moves.size();
  CartanPair next = r.char2 ? CartanPair{d.i + 4, d.j + 2} : CartanPair{d.i + 2, d.j + 1};
  P.run(diagonal_template(r), next, "diagonal step");
  return P.path();
}

std::vector<std::string> check_path(const ZigzagPath& p) {
  std::vector<std::string> problems;
  const Regime& r = p.regime;
  if (p.cells.size() != p.moves.size() + 1) problems.push_back("cell and move counts disagree");
  if (p.cells.empty() || !(p.cells.front() == p.start)) problems.push_back("path does not begin at its start");
  for (const auto& c : p.cells)
    if (c.j < 0 || c.i < c.j) problems.push_back("cell " + c.to_string() + " outside Lambda");
  for (std::size_t t = 0; t < p.moves.size() && t + 1 < p.cells.size(); ++t) {
    const Move& m = p.moves[t];
    if (!(m.from == p.cells[t]) || !(m.to == p.cells[t + 1])) problems.push_back("move " + std::to_string(t) + " misplaced");
    int di = m.to.i - m.from.i, dj = m.to.j - m.from.j;
    if (m.reversed) di = -di, dj = -dj;
    CartanPair s = m.source();
    bool ok = false;
    switch (m.kind) {
      case MoveKind::ZeroOne:
        ok = di == 0 && dj == 1 && !r.char2 && s.i - s.j >= (r.k ? 2 * r.k + r.v0 : r.v0 + 1);
        break;
      case MoveKind::OneMinusOne:
        ok = di == 1 && dj == -1 && s.j >= (r.k ? 2 * r.k + 2 : 2) && s.i >= s.j - 1;
        break;
      case MoveKind::ZeroTwo:
        ok = di == 0 && dj == 2 && r.char2 && s.i - s.j >= (r.k ? 4 * r.k + 2 : 2);
        break;
    }
    if (!ok) problems.push_back("move " + std::to_string(t) + " " + move_name(m.kind) + " illegal at " + s.to_string());
  }
  if (r.char2)
    for (const auto& c : p.cells)
      if ((c.i + c.j) % 2 != (p.start.i + p.start.j) % 2) problems.push_back("parity of i+j changes at " + c.to_string());
  if (p.approach_moves >= p.cells.size() || p.cells[p.approach_moves].i != 2 * p.cells[p.approach_moves].j)
    problems.push_back("approach does not end on the diagonal");
  if (p.cells.back().i != 2 * p.cells.back().j) problems.push_back("path does not end on the diagonal");
  return problems;
}

bool strip_discipline(const ZigzagPath& p) {
  const int entry = p.regime.char2 ? 4 : 3, stay = p.regime.char2 ? 8 : 4;
  bool inside = false;
  for (const auto& c : p.cells) {
    if (!inside && in_strip(c, entry)) inside = true;
    if (inside && !in_strip(c, stay)) return false;
  }
  return inside;
}

Json ZigzagPath::to_json() const {
  Json cs = Json::array(), ms = Json::array();
  for (const auto& c : cells) cs.push_back({c.i, c.j});
  for (const auto& m : moves)
    ms.push_back({{"move", move_name(m.kind)},
                  {"reversed", m.reversed},
                  {"from", {m.from.i, m.from.j}},
                  {"to", {m.to.i, m.to.j}},
                  {"lemma", lemma_name(m.lemma(regime))}});
  Json j = {{"start", {start.i, start.j}}, {"regime", regime.to_string()}, {"cells", cs}, {"moves", ms},
            {"approach_moves", approach_moves}, {"notes", notes}};
  if (!regime.char2 && chosen_k >= 0) {
    j["k"] = chosen_k;
    j["both_k_legal"] = both_k;
  }
  return j;
}

// ---- bound ledger ------------------------------------------------------------------

void check_admissible(const BoundParams& b, const Regime& r) {
  if (!(b.alpha > 0)) throw ConfigError("alpha must be > 0");
  if (!(b.h >= 1)) throw ConfigError("h must be >= 1");
  if (!(b.beta >= 0)) throw ConfigError("beta must be >= 0");
  if (!(b.C >= 0)) throw ConfigError("C must be >= 0");
  double cap = r.char2 ? b.alpha / (4 * b.h) : b.alpha / (2 * b.h);
  if (!(b.beta < cap))
    throw ConfigError(std::string("beta must be < alpha/(") + (r.char2 ? "4" : "2") + "h) = " + std::to_string(cap));
}

double move_exponent(MoveKind kind, CartanPair s, const BoundParams& b) {
  const double a = b.alpha / b.h;
  switch (kind) {
    case MoveKind::ZeroOne: return 2 * b.C - (2 * a - 2 * b.beta) * s.i + 2 * a * s.j;
    case MoveKind::OneMinusOne: return 2 * b.C + b.beta * s.i - (2 * a - b.beta) * s.j;
    case MoveKind::ZeroTwo: return 2 * b.C - (a - 2 * b.beta) * s.i + a * s.j;
  }
  return 0;
}

double decay_rate(const BoundParams& b, const Regime& r) {
  return r.char2 ? b.alpha / (2 * b.h) - 2 * b.beta : b.alpha / b.h - 2 * b.beta;
}

Json LedgerTotals::to_json() const {
  return {{"exponents", exponents}, {"log_tail", log_tail}, {"log_total", log_total}, {"log_closed", log_closed},
          {"log_constant", log_ratio}};
}

LedgerTotals bound_ledger(const ZigzagPath& p, const BoundParams& b) {
  check_admissible(b, p.regime);
  LedgerTotals out;
  for (const auto& m : p.moves) out.exponents.push_back(move_exponent(m.kind, m.source(), b));

  // Diagonal steps after the path: sum over m >= 0 of the template at j = J + m delta.
  const CartanPair end = p.cells.back();
  const int dj = p.regime.char2 ? 2 : 1;
  std::vector<double> tail;
  auto walk = [&](int j, std::vector<double>& ex) {
    CartanPair c{2 * j, j};
    for (const auto& s : diagonal_template(p.regime)) {
      CartanPair to = apply(c, s);
      ex.push_back(move_exponent(s.kind, s.reversed ? to : c, b));
      c = to;
    }
  };
  std::vector<double> e0, e1;
  walk(end.j, e0);
  walk(end.j + dj, e1);
  for (std::size_t t = 0; t < e0.size(); ++t) {
    double slope = e1[t] - e0[t];
    if (!(slope < 0)) throw std::logic_error("diagonal tail does not decay");
    tail.push_back(e0[t] - std::log1p(-std::exp(slope)));
  }
  out.log_tail = logsumexp(tail);
  std::vector<double> all = out.exponents;
  all.push_back(out.log_tail);
  out.log_total = logsumexp(all);
  out.log_closed = 2 * b.C - decay_rate(b, p.regime) * p.start.i;
  out.log_ratio = out.log_total - out.log_closed;
  return out;
}

VerificationReport zigzag_sweep(const Regime& r, int max_sum, const std::vector<BoundParams>& grid) {
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& b : grid) check_admissible(b, r);
  VerificationReport rep;
  rep.task = "zigzag";
  Json g = Json::array();
  for (const auto& b : grid)
    g.push_back({{"alpha", b.alpha}, {"h", b.h}, {"beta", b.beta}, {"C", b.C}, {"t", decay_rate(b, r)}});
  rep.params = {{"regime", r.to_string()}, {"max_sum", max_sum}, {"grid", g}};

  auto key = [](const BoundParams& b) {
    std::ostringstream os;
    os << "alpha=" << b.alpha << " h=" << b.h << " beta=" << b.beta;
    return os.str();
  };
  // Canonical families: starts (i, 0) and diagonal starts (2j, j).
  std::vector<std::map<int, double>> row0(grid.size()), diag(grid.size());
  std::vector<std::string> blocked;

  for (int i = 0; i <= max_sum; ++i)
    for (int j = 0; j <= i && i + j <= max_sum; ++j) {
      ++rep.cases_total;
      ZigzagPath p;
      try {
        p = plan_path({i, j}, r);
      } catch (const PreconditionError& e) {
        rep.tallies["blocked"]++;
        rep.margin_max("max_blocked_start_sum", i + j);
        if (blocked.size() < 12) blocked.push_back(CartanPair{i, j}.to_string() + ": " + e.what());
        continue;
      }
      ++rep.cases_run;
      for (const auto& prob : check_path(p)) rep.fail({{"start", {i, j}}}, "path legality", prob, "legal path");
      if (!strip_discipline(p)) rep.tallies["outside_strip"]++;
      if (!p.notes.empty()) rep.tallies["detours"]++;
      if (p.both_k) rep.tallies["both_k_legal"]++;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        auto led = bound_ledger(p, grid[g]);
        if (!std::isfinite(led.log_ratio)) rep.fail({{"start", {i, j}}}, "finite ledger constant", "non-finite", "finite");
        rep.margin_max("max_log_constant " + key(grid[g]), led.log_ratio);
        if (j == 0) row0[g][i] = led.log_total;
        if (i == 2 * j) diag[g][i] = led.log_total;
      }
    }
  for (auto& b : blocked) rep.notes.push_back("blocked start " + b);

  // Totals decrease along each canonical family.
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (auto* fam : {&row0[g], &diag[g]}) {
      // In characteristic 2 the two classes of i + j mod 2 are compared separately.
      std::map<int, std::pair<int, double>> prev;
      for (const auto& [i, v] : *fam) {
        int cls = r.char2 ? (fam == &row0[g] ? i : i + i / 2) % 2 : 0;
        auto it = prev.find(cls);
        if (it != prev.end() && v > it->second.second + 1e-9)
          rep.fail({{"start_i", i}, {"params", key(grid[g])}}, "ledger total decreasing in i",
                   std::to_string(v) + " after " + std::to_string(it->second.second) + " at i=" +
                       std::to_string(it->second.first),
                   "non-increasing");
        prev[cls] = {i, v};
      }
    }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sp4lab
