#include "sp4lab/fourier.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace sp4lab {

namespace {

constexpr std::uint64_t kMaxTable = 1024;
constexpr std::uint64_t kMaxExactColumns = 1024;
constexpr double kSlack = 1e-8;

Complex unit_phase(double turns) { return std::polar(1.0, 2 * std::numbers::pi * turns); }

// A linear map from families indexed by cols to families indexed by rows;
// rows and cols carry uniform probability weights.
struct SparseMap {
  std::size_t rows = 0, cols = 0;
  std::vector<std::vector<std::pair<std::size_t, Complex>>> entries;
  std::string label;

  Eigen::MatrixXcd dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (const auto& [c, v] : entries[r]) m(r, c) += v;
    return m;
  }

  // E_r ||(L xi)_r||^2 / E_c ||xi_c||^2
  double ratio(const std::vector<Complex>& xi, const SpaceSpec& space) const {
    const int d = space.dim;
    std::vector<Complex> acc(d);
    double lhs = 0, rhs = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      std::fill(acc.begin(), acc.end(), Complex{});
      for (const auto& [c, v] : entries[r])
        for (int i = 0; i < d; ++i) acc[i] += v * xi[c * d + i];
      double nr = space.norm(acc.data());
      lhs += nr * nr;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double nc = space.norm(&xi[c * d]);
      rhs += nc * nc;
    }
    if (rhs == 0) return 0;
    return (lhs / rows) / (rhs / cols);
  }
};

double top_singular_squared(const SparseMap& m, Eigen::VectorXcd* vec = nullptr) {
  Eigen::MatrixXcd L = m.dense();
  Eigen::MatrixXcd G = L.adjoint() * L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, vec ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  if (vec) *vec = es.eigenvectors().col(G.rows() - 1);
  return es.eigenvalues().maxCoeff() * double(m.cols) / double(m.rows);
}

std::vector<Complex> gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

// Approximate top right singular vector of L by power iteration on L^* L.
std::vector<Complex> power_top_vector(const SparseMap& m, std::mt19937_64& rng, int iters = 60) {
  auto v = gaussian(rng, m.cols);
  std::vector<Complex> w(m.rows), u(m.cols);
  for (int it = 0; it < iters; ++it) {
    std::fill(w.begin(), w.end(), Complex{});
    std::fill(u.begin(), u.end(), Complex{});
    for (std::size_t r = 0; r < m.rows; ++r)
      for (const auto& [c, x] : m.entries[r]) w[r] += x * v[c];
    for (std::size_t r = 0; r < m.rows; ++r)
      for (const auto& [c, x] : m.entries[r]) u[c] += std::conj(x) * w[r];
    double nu = 0;
    for (auto x : u) nu += std::norm(x);
    if (nu == 0) break;
    nu = std::sqrt(nu);
    for (std::size_t c = 0; c < m.cols; ++c) v[c] = u[c] / nu;
  }
  return v;
}

// Random-coordinate hill climbing on a scale-invariant objective.
template <class F>
double ascend(std::vector<Complex>& x, F objective, std::uint64_t steps, std::mt19937_64& rng, bool& converged) {
  double best = objective(x);
  double scale = 0;
  for (const auto& v : x) scale += std::norm(v);
  scale = std::sqrt(scale / std::max<std::size_t>(1, x.size()));
  if (scale == 0) scale = 1;
  double step = 0.5;
  std::uint64_t accepted = 0;
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::normal_distribution<double> g;
  for (std::uint64_t s = 0; s < steps && step > 1e-6; ++s) {
    std::size_t i = pick(rng);
    Complex old = x[i];
    x[i] += step * scale * Complex{g(rng), g(rng)};
    double val = objective(x);
    if (val > best) {
      best = val;
      ++accepted;
    } else {
      x[i] = old;
    }
    if ((s + 1) % 64 == 0) {
      if (accepted == 0) step /= 2;
      accepted = 0;
    }
  }
  converged = step <= 1e-6;
  return best;
}

// Characters of the residue field: chi_c(e) = exp(2 pi i Tr(c e) / p).
Complex residue_character(Field f, FiniteField::Elem c, FiniteField::Elem e) {
  return unit_phase(double(f.residue().trace(f.residue().mul(c, e))) / f.p());
}

void check_levels(int h, int n, int k) {
  if (h < 1) throw PreconditionError("h must be >= 1");
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (k < 0 || k > n / 2) throw PreconditionError("k must lie in {0, ..., floor(n/2)}");
  if (k > 0 && n - 2 * k < 1)
    throw PreconditionError("n - 2k must be >= 1: otherwise pi^{n-1} eps0 lies outside pi^{2k} O/pi^n");
}

// Rows (a, b) in pi^k R x pi^{2k} R, cols (x, y) in pi^k R x pi^{2k} R,
// (L xi)_{a,b} = E_x xi_{x, ax+b+pi^{n-1} eps0} - E_x xi_{x, ax+b}.
SparseMap eps0_map(Field f, int n, int k, FiniteField::Elem eps0) {
  ResidueRing R(f, n);
  auto X = R.multiples_of_pi_power(k);
  auto Y = R.multiples_of_pi_power(2 * k);
  std::vector<long> ypos(R.size(), -1);
  for (std::size_t t = 0; t < Y.size(); ++t) ypos[Y[t].index] = static_cast<long>(t);
  ResidueElem shift = R.shift(R.from_residue(eps0), n - 1);
  SparseMap m;
  m.rows = X.size() * Y.size();
  m.cols = X.size() * Y.size();
  m.entries.resize(m.rows);
  m.label = "eps0=" + std::to_string(eps0);
  const double w = 1.0 / double(X.size());
  for (std::size_t ai = 0; ai < X.size(); ++ai)
    for (std::size_t bi = 0; bi < Y.size(); ++bi) {
      auto& row = m.entries[ai * Y.size() + bi];
      for (std::size_t xi = 0; xi < X.size(); ++xi) {
        ResidueElem base = R.add(R.mul(X[ai], X[xi]), Y[bi]);
        long y0 = ypos[base.index], y1 = ypos[R.add(base, shift).index];
        if (y0 < 0 || y1 < 0) throw std::logic_error("line left pi^{2k} R");
        row.push_back({xi * Y.size() + y1, w});
        row.push_back({xi * Y.size() + y0, -w});
      }
    }
  return m;
}

// (L xi)_{a,b} = E_{x, eps} chi(eps) xi_{x, ax+b+pi^{n-1} eps}.
SparseMap plain_map(Field f, int n, FiniteField::Elem c) {
  ResidueRing R(f, n);
  const std::size_t N = R.size();
  const int q = f.q();
  SparseMap m;
  m.rows = m.cols = N * N;
  m.entries.resize(m.rows);
  m.label = "chi=" + std::to_string(c);
  std::vector<ResidueElem> shifts;
  std::vector<Complex> chis;
  for (int e = 0; e < q; ++e) {
    shifts.push_back(R.shift(R.from_residue(static_cast<FiniteField::Elem>(e)), n - 1));
    chis.push_back(residue_character(f, c, static_cast<FiniteField::Elem>(e)));
  }
  const double w = 1.0 / (double(N) * q);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      auto& row = m.entries[a * N + b];
      for (std::size_t x = 0; x < N; ++x) {
        ResidueElem base = R.add(R.mul(R.elem(a), R.elem(x)), R.elem(b));
        for (int e = 0; e < q; ++e) row.push_back({x * N + R.add(base, shifts[e]).index, chis[e] * w});
      }
    }
  return m;
}

}  // namespace

// ---- spaces ------------------------------------------------------------------

double SpaceSpec::norm(const Complex* v) const {
  double s = 0;
  if (p == 2) {
    for (int i = 0; i < dim; ++i) s += std::norm(v[i]);
    return std::sqrt(s);
  }
  for (int i = 0; i < dim; ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1 / p);
}

std::string SpaceSpec::to_string() const {
  std::ostringstream os;
  os << "l" << p << ":" << dim;
  return os.str();
}

SpaceSpec parse_space(std::string_view s) {
  auto bad = [&]() { return ConfigError("bad space spec '" + std::string(s) + "' (expected l<p>:<d>)"); };
  if (s.size() < 4 || s[0] != 'l') throw bad();
  auto colon = s.find(':');
  if (colon == std::string_view::npos) throw bad();
  SpaceSpec sp;
  auto r1 = std::from_chars(s.data() + 1, s.data() + colon, sp.p);
  auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), sp.dim);
  if (r1.ec != std::errc() || r1.ptr != s.data() + colon || r2.ec != std::errc() || r2.ptr != s.data() + s.size())
    throw bad();
  if (!std::isfinite(sp.p) || sp.p < 1) throw ConfigError("space exponent must be >= 1");
  if (sp.dim < 1 || sp.dim > 4096) throw ConfigError("space dimension must lie in [1, 4096]");
  return sp;
}

// ---- characters ------------------------------------------------------------------

CharacterTable::CharacterTable(Field field, int level) : ring_(field, level) {
  if (level < 1) throw PreconditionError("character level must be >= 1");
  const std::uint64_t N = ring_.size();
  if (N > kMaxTable) throw PreconditionError("character table over 1024 elements");
  values_.resize(N * N);
  std::uint64_t top = N / field.q();
  for (std::uint64_t b = 0; b < N; ++b)
    for (std::uint64_t a = 0; a < N; ++a) {
      std::uint64_t ab = ring_.mul(ring_.elem(a), ring_.elem(b)).index;
      double turns = field.kind() == FieldKind::MixedChar
                         ? double(ab) / double(N)
                         : double(field.residue().trace(static_cast<FiniteField::Elem>(ab / top))) / field.p();
      values_[b * N + a] = unit_phase(turns);
    }
}

double CharacterTable::orthogonality_error() const {
  const std::uint64_t N = size();
  double worst = 0;
  for (std::uint64_t b = 0; b < N; ++b)
    for (std::uint64_t c = 0; c < N; ++c) {
      Complex s{};
      for (std::uint64_t a = 0; a < N; ++a) s += (*this)(b, a) * std::conj((*this)(c, a));
      worst = std::max(worst, std::abs(s - Complex(b == c ? double(N) : 0.0)));
    }
  return worst;
}

// ---- transform norm ------------------------------------------------------------------

Json NormBracket::to_json() const {
  return {{"lower", lower}, {"upper", upper}, {"certificate", certificate}, {"converged", converged}};
}

double transform_norm_upper(int q, int h, double p) {
  if (p < 1) throw ConfigError("space exponent must be >= 1");
  return std::pow(double(q), -h * std::min(1 - 1 / p, 1 / p));
}

NormBracket transform_norm(Field field, int h, const SpaceSpec& space, SearchStrategy strategy) {
  CharacterTable T(field, h);
  const std::size_t N = T.size();
  const int d = space.dim;
  NormBracket out;
  out.upper = transform_norm_upper(field.q(), h, space.p);

  if (strategy.kind == SearchStrategy::Kind::Exact) {
    if (!space.hilbert()) throw ConfigError("exact transform norm needs a Hilbert space (p = 2)");
    if (N * d > 512) throw PreconditionError("exact transform norm limited to |R| d <= 512");
    Eigen::MatrixXcd M(N * d, N * d);
    M.setZero();
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t a = 0; a < N; ++a)
        for (int i = 0; i < d; ++i) M(b * d + i, a * d + i) = T(b, a) / double(N);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    out.lower = out.upper = svd.singularValues()(0);
    out.certificate = "exact";
    return out;
  }

  // ||T f|| / ||f|| with expectation norms on both sides (the weights cancel).
  auto objective = [&](const std::vector<Complex>& f) {
    std::vector<Complex> acc(d);
    double num = 0, den = 0;
    for (std::size_t b = 0; b < N; ++b) {
      std::fill(acc.begin(), acc.end(), Complex{});
      for (std::size_t a = 0; a < N; ++a)
        for (int i = 0; i < d; ++i) acc[i] += T(b, a) * f[a * d + i] / double(N);
      double nb = space.norm(acc.data());
      num += nb * nb;
    }
    for (std::size_t a = 0; a < N; ++a) {
      double na = space.norm(&f[a * d]);
      den += na * na;
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
  };

  std::vector<std::vector<Complex>> starts;
  std::vector<Complex> spread(N * d), spike(N * d);
  for (std::size_t a = 0; a < N; ++a) spread[a * d + a % d] = 1;
  spike[0] = 1;
  starts.push_back(spread);
  starts.push_back(spike);
  std::mt19937_64 rng(strategy.seed);
  for (std::uint64_t s = 0; s < strategy.iters / 2; ++s) starts.push_back(gaussian(rng, N * d));

  std::vector<Complex> best;
  double best_val = -1;
  for (auto& s : starts) {
    double v = objective(s);
    if (v > best_val) best_val = v, best = s;
  }
  bool converged = true;
  best_val = std::max(best_val, ascend(best, objective, strategy.iters - strategy.iters / 2, rng, converged));
  out.lower = best_val;
  out.converged = converged;
  out.certificate = "search";
  return out;
}

// ---- FFT lemma ------------------------------------------------------------------

double c2_constant(Field field, FiniteField::Elem eps0) {
  const int q = field.q();
  if (eps0 == 0 || eps0 >= q) throw PreconditionError("eps0 must be a nonzero residue");
  double s = 0;
  for (int c = 1; c < q; ++c) s += std::abs(std::conj(residue_character(field, static_cast<FiniteField::Elem>(c), eps0)) - 1.0);
  return s * s;
}

double c2_direct(Field field, FiniteField::Elem eps0) {
  const int q = field.q();
  if (eps0 == 0 || eps0 >= q) throw PreconditionError("eps0 must be a nonzero residue");
  std::vector<double> f(q, 0.0);
  f[eps0] = q;
  f[0] = -q;
  std::vector<Complex> coef(q);
  for (int c = 0; c < q; ++c)
    for (int e = 0; e < q; ++e)
      coef[c] += f[e] * std::conj(residue_character(field, static_cast<FiniteField::Elem>(c), static_cast<FiniteField::Elem>(e))) / double(q);
  for (int e = 0; e < q; ++e) {
    Complex back{};
    for (int c = 0; c < q; ++c) back += coef[c] * residue_character(field, static_cast<FiniteField::Elem>(c), static_cast<FiniteField::Elem>(e));
    if (std::abs(back - f[e]) > 1e-9) throw std::logic_error("character expansion of f does not reconstruct f");
  }
  if (std::abs(coef[0]) > 1e-9) throw std::logic_error("f has a trivial-character component");
  double s = 0;
  for (int c = 1; c < q; ++c) s += std::abs(coef[c]);
  return s * s;
}

VerificationReport check_fft_lemma(Field field, int h, int n, int k, FiniteField::Elem eps0, const SpaceSpec& space,
                                   FftStrategy strategy) {
  auto t0 = std::chrono::steady_clock::now();
  check_levels(h, n, k);
  const int q = field.q();
  if (k > 0 && (eps0 == 0 || eps0 >= q)) throw PreconditionError("eps0 must be a nonzero residue");

  const double alpha = -std::log(transform_norm_upper(q, h, space.p));
  double coefficient = std::pow(double(q), 2 * h - 2);
  std::vector<SparseMap> maps;
  if (k == 0) {
    coefficient *= std::exp(-2 * (double(n) / h - 1) * alpha);
    for (int c = 1; c < q; ++c) maps.push_back(plain_map(field, n, static_cast<FiniteField::Elem>(c)));
  } else {
    coefficient *= c2_constant(field, eps0) * std::exp(-2 * (double(n - 2 * k) / h - 1) * alpha);
    maps.push_back(eps0_map(field, n, k, eps0));
  }

  VerificationReport rep;
  rep.task = "fft";
  rep.params = {{"field", field.name()}, {"h", h}, {"n", n}, {"k", k}, {"space", space.to_string()},
                {"alpha", alpha}, {"rhs_coefficient", coefficient}};
  if (k > 0) rep.params["eps0"] = eps0;
  rep.seed = strategy.seed;

  auto record = [&](double ratio, const std::string& label, const std::string& how) {
    double r = ratio / coefficient;
    rep.margin_max("max_ratio", r);
    if (r > 1 + kSlack) rep.fail({{"map", label}, {"source", how}}, "LHS <= RHS", std::to_string(r), "<= 1");
  };

  if (strategy.kind == FftStrategy::Kind::Exact) {
    if (!space.hilbert()) throw ConfigError("exact FFT check needs a Hilbert space (p = 2)");
    if (maps.front().cols > kMaxExactColumns) throw PreconditionError("exact FFT check limited to 1024 family indices");
    rep.params["mode"] = "exact";
    rep.cases_total = maps.size();
    for (const auto& m : maps) {
      record(top_singular_squared(m), m.label, "spectral");
      ++rep.cases_run;
    }
  } else {
    rep.params["mode"] = "random";
    rep.params["ascent_steps"] = strategy.ascent_steps;
    rep.cases_total = strategy.trials;
    std::mt19937_64 rng(strategy.seed);
    const std::size_t width = maps.front().cols * space.dim;
    std::vector<Complex> best;
    std::size_t best_map = 0;
    double best_val = -1;
    auto consider = [&](std::vector<Complex>& xi, std::size_t mi, const std::string& how) {
      double v = maps[mi].ratio(xi, space);
      record(v, maps[mi].label, how);
      if (v > best_val) best_val = v, best = xi, best_map = mi;
    };
    for (std::uint64_t t = 0; t < strategy.trials; ++t) {
      auto xi = gaussian(rng, width);
      consider(xi, t % maps.size(), "random");
      ++rep.cases_run;
    }
    // The Hilbert extremal family tensored with a random vector.
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
      auto top = power_top_vector(maps[mi], rng);
      auto v = gaussian(rng, space.dim);
      std::vector<Complex> xi(width);
      for (std::size_t c = 0; c < maps[mi].cols; ++c)
        for (int i = 0; i < space.dim; ++i) xi[c * space.dim + i] = top[c] * v[i];
      consider(xi, mi, "spectral start");
      rep.tallies["adversarial_starts"]++;
    }
    if (strategy.ascent_steps > 0 && !best.empty()) {
      bool converged = true;
      const auto& m = maps[best_map];
      double v = ascend(best, [&](const std::vector<Complex>& x) { return m.ratio(x, space); }, strategy.ascent_steps,
                        rng, converged);
      record(v, m.label, "ascent");
      rep.tallies["ascent_steps"] += strategy.ascent_steps;
      if (!converged) rep.notes.push_back("ascent stopped before its step size converged; best ratio is a lower bound");
    }
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

double fft_rewrite_error(Field f, int n, int k, FiniteField::Elem eps0, int dim, std::uint64_t trials,
                         std::uint64_t seed) {
  check_levels(1, n, k);
  if (eps0 == 0 || eps0 >= f.q()) throw PreconditionError("eps0 must be a nonzero residue");
  SparseMap big = eps0_map(f, n, k, eps0);
  SparseMap small = eps0_map(f, n - 2 * k, 0, eps0);

  ResidueRing Rn(f, n), Rk(f, n - k), R2(f, n - 2 * k);
  auto X = Rn.multiples_of_pi_power(k);
  auto Y = Rn.multiples_of_pi_power(2 * k);
  std::vector<long> xpos(Rn.size(), -1), ypos(Rn.size(), -1);
  for (std::size_t t = 0; t < X.size(); ++t) xpos[X[t].index] = static_cast<long>(t);
  for (std::size_t t = 0; t < Y.size(); ++t) ypos[Y[t].index] = static_cast<long>(t);
  auto Z = Rk.multiples_of_pi_power(n - 2 * k);
  const std::size_t M = R2.size();

  // xi'_{x1,y1} = E_z xi_{pi^k (s(x1) + z), pi^{2k} y1}
  std::vector<std::vector<std::size_t>> sources(M * M);
  for (std::size_t x1 = 0; x1 < M; ++x1)
    for (std::size_t y1 = 0; y1 < M; ++y1) {
      long yp = ypos[Rn.shift(Rn.reduce(R2.lift(R2.elem(y1))), 2 * k).index];
      ResidueElem s = Rk.reduce(R2.lift(R2.elem(x1)));
      for (const auto& z : Z) {
        long xp = xpos[Rn.shift(Rn.reduce(Rk.lift(Rk.add(s, z))), k).index];
        if (xp < 0 || yp < 0) throw std::logic_error("rewrite index outside the family");
        sources[x1 * M + y1].push_back(static_cast<std::size_t>(xp) * Y.size() + static_cast<std::size_t>(yp));
      }
    }

  SpaceSpec space{2, dim};
  std::mt19937_64 rng(seed);
  double worst = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto xi = gaussian(rng, big.cols * dim);
    std::vector<Complex> xi1(small.cols * dim);
    for (std::size_t c = 0; c < small.cols; ++c)
      for (std::size_t src : sources[c])
        for (int i = 0; i < dim; ++i) xi1[c * dim + i] += xi[src * dim + i] / double(sources[c].size());
    // Only the left hand sides are compared.
    auto lhs = [&](const SparseMap& m, const std::vector<Complex>& v) {
      std::vector<Complex> acc(dim);
      double s = 0;
      for (std::size_t r = 0; r < m.rows; ++r) {
        std::fill(acc.begin(), acc.end(), Complex{});
        for (const auto& [c, w] : m.entries[r])
          for (int i = 0; i < dim; ++i) acc[i] += w * v[c * dim + i];
        double nr = space.norm(acc.data());
        s += nr * nr;
      }
      return s / double(m.rows);
    };
    double a = lhs(big, xi), b = lhs(small, xi1);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

// ---- type constant ------------------------------------------------------------------

Json TypeStats::to_json() const {
  return {{"max_ratio", max_ratio}, {"mean_ratio", mean_ratio}, {"trials", trials}, {"exact_signs", exact_signs}};
}

TypeStats estimate_type_constant(const SpaceSpec& space, double p, int n_vectors, std::uint64_t trials,
                                 std::uint64_t seed) {
  if (!(p >= 1)) throw ConfigError("type exponent must be >= 1");
  if (n_vectors < 1 || n_vectors > 64) throw ConfigError("number of vectors must lie in [1, 64]");
  const int d = space.dim;
  TypeStats out;
  out.exact_signs = n_vectors <= 12;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;

  auto rnorm = [&](const std::vector<double>& v) {
    std::vector<Complex> c(v.begin(), v.end());
    return space.norm(c.data());
  };
  auto ratio = [&](const std::vector<std::vector<double>>& xs) {
    double sq = 0;
    std::uint64_t count = 0;
    std::vector<double> sum(d);
    auto add = [&](std::uint64_t signs) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (int i = 0; i < n_vectors; ++i) {
        double s = (signs >> i) & 1 ? -1.0 : 1.0;
        for (int c = 0; c < d; ++c) sum[c] += s * xs[i][c];
      }
      double nv = rnorm(sum);
      sq += nv * nv;
      ++count;
    };
    if (out.exact_signs) {
      for (std::uint64_t s = 0; s < (std::uint64_t(1) << n_vectors); ++s) add(s);
    } else {
      for (int s = 0; s < 4096; ++s) add(rng());
    }
    double den = 0;
    for (const auto& x : xs) den += std::pow(rnorm(x), p);
    return std::sqrt(sq / double(count)) / std::pow(den, 1 / p);
  };

  double total = 0;
  auto run = [&](const std::vector<std::vector<double>>& xs) {
    double r = ratio(xs);
    out.max_ratio = std::max(out.max_ratio, r);
    total += r;
    ++out.trials;
  };
  if (n_vectors <= d) {
    std::vector<std::vector<double>> basis(n_vectors, std::vector<double>(d, 0.0));
    for (int i = 0; i < n_vectors; ++i) basis[i][i] = 1;
    run(basis);
  }
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<std::vector<double>> xs(n_vectors, std::vector<double>(d));
    for (auto& x : xs)
      for (auto& c : x) c = g(rng);
    run(xs);
  }
  out.mean_ratio = out.trials ? total / double(out.trials) : 0;
  return out;
}

}  // namespace sp4lab
