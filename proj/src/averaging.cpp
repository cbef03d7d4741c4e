#include "sp4lab/averaging.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace sp4lab {

namespace {

constexpr double kMatchTol = 1e-9;

Eigen::MatrixXd rotation(double theta) {
  Eigen::MatrixXd m(2, 2);
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

Eigen::MatrixXd reflection() {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

std::vector<Eigen::MatrixXd> closure(const std::vector<Eigen::MatrixXd>& gens, int dim) {
  std::vector<Eigen::MatrixXd> out = {Eigen::MatrixXd::Identity(dim, dim)};
  auto find = [&](const Eigen::MatrixXd& m) {
    for (const auto& x : out)
      if ((x - m).cwiseAbs().maxCoeff() < kMatchTol) return true;
    return false;
  };
  for (std::size_t head = 0; head < out.size(); ++head)
    for (const auto& g : gens) {
      Eigen::MatrixXd n = out[head] * g;
      if (!find(n)) {
        out.push_back(n);
        if (out.size() > 100000) throw ConfigError("generated group is too large");
      }
    }
  return out;
}

}  // namespace

int FiniteRep::index_of(const Eigen::MatrixXd& m) const {
  for (std::size_t k = 0; k < elements.size(); ++k)
    if ((elements[k] - m).cwiseAbs().maxCoeff() < kMatchTol) return static_cast<int>(k);
  return -1;
}

int FiniteRep::multiply(int a, int b) const { return index_of(elements[a] * elements[b]); }

Eigen::MatrixXd FiniteRep::average(const std::vector<int>& idx) const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  for (int k : idx) s += elements[k];
  return s / double(idx.size());
}

Eigen::MatrixXd FiniteRep::average() const {
  std::vector<int> all(elements.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  return average(all);
}

FiniteRep make_rep(const std::string& name, const std::vector<Eigen::MatrixXd>& generators,
                   const std::vector<std::pair<std::string, std::vector<Eigen::MatrixXd>>>& subgroup_generators) {
  if (generators.empty()) throw ConfigError("no generators");
  FiniteRep rep;
  rep.name = name;
  rep.dim = static_cast<int>(generators.front().rows());
  rep.elements = closure(generators, rep.dim);
  for (const auto& [sname, gens] : subgroup_generators) {
    std::vector<int> idx;
    for (const auto& m : closure(gens, rep.dim)) {
      int k = rep.index_of(m);
      if (k < 0) throw ConfigError("subgroup " + sname + " is not inside " + name);
      idx.push_back(k);
    }
    rep.subgroups.push_back(idx);
    rep.subgroup_names.push_back(sname);
  }
  return rep;
}

FiniteRep make_s3_standard() {
  Eigen::MatrixXd r = rotation(2 * std::numbers::pi / 3), s = reflection();
  return make_rep("S3", {s, r}, {{"<(12)>", {s}}, {"<(123)>", {r}}});
}

FiniteRep make_d4_standard() {
  Eigen::MatrixXd r = rotation(std::numbers::pi / 2), s = reflection();
  return make_rep("D4", {s, r}, {{"<s>", {s}}, {"<sr>", {s * r}}});
}

bool covers(const FiniteRep& rep, int N) {
  std::set<int> cur = {0};
  for (int round = 0; round < N; ++round)
    for (const auto& sub : rep.subgroups) {
      std::set<int> next;
      for (int a : cur)
        for (int b : sub) next.insert(rep.multiply(a, b));
      cur = std::move(next);
    }
  return cur.size() == rep.elements.size();
}

int minimal_cover(const FiniteRep& rep, int max_n) {
  for (int n = 1; n <= max_n; ++n)
    if (covers(rep, n)) return n;
  return 0;
}

VerificationReport verify_averaging(const FiniteRep& rep, int N, std::uint64_t trials, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  if (N <= 0) N = minimal_cover(rep);
  if (N <= 0 || !covers(rep, N)) throw ConfigError("product coverage (K1...Kn)^N = K fails for " + rep.name);
  Eigen::MatrixXd P = rep.average();
  if (P.norm() > 1e-12) throw PreconditionError("representation of " + rep.name + " has invariant vectors");

  const int n = static_cast<int>(rep.subgroups.size());
  const double C = 2.0 * n * N;
  std::vector<Eigen::MatrixXd> Pi;
  for (const auto& sub : rep.subgroups) Pi.push_back(rep.average(sub));

  VerificationReport out;
  out.task = "averaging";
  out.params = {{"group", rep.name}, {"dim", rep.dim}, {"order", rep.elements.size()}, {"n", n}, {"N", N},
                {"trials", trials}};
  out.seed = seed;
  out.cases_total = trials;

  // Only 0 is invariant under every K_i: the stacked I - P_i have full column rank.
  Eigen::MatrixXd stacked(n * rep.dim, rep.dim);
  for (int i = 0; i < n; ++i) stacked.block(i * rep.dim, 0, rep.dim, rep.dim) = Eigen::MatrixXd::Identity(rep.dim, rep.dim) - Pi[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  double smin = svd.singularValues().minCoeff();
  out.margins["min_joint_singular_value"] = smin;
  if (smin < 1e-9) out.fail({{"case", "joint invariants"}}, "no common K_i-invariant vector", std::to_string(smin), "> 0");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_vec = [&]() {
    Eigen::VectorXd v(rep.dim);
    for (int k = 0; k < rep.dim; ++k) v[k] = gauss(rng);
    return v;
  };
  auto check = [&](const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& ys, const std::string& kind,
                   std::uint64_t t) {
    double worst = 0;
    for (const auto& y : ys) worst = std::max(worst, (x - y).norm());
    double lhs = x.norm(), rhs = C * worst;
    out.margin_min("min_slack_" + kind, rhs - lhs);
    if (rhs > 0) out.margin_max("max_ratio_" + kind, lhs / rhs);
    if (lhs > rhs * (1 + 1e-12) + 1e-15)
      out.fail({{"trial", t}, {"kind", kind}}, "||x|| <= 2nN max ||x - y_i||", std::to_string(lhs), "<= " + std::to_string(rhs));
  };

  for (std::uint64_t t = 0; t < trials; ++t) {
    Eigen::VectorXd x = t == 0 ? Eigen::VectorXd::Zero(rep.dim) : random_vec();
    std::vector<Eigen::VectorXd> proj, shifted;
    for (const auto& p : Pi) {
      proj.push_back(p * x);
      shifted.push_back(p * x + p * random_vec());
    }
    check(x, proj, "projection", t);
    check(x, shifted, "invariant", t);

    // Some k moves x by at least ||x||; the mean square displacement is 2||x||^2.
    double best = 0, mean_sq = 0;
    for (const auto& g : rep.elements) {
      double d = (g * x - x).norm();
      best = std::max(best, d);
      mean_sq += d * d;
    }
    mean_sq /= double(rep.elements.size());
    if (best < x.norm() * (1 - 1e-12))
      out.fail({{"trial", t}}, "some k has ||kx - x|| >= ||x||", std::to_string(best), ">= " + std::to_string(x.norm()));
    if (std::abs(mean_sq - 2 * x.squaredNorm()) > 1e-9 * (1 + x.squaredNorm()))
      out.fail({{"trial", t}}, "mean of ||kx - x||^2 equals 2||x||^2", std::to_string(mean_sq),
               std::to_string(2 * x.squaredNorm()));
    ++out.cases_run;
  }
  out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace sp4lab
