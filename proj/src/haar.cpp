#include "sp4lab/haar.hpp"

#include <map>
#include <mutex>
#include <set>

namespace sp4lab {

namespace {

int support_mask(const Matrix& m) {
  int mask = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (!m[r][c].is_zero()) mask |= 1 << (4 * r + c);
  return mask;
}

bool monomial(const Matrix& m) {
  for (int r = 0; r < 4; ++r) {
    int row = 0, col = 0;
    for (int c = 0; c < 4; ++c) {
      row += !m[r][c].is_zero();
      col += !m[c][r].is_zero();
    }
    if (row != 1 || col != 1) return false;
  }
  return true;
}

std::vector<WeylElement> build_weyl(Field f) {
  std::vector<WeylElement> out;
  std::set<int> seen;
  WeylElement id{{}, 0, GroupElement::trusted(identity_matrix(f))};
  seen.insert(support_mask(id.element.matrix()));
  out.push_back(id);
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const char* letter : {"w21", "w32"}) {
      GroupElement s = std::string(letter) == "w21" ? gen_w21(f) : gen_w32(f);
      WeylElement next = out[head];
      next.word.push_back(letter);
      next.length += 1;
      next.element = next.element * s;
      if (seen.insert(support_mask(next.element.matrix())).second) out.push_back(next);
    }
  }
  return out;
}

}  // namespace

const std::vector<WeylElement>& weyl_group(Field f) {
  static std::mutex mu;
  static std::map<const detail::FieldData*, std::vector<WeylElement>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(f.data());
  if (it == cache.end()) it = cache.emplace(f.data(), build_weyl(f)).first;
  return it->second;
}

int weyl_index(const Matrix& m) {
  if (!monomial(m)) return -1;
  const auto& W = weyl_group(m[0][0].field());
  int mask = support_mask(m);
  for (std::size_t k = 0; k < W.size(); ++k)
    if (support_mask(W[k].element.matrix()) == mask) return static_cast<int>(k);
  return -1;
}

Matrix lower_unipotent(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d) {
  Field f = a.field();
  return (gen_mu21(a, f) * gen_mu32(b, f) * gen_mu31(c, f) * gen_mu41(d, f)).matrix();
}

std::uint64_t sp4_residue_order(std::uint64_t q) {
  std::uint64_t q2 = q * q;
  return q2 * q2 * (q2 - 1) * (q2 * q2 - 1);
}

std::vector<std::uint64_t> residue_key(const ResidueRing& ring, const Matrix& m) {
  std::vector<std::uint64_t> key;
  key.reserve(16);
  for (const auto& row : m)
    for (const auto& x : row) key.push_back(ring.reduce(x).index);
  return key;
}

KSampler::KSampler(Field field, std::uint64_t seed) : field_(field), rng_(seed) {}

FieldElem KSampler::residue_lift() {
  std::uniform_int_distribution<unsigned> d(0, field_.q() - 1);
  return FieldElem::from_residue(field_, FiniteField::Elem(d(rng_)));
}

FieldElem KSampler::unit_lift() {
  std::uniform_int_distribution<unsigned> d(1, field_.q() - 1);
  return FieldElem::from_residue(field_, FiniteField::Elem(d(rng_)));
}

FieldElem KSampler::deep_lift(int depth) {
  ResidueRing ring(field_, depth - 1);
  std::uniform_int_distribution<std::uint64_t> d(0, ring.size() - 1);
  return FieldElem::pi_power(field_, 1) * ring.lift(ring.elem(d(rng_)));
}

GroupElement KSampler::residue_point() {
  const auto& W = weyl_group(field_);
  const std::uint64_t q = field_.q();
  std::vector<std::uint64_t> weight;
  std::uint64_t total = 0;
  for (const auto& w : W) {
    std::uint64_t x = 1;
    for (int k = 0; k < w.length; ++k) x *= q;
    weight.push_back(x);
    total += x;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
  std::uint64_t r = pick(rng_);
  std::size_t idx = 0;
  while (r >= weight[idx]) r -= weight[idx++];
  Matrix u = lower_unipotent(residue_lift(), residue_lift(), residue_lift(), residue_lift());
  Matrix b = lower_unipotent(residue_lift(), residue_lift(), residue_lift(), residue_lift());
  FieldElem e = unit_lift(), f = unit_lift();
  return GroupElement::trusted(u) * W[idx].element * GroupElement::trusted(b) * gen_diagEF(e, f);
}

GroupElement KSampler::kick(int depth) {
  if (depth <= 1) return GroupElement::trusted(identity_matrix(field_));
  Matrix lo = lower_unipotent(deep_lift(depth), deep_lift(depth), deep_lift(depth), deep_lift(depth));
  FieldElem one = FieldElem::one(field_);
  GroupElement t = gen_diagEF(one + deep_lift(depth), one + deep_lift(depth));
  Matrix up = transpose(lower_unipotent(deep_lift(depth), deep_lift(depth), deep_lift(depth), deep_lift(depth)));
  return GroupElement::trusted(lo) * t * GroupElement::trusted(up);
}

GroupElement KSampler::sample(int depth) {
  if (depth < 1) throw PreconditionError("sampling depth must be >= 1");
  GroupElement g0 = residue_point();
  return g0 * kick(depth);
}

std::vector<GroupElement> enumerate_residue_points(Field f) {
  const std::uint64_t q = f.q();
  ResidueRing r1(f, 1);
  std::vector<FieldElem> res, units;
  for (unsigned k = 0; k < q; ++k) {
    res.push_back(FieldElem::from_residue(f, FiniteField::Elem(k)));
    if (k) units.push_back(res.back());
  }
  std::vector<Matrix> unip;
  for (const auto& a : res)
    for (const auto& b : res)
      for (const auto& c : res)
        for (const auto& d : res) unip.push_back(lower_unipotent(a, b, c, d));
  std::vector<GroupElement> borel;
  for (const auto& u : unip)
    for (const auto& e : units)
      for (const auto& g : units) borel.push_back(GroupElement::trusted(u) * gen_diagEF(e, g));

  std::set<std::vector<std::uint64_t>> seen;
  std::vector<GroupElement> out;
  const std::uint64_t order = sp4_residue_order(q);
  for (const auto& w : weyl_group(f))
    for (const auto& u : unip) {
      GroupElement uw = GroupElement::trusted(u) * w.element;
      for (const auto& b : borel) {
        GroupElement g = uw * b;
        if (seen.insert(residue_key(r1, g.matrix())).second) out.push_back(g);
      }
    }
  if (out.size() != order) throw std::logic_error("residue enumeration did not reach |Sp4(F_q)|");
  return out;
}

std::vector<GroupElement> enumerate_kicks(Field f, int depth) {
  if (depth <= 1) return {GroupElement::trusted(identity_matrix(f))};
  ResidueRing ring(f, depth - 1);
  const FieldElem p = FieldElem::pi_power(f, 1);
  const FieldElem one = FieldElem::one(f);
  std::vector<FieldElem> vals;
  for (std::uint64_t k = 0; k < ring.size(); ++k) vals.push_back(p * ring.lift(ring.elem(k)));
  std::vector<Matrix> lows;
  for (const auto& a : vals)
    for (const auto& b : vals)
      for (const auto& c : vals)
        for (const auto& d : vals) lows.push_back(lower_unipotent(a, b, c, d));
  std::vector<GroupElement> tori;
  for (const auto& e : vals)
    for (const auto& g : vals) tori.push_back(gen_diagEF(one + e, one + g));
  std::vector<GroupElement> out;
  out.reserve(lows.size() * lows.size() * tori.size());
  for (const auto& lo : lows)
    for (const auto& t : tori) {
      GroupElement lt = GroupElement::trusted(lo) * t;
      for (const auto& up : lows) out.push_back(lt * GroupElement::trusted(transpose(up)));
    }
  return out;
}

}  // namespace sp4lab
