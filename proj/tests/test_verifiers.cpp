#include "doctest.h"

#include "sp4lab/averaging.hpp"
#include "sp4lab/haar.hpp"
#include "sp4lab/verifiers.hpp"

using namespace sp4lab;

namespace {

bool unit_minor(const Matrix& k, int r1, int r2) {
  FieldElem m = k[r1][0] * k[r2][1] - k[r1][1] * k[r2][0];
  return !m.is_zero() && m.valuation() == 0;
}

}  // namespace

TEST_CASE("spherical cells, exhaustive") {
  auto rep = verify_cell_lemma(LemmaId::SPHER01, parse_field("Q3"), 3, 1, 0, Enumeration::exhaustive());
  CHECK(rep.status() == Status::Pass);
  CHECK(rep.cases_run == rep.cases_total);
  CHECK(rep.cases_total == tuple_count(make_context(LemmaId::SPHER01, parse_field("Q3"), 3, 1, 0)));

  auto m1 = verify_cell_lemma(LemmaId::SPHER1M1, parse_field("F3((t))"), 4, 3, 0, Enumeration::exhaustive());
  CHECK(m1.status() == Status::Pass);
  std::uint64_t zero = 0, nonzero = 0;
  for (const auto& [key, n] : m1.tallies) {
    if (key.rfind("eps_zero", 0) == 0) {
      CHECK(key == "eps_zero -> (4,3)");
      zero += n;
    } else {
      CHECK(key.substr(key.size() - 5) == "(5,2)");
      nonzero += n;
    }
  }
  CHECK(zero * 2 == nonzero);
}

TEST_CASE("non-spherical boundary case") {
  auto rep = verify_cell_lemma(LemmaId::NONSPHER1M1, parse_field("Q5"), 3, 4, 1, Enumeration::exhaustive());
  CHECK(rep.status() == Status::Pass);
  CHECK(rep.cases_run == rep.cases_total);
  CHECK(rep.cases_total > 0);
}

TEST_CASE("budget and sampling") {
  Field q3 = parse_field("Q3");
  CHECK_THROWS_AS(verify_cell_lemma(LemmaId::SPHER01, q3, 3, 1, 0, Enumeration::exhaustive(10)), BudgetExceeded);
  auto a = verify_cell_lemma(LemmaId::SPHER01, q3, 6, 0, 0, Enumeration::automatic(1000, 200, 9));
  CHECK(a.status() == Status::Pass);
  CHECK(a.cases_run == 200);
  CHECK(!a.notes.empty());
  auto b = verify_cell_lemma(LemmaId::SPHER01, q3, 6, 0, 0, Enumeration::sample(200, 9));
  CHECK(a.to_json(false)["tallies"] == b.to_json(false)["tallies"]);
  auto c = verify_cell_lemma(LemmaId::SPHER01, q3, 6, 0, 0, Enumeration::sample(200, 9));
  CHECK(b.to_json(false) == c.to_json(false));
}

TEST_CASE("partitioned ranges merge to the single run") {
  auto ctx = make_context(LemmaId::SPHER1M1, parse_field("Q3"), 3, 2, 0);
  std::uint64_t n = tuple_count(ctx);
  auto whole = verify_cell_range(ctx, 0, n);
  VerificationReport merged = verify_cell_range(ctx, 0, n / 3);
  merged.merge(verify_cell_range(ctx, n / 3, n / 2));
  merged.merge(verify_cell_range(ctx, n / 2, n));
  CHECK(merged.cases_run == whole.cases_run);
  CHECK(merged.tallies == whole.tallies);
  CHECK(merged.violations == whole.violations);
  CHECK(merged.margins == whole.margins);
}

TEST_CASE("displayed identities") {
  CHECK(verify_witness_identities(LemmaId::SPHER01, parse_field("Q3"), 4, 1, 1000, 7).status() == Status::Pass);
  CHECK(verify_witness_identities(LemmaId::SPHER1M1, parse_field("Q3"), 3, 3, 1000, 7).status() == Status::Pass);
  CHECK(verify_witness_identities(LemmaId::NONSPHER1M1, parse_field("Q5"), 3, 4, 300, 7).status() == Status::Pass);
  CHECK(verify_witness_identities(LemmaId::SPHER1M1, parse_field("F4((t))"), 4, 2, 300, 7).status() == Status::Pass);
}

TEST_CASE("mutations are detected") {
  Field q3 = parse_field("Q3");
  auto cells = [&](LemmaId l, int i, int j, int k, Mutation m) {
    return verify_cell_lemma(l, q3, i, j, k, Enumeration::exhaustive(), m).status() == Status::Violated;
  };
  auto ids = [&](LemmaId l, int i, int j, Mutation m) {
    return verify_witness_identities(l, q3, i, j, 300, 3, m).status() == Status::Violated;
  };
  CHECK(ids(LemmaId::SPHER01, 4, 1, Mutation::MinorSignFlip));
  CHECK(cells(LemmaId::SPHER01, 3, 1, 0, Mutation::DScalingExponent));
  CHECK(cells(LemmaId::NONSPHER1M1, 3, 3, 0, Mutation::DropEps1));
  CHECK(cells(LemmaId::SPHER01, 3, 1, 0, Mutation::WrongN1));
  CHECK(ids(LemmaId::SPHER01, 4, 1, Mutation::MinorRowPair));
  CHECK(!ids(LemmaId::SPHER01, 4, 1, Mutation::None));
}

TEST_CASE("generation sweep") {
  auto rep = verify_generation_residue(parse_field("F2((t))"));
  CHECK(rep.status() == Status::Pass);
  CHECK(rep.cases_run == 720);
  CHECK(rep.margins.at("max_block_count") <= 30);
  auto rnd = verify_generation_random(parse_field("Q3"), 3, 100, 5);
  CHECK(rnd.status() == Status::Pass);
  CHECK(rnd.cases_run == 100);
  std::uint64_t routes = 0;
  for (const auto& [k, v] : rnd.tallies)
    if (k.rfind("route_", 0) == 0) routes += v;
  CHECK(routes == 100);
}

TEST_CASE("parity volumes at depth 1 and 2") {
  Field f = parse_field("F2((t))");
  auto base = enumerate_residue_points(f);

  auto id = parity_volumes_exhaustive(GroupElement::trusted(identity_matrix(f)), 1);
  std::uint64_t degenerate = 0;
  for (const auto& k : base) {
    bool any = false;
    for (int r1 = 0; r1 < 4; ++r1)
      for (int r2 = r1 + 1; r2 < 4; ++r2) any = any || unit_minor(k.matrix(), r1, r2);
    degenerate += !any;
  }
  CHECK(id.cases == 720);
  CHECK(id.undecided == degenerate);
  CHECK(id.even + id.odd + id.undecided == id.cases);
  CHECK(id.alpha.lo + id.beta.hi == doctest::Approx(1));
  CHECK(id.beta.lo + id.alpha.hi == doctest::Approx(1));

  // For D(1,0) the wedge has valuation -1 exactly when a minor on rows (1,2) or
  // (1,3) of the first two columns of k is a unit; otherwise it is >= 0 and
  // undecided at depth 2.
  auto d = parity_volumes_exhaustive(gen_D(f, 1, 0), 2);
  std::uint64_t odd = 0;
  for (const auto& k : base) odd += unit_minor(k.matrix(), 0, 1) || unit_minor(k.matrix(), 0, 2);
  CHECK(d.cases == 720 * 1024);
  CHECK(d.odd == odd * 1024);
  CHECK(d.even == 0);
  CHECK(d.undecided == d.cases - d.odd);
  CHECK(!d.uniform_bound);
}

TEST_CASE("sampled parity profile") {
  Field f = parse_field("F2((t))");
  auto prof = parity_volumes_sampled(gen_D(f, 1, 0), 5, 2000, 11);
  REQUIRE(prof.size() == 5);
  for (std::size_t n = 1; n < prof.size(); ++n) {
    CHECK(prof[n].undecided <= prof[n - 1].undecided);
    CHECK(prof[n].even >= prof[n - 1].even);
    CHECK(prof[n].odd >= prof[n - 1].odd);
  }
  CHECK(prof[4].uniform_bound);
  CHECK(prof[4].undecided == 0);
  CHECK(prof[4].radius > 0);
  CHECK(prof[4].radius < 0.03);
  auto again = parity_volumes_sampled(gen_D(f, 1, 0), 5, 2000, 11);
  CHECK(again[4].to_json() == prof[4].to_json());
  CHECK_THROWS_AS(parity_volumes_sampled(gen_D(parse_field("Q3"), 1, 0), 2, 10, 1), PreconditionError);
}

TEST_CASE("averaging inequality") {
  auto s3 = make_s3_standard();
  CHECK(s3.elements.size() == 6);
  CHECK(s3.subgroups[0].size() == 2);
  CHECK(s3.subgroups[1].size() == 3);
  CHECK(minimal_cover(s3) == 1);
  auto rep = verify_averaging(s3, 2, 1000, 4);
  CHECK(rep.status() == Status::Pass);
  CHECK(rep.cases_run == 1000);
  CHECK(rep.margins.at("min_joint_singular_value") > 0.1);
  CHECK(rep.margins.at("max_ratio_projection") <= 1);

  auto d4 = make_d4_standard();
  CHECK(d4.elements.size() == 8);
  int n = minimal_cover(d4);
  CHECK(n >= 2);
  CHECK(!covers(d4, n - 1));
  CHECK(verify_averaging(d4, n, 500, 4).status() == Status::Pass);
  CHECK_THROWS_AS(verify_averaging(d4, 1, 10, 4), ConfigError);

  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  auto trivial = make_rep("C1", {one}, {{"1", {one}}});
  CHECK_THROWS_AS(verify_averaging(trivial, 1, 10, 4), PreconditionError);
}
