#include "doctest.h"

#include <set>

#include "sp4lab/suite.hpp"

using namespace sp4lab;

TEST_CASE("profiles cover every claim") {
  for (const char* profile : {"quick", "full"}) {
    auto tasks = suite_tasks(profile);
    std::set<std::string> ids, claims;
    for (const auto& t : tasks) {
      CHECK(ids.insert(t.id).second);
      claims.insert(t.claims.begin(), t.claims.end());
    }
    for (const auto& c : coverage_manifest()) CHECK_MESSAGE(claims.count(c), profile << " misses " << c);
    for (std::size_t i = 1; i < tasks.size(); ++i) CHECK(tasks[i - 1].id < tasks[i].id);
  }
  CHECK_THROWS_AS(suite_tasks("nonexistent"), ConfigError);
  CHECK_THROWS_AS(run_suite("quick", 1, Mutation::None, 0), ConfigError);
}

TEST_CASE("single tasks are deterministic") {
  auto tasks = suite_tasks("quick");
  for (const auto& t : tasks) {
    if (t.id != "averaging.D4" && t.id != "zigzag.char2:0" && t.id != "identities.SPHER01.Q3") continue;
    auto a = t.run(7, Mutation::None), b = t.run(7, Mutation::None);
    CHECK(a.to_json(false) == b.to_json(false));
    CHECK(a.status() == Status::Pass);
  }
  for (const auto& t : tasks)
    if (t.id == "identities.SPHER01.Q3") CHECK(t.run(7, Mutation::MinorSignFlip).status() == Status::Violated);
}
