#pragma once

// Named task lists (quick / full) over every verifier, run with a worker pool
// and reported in task-id order.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sp4lab/lemma_witnesses.hpp"
#include "sp4lab/report.hpp"

namespace sp4lab {

struct SuiteTask {
  std::string id;
  std::vector<std::string> claims;  // coverage manifest entries
  std::function<VerificationReport(std::uint64_t seed, Mutation mutation)> run;
};

// Throws ConfigError for an unknown profile.
std::vector<SuiteTask> suite_tasks(const std::string& profile);

// Every lemma-level claim a profile must reach.
const std::vector<std::string>& coverage_manifest();

struct SuiteResult {
  std::vector<VerificationReport> reports;  // sorted by task id
  Json summary;
  int exit_code = 0;  // 0 pass, 1 violation or undecided
};

SuiteResult run_suite(const std::string& profile, std::uint64_t seed, Mutation mutation = Mutation::None,
                      int threads = 1);

// Worker count from SP4LAB_THREADS, else 1.
int default_threads();

}  // namespace sp4lab
