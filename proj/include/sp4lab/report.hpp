#pragma once

// Verification reports shared by every suite: JSON form, associative merge.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sp4lab {

using Json = nlohmann::json;

enum class Status { Pass, Violated, Undecided };

std::string status_name(Status s);

struct Counterexample {
  Json tuple;  // residue tuple or other case coordinates
  std::string check;
  std::string observed;
  std::string expected;
};

struct VerificationReport {
  std::string task;
  Json params = Json::object();
  std::uint64_t cases_total = 0;
  std::uint64_t cases_run = 0;
  std::uint64_t undecided = 0;
  std::uint64_t violations = 0;  // every failed case, even beyond the stored list
  std::vector<Counterexample> counterexamples;
  std::map<std::string, double> margins;
  std::map<std::string, std::uint64_t> tallies;  // observed outcomes, summed on merge
  std::vector<std::string> notes;
  double elapsed_ms = 0;
  std::uint64_t seed = 0;

  static constexpr std::size_t kMaxStored = 16;

  Status status() const;
  void fail(Json tuple, std::string check, std::string observed, std::string expected);
  // Keeps the smaller of the existing and new value.
  void margin_min(const std::string& key, double value);
  void margin_max(const std::string& key, double value);

  // Counts add, counterexample lists concatenate (capped), margins combine
  // by the direction recorded in their key prefix ("min_"/"max_").
  void merge(const VerificationReport& other);

  Json to_json(bool timing = true) const;
};

}  // namespace sp4lab
