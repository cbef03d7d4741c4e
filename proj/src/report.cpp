#include "sp4lab/report.hpp"

#include <algorithm>

namespace sp4lab {

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Violated: return "violated";
    case Status::Undecided: return "undecided";
  }
  return "?";
}

Status VerificationReport::status() const {
  if (violations > 0) return Status::Violated;
  if (undecided > 0) return Status::Undecided;
  return Status::Pass;
}

void VerificationReport::fail(Json tuple, std::string check, std::string observed, std::string expected) {
  ++violations;
  if (counterexamples.size() < kMaxStored)
    counterexamples.push_back({std::move(tuple), std::move(check), std::move(observed), std::move(expected)});
}

void VerificationReport::margin_min(const std::string& key, double value) {
  auto it = margins.find(key);
  if (it == margins.end())
    margins[key] = value;
  else
    it->second = std::min(it->second, value);
}

void VerificationReport::margin_max(const std::string& key, double value) {
  auto it = margins.find(key);
  if (it == margins.end())
    margins[key] = value;
  else
    it->second = std::max(it->second, value);
}

void VerificationReport::merge(const VerificationReport& other) {
  cases_total += other.cases_total;
  cases_run += other.cases_run;
  undecided += other.undecided;
  violations += other.violations;
  for (const auto& c : other.counterexamples)
    if (counterexamples.size() < kMaxStored) counterexamples.push_back(c);
  for (const auto& [k, v] : other.margins) {
    if (k.rfind("max_", 0) == 0)
      margin_max(k, v);
    else
      margin_min(k, v);
  }
  for (const auto& [k, v] : other.tallies) tallies[k] += v;
  for (const auto& n : other.notes) notes.push_back(n);
  elapsed_ms += other.elapsed_ms;
}

Json VerificationReport::to_json(bool timing) const {
  Json j;
  j["task"] = task;
  j["params"] = params;
  j["status"] = status_name(status());
  j["cases_total"] = cases_total;
  j["cases_run"] = cases_run;
  j["undecided"] = undecided;
  j["violations"] = violations;
  Json ce = Json::array();
  for (const auto& c : counterexamples)
    ce.push_back({{"tuple", c.tuple}, {"check", c.check}, {"observed", c.observed}, {"expected", c.expected}});
  j["counterexamples"] = ce;
  j["margins"] = Json::object();
  for (const auto& [k, v] : margins) j["margins"][k] = v;
  j["tallies"] = Json::object();
  for (const auto& [k, v] : tallies) j["tallies"][k] = v;
  j["notes"] = notes;
  j["seed"] = seed;
  if (timing) j["elapsed_ms"] = elapsed_ms;
  return j;
}

}  // namespace sp4lab
