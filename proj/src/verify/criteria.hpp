#pragma once

#include <string>
#include <vector>

namespace mshj::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the verification criteria (all of them when `ids` is empty) and
/// returns one result per criterion.  Prerequisite runs shared between
/// criteria are computed once and cached in-process.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids = {},
                                          std::uint64_t seed = 2024);

/// Prints one pass/fail line per criterion plus a summary; returns 0 when
/// everything passed, 3 otherwise.
int print_results(const std::vector<CriterionResult>& results);

}  // namespace mshj::verify
