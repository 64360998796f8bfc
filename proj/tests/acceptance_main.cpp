// Verification suite runner: one pass/fail line per criterion.
// Usage: mshj_acceptance [criterion ids...]

#include <cstdlib>
#include <string>
#include <vector>

#include "verify/criteria.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  const auto results = mshj::verify::run_criteria(ids);
  return mshj::verify::print_results(results);
}
