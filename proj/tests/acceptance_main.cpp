// Runs the eight acceptance criteria and prints one line per criterion.
// Exit code is the number of failing criteria.
#include <cstdio>

#include "xnlab/suite.hpp"

int main() {
  int failures = 0;
  for (int id = 1; id <= 8; ++id) {
    xn::suite::CriterionResult r;
    try {
      r = xn::suite::run_criterion(id, 2026);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "exception";
      r.pass = false;
      r.detail = e.what();
    }
    std::printf("criterion %d [%s]: %s\n    %s\n", r.id,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  return failures;
}
