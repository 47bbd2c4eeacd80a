#ifndef XNLAB_SUITE_HPP
#define XNLAB_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace xn::suite {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<CriterionResult> results;
  bool allPass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

CriterionResult run_criterion(int id, std::uint64_t seed);
SuiteResult run_all(std::uint64_t seed = 2026);

std::string suite_to_json(const SuiteResult& s);

} // namespace xn::suite

#endif
