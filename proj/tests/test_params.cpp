#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xnlab/params.hpp"

using namespace xn;
using namespace xn::params;

namespace {

// Independent maximizer: plain nested enumeration over small exponent
// ranges with exact products. Only usable when the per-variable exponent
// caps are tiny.
long brute_f(const std::vector<Int>& bases, const std::vector<long>& values,
             const Int& cap) {
  std::vector<long> maxExp(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    Int p = 1;
    long e = 0;
    while (p * bases[i] < cap) { p *= bases[i]; ++e; }
    maxExp[i] = e;
  }
  long best = 0;
  std::vector<long> cur(bases.size(), 0);
  // odometer enumeration
  while (true) {
    Int prod = 1;
    long val = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      prod *= int_pow(bases[i], cur[i]);
      val += cur[i] * values[i];
    }
    if (prod < cap && val > best) best = val;
    std::size_t i = 0;
    while (i < bases.size() && cur[i] == maxExp[i]) cur[i++] = 0;
    if (i == bases.size()) break;
    ++cur[i];
  }
  return best;
}

} // namespace

TEST_CASE("desk weights and admissibility indices") {
  ParamSystem sys = build_param_system(desk_config());
  CHECK(sys.m[1] == 4);
  CHECK(sys.m[2] == 1024);
  CHECK(sys.m[3] == int_pow(Int(2), 50));
  CHECK(sys.m[4] == int_pow(Int(2), 20));
  CHECK(sys.m[5] == int_pow(Int(2), 100));
  CHECK(sys.m[6] == int_pow(Int(2), 80));
  CHECK(sys.m[7] == int_pow(Int(2), 400));
  CHECK(sys.n[1] == 1);
  CHECK(sys.n[2] == 6);
  CHECK(sys.n[3] == 7);
  CHECK(sys.n[4] == 41);
  CHECK(sys.n[5] == 42);
  CHECK(sys.n[6] == 533);
  CHECK(sys.n[7] == 534);
  CHECK(sys.qInt == 2);
  CHECK(sys.p == Rat(2));
  CHECK(sys.warnings.empty());
}

TEST_CASE("desk knapsack values against brute enumeration") {
  ParamSystem sys = build_param_system(desk_config());
  CHECK(sys.f[2] == 10);
  CHECK(sys.f[3] == 133);
  CHECK(sys.fTuple[2].rho == 4);
  CHECK(sys.fTuple[2].rhoEven == std::vector<long>{1});
  // attaining tuple is feasible and attains the value
  {
    const FTuple& t = sys.fTuple[3];
    Int prod = int_pow(sys.m[1], t.rho);
    long val = t.rho * sys.n[1];
    for (std::size_t i = 0; i < t.rhoEven.size(); ++i) {
      prod *= int_pow(sys.m[2 * (i + 1)], t.rhoEven[i]);
      val += t.rhoEven[i] * sys.n[2 * (i + 1)];
    }
    CHECK(prod < sys.m[6]);
    CHECK(val == 133);
  }
  CHECK(brute_f({sys.m[1], sys.m[2]}, {1, 6}, sys.m[4]) == 10);
  CHECK(brute_f({sys.m[1], sys.m[2], sys.m[4]}, {1, 6, 41}, sys.m[6]) == 133);

  CHECK(sys.pk[1] == 5);
  CHECK(sys.pk[2] == 17);
  CHECK(sys.pk[3] == 140);
  CHECK(sys.pk[2] <= 2 * sys.f[2]);
  CHECK(sys.pk[3] <= 2 * sys.f[3]);
}

TEST_CASE("knapsack agrees with brute force off the power-of-two path") {
  Config c = desk_config();
  c.m1 = 5; // weights no longer powers of two: exercises the search branch
  c.strict = false;
  ParamSystem sys = build_param_system(c);
  CHECK(sys.f[2] ==
        brute_f({sys.m[1], sys.m[2]}, {1, 6}, sys.m[4]));
  CHECK(sys.f[3] ==
        brute_f({sys.m[1], sys.m[2], sys.m[4]}, {1, 6, 41}, sys.m[6]));
}

TEST_CASE("series bound stays below one on the desk") {
  ParamSystem sys = build_param_system(desk_config());
  CHECK(sys.M < 1);
  CHECK(sys.M > Rat(1, 2));
  CHECK(sys.Mtail > 0);
  CHECK(sys.Mtail < Rat(1, 1000000));
  // truncation terms: 2/m_1 + 12/m_4 + 16/m_6
  Rat trunc = Rat(1, 2) + Rat(12) / Rat(sys.m[4]) + Rat(16) / Rat(sys.m[6]);
  CHECK(sys.M == trunc + sys.Mtail);
}

TEST_CASE("feasible tuple verification") {
  ParamSystem sys = build_param_system(desk_config());
  bool vac = false;
  // the attaining tuple for f_2: value 10 < p_2 = 17
  CHECK(verify_fact_feasible(sys, 2, 4, {1}, &vac));
  CHECK_FALSE(vac);
  // infeasible tuple reported as vacuous
  CHECK(verify_fact_feasible(sys, 2, 0, {2}, &vac));
  CHECK(vac);
  CHECK(verify_fact_feasible(sys, 3, 4, {1, 3}, &vac));
  CHECK_FALSE(vac);
}

TEST_CASE("stricture: bad shapes and violated orderings") {
  Config c = desk_config();
  c.nEven[1] = 39; // 4 f_2 = 40 is not below it
  CHECK_THROWS_AS(build_param_system(c), Error);
  c.strict = false;
  ParamSystem sys = build_param_system(c);
  CHECK_FALSE(sys.warnings.empty());

  Config bad = desk_config();
  bad.s = {2};
  CHECK_THROWS_AS(build_param_system(bad), Error);
  bad = desk_config();
  bad.m1 = 3;
  CHECK_THROWS_AS(build_param_system(bad), Error);
  bad = desk_config();
  bad.n1 = 2; // 5 n_1 >= n_2
  CHECK_THROWS_AS(build_param_system(bad), Error);
}

TEST_CASE("extended system: weights, growth, and derived bounds") {
  Config c = extended_desk_config(8);
  CHECK(c.K == 8);
  CHECK(c.s == std::vector<long>{2, 3, 4, 5, 6, 7, 8});
  ParamSystem sys = build_param_system(c);
  CHECK(sys.warnings.empty());
  // log2 m_{2j} follows B_j = sum_{i<j} s_i B_i with B_1 = 10
  std::vector<long> B{0, 10, 20, 80, 400, 2400, 16800, 134400, 1209600};
  for (int j = 1; j <= 8; ++j) {
    CAPTURE(j);
    CHECK(sys.m[2 * j] == (Int(1) << B[j]));
  }
  for (int j = 2; j <= 8; ++j) {
    CAPTURE(j);
    CHECK(sys.n[2 * j] == 4 * sys.f[j] + 1);
    CHECK(sys.pk[j] <= 2 * sys.f[j]);
  }
  CHECK(sys.f[2] == 10);
  CHECK(sys.f[3] == 133);
  CHECK(sys.M < 1);
}

TEST_CASE("config json round trip") {
  Config c = extended_desk_config(4);
  std::string text = config_to_json(c);
  Config back = config_from_json(text);
  CHECK(back.m1 == c.m1);
  CHECK(back.s == c.s);
  CHECK(back.n1 == c.n1);
  CHECK(back.nEven == c.nEven);
  CHECK(back.nOddRest == c.nOddRest);
  CHECK(back.q == c.q);
  CHECK(back.K == c.K);
  CHECK(back.strict == c.strict);
  CHECK(config_to_json(back) == text);
}
