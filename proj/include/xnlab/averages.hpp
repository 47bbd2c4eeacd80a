#ifndef XNLAB_AVERAGES_HPP
#define XNLAB_AVERAGES_HPP

#include <map>
#include <string>
#include <vector>

#include "xnlab/gen.hpp"
#include "xnlab/tree.hpp"

namespace xn::avg {

using core::Elem;
using core::FiniteSubset;
using core::Node;
using core::Vec00;
using params::ParamSystem;

// A repeated hierarchy average: coefficients a on a set F, built as a
// uniform tower of successive groups so that every group mass is an exact
// rational. eps is the achieved smallness level: the l_q mass of any
// subset of F one admissibility level below F's is certified below it.
struct AverageBlock {
  int k = 0;
  FiniteSubset F;
  std::map<Elem, Rat> a;
  Rat eps;
  Rat delta;   // 1 - sum |a|^q, zero for the exact builds
  long arity = 0;
  int depth = 0;
};

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// re-certify the three block invariants from scratch
VerifyReport verify_average(const AverageBlock& avg, const ParamSystem& sys);

// Uniform tower: level-0 blocks are singletons with coefficient 1, each
// higher level concatenates `arity` successive blocks with outer
// coefficient arity^(-1/q). arity is a q-th power so the coefficients are
// rational; depth is capped by the support budget. Throws
// EPS_INFEASIBLE_AT_BUDGET when the certified smallness cannot reach eps
// within the budget; the message reports the support size a strict eps
// would need.
AverageBlock build_average(const ParamSystem& sys, int k, const Rat& eps,
                           Elem startIndex, long budget = 4096);

// the functional (1 / m_{2k}) sum a_i e*_i realized as a norming-set member
// by nested regrouping along the tower's level boundaries
Node build_xk(const ParamSystem& sys, const AverageBlock& avg);

struct XkFamily {
  AverageBlock avg;
  Node tree;
};

// consecutive functionals with successive supports, one per k in ks
std::vector<XkFamily> build_family(const ParamSystem& sys,
                                   const std::vector<int>& ks, Elem start,
                                   long budget = 4096);

struct TrialReport {
  long trials = 0;
  long passes = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// random admissible combinations sum beta_k x_k* regrouped into a single
// member of the norming set and re-validated
TrialReport verify_upper_lqw(const std::vector<XkFamily>& funcs,
                             const ParamSystem& sys, long trials,
                             std::uint64_t seed);

struct SeminormResult {
  Rat bound;        // certified lower bound for the functional seminorm
  Vec00 witness;    // the vector x_k the bound is attained on
  Rat pairing;      // x_k*(x_k), exact
  Rat upper;        // engine upper bound for the witness norm
  bool generalizedOk = false; // upper <= 2 eps + 24 / m_{2k}
};

SeminormResult seminorm_lower(const AverageBlock& avg, const ParamSystem& sys);

std::string average_to_json(const AverageBlock& avg);
AverageBlock average_from_json(const std::string& text);

} // namespace xn::avg

#endif
