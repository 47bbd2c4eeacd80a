#ifndef XNLAB_OPERATOR_LAB_HPP
#define XNLAB_OPERATOR_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xnlab/averages.hpp"

namespace xn::oplab {

using avg::XkFamily;
using core::Elem;
using core::Node;
using core::Vec00;
using params::ParamSystem;

// Tx = sum_i y_i(x) e_{target_i}, where y_i is the functional of the family
// built at class 2i. Supports are successive, so the sum is locally finite.
struct OperatorT {
  std::vector<Elem> targets;
  std::vector<XkFamily> ys;
  Rat M;
};

// count functionals y_i = x_{2i} on the classes 2, 4, ..., 2*count
OperatorT build_operator(const ParamSystem& sys, int count, Elem start,
                         long budget = 4096);

Vec00 apply(const OperatorT& T, const Vec00& x, const ParamSystem& sys);

struct CertifyReport {
  long vectors = 0;
  long dualChecks = 0;
  long bandChecks = 0;
  Rat bound;          // max{M, 1}
  Rat worstRatio;     // max over the corpus of upper(Tx) / lower(x)
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

CertifyReport certify_norm_bound(const OperatorT& T,
                                 const std::vector<Vec00>& corpus,
                                 const ParamSystem& sys,
                                 std::uint64_t seed = 1);

struct WitnessResult {
  std::vector<Vec00> points;  // normalized preimages u_i
  std::vector<Vec00> images;  // Tu_i, pairwise disjoint supports
  Rat delta;                  // certified pairwise separation of the images
};

WitnessResult noncompact_witness(const OperatorT& T, int count,
                                 const ParamSystem& sys);

// finite truncation of the embedding: S_a x = sum a_i y_i(x) e_{target_i}
struct EmbedResult {
  std::vector<Rat> a;
  Rat lower;     // certified operator-norm lower bound, c * max|a|
  Rat upper;     // certified operator-norm upper bound, max{M,1} * max|a|
  Vec00 witness; // attains at least `lower` under S_a, up to normalization
};

EmbedResult linf_embed(const OperatorT& T, const std::vector<Rat>& a,
                       const ParamSystem& sys);

std::string operator_to_json(const OperatorT& T);
OperatorT operator_from_json(const std::string& text);

} // namespace xn::oplab

#endif
