#ifndef XNLAB_NORM_HPP
#define XNLAB_NORM_HPP

#include "xnlab/tree.hpp"

namespace xn::norm {

using core::Elem;
using core::Node;
using core::Vec00;
using params::ParamSystem;

struct NormResult {
  Rat value;          // certified lower bound, attained by the certificate
  Rat upper;          // sound upper bound for the supremum
  Rat gap;            // upper - value
  Node certificate;
  int depth = 0;
  bool stabilized = false;
  Rat evenClassValue; // best value using even-weighted functionals only
};

// Certified two-sided evaluation of sup { f(x) } over the norming set,
// by a fixed-point dynamic program over interval partitions of the support.
// evaluate(result.certificate, x) == result.value exactly.
NormResult norm(const Vec00& x, const ParamSystem& sys, int depth = 8,
                const Rat& tol = Rat(0));

// same, on the restriction of x to [lo, hi]
NormResult norm_interval(const Vec00& x, Elem lo, Elem hi,
                         const ParamSystem& sys, int depth = 8,
                         const Rat& tol = Rat(0));

// Rational point of the radius-ball of l_q nearly maximizing the pairing
// with `values` (exact when the dual optimum is rational). values nonneg,
// not all zero.
std::vector<Rat> holder_optimal_coefficients(const std::vector<Rat>& values,
                                             const Rat& q, const Rat& radius,
                                             unsigned bits = 96);

} // namespace xn::norm

#endif
