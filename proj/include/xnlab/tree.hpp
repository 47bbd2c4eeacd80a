#ifndef XNLAB_TREE_HPP
#define XNLAB_TREE_HPP

#include <optional>
#include <string>
#include <vector>

#include "xnlab/params.hpp"
#include "xnlab/schreier.hpp"
#include "xnlab/vec00.hpp"

namespace xn::core {

// A node of a functional tree. Leaves (weightIndex == 0) stand for
// sign * e*_{basisIndex}; internal nodes stand for
// (gamma / m_{weightIndex}) * sum of children, where each child's gamma is
// its coefficient in the combination. Odd-weight nodes may carry an
// interval restriction [elo, ehi].
struct Node {
  Rat gamma = Rat(1);
  int weightIndex = 0;
  int sign = 1;
  Elem basisIndex = 0;
  bool hasE = false;
  Elem elo = 0, ehi = 0;
  std::vector<Node> children;

  bool is_leaf() const { return weightIndex == 0; }
};

Node leaf(int sign, Elem j, const Rat& gamma = Rat(1));
Node internal(int weightIndex, std::vector<Node> children,
              const Rat& gamma = Rat(1));

// effective support, honoring interval restrictions on the path
FiniteSubset support(const Node& t);
Node* child_at(Node& t, const std::vector<std::size_t>& path);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Certifies that the tree denotes a member of the norming set (root
// coefficient +-1, ball and admissibility clauses at every node, odd nodes
// drawing even-weighted internal children with pairwise distinct weights).
ValidationReport validate_tree(const Node& t, const params::ParamSystem& sys);

Rat evaluate(const Node& t, const Vec00& x, const params::ParamSystem& sys);

// one term of an antichain expansion: coeff * (restriction of the subtree
// to [lo, hi]); lo = 1, hi = max Elem when unrestricted
struct FlatTerm {
  Rat coeff;
  Node part;
};

// paths are child-index sequences from the root; {} is the root itself
std::vector<FlatTerm> flatten(const Node& t,
                              const std::vector<std::vector<std::size_t>>& antichain,
                              const params::ParamSystem& sys);

struct AdmissibilityCert {
  long d = 0;
  bool admissible = false;
  FiniteSubset mins;
};

AdmissibilityCert antichain_admissibility(const Node& t,
                                          const std::vector<std::vector<std::size_t>>& antichain,
                                          const params::ParamSystem& sys);

struct DecompositionResult {
  int k = 0;
  std::vector<Rat> lambda;
  std::vector<Node> parts;        // leaves or subtrees, root gamma 1
  std::vector<std::size_t> I1, I2;
  FiniteSubset leafIndices;       // {j_i : i in I1}
};

DecompositionResult decompose(const Node& t, int k, const params::ParamSystem& sys);

FiniteSubset large_coefficient_set(const Node& t, int k,
                                   const params::ParamSystem& sys);

// Realizes (1 / prod_l m_{2l}^{a_l}) sum beta_i parts_i as a member of the
// norming set by nested regrouping. a is indexed a[l-1] = a_l for
// l = 1..k-1. Requires the parts S_{sum a_l n_{2l}}-admissible and
// sum |beta_i|^q <= 1; when group masses are irrational the construction
// needs strict slack below 1 to round them upward.
Node compose_scaled(const params::ParamSystem& sys, const std::vector<long>& a,
                    const std::vector<Node>& parts, const std::vector<Rat>& betas);

std::optional<Node> restrict_tree(const Node& t, Elem lo, Elem hi);

std::string tree_to_json(const Node& t);
Node tree_from_json(const std::string& text);

// exact when q is an integer, otherwise a sound (possibly conservative)
// certified comparison: true only if sum |v_i|^q <= bound is certain
bool qmass_leq(const std::vector<Rat>& vals, const Rat& bound,
               const params::ParamSystem& sys);

// q-th root of sum |v_i|^q: exact rational when possible, otherwise an
// upper bound with the given precision
Rat qmass_root_upper(const std::vector<Rat>& vals, const params::ParamSystem& sys,
                     unsigned bits = 64);
bool qmass_root_exact(const std::vector<Rat>& vals, const params::ParamSystem& sys,
                      Rat* root);

} // namespace xn::core

#endif
