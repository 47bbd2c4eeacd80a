#ifndef XNLAB_GEN_HPP
#define XNLAB_GEN_HPP

#include <cstdint>
#include <vector>

#include "xnlab/tree.hpp"

namespace xn::gen {

using core::Elem;
using core::FiniteSubset;
using core::Node;

// splitmix64: tiny, fully deterministic, identical across platforms
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [lo, hi]
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(long num = 1, long den = 2) { return uniform(1, den) <= num; }
};

// random rational in (0, 1] with denominator at most denBound
Rat unit_rat(Rng& r, long denBound = 64);

// exact rational point of the l_2 unit sphere (sum of squares is 1),
// built by chained rational rotations; entries are nonzero with random signs
std::vector<Rat> unit_l2_vector(Rng& r, std::size_t n);

// rational point strictly inside the l_q ball (q from the system)
std::vector<Rat> ball_lq_vector(Rng& r, std::size_t n, const params::ParamSystem& sys);

// random member of the level-n family, all elements in [lo, cap];
// sizes kept modest via the budget
FiniteSubset random_member(Rng& r, int n, Elem lo, Elem cap, std::size_t budget);

struct TreeOptions {
  int maxDepth = 3;
  int maxChildren = 4;
  Elem start = 8;     // leftmost support element
  bool allowOdd = true;
};

// random valid functional tree; support strictly increasing from opts.start
Node random_tree(Rng& r, const params::ParamSystem& sys, const TreeOptions& opts);

// random normalized-in-norm block vector on [cursor, cursor+width): the
// largest coefficient is +-1 and the rest are small, so the engine norm is
// exactly 1 (leaf functional attains it, no class can exceed it)
core::Vec00 normalized_block(Rng& r, Elem& cursor, int width,
                             const params::ParamSystem& sys);

} // namespace xn::gen

#endif
