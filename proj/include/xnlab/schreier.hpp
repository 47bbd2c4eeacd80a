#ifndef XNLAB_SCHREIER_HPP
#define XNLAB_SCHREIER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "xnlab/rat.hpp"

namespace xn::schreier {

using Elem = std::int64_t;

// Strictly increasing positive integers. The empty set is allowed.
class FiniteSubset {
 public:
  FiniteSubset() = default;
  explicit FiniteSubset(std::vector<Elem> elems);
  const std::vector<Elem>& elems() const { return elems_; }
  bool empty() const { return elems_.empty(); }
  std::size_t size() const { return elems_.size(); }
  Elem min() const;
  Elem max() const;
  bool operator==(const FiniteSubset&) const = default;

 private:
  std::vector<Elem> elems_;
};

// Hierarchy levels are capped internally at kLevelCap: for any set with fewer
// than 2^62 elements, membership at level n >= kLevelCap coincides with
// membership at kLevelCap (each unfolding level at least halves the part count).
inline constexpr int kLevelCap = 64;

bool is_member(std::span<const Elem> sorted, int n);
bool is_member(const FiniteSubset& f, int n);

// Smallest n with f in the n-th family (0 if singleton/empty; -1 if never,
// which happens exactly for sets of size >= 2 containing 1).
int member_index(const FiniteSubset& f);

// Recorded unfolding: at level 0 the set is a singleton or empty; at level
// n >= 1 it is the union of at most min(set) successive parts, each carrying
// its own witness one level down.
struct Witness {
  int n = 0;
  FiniteSubset set;
  std::vector<Witness> parts; // empty iff n == 0
};

std::optional<Witness> witness(const FiniteSubset& f, int n);
bool validate_witness(const Witness& w);

// Blocks are admissible at level n when they are successive and the set of
// their minima is a member at level n.
bool is_admissible(std::span<const FiniteSubset> blocks, int n);

// Convolution split: partition f into successive parts, each a member at
// level `inner`, whose minima form a member at level `outer`. Exists whenever
// f is a member at level inner+outer; returns nullopt otherwise.
std::optional<std::vector<FiniteSubset>> split(const FiniteSubset& f, int inner, int outer);

struct MassResult {
  Rat mass;        // maximal sum of weights over member subsets
  FiniteSubset attaining;
};

// Exact maximization of sum of weights over subsets of f that are members at
// level n. Weights must be nonnegative. General levels use an anchored
// interval DP; callers should keep |f| modest (<= ~128) for n >= 2 unless f
// itself is a member (detected and short-circuited).
MassResult max_admissible_mass(const FiniteSubset& f,
                               const std::map<Elem, Rat>& weights, int n);

} // namespace xn::schreier

#endif
