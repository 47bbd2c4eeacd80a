#include "xnlab/gen.hpp"

#include <algorithm>

namespace xn::gen {

Rat unit_rat(Rng& r, long denBound) {
  long den = r.uniform(2, denBound);
  long num = r.uniform(1, den);
  return make_rat(num, den);
}

std::vector<Rat> unit_l2_vector(Rng& r, std::size_t n) {
  std::vector<Rat> v{Rat(1)};
  while (v.size() < n) {
    // split entry i by the rational rotation (cos, sin) = ((1-t^2), 2t)/(1+t^2),
    // which preserves the sum of squares exactly
    std::size_t i = static_cast<std::size_t>(r.uniform(0, static_cast<long>(v.size()) - 1));
    long den = r.uniform(3, 9);
    long num = r.uniform(1, den - 1);
    Rat t = make_rat(num, den);
    Rat c = (Rat(1) - t * t) / (Rat(1) + t * t);
    Rat s = (Rat(2) * t) / (Rat(1) + t * t);
    Rat a = v[i];
    v[i] = a * c;
    v.push_back(a * s);
  }
  for (auto& a : v)
    if (r.coin()) a = -a;
  return v;
}

std::vector<Rat> ball_lq_vector(Rng& r, std::size_t n, const params::ParamSystem& sys) {
  // shrink an exact l_2 unit vector; entries in (-1,1) with l_2 mass < 1,
  // hence l_q mass < 1 for q >= 2 as well
  auto v = unit_l2_vector(r, n);
  Rat shrink = unit_rat(r, 16);
  if (shrink == Rat(1)) shrink = Rat(15, 16);
  for (auto& a : v) a *= shrink;
  (void)sys;
  return v;
}

FiniteSubset random_member(Rng& r, int n, Elem lo, Elem cap, std::size_t budget) {
  if (n <= 0 || budget <= 1) {
    return FiniteSubset{{lo}};
  }
  // level n: at most min(F_1) successive level-(n-1) sets
  Elem start = lo;
  long maxParts = std::min<long>(static_cast<long>(lo), 3);
  long parts = r.uniform(1, maxParts);
  std::vector<Elem> out;
  std::size_t per = std::max<std::size_t>(1, budget / static_cast<std::size_t>(parts));
  for (long i = 0; i < parts && start <= cap; ++i) {
    FiniteSubset piece = random_member(r, n - 1, start, cap, per);
    for (Elem e : piece.elems()) out.push_back(e);
    start = piece.max() + 1 + r.uniform(0, 2);
  }
  return FiniteSubset{out};
}

namespace {

Node rnd_node(Rng& r, const params::ParamSystem& sys, Elem& cursor, int depth,
              bool underOdd, int maxChildren) {
  if (depth <= 0 || (!underOdd && r.coin(1, 3))) {
    Node lf = core::leaf(r.coin() ? 1 : -1, cursor);
    cursor += static_cast<Elem>(r.uniform(1, 3));
    return lf;
  }
  int K = sys.cfg.K;
  bool odd = !underOdd && depth >= 2 && r.coin(1, 4);
  int w; // index into sys.m
  long nChildren;
  if (odd) {
    long k = r.uniform(1, K);
    w = static_cast<int>(2 * k + 1);
    nChildren = r.uniform(1, std::min<long>(maxChildren, K));
  } else {
    long k = r.uniform(1, K);
    w = static_cast<int>(2 * k);
    nChildren = r.uniform(1, maxChildren);
  }
  std::vector<Node> ch;
  if (odd) {
    // internal even-weighted children with pairwise distinct weights
    std::vector<int> ks(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) ks[static_cast<std::size_t>(i)] = i + 1;
    for (long i = 0; i < nChildren; ++i) {
      std::size_t pick = static_cast<std::size_t>(r.uniform(0, static_cast<long>(ks.size()) - 1));
      int kc = ks[pick];
      ks.erase(ks.begin() + static_cast<long>(pick));
      Node sub = core::leaf(1, cursor);
      cursor += 1;
      Node even = core::internal(2 * kc, {sub});
      even.children[0].gamma = Rat(1);
      ch.push_back(even);
    }
  } else {
    for (long i = 0; i < nChildren; ++i)
      ch.push_back(rnd_node(r, sys, cursor, depth - 1, true, maxChildren));
  }
  // coefficients: exact unit l_2 vector shrunk a little keeps every
  // admissible ball constraint satisfied (q >= 2)
  auto gs = unit_l2_vector(r, ch.size());
  for (std::size_t i = 0; i < ch.size(); ++i) ch[i].gamma = gs[i] * Rat(7, 8);
  Node nd = core::internal(w, ch);
  if (odd && r.coin(1, 3)) {
    nd.hasE = true;
    nd.elo = 1;
    nd.ehi = cursor + 4;
  }
  return nd;
}

} // namespace

Node random_tree(Rng& r, const params::ParamSystem& sys, const TreeOptions& opts) {
  Elem cursor = opts.start;
  Node root = rnd_node(r, sys, cursor, opts.maxDepth,
                       /*underOdd=*/!opts.allowOdd, opts.maxChildren);
  if (root.is_leaf()) {
    root.gamma = Rat(1);
  } else {
    root.gamma = r.coin() ? Rat(1) : Rat(-1);
  }
  return root;
}

core::Vec00 normalized_block(Rng& r, Elem& cursor, int width,
                             const params::ParamSystem& sys) {
  (void)sys;
  core::Vec00 x;
  long peak = r.uniform(0, width - 1);
  for (int i = 0; i < width; ++i) {
    Rat a;
    if (i == peak) {
      a = r.coin() ? Rat(1) : Rat(-1);
    } else {
      long den = r.uniform(64, 256);
      long num = r.uniform(1, 8);
      a = make_rat(r.coin() ? num : -num, den);
    }
    x.set(cursor + i, a);
  }
  cursor += static_cast<Elem>(width + r.uniform(1, 3));
  return x;
}

} // namespace xn::gen
