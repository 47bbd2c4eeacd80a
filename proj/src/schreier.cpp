#include "xnlab/schreier.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace xn::schreier {

FiniteSubset::FiniteSubset(std::vector<Elem> elems) : elems_(std::move(elems)) {
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (elems_[i] < 1) throw Error("BAD_SUBSET", "elements must be positive");
    if (i && elems_[i] <= elems_[i - 1])
      throw Error("BAD_SUBSET", "elements must be strictly increasing");
  }
}

Elem FiniteSubset::min() const {
  if (empty()) throw Error("EMPTY_SET", "min of empty set");
  return elems_.front();
}

Elem FiniteSubset::max() const {
  if (empty()) throw Error("EMPTY_SET", "max of empty set");
  return elems_.back();
}

namespace {

// Length of the longest prefix of arr[pos..) that is a member at level n.
// Greedy maximal chunks are optimal: the families are hereditary and
// spreading, so an exchange argument applies level by level.
std::size_t maxlen(std::span<const Elem> arr, std::size_t pos, int n) {
  if (pos >= arr.size()) return 0;
  if (n <= 0) return 1;
  std::size_t j = pos;
  Elem budget = arr[pos];
  for (Elem t = 0; t < budget && j < arr.size(); ++t) j += maxlen(arr, j, n - 1);
  return j - pos;
}

} // namespace

bool is_member(std::span<const Elem> sorted, int n) {
  if (sorted.empty()) return true;
  if (n > kLevelCap) n = kLevelCap;
  if (n == 0) return sorted.size() == 1;
  return maxlen(sorted, 0, n) == sorted.size();
}

bool is_member(const FiniteSubset& f, int n) { return is_member(std::span(f.elems()), n); }

int member_index(const FiniteSubset& f) {
  if (f.size() <= 1) return 0;
  if (f.min() == 1) return -1; // budget 1 at every level, set can never grow
  for (int n = 1; n <= kLevelCap; ++n)
    if (is_member(f, n)) return n;
  return -1;
}

namespace {

Witness build_witness(std::span<const Elem> arr, int n) {
  Witness w;
  w.n = n;
  w.set = FiniteSubset(std::vector<Elem>(arr.begin(), arr.end()));
  if (n == 0) return w;
  std::size_t j = 0;
  Elem budget = arr.empty() ? 0 : arr[0];
  for (Elem t = 0; t < budget && j < arr.size(); ++t) {
    std::size_t len = maxlen(arr, j, n - 1);
    w.parts.push_back(build_witness(arr.subspan(j, len), n - 1));
    j += len;
  }
  assert(j == arr.size());
  return w;
}

} // namespace

std::optional<Witness> witness(const FiniteSubset& f, int n) {
  int eff = std::min(n, kLevelCap);
  if (!is_member(f, eff)) return std::nullopt;
  if (f.empty() || eff == 0) {
    Witness w;
    w.n = n;
    w.set = f;
    return w;
  }
  Witness w = build_witness(std::span(f.elems()), eff);
  w.n = n;
  return w;
}

bool validate_witness(const Witness& w) {
  if (w.n < 0) return false;
  if (w.n == 0 || w.set.empty()) return w.parts.empty() && w.set.size() <= 1;
  if (w.parts.empty()) return false;
  if (static_cast<Elem>(w.parts.size()) > w.set.min()) return false;
  std::vector<Elem> concat;
  for (std::size_t i = 0; i < w.parts.size(); ++i) {
    const Witness& p = w.parts[i];
    if (p.n != std::min(w.n, kLevelCap) - 1 && p.n != w.n - 1) return false;
    if (p.set.empty()) return false;
    if (i && p.set.min() <= w.parts[i - 1].set.max()) return false;
    if (!validate_witness(p)) return false;
    concat.insert(concat.end(), p.set.elems().begin(), p.set.elems().end());
  }
  return concat == w.set.elems();
}

bool is_admissible(std::span<const FiniteSubset> blocks, int n) {
  std::vector<Elem> mins;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty()) continue;
    if (!mins.empty() && blocks[i].min() <= blocks[i - 1].max())
      return false;
    mins.push_back(blocks[i].min());
  }
  return is_member(std::span<const Elem>(mins), n);
}

std::optional<std::vector<FiniteSubset>> split(const FiniteSubset& f, int inner, int outer) {
  inner = std::min(inner, kLevelCap);
  std::vector<FiniteSubset> parts;
  std::vector<Elem> mins;
  std::span<const Elem> arr(f.elems());
  std::size_t j = 0;
  while (j < arr.size()) {
    std::size_t len = std::max<std::size_t>(1, maxlen(arr, j, inner));
    parts.emplace_back(std::vector<Elem>(arr.begin() + j, arr.begin() + j + len));
    mins.push_back(arr[j]);
    j += len;
  }
  if (!is_member(std::span<const Elem>(mins), outer)) return std::nullopt;
  return parts;
}

namespace {

const Rat& weight_of(const std::map<Elem, Rat>& w, Elem e) {
  static const Rat zero(0);
  auto it = w.find(e);
  return it == w.end() ? zero : it->second;
}

// Top-t selection structure over weight ranks (rank 0 = heaviest).
struct RankTree {
  int n;
  long inserted = 0;
  std::vector<long> cnt;
  std::vector<Rat> sum;
  explicit RankTree(int n_) : n(n_), cnt(n_ + 1, 0), sum(n_ + 1, Rat(0)) {}
  void insert(int rank, const Rat& w) {
    ++inserted;
    for (int i = rank + 1; i <= n; i += i & -i) { cnt[i]++; sum[i] += w; }
  }
  // 1-based index of the t-th smallest inserted rank (counts are 0/1).
  int select(long t) const {
    int pos = 0;
    int logn = 0;
    while ((1 << (logn + 1)) <= n) ++logn;
    long need = t;
    for (int k = logn; k >= 0; --k) {
      int next = pos + (1 << k);
      if (next <= n && cnt[next] < need) {
        need -= cnt[next];
        pos = next;
      }
    }
    return pos + 1;
  }
  Rat prefix_sum(int idx) const {
    Rat acc(0);
    for (int i = idx; i > 0; i -= i & -i) acc += sum[i];
    return acc;
  }
  // Sum of the t smallest inserted ranks (i.e. the t heaviest weights).
  Rat top_sum(long t) const {
    t = std::min(t, inserted);
    if (t <= 0) return Rat(0);
    return prefix_sum(select(t));
  }
};

// n == 1 case: G anchored at position s takes s plus the heaviest
// min(F[s]-1, N-1-s) elements after s.
MassResult mass_level1(const FiniteSubset& f, const std::map<Elem, Rat>& w) {
  const auto& a = f.elems();
  const std::size_t N = a.size();
  std::vector<Rat> wt(N);
  for (std::size_t i = 0; i < N; ++i) wt[i] = weight_of(w, a[i]);

  // order positions by (weight desc, position asc) -> rank
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return wt[x] > wt[y]; });
  std::vector<int> rank(N);
  for (std::size_t r = 0; r < N; ++r) rank[order[r]] = static_cast<int>(r);

  // prefix sums over ranks for exact top-t queries with a count BIT
  RankTree bit(static_cast<int>(N));
  Rat best(0);
  int bestS = -1;
  long bestT = 0;
  for (int s = static_cast<int>(N) - 1; s >= 0; --s) {
    long t = std::min<long>(a[s] - 1, static_cast<long>(N) - 1 - s);
    Rat cand = wt[s] + bit.top_sum(t);
    if (cand > best) { best = cand; bestS = s; bestT = t; }
    bit.insert(rank[s], wt[s]);
  }
  MassResult res;
  res.mass = best;
  if (bestS >= 0) {
    std::vector<int> suffix;
    for (std::size_t i = bestS + 1; i < N; ++i) suffix.push_back(static_cast<int>(i));
    std::stable_sort(suffix.begin(), suffix.end(),
                     [&](int x, int y) { return wt[x] > wt[y]; });
    std::vector<Elem> chosen{a[bestS]};
    for (long i = 0; i < bestT && i < static_cast<long>(suffix.size()); ++i)
      chosen.push_back(a[suffix[i]]);
    std::sort(chosen.begin(), chosen.end());
    res.attaining = FiniteSubset(chosen);
  }
  return res;
}

// General anchored DP. A[l][s][e]: best mass of a level-l member with first
// position s and last position e (nullopt if impossible).
struct AnchoredDP {
  const std::vector<Elem>& a;
  std::vector<Rat> wt;
  std::size_t N;
  int levels;
  // value tables
  std::vector<std::vector<std::vector<std::optional<Rat>>>> A;

  AnchoredDP(const FiniteSubset& f, const std::map<Elem, Rat>& w, int n)
      : a(f.elems()), N(f.size()), levels(n) {
    wt.resize(N);
    for (std::size_t i = 0; i < N; ++i) wt[i] = weight_of(w, a[i]);
    A.assign(levels + 1, {});
    for (int l = 0; l <= levels; ++l) {
      A[l].assign(N, std::vector<std::optional<Rat>>(N));
      for (std::size_t s = 0; s < N; ++s) {
        if (l == 0) {
          A[l][s][s] = wt[s];
        } else {
          chain(l, s, A[l][s]);
        }
      }
    }
  }

  // Chain DP for level l anchored at s: at most budget successive level-(l-1)
  // parts, the first anchored exactly at s. Fills out[e] with the best mass
  // over any part count within budget.
  struct Back { int prevEnd = -2; int partStart = -1; };
  void chain(int l, std::size_t s, std::vector<std::optional<Rat>>& out) const {
    long budget = std::min<long>(a[s], static_cast<long>(N - s));
    std::vector<std::optional<Rat>> C(N), D(N);
    for (std::size_t e = s; e < N; ++e) {
      C[e] = A[l - 1][s][e];
      D[e] = C[e];
    }
    for (long t = 2; t <= budget; ++t) {
      std::vector<std::optional<Rat>> pref(N); // prefix max of C over ends <= i
      std::optional<Rat> run;
      for (std::size_t i = 0; i < N; ++i) {
        if (C[i] && (!run || *C[i] > *run)) run = C[i];
        pref[i] = run;
      }
      std::vector<std::optional<Rat>> C2(N);
      for (std::size_t s2 = s + 1; s2 < N; ++s2) {
        if (!pref[s2 - 1]) continue;
        for (std::size_t e2 = s2; e2 < N; ++e2) {
          if (!A[l - 1][s2][e2]) continue;
          Rat cand = *pref[s2 - 1] + *A[l - 1][s2][e2];
          if (!C2[e2] || cand > *C2[e2]) C2[e2] = cand;
        }
      }
      C.swap(C2);
      bool any = false;
      for (std::size_t e = s; e < N; ++e) {
        if (C[e] && (!D[e] || *C[e] > *D[e])) D[e] = C[e];
        if (C[e]) any = true;
      }
      if (!any) break;
    }
    out = D;
  }
};

} // namespace

MassResult max_admissible_mass(const FiniteSubset& f,
                               const std::map<Elem, Rat>& weights, int n) {
  for (const auto& [e, wv] : weights)
    if (wv < 0) throw Error("BAD_WEIGHTS", "weights must be nonnegative");
  MassResult res;
  res.mass = 0;
  if (f.empty()) return res;

  Rat total(0);
  for (Elem e : f.elems()) total += weight_of(weights, e);
  int eff = std::min(n, kLevelCap);
  if (is_member(f, eff)) {
    res.mass = total;
    res.attaining = f;
    return res;
  }
  if (eff == 0) {
    for (Elem e : f.elems()) {
      const Rat& w = weight_of(weights, e);
      if (w > res.mass) { res.mass = w; res.attaining = FiniteSubset({e}); }
    }
    return res;
  }
  if (eff == 1) return mass_level1(f, weights);

  if (f.size() > 200)
    throw Error("TOO_LARGE", "generic admissible-mass DP capped at 200 points");

  AnchoredDP dp(f, weights, eff);
  const std::size_t N = f.size();
  // best over anchors at the top level
  int bestS = -1, bestE = -1;
  for (std::size_t s = 0; s < N; ++s)
    for (std::size_t e = s; e < N; ++e)
      if (dp.A[eff][s][e] && *dp.A[eff][s][e] > res.mass) {
        res.mass = *dp.A[eff][s][e];
        bestS = static_cast<int>(s);
        bestE = static_cast<int>(e);
      }
  if (bestS < 0) return res;

  // reconstruct: walk levels, recomputing chain backpointers per anchor
  std::vector<Elem> chosen;
  struct Frame { int l, s, e; };
  std::vector<Frame> stack{{eff, bestS, bestE}};
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    if (fr.l == 0) {
      chosen.push_back(f.elems()[fr.s]);
      continue;
    }
    long budget = std::min<long>(f.elems()[fr.s], static_cast<long>(N - fr.s));
    // Re-run the chain keeping per-t values and backpointers to locate the
    // part count achieving the recorded optimum, then walk the parts.
    Rat target = *dp.A[fr.l][fr.s][fr.e];
    {
      std::vector<std::optional<Rat>> C(N);
      std::vector<std::vector<AnchoredDP::Back>> bp(budget + 1,
                                                    std::vector<AnchoredDP::Back>(N));
      for (std::size_t e = fr.s; e < N; ++e) {
        C[e] = dp.A[fr.l - 1][fr.s][e];
        if (C[e]) bp[1][e] = {-1, fr.s};
      }
      long foundT = (C[fr.e] && *C[fr.e] == target) ? 1 : -1;
      for (long t = 2; t <= budget && foundT < 0; ++t) {
        std::vector<std::optional<Rat>> pref(N);
        std::vector<int> prefEnd(N, -1);
        std::optional<Rat> run;
        int re = -1;
        for (std::size_t i = 0; i < N; ++i) {
          if (C[i] && (!run || *C[i] > *run)) { run = C[i]; re = static_cast<int>(i); }
          pref[i] = run;
          prefEnd[i] = re;
        }
        std::vector<std::optional<Rat>> C2(N);
        for (std::size_t s2 = fr.s + 1; s2 < N; ++s2) {
          if (!pref[s2 - 1]) continue;
          for (std::size_t e2 = s2; e2 < N; ++e2) {
            if (!dp.A[fr.l - 1][s2][e2]) continue;
            Rat cand = *pref[s2 - 1] + *dp.A[fr.l - 1][s2][e2];
            if (!C2[e2] || cand > *C2[e2]) {
              C2[e2] = cand;
              bp[t][e2] = {prefEnd[s2 - 1], static_cast<int>(s2)};
            }
          }
        }
        C.swap(C2);
        if (C[fr.e] && *C[fr.e] == target) foundT = t;
      }
      if (foundT < 0) throw Error("INTERNAL", "mass reconstruction failed");
      // walk back through parts
      long t = foundT;
      int e = fr.e;
      while (t >= 1) {
        AnchoredDP::Back b = bp[t][e];
        stack.push_back({fr.l - 1, b.partStart, e});
        e = b.prevEnd;
        --t;
        if (t >= 1 && e < 0) throw Error("INTERNAL", "mass backpointer corrupt");
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  res.attaining = FiniteSubset(chosen);
  return res;
}

} // namespace xn::schreier
