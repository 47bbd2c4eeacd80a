#include "xnlab/norm.hpp"

#include <algorithm>

namespace xn::norm {

namespace {

using core::FiniteSubset;
using core::internal;
using core::leaf;

// One cell of the interval table: certified lower value with its tree, and
// an exact rational upper bound on the squared supremum. Tracking squares
// keeps every level of the recursion rational, so the fixed point is hit
// exactly and stabilization is a real equality test.
struct Cell {
  Rat lo;
  Rat up2;
  Node cert;
};

struct Engine {
  const ParamSystem& sys;
  std::vector<Elem> pos;
  std::vector<Rat> val;   // signed coefficients, |max| normalized to 1
  std::vector<Rat> sq;    // prefix sums of squares: sq[i+1] - sq[j]
  std::size_t m;
  int K;

  std::vector<Cell> cell;              // m*m, row = left endpoint
  std::vector<signed char> admCache;   // -1 unknown, 0 no, 1 yes, per (k,i,j)
  std::vector<Rat> inv2ByClass;        // 1 / m_{2k}^2, k = 1..K
  std::vector<bool> skipClass;         // class provably below every coefficient

  Cell& at(std::size_t i, std::size_t j) { return cell[i * m + j]; }

  Rat mass(std::size_t i, std::size_t j) const { return sq[j + 1] - sq[i]; }

  bool admissible(int k, std::size_t i, std::size_t j) {
    signed char& c = admCache[(static_cast<std::size_t>(k) - 1) * m * m + i * m + j];
    if (c < 0) {
      std::vector<Elem> pts(pos.begin() + static_cast<long>(i),
                            pos.begin() + static_cast<long>(j) + 1);
      int lvl = static_cast<int>(std::min<long>(sys.n[2 * k], schreier::kLevelCap));
      c = schreier::is_member(FiniteSubset(std::move(pts)), lvl) ? 1 : 0;
    }
    return c == 1;
  }
};

// best split of [i, j] into successive parts maximizing the sum of the
// cells' squared scores; returns the parts
struct SplitOut {
  Rat total;
  std::vector<std::pair<std::size_t, std::size_t>> parts;
};

template <class Score>
SplitOut best_split(std::size_t i, std::size_t j, Score&& score) {
  std::size_t w = j - i + 1;
  std::vector<Rat> dp(w + 1, Rat(0));
  std::vector<std::size_t> cut(w + 1, 0);
  for (std::size_t t = 1; t <= w; ++t) {
    dp[t] = Rat(-1);
    for (std::size_t u = 1; u <= t; ++u) {
      Rat cand = dp[u - 1] + score(i + u - 1, i + t - 1);
      if (cand > dp[t]) {
        dp[t] = cand;
        cut[t] = u - 1;
      }
    }
  }
  SplitOut out;
  out.total = dp[w];
  for (std::size_t t = w; t > 0; t = cut[t])
    out.parts.push_back({i + cut[t], i + t - 1});
  std::reverse(out.parts.begin(), out.parts.end());
  return out;
}

} // namespace

std::vector<Rat> holder_optimal_coefficients(const std::vector<Rat>& values,
                                             const Rat& q, const Rat& radius,
                                             unsigned bits) {
  if (values.empty()) throw Error("BAD_INPUT", "no values");
  Rat s(0);
  for (const Rat& v : values) {
    if (v < 0) throw Error("BAD_INPUT", "values must be nonnegative");
    s += v;
  }
  if (s == 0) throw Error("BAD_INPUT", "values must not all vanish");

  if (q == Rat(2)) {
    // dual optimum gamma_i = radius * v_i / sqrt(sum v^2)
    Rat mass(0);
    for (const Rat& v : values) mass += v * v;
    Rat root, c;
    if (is_rational_square(mass, &root)) {
      c = radius / root;
    } else {
      c = radius / sqrt_upper(mass, bits);
    }
    std::vector<Rat> out;
    out.reserve(values.size());
    for (const Rat& v : values) out.push_back(c * v);
    return out;
  }

  // general q > 1: gamma proportional to v^(1/(q-1)), scaled into the ball
  unsigned long qa = static_cast<unsigned long>(mpz_get_ui(q.get_num_mpz_t()));
  unsigned long qb = static_cast<unsigned long>(mpz_get_ui(q.get_den_mpz_t()));
  if (qa <= qb) throw Error("BAD_INPUT", "q must exceed 1");
  std::vector<Rat> g(values.size(), Rat(0));
  Rat qr = Rat(0);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0) g[i] = pow_lower(values[i], qb, qa - qb, bits);
  auto qmass_up = [&](const std::vector<Rat>& v) {
    Rat t(0);
    for (const Rat& a : v)
      if (a != 0) t += pow_upper(rat_abs(a), qa, qb, bits);
    return t;
  };
  Rat z = pow_upper(qmass_up(g), qb, qa, bits);
  for (auto& a : g) a = radius * a / z;
  Rat cap = pow_lower(radius, qa, qb, bits);
  while (qmass_up(g) > cap)
    for (auto& a : g) a *= Rat(63, 64);
  (void)qr;
  return g;
}

NormResult norm(const Vec00& x, const ParamSystem& sys, int depth, const Rat& tol) {
  if (sys.qInt != 2)
    throw Error("UNSUPPORTED", "the engine's exact arithmetic needs q = 2");
  NormResult res;
  if (x.empty()) {
    res.certificate = leaf(1, 1);
    res.stabilized = true;
    return res;
  }

  Engine e{sys, {}, {}, {}, 0, sys.cfg.K, {}, {}, {}, {}};
  Rat scale(0);
  for (const auto& [j, a] : x.entries()) scale = std::max(scale, rat_abs(a));
  for (const auto& [j, a] : x.entries()) {
    e.pos.push_back(j);
    e.val.push_back(a / scale);
  }
  e.m = e.pos.size();
  e.sq.assign(e.m + 1, Rat(0));
  for (std::size_t i = 0; i < e.m; ++i) e.sq[i + 1] = e.sq[i] + e.val[i] * e.val[i];
  // Beyond the DP's reach the fixed point is computed directly: a part of
  // an interval partition is never worth more than its l_2 mass, so the
  // finest admissible singleton split dominates and the class value is the
  // best admissible mass. Lower stays a certified flat tree, upper drops
  // the admissibility filter (sound, slightly conservative).
  if (e.m > 26) {
    Rat maxAbs(0), total(0);
    std::map<Elem, Rat> w;
    for (std::size_t i = 0; i < e.m; ++i) {
      maxAbs = std::max(maxAbs, rat_abs(e.val[i]));
      w[e.pos[i]] = e.val[i] * e.val[i];
      total += e.val[i] * e.val[i];
    }
    FiniteSubset supp(std::vector<Elem>(e.pos));
    Rat bestLo = maxAbs;
    Rat evenBest(0);
    std::size_t maxArg = 0;
    for (std::size_t i = 0; i < e.m; ++i)
      if (rat_abs(e.val[i]) == maxAbs) { maxArg = i; break; }
    Node cert = leaf(e.val[maxArg] < 0 ? -1 : 1, e.pos[maxArg]);
    for (int k = 1; k <= e.K; ++k) {
      const Int& mw = sys.m[2 * k];
      if (total / Rat(mw * mw) <= bestLo * bestLo && k > 1) continue;
      int lvl = static_cast<int>(std::min<long>(sys.n[2 * k], schreier::kLevelCap));
      auto mr = schreier::max_admissible_mass(supp, w, lvl);
      if (mr.mass == 0) continue;
      Rat root, c;
      if (is_rational_square(mr.mass, &root)) c = Rat(1) / root;
      else c = Rat(1) / sqrt_upper(mr.mass, 96);
      Rat got = c * mr.mass / Rat(mw);
      if (got > evenBest) evenBest = got;
      if (got > bestLo) {
        std::vector<Node> ch;
        for (Elem j : mr.attaining.elems()) {
          Rat a = x.at(j) / scale;
          Node lf = leaf(a < 0 ? -1 : 1, j);
          lf.gamma = c * rat_abs(a);
          ch.push_back(std::move(lf));
        }
        bestLo = got;
        cert = internal(2 * k, std::move(ch));
      }
    }
    const Int& m2 = sys.m[2];
    const Int& m3o = sys.m[3];
    Rat up2 = std::max(Rat(maxAbs * maxAbs), Rat(total / Rat(m2 * m2)));
    up2 = std::max(up2, Rat(Rat(2) * total / Rat(m3o * m3o * m2 * m2)));
    res.value = scale * bestLo;
    res.certificate = cert;
    res.upper = scale * sqrt_upper(up2, 96);
    if (res.upper < res.value) res.upper = res.value;
    res.gap = res.upper - res.value;
    res.depth = 1;
    res.stabilized = true;
    res.evenClassValue = scale * evenBest;
    return res;
  }

  e.cell.resize(e.m * e.m);
  e.admCache.assign(static_cast<std::size_t>(e.K) * e.m * e.m, -1);
  Rat minAbs(0);
  for (const Rat& v : e.val)
    if (v != 0 && (minAbs == 0 || rat_abs(v) < minAbs)) minAbs = rat_abs(v);
  for (int k = 1; k <= e.K; ++k) {
    const Int& mw = sys.m[2 * k];
    e.inv2ByClass.push_back(Rat(1) / Rat(mw * mw));
    // a class whose full-mass value cannot reach the smallest coefficient
    // never improves any cell; deciding that once keeps the very large
    // weights of the deeper classes out of the per-cell arithmetic
    e.skipClass.push_back(k >= 2 &&
                          e.sq[e.m] * e.inv2ByClass.back() <= minAbs * minAbs);
  }

  // level 0: leaf functionals only
  for (std::size_t i = 0; i < e.m; ++i) {
    Rat best(-1);
    std::size_t arg = i;
    for (std::size_t j = i; j < e.m; ++j) {
      if (rat_abs(e.val[j]) > best) {
        best = rat_abs(e.val[j]);
        arg = j;
      }
      Cell& c = e.at(i, j);
      c.lo = best;
      c.up2 = best * best;
      c.cert = leaf(e.val[arg] < 0 ? -1 : 1, e.pos[arg]);
    }
  }

  const Int& m3 = sys.m[3];
  Rat oddScale = Rat(2) / Rat(m3 * m3 * sys.m[2] * sys.m[2]);
  Rat evenBest(0);
  bool stabilized = false;
  int level = 0;

  while (level < depth && !stabilized) {
    ++level;
    stabilized = true;
    for (std::size_t w = 1; w <= e.m; ++w) {
      for (std::size_t i = 0; i + w <= e.m; ++i) {
        std::size_t j = i + w - 1;
        Cell cur = e.at(i, j);
        // functionals supported on a shorter interval count here too
        if (w > 1) {
          for (const Cell* s : {&e.at(i + 1, j), &e.at(i, j - 1)}) {
            if (s->lo > cur.lo) {
              cur.lo = s->lo;
              cur.cert = s->cert;
            }
            cur.up2 = std::max(cur.up2, s->up2);
          }
        }
        Rat iv = e.mass(i, j);
        bool isRoot = i == 0 && j == e.m - 1;
        for (int k = 1; k <= e.K; ++k) {
          if (e.skipClass[static_cast<std::size_t>(k) - 1]) continue;
          const Int& mw = sys.m[2 * k];
          const Rat& inv2 = e.inv2ByClass[static_cast<std::size_t>(k) - 1];
          // the class value is at most the l_2 mass over the weight, so a
          // class that cannot beat the current lower bound is skipped; the
          // root interval is always worked out so the even-class report is
          // not clipped by the pruning
          if (!isRoot && iv * inv2 <= cur.lo * cur.lo && iv * inv2 <= cur.up2) continue;
          if (!e.admissible(k, i, j)) continue;

          auto up = best_split(i, j, [&](std::size_t a, std::size_t b) {
            return e.at(a, b).up2;
          });
          cur.up2 = std::max(cur.up2, Rat(std::min(up.total, iv) * inv2));

          auto lo = best_split(i, j, [&](std::size_t a, std::size_t b) {
            const Rat& v = e.at(a, b).lo;
            return v * v;
          });
          if (lo.total == 0) continue;
          Rat root, c;
          if (is_rational_square(lo.total, &root)) {
            c = Rat(1) / root;
          } else {
            c = Rat(1) / sqrt_upper(lo.total, 96);
          }
          Rat got = c * lo.total / Rat(mw);
          if (got > evenBest) evenBest = got;
          if (got > cur.lo) {
            std::vector<Node> ch;
            for (auto [a, b] : lo.parts) {
              const Cell& pc = e.at(a, b);
              if (pc.lo == 0) continue;
              Node child = pc.cert;
              child.gamma *= c * pc.lo;
              ch.push_back(std::move(child));
            }
            cur.lo = got;
            cur.cert = internal(2 * k, std::move(ch));
          }
        }
        // odd classes are dominated: their value is at most
        // sqrt(2) / m_3 times an even-class value, itself at most
        // sqrt(mass) / m_2; fold the square of that bound in
        cur.up2 = std::max(cur.up2, Rat(iv * oddScale));

        Cell& dst = e.at(i, j);
        if (cur.lo != dst.lo || cur.up2 != dst.up2) stabilized = false;
        dst = std::move(cur);
      }
    }
    if (tol > 0 && !stabilized) {
      Rat u = sqrt_upper(e.at(0, e.m - 1).up2, 96);
      if (u - e.at(0, e.m - 1).lo <= tol) break;
    }
  }

  const Cell& root = e.at(0, e.m - 1);
  res.value = scale * root.lo;
  res.certificate = root.cert;
  res.upper = scale * sqrt_upper(root.up2, 96);
  if (!stabilized) {
    // remainder of the unexplored levels: each extra level is damped by at
    // least sqrt(2)/m_1 < 3/(2 m_1)
    Rat damp = Rat(3) / Rat(Int(2) * sys.m[1]);
    res.upper += Rat(12) * scale * sqrt_upper(e.mass(0, e.m - 1), 96) *
                 rat_ipow(damp, static_cast<unsigned long>(level));
  }
  if (res.upper < res.value) res.upper = res.value;
  res.gap = res.upper - res.value;
  res.depth = level;
  res.stabilized = stabilized;
  res.evenClassValue = scale * evenBest;
  return res;
}

NormResult norm_interval(const Vec00& x, Elem lo, Elem hi, const ParamSystem& sys,
                         int depth, const Rat& tol) {
  return norm(x.restricted(lo, hi), sys, depth, tol);
}

} // namespace xn::norm
