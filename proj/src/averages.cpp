#include "xnlab/averages.hpp"

#include <algorithm>

#include <json.hpp>

#include "xnlab/norm.hpp"

namespace xn::avg {

namespace {

int clip_level(long n) {
  return static_cast<int>(std::min<long>(n, schreier::kLevelCap));
}

// q-th powers of the coefficients, the weights the smallness DP runs on
std::map<Elem, Rat> q_weights(const AverageBlock& avg, const ParamSystem& sys) {
  std::map<Elem, Rat> w;
  unsigned long q = static_cast<unsigned long>(sys.qInt);
  for (const auto& [j, c] : avg.a) w[j] = rat_ipow(rat_abs(c), q);
  return w;
}

// exponent vector of m_{2k} over the even weights: m_{2k} = prod m_{2i}^{s_i}
// for k >= 2, and m_2 itself for k = 1
std::vector<long> weight_exponents(const ParamSystem& sys, int k) {
  if (k == 1) return {1};
  std::vector<long> a(static_cast<std::size_t>(k - 1), 0);
  for (int i = 1; i < k; ++i) a[static_cast<std::size_t>(i - 1)] = sys.cfg.s[static_cast<std::size_t>(i - 1)];
  return a;
}

} // namespace

VerifyReport verify_average(const AverageBlock& avg, const ParamSystem& sys) {
  VerifyReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  if (sys.qInt < 2) {
    fail("UNSUPPORTED: integer q >= 2 required");
    return rep;
  }
  if (avg.k < 1 || avg.k > sys.cfg.K) fail("k out of range");
  if (avg.F.empty() || avg.F.min() < 2 * avg.k) fail("F must sit at or after 2k");
  long pk = sys.pk[static_cast<std::size_t>(avg.k)];
  if (!schreier::is_member(avg.F, clip_level(pk)))
    fail("F escapes the admissible family at its level");
  Rat qmass(0);
  for (const auto& [j, w] : q_weights(avg, sys)) {
    if (!avg.F.elems().empty() &&
        !std::binary_search(avg.F.elems().begin(), avg.F.elems().end(), j))
      fail("coefficient off the support set");
    qmass += w;
  }
  if (qmass > 1) fail("coefficient mass above the unit ball");
  if (qmass < Rat(1) - avg.delta) fail("coefficient mass below the declared slack");
  auto best = schreier::max_admissible_mass(avg.F, q_weights(avg, sys),
                                            clip_level(pk - 1));
  unsigned long q = static_cast<unsigned long>(sys.qInt);
  if (!(best.mass < rat_ipow(avg.eps, q)))
    fail("smallness fails: a lower-level subset holds mass " + rat_str(best.mass));
  return rep;
}

AverageBlock build_average(const ParamSystem& sys, int k, const Rat& eps,
                           Elem startIndex, long budget) {
  if (sys.qInt < 2)
    throw Error("UNSUPPORTED", "integer q >= 2 required for exact towers");
  if (k < 1 || k > sys.cfg.K) throw Error("BAD_INPUT", "k out of range");
  if (!(eps > 0)) throw Error("BAD_INPUT", "eps must be positive");
  if (startIndex < 2 * static_cast<Elem>(k))
    throw Error("BAD_INPUT", "startIndex must be at least 2k");

  unsigned long q = static_cast<unsigned long>(sys.qInt);
  long arity = 1L << q; // q-th power of 2, so arity^(-1/q) = 1/2 rational
  long pk = sys.pk[static_cast<std::size_t>(k)];

  Elem start = std::max<Elem>(startIndex, arity);
  int depth = 0;
  long size = 1;
  while (size * arity <= budget && depth + 1 <= pk) {
    size *= arity;
    ++depth;
  }

  AverageBlock avg;
  avg.k = k;
  avg.arity = arity;
  avg.depth = depth;
  avg.delta = Rat(0);
  Rat coeff = rat_ipow(Rat(1, 2), static_cast<unsigned long>(depth));
  std::vector<Elem> elems;
  for (long i = 0; i < size; ++i) {
    elems.push_back(start + static_cast<Elem>(i));
    avg.a[start + static_cast<Elem>(i)] = coeff;
  }
  avg.F = FiniteSubset(std::move(elems));

  auto best = schreier::max_admissible_mass(avg.F, q_weights(avg, sys),
                                            clip_level(pk - 1));
  if (!(best.mass < rat_ipow(eps, q))) {
    // structural, not a tuning problem: every materializable subset of F
    // is admissible one level down, so the captured mass is the whole
    // coefficient mass; escaping needs |F| beyond the level-(p_k - 1)
    // capacity at min F, a tower-type bound
    throw Error("EPS_INFEASIBLE_AT_BUDGET",
                "subsets one level down capture l_q mass " + rat_str(best.mass) +
                    " >= eps^q = " + rat_str(rat_ipow(eps, q)) +
                    "; reaching eps needs a support larger than the level-" +
                    std::to_string(pk - 1) + " capacity at " +
                    std::to_string(avg.F.min()) +
                    " (tower-sized), far above budget " + std::to_string(budget));
  }
  // achieved smallness: the smallest rational we certify strictly above
  // the q-th root of the captured mass
  Rat root;
  if (best.mass == 0) {
    avg.eps = Rat(1, Int(1) << 64);
  } else if (q == 2 && is_rational_square(best.mass, &root)) {
    avg.eps = root + root / Rat(Int(1) << 64);
  } else {
    avg.eps = root_upper(best.mass, q, 96);
    if (rat_ipow(avg.eps, q) == best.mass) avg.eps += avg.eps / Rat(Int(1) << 64);
  }
  if (eps < avg.eps) avg.eps = eps; // report no more than what was asked

  auto rep = verify_average(avg, sys);
  if (!rep.ok) throw Error("CERT_FAIL", "built block fails: " + rep.violations.front());
  return avg;
}

Node build_xk(const ParamSystem& sys, const AverageBlock& avg) {
  auto rep = verify_average(avg, sys);
  if (!rep.ok) throw Error("INVALID_BLOCK", rep.violations.front());
  unsigned long q = static_cast<unsigned long>(sys.qInt);

  // grouping steps, bottom-up; the last one applied forms the root
  std::vector<int> ws;
  if (avg.k == 1) {
    ws.push_back(1);
  } else {
    for (int i = 1; i < avg.k; ++i)
      for (long r = 0; r < sys.cfg.s[static_cast<std::size_t>(i - 1)]; ++r)
        ws.push_back(i);
  }
  std::size_t R = ws.size();

  // split the tower's depth across the steps so every group is a full
  // subtree of the tower: group sizes arity^c keep the masses rational
  std::vector<int> chunk(R, avg.depth / static_cast<int>(R));
  for (std::size_t j = 0; j < static_cast<std::size_t>(avg.depth) % R; ++j) chunk[j] += 1;

  std::vector<Node> parts;
  std::vector<Rat> coeffs;
  for (Elem j : avg.F.elems()) {
    const Rat& c = avg.a.at(j);
    parts.push_back(core::leaf(c < 0 ? -1 : 1, j));
    coeffs.push_back(rat_abs(c));
  }

  for (std::size_t step = 0; step < R; ++step) {
    long g = 1;
    for (int t = 0; t < chunk[step]; ++t) g *= avg.arity;
    std::vector<long> aexp(static_cast<std::size_t>(ws[step]), 0);
    aexp.back() = 1;
    std::vector<Node> nextParts;
    std::vector<Rat> nextCoeffs;
    for (std::size_t pos = 0; pos < parts.size(); pos += static_cast<std::size_t>(g)) {
      std::vector<Node> run(parts.begin() + static_cast<long>(pos),
                            parts.begin() + static_cast<long>(pos) + g);
      Rat mq(0);
      for (std::size_t i = 0; i < run.size(); ++i)
        mq += rat_ipow(coeffs[pos + i], q);
      Rat mass;
      if (!core::qmass_root_exact({coeffs.begin() + static_cast<long>(pos),
                                   coeffs.begin() + static_cast<long>(pos) + g},
                                  sys, &mass))
        throw Error("CERT_FAIL", "tower group mass is not rational");
      std::vector<Rat> betas;
      for (std::size_t i = 0; i < run.size(); ++i)
        betas.push_back(coeffs[pos + i] / mass);
      nextParts.push_back(core::compose_scaled(sys, aexp, run, betas));
      nextCoeffs.push_back(mass);
    }
    parts = std::move(nextParts);
    coeffs = std::move(nextCoeffs);
  }
  if (parts.size() != 1) throw Error("CERT_FAIL", "tower did not close up");

  auto valid = core::validate_tree(parts[0], sys);
  if (!valid.ok) throw Error("CERT_FAIL", "functional fails validation: " + valid.violations.front());
  return parts[0];
}

std::vector<XkFamily> build_family(const ParamSystem& sys,
                                   const std::vector<int>& ks, Elem start,
                                   long budget) {
  std::vector<XkFamily> out;
  Elem cursor = start;
  for (int k : ks) {
    XkFamily f;
    f.avg = build_average(sys, k, Rat(2), std::max<Elem>(cursor, 2 * static_cast<Elem>(k)), budget);
    f.tree = build_xk(sys, f.avg);
    cursor = f.avg.F.max() + 1;
    out.push_back(std::move(f));
  }
  return out;
}

TrialReport verify_upper_lqw(const std::vector<XkFamily>& funcs,
                             const ParamSystem& sys, long trials,
                             std::uint64_t seed) {
  TrialReport rep;
  if (funcs.empty()) throw Error("BAD_INPUT", "no functionals");
  gen::Rng rng(seed);
  for (long t = 0; t < trials; ++t) {
    ++rep.trials;
    // random consecutive run of the family
    std::size_t lo = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(funcs.size()) - 1));
    std::size_t hi = static_cast<std::size_t>(rng.uniform(static_cast<long>(lo),
                                                          static_cast<long>(funcs.size()) - 1));
    int l = funcs[lo].avg.k;

    // hypothesis: supports admissible at the distribution index of min F
    std::vector<FiniteSubset> supports;
    for (std::size_t i = lo; i <= hi; ++i) supports.push_back(funcs[i].avg.F);
    long hyp = l >= 2 ? sys.f[static_cast<std::size_t>(l)] : sys.n[2];
    if (!schreier::is_admissible(supports, clip_level(hyp))) {
      rep.failures.push_back("trial " + std::to_string(t) + ": hypothesis not admissible");
      continue;
    }

    // rational point strictly inside Ba(l_q): exact sphere point shrunk
    auto unit = gen::unit_l2_vector(rng, hi - lo + 1);
    Rat shrink = make_rat(rng.uniform(1, 15), 16);
    std::vector<Rat> beta;
    for (const Rat& u : unit) beta.push_back(u * shrink);

    // one even node of the smallest involved weight: the k = l functional
    // contributes its leaves, deeper ones enter with one grouping level
    // peeled off
    std::vector<Node> children;
    for (std::size_t i = lo; i <= hi; ++i) {
      const AverageBlock& avg = funcs[i].avg;
      Rat b = beta[i - lo];
      if (avg.k == l) {
        for (Elem j : avg.F.elems()) {
          Node lf = core::leaf(avg.a.at(j) < 0 ? -1 : 1, j);
          lf.gamma = b * rat_abs(avg.a.at(j));
          children.push_back(std::move(lf));
        }
      } else {
        auto aexp = weight_exponents(sys, avg.k);
        aexp[static_cast<std::size_t>(l - 1)] -= 1;
        std::vector<Node> leaves;
        std::vector<Rat> betas;
        for (Elem j : avg.F.elems()) {
          leaves.push_back(core::leaf(avg.a.at(j) < 0 ? -1 : 1, j));
          betas.push_back(rat_abs(avg.a.at(j)));
        }
        Node piece = core::compose_scaled(sys, aexp, leaves, betas);
        piece.gamma = b;
        children.push_back(std::move(piece));
      }
    }
    Node combo = core::internal(2 * l, std::move(children));

    auto valid = core::validate_tree(combo, sys);
    if (!valid.ok) {
      rep.failures.push_back("trial " + std::to_string(t) + ": " + valid.violations.front());
      continue;
    }
    // the tree must also compute the combination exactly
    Vec00 x;
    for (std::size_t i = lo; i <= hi; ++i)
      for (Elem j : funcs[i].avg.F.elems())
        if (rng.coin(1, 3)) x.set(j, make_rat(rng.uniform(-5, 5), rng.uniform(1, 4)));
    Rat direct = core::evaluate(combo, x, sys);
    Rat flat(0);
    for (std::size_t i = lo; i <= hi; ++i)
      flat += beta[i - lo] * core::evaluate(funcs[i].tree, x, sys);
    if (direct != flat) {
      rep.failures.push_back("trial " + std::to_string(t) + ": evaluation mismatch");
      continue;
    }
    ++rep.passes;
  }
  return rep;
}

SeminormResult seminorm_lower(const AverageBlock& avg, const ParamSystem& sys) {
  auto rep = verify_average(avg, sys);
  if (!rep.ok) throw Error("INVALID_BLOCK", rep.violations.front());
  unsigned long q = static_cast<unsigned long>(sys.qInt);
  const Int& m2k = sys.m[2 * avg.k];

  SeminormResult out;
  Rat qmass(0);
  for (const auto& [j, c] : avg.a) {
    // witness coefficients |a|^(q/p) = |a|^(q-1)
    out.witness.set(j, rat_ipow(rat_abs(c), q - 1));
    qmass += rat_ipow(rat_abs(c), q);
  }
  out.pairing = qmass / Rat(m2k);
  auto nr = norm::norm(out.witness, sys);
  out.upper = nr.upper;
  out.bound = out.pairing / out.upper;
  out.generalizedOk = out.upper <= Rat(2) * avg.eps + Rat(24) / Rat(m2k);
  return out;
}

std::string average_to_json(const AverageBlock& avg) {
  nlohmann::ordered_json j;
  j["k"] = avg.k;
  j["eps"] = rat_str(avg.eps);
  j["delta"] = rat_str(avg.delta);
  j["arity"] = avg.arity;
  j["depth"] = avg.depth;
  j["elems"] = avg.F.elems();
  std::vector<std::string> coeffs;
  for (Elem e : avg.F.elems()) coeffs.push_back(rat_str(avg.a.at(e)));
  j["coeffs"] = coeffs;
  return j.dump();
}

AverageBlock average_from_json(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  AverageBlock avg;
  avg.k = j.at("k").get<int>();
  avg.eps = parse_rat(j.at("eps").get<std::string>());
  avg.delta = parse_rat(j.at("delta").get<std::string>());
  avg.arity = j.at("arity").get<long>();
  avg.depth = j.at("depth").get<int>();
  std::vector<Elem> elems = j.at("elems").get<std::vector<Elem>>();
  auto coeffs = j.at("coeffs").get<std::vector<std::string>>();
  if (coeffs.size() != elems.size()) throw Error("BAD_INPUT", "length mismatch");
  for (std::size_t i = 0; i < elems.size(); ++i) avg.a[elems[i]] = parse_rat(coeffs[i]);
  avg.F = FiniteSubset(std::move(elems));
  return avg;
}

} // namespace xn::avg
