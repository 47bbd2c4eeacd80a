#include "xnlab/tree.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <json.hpp>

namespace xn::core {

namespace {

constexpr Elem kNoLo = 1;
constexpr Elem kNoHi = std::numeric_limits<Elem>::max();

void collect_support(const Node& t, Elem lo, Elem hi, std::vector<Elem>& out) {
  if (t.hasE) {
    lo = std::max(lo, t.elo);
    hi = std::min(hi, t.ehi);
  }
  if (lo > hi) return;
  if (t.is_leaf()) {
    if (t.basisIndex >= lo && t.basisIndex <= hi) out.push_back(t.basisIndex);
    return;
  }
  for (const Node& c : t.children) collect_support(c, lo, hi, out);
}

std::string path_str(const std::vector<std::size_t>& path) {
  std::string s = "root";
  for (std::size_t i : path) s += "." + std::to_string(i);
  return s;
}

struct Validator {
  const params::ParamSystem& sys;
  ValidationReport rep;

  void fail(const std::vector<std::size_t>& path, const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(path_str(path) + ": " + msg);
  }

  void check(const Node& t, std::vector<std::size_t>& path, bool isRoot,
             bool underOdd) {
    if (isRoot && rat_abs(t.gamma) != 1)
      fail(path, "root coefficient must be +-1");
    if (t.is_leaf()) {
      if (underOdd) fail(path, "leaves may not appear under odd-weight nodes");
      if (t.basisIndex < 1) fail(path, "leaf index must be positive");
      if (t.sign != 1 && t.sign != -1) fail(path, "leaf sign must be +-1");
      if (t.hasE) fail(path, "restrictions live on odd-weight nodes");
      if (!t.children.empty()) fail(path, "leaves have no children");
      return;
    }
    int w = t.weightIndex;
    if (w < 1 || w >= static_cast<int>(sys.m.size())) {
      fail(path, "weight index out of range");
      return;
    }
    bool odd = (w % 2) == 1;
    if (underOdd && odd) fail(path, "odd-weight nodes draw even-weighted children");
    if (t.hasE) {
      if (!odd) fail(path, "restrictions live on odd-weight nodes");
      if (t.elo > t.ehi || t.elo < 1) fail(path, "bad restriction interval");
    }
    if (t.children.empty()) {
      fail(path, "internal node with no children");
      return;
    }
    Elem lo = t.hasE ? t.elo : kNoLo;
    Elem hi = t.hasE ? t.ehi : kNoHi;
    std::vector<FiniteSubset> supports;
    std::vector<Rat> gammas;
    Elem prevMax = 0;
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      path.push_back(i);
      const Node& c = t.children[i];
      std::vector<Elem> s;
      collect_support(c, lo, hi, s);
      std::sort(s.begin(), s.end());
      if (s.empty())
        fail(path, "child with empty effective support");
      else if (s.front() <= prevMax)
        fail(path, "children supports not successive");
      if (!s.empty()) prevMax = s.back();
      supports.emplace_back(std::move(s));
      gammas.push_back(c.gamma);
      check(c, path, false, odd);
      path.pop_back();
    }
    if (!schreier::is_admissible(supports, static_cast<int>(sys.n[w])))
      fail(path, "children not admissible at the node's index");
    Rat ball(1);
    if (odd && sys.qInt != 0)
      ball = rat_ipow(Rat(2), static_cast<unsigned long>(sys.qInt - 1));
    else if (odd) {
      // 2^{q/p} with q/p = q - 1, certified from below
      unsigned long qa = sys.q.get_num().get_ui(), qb = sys.q.get_den().get_ui();
      ball = pow_lower(Rat(2), qa - qb, qb, 128);
    }
    if (!qmass_leq(gammas, ball, sys))
      fail(path, odd ? "coefficients outside the dilated ball"
                     : "coefficients outside the unit ball");
    if (odd) {
      std::vector<int> widx;
      for (const Node& c : t.children)
        if (!c.is_leaf() && c.weightIndex % 2 == 0) widx.push_back(c.weightIndex);
      std::sort(widx.begin(), widx.end());
      if (std::adjacent_find(widx.begin(), widx.end()) != widx.end())
        fail(path, "odd-node children must carry pairwise distinct even weights");
    }
  }
};

Rat eval_rec(const Node& t, const Vec00& x, const params::ParamSystem& sys,
             Elem lo, Elem hi) {
  if (t.hasE) {
    lo = std::max(lo, t.elo);
    hi = std::min(hi, t.ehi);
  }
  if (lo > hi) return Rat(0);
  if (t.is_leaf()) {
    if (t.basisIndex < lo || t.basisIndex > hi) return Rat(0);
    return t.gamma * Rat(t.sign) * x.at(t.basisIndex);
  }
  Rat s(0);
  for (const Node& c : t.children) s += eval_rec(c, x, sys, lo, hi);
  return t.gamma * s / Rat(sys.m[t.weightIndex]);
}

bool is_prefix(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

} // namespace

Node leaf(int sign, Elem j, const Rat& gamma) {
  Node n;
  n.sign = sign;
  n.basisIndex = j;
  n.gamma = gamma;
  return n;
}

Node internal(int weightIndex, std::vector<Node> children, const Rat& gamma) {
  Node n;
  n.weightIndex = weightIndex;
  n.children = std::move(children);
  n.gamma = gamma;
  return n;
}

FiniteSubset support(const Node& t) {
  std::vector<Elem> s;
  collect_support(t, kNoLo, kNoHi, s);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return FiniteSubset(std::move(s));
}

Node* child_at(Node& t, const std::vector<std::size_t>& path) {
  Node* cur = &t;
  for (std::size_t i : path) {
    if (i >= cur->children.size()) return nullptr;
    cur = &cur->children[i];
  }
  return cur;
}

ValidationReport validate_tree(const Node& t, const params::ParamSystem& sys) {
  Validator v{sys, {}};
  std::vector<std::size_t> path;
  v.check(t, path, true, false);
  return v.rep;
}

Rat evaluate(const Node& t, const Vec00& x, const params::ParamSystem& sys) {
  return eval_rec(t, x, sys, kNoLo, kNoHi);
}

std::vector<FlatTerm> flatten(const Node& t,
                              const std::vector<std::vector<std::size_t>>& antichain,
                              const params::ParamSystem& sys) {
  for (std::size_t i = 0; i < antichain.size(); ++i)
    for (std::size_t j = 0; j < antichain.size(); ++j)
      if (i != j && is_prefix(antichain[i], antichain[j]))
        throw Error("INVALID_ANTICHAIN", "nodes are comparable");

  std::set<std::vector<std::size_t>> want(antichain.begin(), antichain.end());
  std::vector<FlatTerm> out;

  // walk every branch; a branch must hit exactly one antichain node
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, const Node& node, Rat coeff, Elem lo, Elem hi) -> void {
    Elem nlo = lo, nhi = hi;
    if (node.hasE) {
      nlo = std::max(nlo, node.elo);
      nhi = std::min(nhi, node.ehi);
    }
    coeff *= node.gamma;
    if (want.count(path)) {
      // bake the accumulated ancestor restriction into the subtree; the
      // coefficient carries gamma of the node itself, so reset it to 1
      FlatTerm term;
      term.coeff = coeff;
      auto restricted = restrict_tree(node, lo, hi);
      if (restricted) {
        term.part = *restricted;
        term.part.gamma = Rat(1);
      } else {
        term.part = leaf(1, 1);
        term.coeff = Rat(0);
      }
      out.push_back(std::move(term));
      return;
    }
    if (node.is_leaf())
      throw Error("INVALID_ANTICHAIN", "a branch misses the antichain at " + path_str(path));
    Rat next = coeff / Rat(sys.m[node.weightIndex]);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(i);
      self(self, node.children[i], next, nlo, nhi);
      path.pop_back();
    }
  };
  walk(walk, t, Rat(1), kNoLo, kNoHi);
  if (out.size() != antichain.size())
    throw Error("INVALID_ANTICHAIN", "antichain node off the tree");
  return out;
}

AdmissibilityCert antichain_admissibility(const Node& t,
                                          const std::vector<std::vector<std::size_t>>& antichain,
                                          const params::ParamSystem& sys) {
  for (std::size_t i = 0; i < antichain.size(); ++i)
    for (std::size_t j = 0; j < antichain.size(); ++j)
      if (i != j && is_prefix(antichain[i], antichain[j]))
        throw Error("INVALID_ANTICHAIN", "nodes are comparable");

  auto phi = [&](const Node& n) -> long {
    if (n.is_leaf()) return 0;
    int w = n.weightIndex;
    return (w % 2 == 0) ? sys.n[w] : sys.n[1];
  };

  // hypothesis: along the tree, odd nodes must have S_{n_1}-admissible
  // children (their even weights are pairwise distinct, so the minima are
  // spread enough); even nodes are covered by validity
  std::vector<std::size_t> path;
  auto hyp = [&](auto&& self, const Node& node) -> void {
    if (node.is_leaf()) return;
    if (node.weightIndex % 2 == 1) {
      std::vector<FiniteSubset> supports;
      for (const Node& c : node.children) {
        FiniteSubset s = support(c);
        if (!s.empty()) supports.push_back(s);
      }
      if (!schreier::is_admissible(supports, static_cast<int>(sys.n[1])))
        throw Error("HYPOTHESIS_FAILED",
                    "odd node children not admissible at the base index, " + path_str(path));
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(i);
      self(self, node.children[i]);
      path.pop_back();
    }
  };
  hyp(hyp, t);

  AdmissibilityCert cert;
  std::vector<Elem> mins;
  const Node* cur;
  for (const auto& p : antichain) {
    long d = 0;
    cur = &t;
    for (std::size_t step : p) {
      d += phi(*cur);
      if (step >= cur->children.size())
        throw Error("INVALID_ANTICHAIN", "antichain node off the tree");
      cur = &cur->children[step];
    }
    cert.d = std::max(cert.d, d);
    FiniteSubset s = support(*cur);
    if (!s.empty()) mins.push_back(s.min());
  }
  std::sort(mins.begin(), mins.end());
  mins.erase(std::unique(mins.begin(), mins.end()), mins.end());
  cert.mins = FiniteSubset(std::move(mins));
  cert.admissible =
      schreier::is_member(cert.mins, static_cast<int>(std::min<long>(cert.d, schreier::kLevelCap)));
  return cert;
}

DecompositionResult decompose(const Node& t, int k, const params::ParamSystem& sys) {
  FiniteSubset supp = support(t);
  if (supp.empty() || supp.min() < 2 * k)
    throw Error("SUPPORT_TOO_LOW", "support must start at or after 2k");
  const Int& m2k = sys.m[2 * k];

  DecompositionResult res;
  res.k = k;
  std::vector<Elem> leafIdx;

  auto walk = [&](auto&& self, const Node& node, Rat coeff, Int pathM, Elem lo,
                  Elem hi) -> void {
    Elem nlo = lo, nhi = hi;
    if (node.hasE) {
      nlo = std::max(nlo, node.elo);
      nhi = std::min(nhi, node.ehi);
    }
    if (nlo > nhi) return;
    coeff *= node.gamma;
    bool cut = node.is_leaf() || pathM >= m2k;
    if (cut) {
      auto part = restrict_tree(node, lo, hi);
      if (!part) return;
      part->gamma = Rat(1);
      std::size_t idx = res.lambda.size();
      res.lambda.push_back(coeff);
      res.parts.push_back(*part);
      if (node.is_leaf()) {
        res.I1.push_back(idx);
        leafIdx.push_back(node.basisIndex);
      } else {
        res.I2.push_back(idx);
      }
      return;
    }
    Rat next = coeff / Rat(sys.m[node.weightIndex]);
    Int nm = pathM * sys.m[node.weightIndex];
    for (const Node& c : node.children) self(self, c, next, nm, nlo, nhi);
  };
  walk(walk, t, Rat(1), Int(1), kNoLo, kNoHi);

  std::sort(leafIdx.begin(), leafIdx.end());
  leafIdx.erase(std::unique(leafIdx.begin(), leafIdx.end()), leafIdx.end());
  res.leafIndices = FiniteSubset(std::move(leafIdx));

  // certify the three clauses
  for (Elem j : supp.elems()) {
    Vec00 ej;
    ej.set(j, Rat(1));
    Rat direct = evaluate(t, ej, sys);
    Rat recombined(0);
    for (std::size_t i = 0; i < res.lambda.size(); ++i)
      recombined += res.lambda[i] * evaluate(res.parts[i], ej, sys);
    if (direct != recombined)
      throw Error("CERT_FAIL", "recombination mismatch at basis index " + std::to_string(j));
  }
  if (!schreier::is_member(res.leafIndices,
                           static_cast<int>(std::min<long>(sys.pk[k] - 1, schreier::kLevelCap))))
    throw Error("CERT_FAIL", "terminal index set escapes the admissible family");
  if (sys.qInt != 0) {
    std::vector<Rat> l2;
    for (std::size_t i : res.I2) l2.push_back(res.lambda[i]);
    unsigned long q = static_cast<unsigned long>(sys.qInt);
    if (!qmass_leq(l2, rat_ipow(Rat(2) / Rat(m2k), q), sys))
      throw Error("CERT_FAIL", "inner mass bound fails");
    if (!qmass_leq(res.lambda, rat_ipow(Rat(2), q), sys))
      throw Error("CERT_FAIL", "total mass bound fails");
  }
  return res;
}

FiniteSubset large_coefficient_set(const Node& t, int k, const params::ParamSystem& sys) {
  const Int& m2k = sys.m[2 * k];
  std::vector<Elem> big;
  auto walk = [&](auto&& self, const Node& node, Int pathM, Elem lo, Elem hi) -> void {
    if (node.hasE) {
      lo = std::max(lo, node.elo);
      hi = std::min(hi, node.ehi);
    }
    if (lo > hi) return;
    if (node.is_leaf()) {
      if (node.basisIndex < lo || node.basisIndex > hi) return;
      // |x*(e_j)| = |prod gamma| / pathM >= 2 |prod gamma| / m_{2k}
      // simplifies to 2 pathM <= m_{2k}
      if (node.basisIndex >= 2 * k && 2 * pathM <= m2k) big.push_back(node.basisIndex);
      return;
    }
    Int nm = pathM * sys.m[node.weightIndex];
    for (const Node& c : node.children) self(self, c, nm, lo, hi);
  };
  walk(walk, t, Int(1), kNoLo, kNoHi);
  std::sort(big.begin(), big.end());
  big.erase(std::unique(big.begin(), big.end()), big.end());
  return FiniteSubset(std::move(big));
}

namespace {

Node regroup_node(const params::ParamSystem& sys, const std::vector<long>& a,
                  const std::vector<Node>& parts, const std::vector<Rat>& betas) {
  int top = -1;
  for (int l = static_cast<int>(a.size()); l-- > 0;)
    if (a[l] > 0) { top = l; break; }
  if (top < 0) {
    if (parts.size() != 1)
      throw Error("NOT_ADMISSIBLE", "several parts need at least one grouping level");
    Node n = parts[0];
    n.gamma *= betas[0];
    return n;
  }
  std::vector<long> rest = a;
  rest[top] -= 1;
  long inner = 0;
  for (std::size_t l = 0; l < rest.size(); ++l) inner += rest[l] * sys.n[2 * (l + 1)];

  std::vector<Elem> mins;
  for (const Node& p : parts) {
    FiniteSubset s = support(p);
    if (s.empty()) throw Error("NOT_ADMISSIBLE", "empty part");
    mins.push_back(s.min());
  }
  auto groups = schreier::split(FiniteSubset(mins),
                                static_cast<int>(std::min<long>(inner, schreier::kLevelCap)),
                                static_cast<int>(sys.n[2 * (top + 1)]));
  if (!groups) throw Error("NOT_ADMISSIBLE", "parts do not split at the grouping index");

  Node node;
  node.weightIndex = 2 * (top + 1);
  bool restZero = std::all_of(rest.begin(), rest.end(), [](long v) { return v == 0; });
  std::size_t pos = 0;
  for (const FiniteSubset& g : *groups) {
    std::vector<Node> gp(parts.begin() + pos, parts.begin() + pos + g.size());
    std::vector<Rat> gb(betas.begin() + pos, betas.begin() + pos + g.size());
    pos += g.size();
    if (restZero) {
      // singleton groups: the part enters directly with its coefficient
      if (gp.size() != 1) throw Error("NOT_ADMISSIBLE", "inner grouping not singleton");
      Node c = gp[0];
      c.gamma *= gb[0];
      node.children.push_back(std::move(c));
      continue;
    }
    Rat w;
    if (!qmass_root_exact(gb, sys, &w)) {
      w = qmass_root_upper(gb, sys, 96);
      if (w == 0) continue;
    }
    if (w == 0) continue;
    std::vector<Rat> scaled;
    scaled.reserve(gb.size());
    for (const Rat& b : gb) scaled.push_back(b / w);
    Node c = regroup_node(sys, rest, gp, scaled);
    c.gamma *= w;
    node.children.push_back(std::move(c));
  }
  // outer coefficients must sit inside the unit ball; with exact group
  // masses this is automatic, with rounded ones it can overflow
  std::vector<Rat> outer;
  for (const Node& c : node.children) outer.push_back(c.gamma);
  if (!qmass_leq(outer, Rat(1), sys))
    throw Error("BALL_VIOLATION",
                "rounded group masses need strict slack below the unit sphere");
  return node;
}

} // namespace

Node compose_scaled(const params::ParamSystem& sys, const std::vector<long>& a,
                    const std::vector<Node>& parts, const std::vector<Rat>& betas) {
  if (parts.empty() || parts.size() != betas.size())
    throw Error("NOT_ADMISSIBLE", "parts and coefficients must align");
  if (!qmass_leq(betas, Rat(1), sys))
    throw Error("BALL_VIOLATION", "coefficients outside the unit ball");
  if (static_cast<int>(a.size()) > sys.cfg.K)
    throw Error("NOT_ADMISSIBLE", "exponent list too long for the system");
  long d = 0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l] < 0) throw Error("NOT_ADMISSIBLE", "negative exponent");
    d += a[l] * sys.n[2 * (l + 1)];
  }
  std::vector<FiniteSubset> supports;
  for (const Node& p : parts) {
    FiniteSubset s = support(p);
    if (s.empty()) throw Error("NOT_ADMISSIBLE", "empty part");
    supports.push_back(s);
  }
  if (!schreier::is_admissible(supports,
                               static_cast<int>(std::min<long>(d, schreier::kLevelCap))))
    throw Error("NOT_ADMISSIBLE", "parts not admissible at the grouping index");
  return regroup_node(sys, a, parts, betas);
}

std::optional<Node> restrict_tree(const Node& t, Elem lo, Elem hi) {
  Elem nlo = lo, nhi = hi;
  if (t.hasE) {
    nlo = std::max(nlo, t.elo);
    nhi = std::min(nhi, t.ehi);
  }
  if (nlo > nhi) return std::nullopt;
  if (t.is_leaf()) {
    if (t.basisIndex < nlo || t.basisIndex > nhi) return std::nullopt;
    return t;
  }
  Node out = t;
  out.hasE = false;
  out.children.clear();
  for (const Node& c : t.children) {
    auto r = restrict_tree(c, nlo, nhi);
    if (r) out.children.push_back(std::move(*r));
  }
  if (out.children.empty()) return std::nullopt;
  return out;
}

bool qmass_leq(const std::vector<Rat>& vals, const Rat& bound,
               const params::ParamSystem& sys) {
  if (sys.qInt != 0) {
    Rat s(0);
    for (const Rat& v : vals) s += rat_ipow(rat_abs(v), static_cast<unsigned long>(sys.qInt));
    return s <= bound;
  }
  // rational q = qa/qb: certified via directed upper rounding
  unsigned long qa = sys.q.get_num().get_ui();
  unsigned long qb = sys.q.get_den().get_ui();
  Rat s(0);
  for (const Rat& v : vals) s += pow_upper(rat_abs(v), qa, qb, 128);
  return s <= bound;
}

bool qmass_root_exact(const std::vector<Rat>& vals, const params::ParamSystem& sys,
                      Rat* root) {
  if (sys.qInt == 0) return false;
  Rat s(0);
  for (const Rat& v : vals) s += rat_ipow(rat_abs(v), static_cast<unsigned long>(sys.qInt));
  if (sys.qInt == 2) return is_rational_square(s, root);
  // exact q-th root when numerator and denominator are perfect powers
  Int rn, rd;
  if (!mpz_root(rn.get_mpz_t(), s.get_num().get_mpz_t(), sys.qInt)) return false;
  if (!mpz_root(rd.get_mpz_t(), s.get_den().get_mpz_t(), sys.qInt)) return false;
  if (root) {
    *root = Rat(rn, rd);
    root->canonicalize();
  }
  return true;
}

Rat qmass_root_upper(const std::vector<Rat>& vals, const params::ParamSystem& sys,
                     unsigned bits) {
  if (sys.qInt != 0) {
    Rat s(0);
    for (const Rat& v : vals) s += rat_ipow(rat_abs(v), static_cast<unsigned long>(sys.qInt));
    return root_upper(s, static_cast<unsigned long>(sys.qInt), bits);
  }
  unsigned long qa = sys.q.get_num().get_ui();
  unsigned long qb = sys.q.get_den().get_ui();
  Rat s(0);
  for (const Rat& v : vals) s += pow_upper(rat_abs(v), qa, qb, bits);
  return pow_upper(s, qb, qa, bits); // the 1/q root
}

std::string tree_to_json(const Node& t) {
  using nlohmann::ordered_json;
  auto enc = [](auto&& self, const Node& n) -> ordered_json {
    ordered_json j;
    j["gamma"] = rat_str(n.gamma);
    if (n.is_leaf()) {
      j["sign"] = n.sign;
      j["index"] = n.basisIndex;
      return j;
    }
    j["weight"] = n.weightIndex;
    if (n.hasE) j["E"] = {n.elo, n.ehi};
    ordered_json kids = ordered_json::array();
    for (const Node& c : n.children) kids.push_back(self(self, c));
    j["children"] = std::move(kids);
    return j;
  };
  return enc(enc, t).dump();
}

Node tree_from_json(const std::string& text) {
  using nlohmann::json;
  json root = json::parse(text);
  auto dec = [](auto&& self, const json& j) -> Node {
    Node n;
    n.gamma = parse_rat(j.at("gamma").get<std::string>());
    if (j.contains("index")) {
      n.sign = j.at("sign").get<int>();
      n.basisIndex = j.at("index").get<Elem>();
      return n;
    }
    n.weightIndex = j.at("weight").get<int>();
    if (j.contains("E")) {
      n.hasE = true;
      n.elo = j.at("E")[0].get<Elem>();
      n.ehi = j.at("E")[1].get<Elem>();
    }
    for (const json& c : j.at("children")) n.children.push_back(self(self, c));
    return n;
  };
  return dec(dec, root);
}

} // namespace xn::core
