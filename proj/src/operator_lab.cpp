#include "xnlab/operator_lab.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <json.hpp>

#include "xnlab/gen.hpp"
#include "xnlab/norm.hpp"

namespace xn::oplab {

namespace {

using core::FiniteSubset;

int clip_level(long n) {
  return static_cast<int>(std::min<long>(n, schreier::kLevelCap));
}

// per-leaf expansion of a functional: coefficient lam = prod gamma / prod m
// (signed) and the bare gamma product g, honoring interval restrictions
struct LeafTerm {
  Elem j;
  Rat lam;
  Rat g;
};

void expand(const core::Node& t, const ParamSystem& sys, Elem lo, Elem hi,
            const Rat& lam, const Rat& g, std::vector<LeafTerm>& out) {
  if (t.is_leaf()) {
    if (t.basisIndex < lo || t.basisIndex > hi) return;
    Rat gg = g * rat_abs(t.gamma);
    out.push_back({t.basisIndex, lam * t.gamma * Rat(t.sign), gg});
    return;
  }
  Elem l = lo, h = hi;
  if (t.hasE) {
    l = std::max(l, t.elo);
    h = std::min(h, t.ehi);
    if (l > h) return;
  }
  Rat nl = lam * t.gamma / Rat(sys.m[static_cast<std::size_t>(t.weightIndex)]);
  Rat ng = g * rat_abs(t.gamma);
  for (const auto& c : t.children) expand(c, sys, l, h, nl, ng, out);
}

// the proof-shaped coefficient bands of a functional: band 2 collects the
// leaves between 2g/m_4 and g/m_1, band k the ones between 2g/m_{2k} and
// 2g/m_{2(k-1)}; their union covers everything down to the 2g/m_{2K} floor
int band_of(const LeafTerm& lt, const ParamSystem& sys, int K) {
  Rat a = rat_abs(lt.lam);
  if (Rat(2) * lt.g / Rat(sys.m[4]) <= a && a < lt.g / Rat(sys.m[1])) return 2;
  for (int k = 3; k <= K; ++k) {
    if (Rat(2) * lt.g / Rat(sys.m[2 * k]) <= a &&
        a < Rat(2) * lt.g / Rat(sys.m[2 * (k - 1)]))
      return k;
  }
  return 0;
}

// checks one tree's band decomposition: every leaf above the class-K floor
// falls into a band, and each band's in-range part is a small set one level
// down agreeing with the threshold sets
template <class Tag>
void band_transcription(const core::Node& t, const ParamSystem& sys, Tag tag) {
  std::vector<LeafTerm> terms;
  expand(t, sys, 1, std::numeric_limits<Elem>::max(), Rat(1), Rat(1), terms);
  std::map<int, std::vector<Elem>> bands;
  for (const auto& lt : terms) {
    if (lt.lam == 0) continue;
    int b = band_of(lt, sys, sys.cfg.K);
    if (b == 0) {
      if (rat_abs(lt.lam) >= Rat(2) * lt.g / Rat(sys.m[2 * sys.cfg.K]))
        tag("leaf " + std::to_string(lt.j) + " escapes every band");
      continue;
    }
    bands[b].push_back(lt.j);
  }
  for (auto& [k, idx] : bands) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<Elem> g;
    for (Elem j : idx)
      if (j >= 2 * static_cast<Elem>(k)) g.push_back(j);
    FiniteSubset gk{std::vector<Elem>(g)};
    long pk = sys.pk[static_cast<std::size_t>(std::min(k, sys.cfg.K))];
    if (!schreier::is_member(gk, clip_level(pk - 1)))
      tag("band " + std::to_string(k) + " escapes its level");
    FiniteSubset lcs = core::large_coefficient_set(t, k, sys);
    for (Elem j : g)
      if (!std::binary_search(lcs.elems().begin(), lcs.elems().end(), j))
        tag("band " + std::to_string(k) + " disagrees with the threshold set");
  }
}

Rat max_coeff(const std::vector<Rat>& a) {
  Rat m(0);
  for (const Rat& v : a) m = std::max(m, rat_abs(v));
  return m;
}

} // namespace

OperatorT build_operator(const ParamSystem& sys, int count, Elem start,
                         long budget) {
  if (count < 1 || 2 * count > sys.cfg.K)
    throw Error("BAD_INPUT", "need parameter classes up to 2*count");
  std::vector<int> ks;
  for (int i = 1; i <= count; ++i) ks.push_back(2 * i);
  OperatorT T;
  T.ys = avg::build_family(sys, ks, start, budget);
  for (int i = 1; i <= count; ++i) T.targets.push_back(static_cast<Elem>(i));
  T.M = sys.M;
  return T;
}

Vec00 apply(const OperatorT& T, const Vec00& x, const ParamSystem& sys) {
  Vec00 out;
  for (std::size_t i = 0; i < T.ys.size(); ++i) {
    Rat c = core::evaluate(T.ys[i].tree, x, sys);
    if (c != 0) out.set(T.targets[i], c);
  }
  return out;
}

CertifyReport certify_norm_bound(const OperatorT& T,
                                 const std::vector<Vec00>& corpus,
                                 const ParamSystem& sys, std::uint64_t seed) {
  CertifyReport rep;
  rep.bound = T.M > 1 ? T.M : Rat(1);
  rep.worstRatio = Rat(0);
  gen::Rng rng(seed);

  // exact band transcription once per functional, not merely sampled
  for (std::size_t fi = 0; fi < T.ys.size(); ++fi) {
    band_transcription(T.ys[fi].tree, sys, [&](std::string msg) {
      rep.violations.push_back("functional " + std::to_string(fi) + ": " + std::move(msg));
    });
    ++rep.bandChecks;
  }

  for (std::size_t v = 0; v < corpus.size(); ++v) {
    const Vec00& x = corpus[v];
    auto tag = [&](std::string msg) {
      rep.violations.push_back("vector " + std::to_string(v) + ": " + std::move(msg));
    };
    if (x.empty()) {
      tag("zero vector in corpus");
      continue;
    }
    ++rep.vectors;

    std::vector<Rat> c;
    for (const auto& f : T.ys) c.push_back(core::evaluate(f.tree, x, sys));
    Vec00 tx;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) tx.set(T.targets[i], c[i]);

    auto nx = norm::norm(x, sys);
    // each functional is a norming-set member, so its value is below the
    // true norm; the image then sits inside the certified upper ball up to
    // the engine's own small-vector overshoot
    Rat slack = Rat(1) + Rat(4) / Rat(sys.m[2] * sys.m[2]);
    if (!tx.empty()) {
      auto ntx = norm::norm(tx, sys);
      Rat ratio = ntx.upper / nx.value;
      if (ratio > rep.worstRatio) rep.worstRatio = ratio;
      if (ntx.upper > rep.bound * nx.upper * slack)
        tag("image escapes the certified ball, ratio " + rat_str(ratio));
    }

    // dual side: over an admissible subfamily the value tuple lies in the
    // l_p ball scaled by the norm, checked exactly against the squared upper
    std::size_t lo = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(T.ys.size()) - 1));
    std::size_t hi = static_cast<std::size_t>(
        rng.uniform(static_cast<long>(lo), static_cast<long>(T.ys.size()) - 1));
    std::vector<FiniteSubset> supports;
    for (std::size_t i = lo; i <= hi; ++i) supports.push_back(T.ys[i].avg.F);
    long hyp = sys.f[static_cast<std::size_t>(T.ys[lo].avg.k)];
    if (schreier::is_admissible(supports, clip_level(hyp))) {
      Rat mass(0);
      for (std::size_t i = lo; i <= hi; ++i) mass += c[i] * c[i];
      if (mass > nx.upper * nx.upper)
        tag("dual ball violated on subfamily [" + std::to_string(lo) + "," +
            std::to_string(hi) + "]");
      ++rep.dualChecks;
    }

    // the sampling layer: certificates from the corpus get the same bands
    if (!nx.certificate.is_leaf()) {
      band_transcription(nx.certificate, sys, tag);
      ++rep.bandChecks;
    }
  }
  return rep;
}

WitnessResult noncompact_witness(const OperatorT& T, int count,
                                 const ParamSystem& sys) {
  if (count < 1 || static_cast<std::size_t>(count) > T.ys.size())
    throw Error("INSUFFICIENT_FUNCTIONALS",
                "operator holds " + std::to_string(T.ys.size()) + " functionals");
  WitnessResult out;
  std::vector<Rat> c;
  for (int i = 0; i < count; ++i) {
    auto s = avg::seminorm_lower(T.ys[static_cast<std::size_t>(i)].avg, sys);
    Vec00 u = (Rat(1) / s.upper) * s.witness;
    // the functionals have successive supports, so the image of u under
    // every other functional vanishes and Tu is one exact spike
    Vec00 tu = apply(T, u, sys);
    if (tu.support_size() != 1)
      throw Error("CERT_FAIL", "witness image is not a single spike");
    c.push_back(s.bound);
    out.points.push_back(std::move(u));
    out.images.push_back(std::move(tu));
  }
  out.delta = Rat(0);
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      Vec00 diff = out.images[static_cast<std::size_t>(i)] -
                   out.images[static_cast<std::size_t>(j)];
      Rat sep = norm::norm(diff, sys).value;
      if (out.delta == 0 || sep < out.delta) out.delta = sep;
    }
  if (!(out.delta > 0)) throw Error("CERT_FAIL", "witness images not separated");
  return out;
}

EmbedResult linf_embed(const OperatorT& T, const std::vector<Rat>& a,
                       const ParamSystem& sys) {
  if (a.size() > T.ys.size())
    throw Error("BAD_INPUT", "more coefficients than functionals");
  EmbedResult out;
  out.a = a;
  Rat maxa = max_coeff(a);
  out.upper = (T.M > 1 ? T.M : Rat(1)) * maxa;
  out.lower = Rat(0);
  if (maxa == 0) return out;
  // a normalized preimage spiking the heaviest coordinate realizes the
  // lower bound: |a_i| times that functional's certified seminorm bound
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    auto s = avg::seminorm_lower(T.ys[i].avg, sys);
    Rat got = rat_abs(a[i]) * s.bound;
    if (got > out.lower) {
      out.lower = got;
      out.witness = (Rat(1) / s.upper) * s.witness;
    }
  }
  return out;
}

std::string operator_to_json(const OperatorT& T) {
  nlohmann::ordered_json j;
  j["M"] = rat_str(T.M);
  j["targets"] = T.targets;
  auto& fs = j["functionals"];
  fs = nlohmann::ordered_json::array();
  for (const auto& f : T.ys) {
    nlohmann::ordered_json e;
    e["average"] = nlohmann::ordered_json::parse(avg::average_to_json(f.avg));
    e["tree"] = nlohmann::ordered_json::parse(core::tree_to_json(f.tree));
    fs.push_back(std::move(e));
  }
  return j.dump();
}

OperatorT operator_from_json(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  OperatorT T;
  T.M = parse_rat(j.at("M").get<std::string>());
  T.targets = j.at("targets").get<std::vector<Elem>>();
  for (const auto& e : j.at("functionals")) {
    XkFamily f;
    f.avg = avg::average_from_json(e.at("average").dump());
    f.tree = core::tree_from_json(e.at("tree").dump());
    T.ys.push_back(std::move(f));
  }
  if (T.targets.size() != T.ys.size())
    throw Error("BAD_INPUT", "targets and functionals differ in length");
  return T;
}

} // namespace xn::oplab
