#include "xnlab/params.hpp"

#include <algorithm>

#include <json.hpp>

namespace xn::params {

namespace {

// DFS maximization of rho*n1 + sum rho_i * n_{2i} subject to
// m1^rho * prod m_{2i}^{rho_i} < cap, exact products only.
// vars[v] = {base, value}; processed from v = 0.
struct Knap {
  struct Var { Int base; long value; long wbits; };
  std::vector<Var> vars; // kept sorted by descending value density
  Int cap;
  long best = 0;
  std::vector<long> bestExp, cur;
  std::vector<Rat> suffixDensity; // max of value/wbits over vars[v..]

  void run() {
    cur.assign(vars.size(), 0);
    bestExp = cur;
    if (all_powers_of_two()) { run_bit_dp(); return; }
    suffixDensity.assign(vars.size() + 1, Rat(0));
    for (std::size_t v = vars.size(); v-- > 0;) {
      Rat d(vars[v].value, std::max<long>(1, vars[v].wbits));
      suffixDensity[v] = std::max(suffixDensity[v + 1], d);
    }
    dfs(0, Int(1), 0);
  }

  bool all_powers_of_two() const {
    for (const auto& v : vars)
      if (mpz_popcount(v.base.get_mpz_t()) != 1) return false;
    return true;
  }

  // With every base a power of two the constraint prod base_i^{rho_i} < cap
  // is exactly sum rho_i * log2(base_i) <= budget: an unbounded knapsack.
  void run_bit_dp() {
    long budget = static_cast<long>(mpz_sizeinbase(cap.get_mpz_t(), 2)) - 1;
    if (mpz_popcount(cap.get_mpz_t()) == 1) budget -= 1;
    if (budget < 0) return;
    std::vector<long> dp(budget + 1, 0);
    std::vector<int> choice(budget + 1, -1);
    for (long w = 1; w <= budget; ++w) {
      dp[w] = dp[w - 1];
      choice[w] = -1;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        long b = mpz_scan1(vars[i].base.get_mpz_t(), 0);
        if (b <= w && dp[w - b] + vars[i].value > dp[w]) {
          dp[w] = dp[w - b] + vars[i].value;
          choice[w] = static_cast<int>(i);
        }
      }
    }
    best = dp[budget];
    for (long w = budget; w > 0;) {
      if (choice[w] < 0) { --w; continue; }
      int i = choice[w];
      ++bestExp[i];
      w -= mpz_scan1(vars[i].base.get_mpz_t(), 0);
    }
  }

  void dfs(std::size_t v, const Int& prod, long val) {
    if (val > best) { best = val; bestExp = cur; }
    if (v == vars.size()) return;
    long capBits = static_cast<long>(mpz_sizeinbase(cap.get_mpz_t(), 2));
    long prodBits = static_cast<long>(mpz_sizeinbase(prod.get_mpz_t(), 2)) - 1;
    // remaining multiplier < 2^(capBits - prodBits), each exponent unit of
    // vars[i] costs at least wbits of it
    Rat bound = Rat(capBits - prodBits) * suffixDensity[v];
    if (Rat(val) + bound <= Rat(best)) return;
    std::vector<Int> powers{prod};
    while (true) {
      Int np = powers.back() * vars[v].base;
      if (np >= cap) break;
      powers.push_back(np);
    }
    for (long ee = static_cast<long>(powers.size()) - 1; ee >= 0; --ee) {
      cur[v] = ee;
      dfs(v + 1, powers[ee], val + ee * vars[v].value);
    }
    cur[v] = 0;
  }
};

FTuple compute_f_raw(const std::vector<Int>& m, long n1,
                     const std::vector<long>& nEven, int j) {
  Knap k;
  // order variables by descending index: better densities first
  for (int i = j - 1; i >= 1; --i)
    k.vars.push_back({m[2 * i], nEven[i - 1],
                      static_cast<long>(mpz_sizeinbase(m[2 * i].get_mpz_t(), 2)) - 1});
  k.vars.push_back({m[1], n1,
                    static_cast<long>(mpz_sizeinbase(m[1].get_mpz_t(), 2)) - 1});
  k.cap = m[2 * j];
  k.run();
  FTuple t;
  t.value = k.best;
  t.rho = k.bestExp.back();
  t.rhoEven.assign(j - 1, 0);
  for (int i = j - 1; i >= 1; --i) t.rhoEven[i - 1] = k.bestExp[j - 1 - i];
  return t;
}

void note(ParamSystem& sys, bool strict_mode, const std::string& msg) {
  if (strict_mode) throw Error("STRICT_VIOLATION", msg);
  sys.warnings.push_back(msg);
}

} // namespace

ParamSystem build_param_system(const Config& cfg) {
  if (cfg.K < 2) throw Error("BAD_CONFIG", "need at least two weight classes");
  if (static_cast<int>(cfg.s.size()) != cfg.K - 1)
    throw Error("BAD_CONFIG", "s must have K-1 entries");
  if (static_cast<int>(cfg.nEven.size()) != cfg.K)
    throw Error("BAD_CONFIG", "nEven must have K entries");
  if (static_cast<int>(cfg.nOddRest.size()) != cfg.K)
    throw Error("BAD_CONFIG", "nOddRest must have K entries");
  if (cfg.n1 < 1) throw Error("BAD_CONFIG", "n1 must be positive");
  if (cfg.q <= 1) throw Error("BAD_CONFIG", "q must exceed 1");

  ParamSystem sys;
  sys.cfg = cfg;
  sys.q = cfg.q;
  sys.p = cfg.q / (cfg.q - 1);
  if (cfg.q.get_den() == 1 && cfg.q >= 2) sys.qInt = cfg.q.get_num().get_si();

  const int K = cfg.K;
  sys.m.assign(2 * K + 2, Int(0));
  sys.n.assign(2 * K + 2, 0);

  if (cfg.m1 <= 3) note(sys, cfg.strict, "m_1 must exceed 3");
  sys.m[1] = cfg.m1;
  sys.m[2] = int_pow(cfg.m1, 5);
  for (int j = 2; j <= K; ++j) {
    Int prod(1);
    for (int i = 1; i < j; ++i) {
      if (cfg.s[i - 1] < 1) throw Error("BAD_CONFIG", "s entries must be positive");
      prod *= int_pow(sys.m[2 * i], cfg.s[i - 1]);
    }
    sys.m[2 * j] = prod;
  }
  for (int j = 1; j <= K; ++j) sys.m[2 * j + 1] = int_pow(sys.m[2 * j], 5);

  for (std::size_t i = 1; i < cfg.s.size(); ++i)
    if (cfg.s[i] <= cfg.s[i - 1]) note(sys, cfg.strict, "s must be increasing");
  if (!cfg.s.empty() && cfg.s[0] < 2)
    sys.warnings.push_back("s_1 < 2: some derived inequalities may fail");

  sys.n[1] = cfg.n1;
  for (int j = 1; j <= K; ++j) sys.n[2 * j] = cfg.nEven[j - 1];
  for (int j = 1; j <= K; ++j) sys.n[2 * j + 1] = cfg.nOddRest[j - 1];
  for (int i = 2; i <= 2 * K + 1; ++i)
    if (sys.n[i] <= sys.n[i - 1]) note(sys, cfg.strict, "n must be increasing");
  if (5 * cfg.n1 >= sys.n[2]) note(sys, cfg.strict, "need 5 n_1 < n_2");

  // f_j and p_k
  sys.f.assign(K + 1, 0);
  sys.fTuple.assign(K + 1, FTuple{});
  sys.pk.assign(K + 1, 0);
  sys.pk[1] = 5 * cfg.n1;
  for (int k = 2; k <= K; ++k)
    sys.pk[k] = sys.pk[k - 1] + cfg.s[k - 2] * sys.n[2 * (k - 1)];
  for (int j = 2; j <= K; ++j) {
    sys.fTuple[j] = compute_f_raw(sys.m, cfg.n1, cfg.nEven, j);
    sys.f[j] = sys.fTuple[j].value;
    if (4 * sys.f[j] >= sys.n[2 * j]) note(sys, cfg.strict, "need 4 f_j < n_{2j}");
    if (sys.pk[j] > 2 * sys.f[j])
      note(sys, cfg.strict, "derived bound p_k <= 2 f_k fails");
  }

  // Series bound: M = 2/m_1 + sum_{k>=3} 4k / m_{2(k-1)}, truncated at the
  // materialized classes plus a certified geometric tail. For k >= K+2 the
  // term 4k/m_{2(k-1)} is at most 16*(2/m_4)^(k-3) since 4k <= 2^{k+1} and
  // m_{2j} >= m_4^{j-2}.
  sys.M = Rat(2) / Rat(sys.m[1]);
  for (int k = 3; k <= K + 1; ++k)
    sys.M += Rat(4 * k) / Rat(sys.m[2 * (k - 1)]);
  Rat r = Rat(2) / Rat(sys.m[4]);
  if (r >= 1) throw Error("BAD_CONFIG", "m_4 too small for the tail bound");
  sys.Mtail = Rat(16) * rat_ipow(r, K - 1) / (Rat(1) - r);
  sys.M += sys.Mtail;
  return sys;
}

FTuple compute_f(const ParamSystem& sys, int j) {
  if (j < 2 || j > sys.cfg.K) throw Error("BAD_INDEX", "f_j needs 2 <= j <= K");
  return compute_f_raw(sys.m, sys.cfg.n1, sys.cfg.nEven, j);
}

bool verify_fact_feasible(const ParamSystem& sys, int k, long a,
                          const std::vector<long>& as, bool* vacuous) {
  if (k < 2 || k > sys.cfg.K) throw Error("BAD_INDEX", "need 2 <= k <= K");
  if (static_cast<int>(as.size()) != k - 1)
    throw Error("BAD_INDEX", "tuple must have k-1 even exponents");
  if (vacuous) *vacuous = false;
  Int prod = int_pow(sys.m[1], a);
  for (int i = 1; i < k; ++i) prod *= int_pow(sys.m[2 * i], as[i - 1]);
  if (prod >= sys.m[2 * k]) {
    if (vacuous) *vacuous = true;
    return true;
  }
  long v = a * sys.cfg.n1;
  for (int i = 1; i < k; ++i) v += as[i - 1] * sys.n[2 * i];
  return v < sys.pk[k];
}

Config desk_config() {
  Config c;
  c.m1 = 4;
  c.s = {2, 3};
  c.n1 = 1;
  c.nEven = {6, 41, 533};
  c.nOddRest = {7, 42, 534};
  c.q = Rat(2);
  c.K = 3;
  c.strict = true;
  return c;
}

Config extended_desk_config(int K) {
  Config c = desk_config();
  for (int j = c.K + 1; j <= K; ++j) {
    c.s.push_back(j);            // continues the desk pattern s_i = i + 1
    c.K = j;
    // placeholders so the probe build passes shape checks; f_j does not
    // depend on n_{2j} or the odd entries
    c.nEven.push_back(c.nEven.back() + 2);
    c.nOddRest.push_back(c.nOddRest.back() + 2);
    Config probe = c;
    probe.strict = false;
    ParamSystem sys = build_param_system(probe);
    long fj = sys.f[j];
    c.nEven[j - 1] = 4 * fj + 1;
    c.nOddRest[j - 1] = c.nEven[j - 1] + 1;
  }
  return c;
}

Config config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Config c;
  c.m1 = Int(j.at("m1").get<std::string>());
  c.s = j.at("s").get<std::vector<long>>();
  c.n1 = j.at("n1").get<long>();
  c.nEven = j.at("nEven").get<std::vector<long>>();
  c.nOddRest = j.at("nOddRest").get<std::vector<long>>();
  c.q = parse_rat(j.at("q").get<std::string>());
  c.K = j.at("K").get<int>();
  c.strict = j.value("strict", true);
  return c;
}

std::string config_to_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["m1"] = cfg.m1.get_str();
  j["s"] = cfg.s;
  j["n1"] = cfg.n1;
  j["nEven"] = cfg.nEven;
  j["nOddRest"] = cfg.nOddRest;
  j["q"] = rat_str(cfg.q);
  j["K"] = cfg.K;
  j["strict"] = cfg.strict;
  return j.dump(2);
}

} // namespace xn::params
