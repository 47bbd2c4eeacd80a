#ifndef XNLAB_PARAMS_HPP
#define XNLAB_PARAMS_HPP

#include <string>
#include <vector>

#include "xnlab/rat.hpp"

namespace xn::params {

struct Config {
  Int m1 = 4;
  std::vector<long> s;        // s_1 .. s_{K-1}
  long n1 = 1;
  std::vector<long> nEven;    // n_2, n_4, ..., n_{2K}
  std::vector<long> nOddRest; // n_3, n_5, ..., n_{2K+1}
  Rat q = Rat(2);
  int K = 2;
  bool strict = true;
};

// Attaining exponent tuple for the knapsack defining f_j.
struct FTuple {
  long rho = 0;               // exponent of m_1
  std::vector<long> rhoEven;  // exponents of m_2, m_4, ..., one per i < j
  long value = 0;
};

struct ParamSystem {
  Config cfg;
  std::vector<Int> m;  // m[i] = m_i for i = 1..2K+1 (index 0 unused)
  std::vector<long> n; // n[i] = n_i for i = 1..2K+1
  Rat q, p;            // p is the conjugate exponent q/(q-1)
  long qInt = 0;       // q when integral (>= 2), else 0: exact paths need this

  std::vector<long> f;          // f[j] for j = 2..K (index shifted: f[j])
  std::vector<FTuple> fTuple;   // attaining tuples, same indexing
  std::vector<long> pk;         // p_k for k = 1..K
  Rat M;                        // series bound, truncation plus certified tail
  Rat Mtail;                    // the tail bound alone

  std::vector<std::string> warnings;

  const Int& weight(int idx) const { return m.at(idx); }
  long adm(int idx) const { return n.at(idx); }
  long f_of(int j) const { return f.at(j); }
  long pk_of(int k) const { return pk.at(k); }
};

ParamSystem build_param_system(const Config& cfg);

// Exact integer branch-and-bound for
//   f_j = max { rho*n_1 + sum rho_i n_{2i} : m_1^rho * prod m_{2i}^{rho_i} < m_{2j} }.
// The all-zero tuple is always feasible, so the maximum is at least 0.
FTuple compute_f(const ParamSystem& sys, int j);

// Checks a*n_1 + sum a_i n_{2i} < p_k for a feasible exponent tuple
// (feasible: m_1^a * prod m_{2i}^{a_i} < m_{2k}). Sets *vacuous when the
// tuple is infeasible, in which case the return value is true.
bool verify_fact_feasible(const ParamSystem& sys, int k, long a,
                          const std::vector<long>& as, bool* vacuous);

Config desk_config();
// Desk system extended to K weight classes, choosing each n_{2j} = 4 f_j + 1
// (minimal strict choice) and filler odd entries.
Config extended_desk_config(int K);

Config config_from_json(const std::string& text);
std::string config_to_json(const Config& cfg);

} // namespace xn::params

#endif
