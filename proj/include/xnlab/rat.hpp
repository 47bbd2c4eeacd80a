#ifndef XNLAB_RAT_HPP
#define XNLAB_RAT_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xn {

using Int = mpz_class;
using Rat = mpq_class;

struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

inline Rat make_rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw Error("BAD_RATIONAL", "cannot parse '" + s + "'");
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Int int_pow(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

inline Rat rat_ipow(const Rat& x, unsigned long e) {
  Rat r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(x.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(x.get_mpq_t()), e);
  r.canonicalize();
  return r;
}

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Directed square roots: sqrt_upper(x) >= sqrt(x) and sqrt_lower(x) <= sqrt(x),
// tight to roughly 2^-bits relative error; exact when x is a rational square.
// Both are scale-equivariant under multiplication by rational squares, which the
// norm engine relies on for exact positive homogeneity.
inline bool is_rational_square(const Rat& x, Rat* root = nullptr) {
  if (x < 0) return false;
  if (mpz_perfect_square_p(x.get_num_mpz_t()) && mpz_perfect_square_p(x.get_den_mpz_t())) {
    if (root) {
      Rat r;
      mpz_sqrt(mpq_numref(r.get_mpq_t()), x.get_num_mpz_t());
      mpz_sqrt(mpq_denref(r.get_mpq_t()), x.get_den_mpz_t());
      r.canonicalize();
      *root = r;
    }
    return true;
  }
  return false;
}

inline Rat sqrt_upper(const Rat& x, unsigned bits = 64) {
  if (x < 0) throw Error("DOMAIN", "sqrt of negative rational");
  Rat exact;
  if (is_rational_square(x, &exact)) return exact;
  // ceil(sqrt(num*den*4^bits)) / (den*2^bits)
  Int scaled = x.get_num() * x.get_den();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * bits);
  Int s;
  mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
  if (s * s < scaled) s += 1;
  Int den = x.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), bits);
  Rat r(s, den);
  r.canonicalize();
  return r;
}

inline Rat sqrt_lower(const Rat& x, unsigned bits = 64) {
  if (x < 0) throw Error("DOMAIN", "sqrt of negative rational");
  Rat exact;
  if (is_rational_square(x, &exact)) return exact;
  Int scaled = x.get_num() * x.get_den();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * bits);
  Int s;
  mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t()); // floor
  Int den = x.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), bits);
  Rat r(s, den);
  r.canonicalize();
  return r;
}

// Directed e-th roots (e >= 1).
inline Rat root_upper(const Rat& x, unsigned long e, unsigned bits = 64) {
  if (x < 0) throw Error("DOMAIN", "root of negative rational");
  if (e == 1) return x;
  if (e == 2) return sqrt_upper(x, bits);
  // ceil((num*den^(e-1)*2^(e*bits))^(1/e)) / (den*2^bits)
  Int scaled = x.get_num() * int_pow(x.get_den(), e - 1);
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), e * bits);
  Int s;
  mpz_root(s.get_mpz_t(), scaled.get_mpz_t(), e);
  if (int_pow(s, e) < scaled) s += 1;
  Int den = x.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), bits);
  Rat r(s, den);
  r.canonicalize();
  return r;
}

inline Rat root_lower(const Rat& x, unsigned long e, unsigned bits = 64) {
  if (x < 0) throw Error("DOMAIN", "root of negative rational");
  if (e == 1) return x;
  if (e == 2) return sqrt_lower(x, bits);
  Int scaled = x.get_num() * int_pow(x.get_den(), e - 1);
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), e * bits);
  Int s;
  mpz_root(s.get_mpz_t(), scaled.get_mpz_t(), e); // floor of the root
  Int den = x.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), bits);
  Rat r(s, den);
  r.canonicalize();
  return r;
}

// Directed x^(a/b) for x >= 0, rational exponent with a,b >= 1.
inline Rat pow_upper(const Rat& x, unsigned long a, unsigned long b, unsigned bits = 64) {
  return root_upper(rat_ipow(x, a), b, bits);
}
inline Rat pow_lower(const Rat& x, unsigned long a, unsigned long b, unsigned bits = 64) {
  return root_lower(rat_ipow(x, a), b, bits);
}

} // namespace xn

#endif
