#ifndef XNLAB_VEC00_HPP
#define XNLAB_VEC00_HPP

#include <map>
#include <utility>

#include "xnlab/rat.hpp"
#include "xnlab/schreier.hpp"

namespace xn::core {

using schreier::Elem;
using schreier::FiniteSubset;

// Finitely supported rational vector on the unit vector basis. No explicit
// zero entries are stored.
class Vec00 {
 public:
  Vec00() = default;

  void set(Elem i, const Rat& v) {
    if (v == 0)
      a_.erase(i);
    else
      a_[i] = v;
  }
  void add(Elem i, const Rat& v) { set(i, at(i) + v); }

  Rat at(Elem i) const {
    auto it = a_.find(i);
    return it == a_.end() ? Rat(0) : it->second;
  }

  bool empty() const { return a_.empty(); }
  std::size_t support_size() const { return a_.size(); }

  FiniteSubset supp() const {
    std::vector<Elem> v;
    v.reserve(a_.size());
    for (const auto& [i, c] : a_) v.push_back(i);
    return FiniteSubset(std::move(v));
  }

  // smallest interval containing the support; empty vector gives {0,0}
  std::pair<Elem, Elem> range() const {
    if (a_.empty()) return {0, 0};
    return {a_.begin()->first, a_.rbegin()->first};
  }

  const std::map<Elem, Rat>& entries() const { return a_; }

  Vec00 restricted(Elem lo, Elem hi) const {
    Vec00 r;
    for (auto it = a_.lower_bound(lo); it != a_.end() && it->first <= hi; ++it)
      r.a_.insert(*it);
    return r;
  }

  Vec00& operator+=(const Vec00& o) {
    for (const auto& [i, c] : o.a_) add(i, c);
    return *this;
  }
  Vec00& operator-=(const Vec00& o) {
    for (const auto& [i, c] : o.a_) add(i, -c);
    return *this;
  }
  Vec00& operator*=(const Rat& c) {
    if (c == 0) {
      a_.clear();
      return *this;
    }
    for (auto& [i, v] : a_) v *= c;
    return *this;
  }

  friend Vec00 operator+(Vec00 a, const Vec00& b) { return a += b; }
  friend Vec00 operator-(Vec00 a, const Vec00& b) { return a -= b; }
  friend Vec00 operator*(const Rat& c, Vec00 a) { return a *= c; }
  friend bool operator==(const Vec00& a, const Vec00& b) { return a.a_ == b.a_; }

  Rat max_abs() const {
    Rat m(0);
    for (const auto& [i, c] : a_) m = std::max(m, rat_abs(c));
    return m;
  }

  // sum of |a_i|^e for integer e >= 1
  Rat power_mass(long e) const {
    Rat s(0);
    for (const auto& [i, c] : a_) s += rat_ipow(rat_abs(c), e);
    return s;
  }

 private:
  std::map<Elem, Rat> a_;
};

} // namespace xn::core

#endif
