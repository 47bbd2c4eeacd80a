#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xnlab/schreier.hpp"

#include <vector>

using namespace xn;
using namespace xn::schreier;

namespace {

// Independent definition-unfolding oracle over contiguous split positions.
// memb[n][i][j]: arr[i..j) is a member at level n. A set is a member at
// level n+1 iff it splits into at most arr[i] contiguous chunks each a
// member at level n.
struct Brute {
  std::vector<Elem> arr;
  bool member(int n) const { return memb(n, 0, arr.size()); }
  bool memb(int n, std::size_t i, std::size_t j) const {
    if (j <= i) return true;
    if (n == 0) return j - i == 1;
    // min parts covering arr[i..j) with level-(n-1) chunks
    std::vector<long> mp(j - i + 1, -1);
    mp[0] = 0;
    for (std::size_t e = 1; e <= j - i; ++e) {
      for (std::size_t c = 0; c < e; ++c) {
        if (mp[c] < 0) continue;
        if (!memb(n - 1, i + c, i + e)) continue;
        if (mp[e] < 0 || mp[c] + 1 < mp[e]) mp[e] = mp[c] + 1;
      }
    }
    return mp[j - i] >= 0 && mp[j - i] <= arr[i];
  }
};

bool brute_member(const std::vector<Elem>& v, int n) {
  Brute b{v};
  return b.member(n);
}

} // namespace

TEST_CASE("level 0 and small memberships") {
  CHECK(is_member(FiniteSubset{}, 0));
  CHECK(is_member(FiniteSubset({7}), 0));
  CHECK(!is_member(FiniteSubset({7, 8}), 0));
  CHECK(is_member(FiniteSubset({3, 4, 5}), 1));
  CHECK(!is_member(FiniteSubset({2, 3, 4}), 1));
  CHECK(is_member(FiniteSubset({2, 3, 4}), 2));
  CHECK(!is_member(FiniteSubset({1, 2}), 64));
  CHECK(is_member(FiniteSubset({1}), 3));
}

TEST_CASE("greedy membership agrees with unfolding oracle on a grid") {
  // all subsets of {1..14} with size <= 5, levels <= 3
  std::vector<Elem> cur;
  auto rec = [&](auto&& self, Elem next) -> void {
    for (int n = 0; n <= 3; ++n) {
      CHECK(is_member(std::span<const Elem>(cur), n) == brute_member(cur, n));
    }
    if (cur.size() == 5) return;
    for (Elem v = next; v <= 14; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
}

TEST_CASE("member_index and cap") {
  CHECK(member_index(FiniteSubset({3, 4, 5})) == 1);
  CHECK(member_index(FiniteSubset({2, 3, 4})) == 2);
  CHECK(member_index(FiniteSubset({1, 5})) == -1);
  // huge level equals capped level
  FiniteSubset f({2, 3, 4, 5, 6, 7});
  CHECK(is_member(f, 1000000) == is_member(f, 64));
}

TEST_CASE("witness construction and validation") {
  FiniteSubset f({2, 3, 4, 5, 6, 7});
  auto w = witness(f, 2);
  REQUIRE(w.has_value());
  CHECK(validate_witness(*w));
  CHECK(w->set == f);
  CHECK(!witness(FiniteSubset({2, 3, 4}), 1).has_value());
  auto w0 = witness(FiniteSubset({5}), 0);
  REQUIRE(w0.has_value());
  CHECK(validate_witness(*w0));
}

TEST_CASE("admissibility of block families") {
  std::vector<FiniteSubset> blocks{FiniteSubset({3, 4}), FiniteSubset({5, 9}),
                                   FiniteSubset({12})};
  CHECK(is_admissible(blocks, 1));            // mins {3,5,12}, |.|=3<=3
  std::vector<FiniteSubset> bad{FiniteSubset({2, 6}), FiniteSubset({5, 9})};
  CHECK(!is_admissible(bad, 5)); // not successive
  std::vector<FiniteSubset> two{FiniteSubset({2, 3}), FiniteSubset({4, 5}),
                                FiniteSubset({6})};
  CHECK(!is_admissible(two, 1)); // mins {2,4,6} size 3 > 2
  CHECK(is_admissible(two, 2));
}

TEST_CASE("convolution split") {
  // {2..7} is a member at level 2 = 1+1: split into level-1 parts with
  // level-1 set of minima
  FiniteSubset f({2, 3, 4, 5, 6, 7});
  auto parts = split(f, 1, 1);
  REQUIRE(parts.has_value());
  std::vector<Elem> mins;
  std::vector<Elem> all;
  for (const auto& p : *parts) {
    CHECK(is_member(p, 1));
    mins.push_back(p.min());
    for (Elem e : p.elems()) all.push_back(e);
  }
  CHECK(all == f.elems());
  CHECK(is_member(std::span<const Elem>(mins), 1));
  CHECK(!split(FiniteSubset({2, 3, 4}), 1, 0).has_value());
}

TEST_CASE("max admissible mass: level 0 and 1") {
  FiniteSubset f({3, 4, 5, 6, 7, 8});
  std::map<Elem, Rat> w;
  for (Elem e : f.elems()) w[e] = make_rat(1, 6);
  // f itself is in level 2, so level-2 mass is total
  auto r2 = max_admissible_mass(f, w, 2);
  CHECK(r2.mass == make_rat(1));
  // level 1: anchored at 3 takes 3 of 6; anchored at 5 takes min(5, 4)=4
  auto r1 = max_admissible_mass(f, w, 1);
  CHECK(r1.mass == make_rat(4, 6));
  CHECK(is_member(r1.attaining, 1));
  auto r0 = max_admissible_mass(f, w, 0);
  CHECK(r0.mass == make_rat(1, 6));
}

TEST_CASE("max admissible mass: nonuniform weights, level 1") {
  // heavy early elements reachable only with small budget
  FiniteSubset f({2, 3, 10, 11, 12});
  std::map<Elem, Rat> w{{2, make_rat(5)}, {3, make_rat(4)}, {10, make_rat(1)},
                        {11, make_rat(1)}, {12, make_rat(1)}};
  auto r = max_admissible_mass(f, w, 1);
  // anchored at 2: {2,3} = 9;  anchored at 3: 3 + two heaviest after = 6
  CHECK(r.mass == make_rat(9));
  CHECK(r.attaining.elems() == std::vector<Elem>{2, 3});
}

TEST_CASE("max admissible mass: general level DP vs exhaustive check") {
  // 10 points, level 2, compare against brute force over all subsets
  std::vector<Elem> base{2, 3, 5, 6, 9, 10, 12, 15, 17, 20};
  FiniteSubset f(base);
  std::map<Elem, Rat> w;
  for (std::size_t i = 0; i < base.size(); ++i)
    w[base[i]] = make_rat(static_cast<long>((i * 7) % 5 + 1), 10);
  auto r = max_admissible_mass(f, w, 2);
  Rat best(0);
  for (unsigned mask = 0; mask < (1u << base.size()); ++mask) {
    std::vector<Elem> sub;
    Rat m(0);
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask & (1u << i)) { sub.push_back(base[i]); m += w[base[i]]; }
    if (m > best && brute_member(sub, 2)) best = m;
  }
  CHECK(r.mass == best);
  CHECK(brute_member(r.attaining.elems(), 2));
  Rat check(0);
  for (Elem e : r.attaining.elems()) check += w[e];
  CHECK(check == r.mass);
}
