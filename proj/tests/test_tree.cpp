#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xnlab/gen.hpp"
#include "xnlab/tree.hpp"

using namespace xn;
using namespace xn::core;

namespace {

params::ParamSystem desk() {
  static params::ParamSystem sys = params::build_param_system(params::desk_config());
  return sys;
}

// (1/1024)(e*_3 - e*_4 + e*_5)/2, the smallest nontrivial even node
Node treeA() {
  return internal(2, {leaf(1, 3, Rat(1, 2)), leaf(-1, 4, Rat(1, 2)),
                      leaf(1, 5, Rat(1, 2))});
}

// odd root over two even-weighted internal nodes with distinct weights
Node treeC() {
  Node a = internal(2, {leaf(1, 3)}, Rat(1, 2));
  Node b = internal(4, {leaf(1, 5)}, Rat(1, 2));
  return internal(3, {a, b});
}

Vec00 probe(gen::Rng& r, const FiniteSubset& supp) {
  Vec00 x;
  for (Elem j : supp.elems()) x.set(j, make_rat(r.uniform(-9, 9), r.uniform(1, 7)));
  return x;
}

std::vector<std::vector<std::size_t>> leaf_paths(const Node& t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto walk = [&](auto&& self, const Node& n) -> void {
    if (n.is_leaf()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      cur.push_back(i);
      self(self, n.children[i]);
      cur.pop_back();
    }
  };
  walk(walk, t);
  return out;
}

} // namespace

TEST_CASE("support and interval restriction") {
  auto sys = desk();
  Node t = treeA();
  CHECK(support(t) == FiniteSubset({3, 4, 5}));

  auto r = restrict_tree(t, 4, 5);
  REQUIRE(r.has_value());
  CHECK(support(*r) == FiniteSubset({4, 5}));
  CHECK(!restrict_tree(t, 6, 99).has_value());

  Node c = treeC();
  c.hasE = true;
  c.elo = 4;
  c.ehi = 9;
  CHECK(support(c) == FiniteSubset({5}));

  Vec00 x;
  x.set(3, Rat(7));
  x.set(5, Rat(11));
  // the clipped leaf at 3 contributes nothing
  Rat direct = evaluate(c, x, sys);
  Rat expect = Rat(1, 2) * Rat(11) / (Rat(sys.m[4]) * Rat(sys.m[3]));
  CHECK(direct == expect);
}

TEST_CASE("membership validation") {
  auto sys = desk();
  CHECK(validate_tree(leaf(1, 7), sys).ok);
  CHECK(validate_tree(leaf(-1, 1), sys).ok);
  CHECK(validate_tree(treeA(), sys).ok);
  CHECK(validate_tree(treeC(), sys).ok);

  // coefficient mass 2 breaks the even unit ball
  Node bad = internal(2, {leaf(1, 3), leaf(1, 4)});
  CHECK(!validate_tree(bad, sys).ok);

  // root coefficient must have magnitude one
  Node half = treeA();
  half.gamma = Rat(1, 2);
  CHECK(!validate_tree(half, sys).ok);
  half.gamma = Rat(-1);
  CHECK(validate_tree(half, sys).ok);

  // odd nodes may not repeat a child weight
  Node dup = internal(3, {internal(2, {leaf(1, 3)}, Rat(1, 2)),
                          internal(2, {leaf(1, 5)}, Rat(1, 2))});
  CHECK(!validate_tree(dup, sys).ok);

  // nor take bare leaves as children
  Node oddLeaf = internal(3, {leaf(1, 3, Rat(1, 2))});
  CHECK(!validate_tree(oddLeaf, sys).ok);

  // intervals belong to odd nodes only
  Node evenE = treeA();
  evenE.hasE = true;
  evenE.elo = 1;
  evenE.ehi = 10;
  CHECK(!validate_tree(evenE, sys).ok);

  // children must be successive blocks
  Node overlap = internal(2, {leaf(1, 4, Rat(1, 2)), leaf(1, 3, Rat(1, 2))});
  CHECK(!validate_tree(overlap, sys).ok);

  // odd ball is wider: mass up to 2 passes there
  Node wide = internal(3, {internal(2, {leaf(1, 3)}, Rat(1)),
                           internal(4, {leaf(1, 5)}, Rat(1))});
  CHECK(validate_tree(wide, sys).ok);
}

TEST_CASE("evaluation is the scaled leaf pairing") {
  auto sys = desk();
  Vec00 x;
  x.set(3, Rat(5));
  x.set(4, Rat(-2, 3));
  x.set(5, Rat(1, 7));
  Rat v = evaluate(treeA(), x, sys);
  CHECK(v == (Rat(5, 2) + Rat(1, 3) + Rat(1, 14)) / Rat(1024));

  Rat w = evaluate(treeC(), x, sys);
  Rat part = Rat(1, 2) * Rat(5) / Rat(1024) + Rat(1, 2) * Rat(1, 7) / Rat(sys.m[4]);
  CHECK(w == part / Rat(sys.m[3]));
}

TEST_CASE("antichain expansion recombines exactly") {
  auto sys = desk();
  gen::Rng rng(2026);
  Node t = treeC();

  auto check_identity = [&](const Node& tree,
                            const std::vector<std::vector<std::size_t>>& chain) {
    auto terms = flatten(tree, chain, sys);
    Vec00 x = probe(rng, support(tree));
    Rat lhs = evaluate(tree, x, sys);
    Rat rhs(0);
    for (const auto& ft : terms) rhs += ft.coeff * evaluate(ft.part, x, sys);
    CHECK(lhs == rhs);
    for (const auto& ft : terms) CHECK(ft.part.gamma == Rat(1));
  };

  check_identity(t, {{}});
  check_identity(t, {{0}, {1}});
  check_identity(t, leaf_paths(t));
  check_identity(treeA(), leaf_paths(treeA()));

  for (long seed = 1; seed <= 12; ++seed) {
    gen::Rng r2(static_cast<std::uint64_t>(seed) * 977);
    Node rt = gen::random_tree(r2, sys, {});
    REQUIRE(validate_tree(rt, sys).ok);
    check_identity(rt, leaf_paths(rt));
  }

  CHECK_THROWS_WITH_AS(flatten(t, {{}, {0}}, sys),
                       doctest::Contains("INVALID_ANTICHAIN"), Error);
  CHECK_THROWS_WITH_AS(flatten(t, {{0}}, sys),
                       doctest::Contains("INVALID_ANTICHAIN"), Error);
  CHECK_THROWS_WITH_AS(flatten(t, {{5}}, sys),
                       doctest::Contains("INVALID_ANTICHAIN"), Error);
}

TEST_CASE("antichain depth certificate") {
  auto sys = desk();
  Node t = treeC();
  // strict ancestors of each leaf: the odd root (counts n_1 = 1) and one
  // even node (n_2 = 6 or n_4 = 41)
  auto cert = antichain_admissibility(t, leaf_paths(t), sys);
  CHECK(cert.d == 1 + sys.n[4]);
  CHECK(cert.mins == FiniteSubset({3, 5}));
  CHECK(cert.admissible);

  auto shallow = antichain_admissibility(t, {{0}, {1}}, sys);
  CHECK(shallow.d == 1);
  CHECK(shallow.admissible); // {3, 5} has 2 elements, min 3

  auto rootOnly = antichain_admissibility(t, {{}}, sys);
  CHECK(rootOnly.d == 0);
}

TEST_CASE("branch decomposition at a weight threshold") {
  auto sys = desk();

  SUBCASE("a bare leaf is its own decomposition") {
    auto d = decompose(leaf(1, 5), 1, sys);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.lambda[0] == Rat(1));
    CHECK(d.I1 == std::vector<std::size_t>{0});
    CHECK(d.I2.empty());
    CHECK(d.leafIndices == FiniteSubset({5}));
  }

  SUBCASE("flat even node cuts at its leaves") {
    Node t = treeA();
    auto d = decompose(t, 1, sys);
    REQUIRE(d.lambda.size() == 3);
    // the minus sign stays on the leaf part; the scalar is the gamma product
    for (const Rat& l : d.lambda) CHECK(l == Rat(1, 2048));
    CHECK(d.parts[1].sign == -1);
    CHECK(d.I1.size() == 3);
    CHECK(d.leafIndices == FiniteSubset({3, 4, 5}));
  }

  SUBCASE("support below 2k is rejected") {
    CHECK_THROWS_WITH_AS(decompose(leaf(1, 3), 2, sys),
                         doctest::Contains("SUPPORT_TOO_LOW"), Error);
  }

  SUBCASE("random trees recombine and partition") {
    for (long seed = 1; seed <= 10; ++seed) {
      gen::Rng r(static_cast<std::uint64_t>(seed) * 31337);
      gen::TreeOptions opts;
      opts.start = 8;
      Node t = gen::random_tree(r, sys, opts);
      REQUIRE(validate_tree(t, sys).ok);
      for (int k : {1, 2, 3}) {
        auto d = decompose(t, k, sys); // internal certification must hold
        CHECK(d.I1.size() + d.I2.size() == d.lambda.size());
        for (const Node& p : d.parts) CHECK(p.gamma == Rat(1));
        Vec00 x = probe(r, support(t));
        Rat lhs = evaluate(t, x, sys);
        Rat rhs(0);
        for (std::size_t i = 0; i < d.lambda.size(); ++i)
          rhs += d.lambda[i] * evaluate(d.parts[i], x, sys);
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("large coefficient indices") {
  auto sys = desk();
  // a root leaf is hit with coefficient 1, kept whenever the index allows
  CHECK(large_coefficient_set(leaf(1, 5), 1, sys) == FiniteSubset({5}));
  CHECK(large_coefficient_set(leaf(1, 1), 1, sys).empty());

  // below one weight-1024 node the coefficient is 1/1024 < 2/1024: dropped
  // at k = 1 but kept at k = 2 where the threshold is 2 / 2^20
  Node t = treeA();
  CHECK(large_coefficient_set(t, 1, sys).empty());
  CHECK(large_coefficient_set(t, 2, sys) == FiniteSubset({4, 5}));
}

TEST_CASE("scaled combinations regroup into members") {
  auto sys = desk();

  SUBCASE("single grouping level") {
    std::vector<Node> parts{leaf(1, 10), leaf(-1, 12), leaf(1, 14)};
    std::vector<Rat> betas{Rat(1, 2), Rat(1, 2), Rat(1, 2)};
    Node g = compose_scaled(sys, {1}, parts, betas);
    CHECK(validate_tree(g, sys).ok);
    Vec00 x;
    x.set(10, Rat(3));
    x.set(12, Rat(5, 2));
    x.set(14, Rat(-1));
    Rat expect = (Rat(3, 2) - Rat(5, 4) - Rat(1, 2)) / Rat(1024);
    CHECK(evaluate(g, x, sys) == expect);
  }

  SUBCASE("two grouping levels with rounded group masses") {
    gen::Rng r(424242);
    std::vector<Node> parts;
    for (Elem j = 10; parts.size() < 6; j += 2) parts.push_back(leaf(1, j));
    auto betas = gen::unit_l2_vector(r, parts.size());
    for (auto& b : betas) b *= Rat(3, 4); // strict slack for the rounding
    Node g = compose_scaled(sys, {1, 1}, parts, betas);
    CHECK(validate_tree(g, sys).ok);
    gen::Rng r2(7);
    Vec00 x = probe(r2, support(g));
    Rat scale = Rat(1) / (Rat(sys.m[2]) * Rat(sys.m[4]));
    Rat expect(0);
    for (std::size_t i = 0; i < parts.size(); ++i)
      expect += betas[i] * x.at(parts[i].basisIndex);
    CHECK(evaluate(g, x, sys) == expect * scale);
  }

  SUBCASE("rejections") {
    std::vector<Node> parts{leaf(1, 10), leaf(1, 12)};
    CHECK_THROWS_WITH_AS(compose_scaled(sys, {1}, parts, {Rat(1)}),
                         doctest::Contains("NOT_ADMISSIBLE"), Error);
    CHECK_THROWS_WITH_AS(compose_scaled(sys, {1}, parts, {Rat(1), Rat(1)}),
                         doctest::Contains("BALL_VIOLATION"), Error);
    CHECK_THROWS_WITH_AS(
        compose_scaled(sys, {1, 1, 1, 1}, parts, {Rat(1, 2), Rat(1, 2)}),
        doctest::Contains("NOT_ADMISSIBLE"), Error);
  }
}

TEST_CASE("mass helpers") {
  auto sys = desk();
  Rat root;
  CHECK(qmass_root_exact({Rat(3, 5), Rat(4, 5)}, sys, &root));
  CHECK(root == Rat(1));
  CHECK(!qmass_root_exact({Rat(1, 2), Rat(1, 2)}, sys, &root));
  Rat up = qmass_root_upper({Rat(1, 2), Rat(1, 2)}, sys);
  CHECK(up * up >= Rat(1, 2));
  CHECK(up < Rat(3, 4)); // sqrt(1/2) ~ 0.7071

  CHECK(qmass_leq({Rat(3, 5), Rat(4, 5)}, Rat(1), sys));
  CHECK(!qmass_leq({Rat(3, 5), Rat(4, 5), Rat(1, 100)}, Rat(1), sys));
}

TEST_CASE("serialization round trip") {
  auto sys = desk();
  Node c = treeC();
  c.hasE = true;
  c.elo = 2;
  c.ehi = 40;
  std::string s1 = tree_to_json(c);
  Node back = tree_from_json(s1);
  CHECK(tree_to_json(back) == s1);
  Vec00 x;
  x.set(3, Rat(-4, 9));
  x.set(5, Rat(22, 7));
  CHECK(evaluate(back, x, sys) == evaluate(c, x, sys));

  gen::Rng r(1312);
  for (int i = 0; i < 8; ++i) {
    Node t = gen::random_tree(r, sys, {});
    std::string s = tree_to_json(t);
    CHECK(tree_to_json(tree_from_json(s)) == s);
  }
}

TEST_CASE("generators emit valid objects") {
  auto sys = desk();
  gen::Rng r(99);
  for (int i = 0; i < 20; ++i) {
    auto v = gen::unit_l2_vector(r, static_cast<std::size_t>(r.uniform(1, 9)));
    Rat mass(0);
    for (const Rat& a : v) mass += a * a;
    CHECK(mass == Rat(1));
  }
  for (int i = 0; i < 20; ++i) {
    int n = static_cast<int>(r.uniform(0, 4));
    auto f = gen::random_member(r, n, static_cast<Elem>(r.uniform(2, 12)), 4000, 40);
    CHECK(schreier::is_member(f, n));
  }
}
