#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xnlab/gen.hpp"
#include "xnlab/norm.hpp"
#include "xnlab/operator_lab.hpp"

using namespace xn;
using core::Elem;
using core::Vec00;
using oplab::OperatorT;

namespace {

const params::ParamSystem& bigSys() {
  static params::ParamSystem sys = build_param_system(params::extended_desk_config(8));
  return sys;
}

const OperatorT& op() {
  static OperatorT T = oplab::build_operator(bigSys(), 4, 8);
  return T;
}

} // namespace

TEST_CASE("operator assembly") {
  const auto& sys = bigSys();
  const auto& T = op();
  REQUIRE(T.ys.size() == 4);
  CHECK(T.M == sys.M);
  CHECK(T.M < 1); // so the certified operator bound is 1
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(T.ys[i].avg.k == 2 * static_cast<int>(i + 1));
    CHECK(core::validate_tree(T.ys[i].tree, sys).ok);
    if (i > 0) CHECK(T.ys[i].avg.F.min() > T.ys[i - 1].avg.F.max());
  }
  CHECK_THROWS_AS(oplab::build_operator(sys, 5, 8), Error);
}

TEST_CASE("apply is exact, local and linear") {
  const auto& sys = bigSys();
  const auto& T = op();

  // away from every functional support the image vanishes
  Vec00 far;
  far.set(2, Rat(3));
  far.set(T.ys.back().avg.F.max() + 50, make_rat(-7, 2));
  CHECK(oplab::apply(T, far, sys).empty());

  // basis vectors map to single spikes with the functional's coefficient
  for (std::size_t i = 0; i < 4; ++i) {
    Elem j = T.ys[i].avg.F.min();
    Vec00 ej;
    ej.set(j, Rat(1));
    Vec00 im = oplab::apply(T, ej, sys);
    REQUIRE(im.support_size() == 1);
    int k = T.ys[i].avg.k;
    CHECK(im.at(T.targets[i]) == T.ys[i].avg.a.at(j) / Rat(sys.m[2 * k]));
  }

  gen::Rng rng(31);
  for (int t = 0; t < 8; ++t) {
    Vec00 x, y;
    for (int s = 0; s < 10; ++s) {
      Elem j = rng.uniform(2, T.ys.back().avg.F.max() + 20);
      x.set(j, make_rat(rng.uniform(-9, 9), rng.uniform(1, 6)));
      j = rng.uniform(2, T.ys.back().avg.F.max() + 20);
      y.set(j, make_rat(rng.uniform(-9, 9), rng.uniform(1, 6)));
    }
    CHECK(oplab::apply(T, x + y, sys) == oplab::apply(T, x, sys) + oplab::apply(T, y, sys));
    CHECK(oplab::apply(T, make_rat(-5, 3) * x, sys) == make_rat(-5, 3) * oplab::apply(T, x, sys));
  }
}

TEST_CASE("norm bound certification on a corpus") {
  const auto& sys = bigSys();
  const auto& T = op();
  gen::Rng rng(7);

  std::vector<Vec00> corpus;
  // basis vectors inside the functional supports
  for (std::size_t i = 0; i < 4; ++i) {
    Vec00 ej;
    ej.set(T.ys[i].avg.F.min() + static_cast<Elem>(i), Rat(1));
    corpus.push_back(std::move(ej));
  }
  // normalized blocks walking through the supports
  Elem cursor = 8;
  for (int t = 0; t < 30; ++t)
    corpus.push_back(gen::normalized_block(rng, cursor, 12, sys));
  // vectors concentrated on single functional supports
  for (std::size_t i = 0; i < 4; ++i) {
    Vec00 x;
    Elem base = T.ys[i].avg.F.min();
    for (int s = 0; s < 10; ++s)
      x.set(base + rng.uniform(0, 200), make_rat(rng.uniform(-9, 9), rng.uniform(1, 6)));
    if (!x.empty()) corpus.push_back(std::move(x));
  }

  auto rep = oplab::certify_norm_bound(T, corpus, sys, 99);
  CHECK(rep.vectors == static_cast<long>(corpus.size()));
  CHECK(rep.bound == 1);
  CHECK(rep.ok());
  CHECK(rep.worstRatio <= rep.bound * (Rat(1) + make_rat(1, 1 << 16)));
  CHECK(rep.dualChecks > 0);
  CHECK(rep.bandChecks > 0);

  // a zero vector is flagged, not silently skipped
  auto bad = oplab::certify_norm_bound(T, {Vec00{}}, sys, 99);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("non-compactness witnesses") {
  const auto& sys = bigSys();
  const auto& T = op();

  auto w = oplab::noncompact_witness(T, 4, sys);
  REQUIRE(w.points.size() == 4);
  REQUIRE(w.images.size() == 4);
  CHECK(w.delta > 0);

  for (std::size_t i = 0; i < 4; ++i) {
    // normalized preimages: certified norm at most 1
    CHECK(norm::norm(w.points[i], sys).upper <= 1);
    // one positive spike each, on distinct targets
    REQUIRE(w.images[i].support_size() == 1);
    CHECK(w.images[i].at(T.targets[i]) > 0);
    CHECK(oplab::apply(T, w.points[i], sys) == w.images[i]);
  }
  // separation is the least pairwise certified distance
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      Rat d = norm::norm(w.images[i] - w.images[j], sys).value;
      CHECK(d >= w.delta);
    }

  CHECK_THROWS_AS(oplab::noncompact_witness(T, 5, sys), Error);
}

TEST_CASE("finite truncations of the embedding") {
  const auto& sys = bigSys();
  const auto& T = op();

  auto zero = oplab::linf_embed(T, {Rat(0), Rat(0)}, sys);
  CHECK(zero.lower == 0);
  CHECK(zero.upper == 0);

  auto rank1 = oplab::linf_embed(T, {Rat(1)}, sys);
  CHECK(rank1.lower > 0);
  CHECK(rank1.upper == 1);
  // the witness realizes the lower bound under the truncation
  Vec00 im = oplab::apply(T, rank1.witness, sys);
  CHECK(norm::norm(im.restricted(1, 1), sys).value >= rank1.lower);

  // all sign patterns of length 4: uniform two-sided bounds
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<Rat> a;
    for (int b = 0; b < 4; ++b) a.push_back(mask & (1 << b) ? Rat(-1) : Rat(1));
    auto e = oplab::linf_embed(T, a, sys);
    CHECK(e.upper == 1);
    CHECK(e.lower > 0);
    CHECK(e.lower <= e.upper);
    Vec00 y;
    for (std::size_t i = 0; i < 4; ++i) {
      Rat c = core::evaluate(T.ys[i].tree, e.witness, sys);
      if (c != 0) y.set(T.targets[i], a[i] * c);
    }
    CHECK(norm::norm(y, sys).value >= e.lower);
  }

  CHECK_THROWS_AS(oplab::linf_embed(T, std::vector<Rat>(5, Rat(1)), sys), Error);
}

TEST_CASE("operator json round trip") {
  const auto& sys = bigSys();
  const auto& T = op();
  auto text = oplab::operator_to_json(T);
  auto back = oplab::operator_from_json(text);
  CHECK(back.M == T.M);
  CHECK(back.targets == T.targets);
  REQUIRE(back.ys.size() == T.ys.size());
  for (std::size_t i = 0; i < back.ys.size(); ++i) {
    CHECK(core::validate_tree(back.ys[i].tree, sys).ok);
    CHECK(back.ys[i].avg.F.elems() == T.ys[i].avg.F.elems());
  }
  CHECK(oplab::operator_to_json(back) == text);
}
