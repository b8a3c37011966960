#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dtt/syntax.hpp"

using namespace dtt;

namespace {

TypePtr real() { return tyBase("Real"); }

// small random well-scoped program term generator
TermPtr genTerm(std::mt19937_64& rng, int depth, int scope) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? (scope > 0 ? 1 : 0) : 5);
  switch (pick(rng)) {
    case 0: return tmConst("c" + std::to_string(rng() % 3));
    case 1: {
      if (scope == 0) return tmConst("c0");
      return tmVar(static_cast<int>(rng() % scope));
    }
    case 2: return tmLam(real(), genTerm(rng, depth - 1, scope + 1));
    case 3: return tmApp(genTerm(rng, depth - 1, scope), genTerm(rng, depth - 1, scope));
    case 4: return tmPair(genTerm(rng, depth - 1, scope), genTerm(rng, depth - 1, scope));
    default: return tmProj(1 + static_cast<int>(rng() % 2), genTerm(rng, depth - 1, scope));
  }
}

}  // namespace

TEST_CASE("substProgram on the refl body") {
  // subst x <- 3 in d(x)  =>  d(3)
  DiffPtr d = dRefl(tmVar(0));
  DiffPtr out = substProg(d, 0, tmConst("3"));
  REQUIRE(alphaEq(out, dRefl(tmConst("3"))));
}

TEST_CASE("substProgram skips distinct variables") {
  TermPtr y = tmVar(1);
  TermPtr out = substProg(y, 0, tmConst("t"));
  REQUIRE(alphaEq(out, tmVar(0)));  // index adjusts downward
  // a variable under a binder is untouched
  TermPtr id = tmLam(real(), tmVar(0));
  REQUIRE(alphaEq(substProg(id, 0, tmConst("t")), id));
}

TEST_CASE("substProgram pushes through J componentwise") {
  // subst x <- u in J(x, x, d(x), [z] b)  =>  J(u, u, d(u), [z] b[u/x])
  MotivePtr m = motive(real(), prDiff(real(), tmVar(1), tmVar(0)));
  DiffPtr j = dJ(m, tmVar(0), tmVar(0), dRefl(tmVar(0)), dRefl(tmVar(1)));  // branch uses x via index 1
  TermPtr u = tmConst("u");
  DiffPtr out = substProg(j, 0, u);
  DiffPtr want = dJ(m, u, u, dRefl(u), dRefl(tmConst("u")));
  REQUIRE(alphaEq(out, want));
}

TEST_CASE("substDifference basics") {
  // subst e <- a in e  =>  a
  DiffPtr a = dConst("a");
  REQUIRE(alphaEq(substDiff(dVar(0), 0, a), a));
  // d(t) unaffected by difference substitution
  DiffPtr r = dRefl(tmConst("t"));
  REQUIRE(alphaEq(substDiff(r, 0, a), r));
  // J(t, u, e, [x] b[e]) substitutes in both positions
  MotivePtr m = motive(real(), prDiff(real(), tmVar(1), tmVar(0)));
  DiffPtr j = dJ(m, tmConst("t"), tmConst("u"), dVar(0), dVar(0));
  DiffPtr out = substDiff(j, 0, a);
  REQUIRE(alphaEq(out, dJ(m, tmConst("t"), tmConst("u"), a, a)));
}

TEST_CASE("alphaEq is index-based") {
  TermPtr id1 = tmLam(real(), tmVar(0));
  TermPtr id2 = tmLam(real(), tmVar(0));
  REQUIRE(alphaEq(id1, id2));
  TermPtr k1 = tmLam(real(), tmLam(real(), tmVar(1)));
  TermPtr k2 = tmLam(real(), tmLam(real(), tmVar(0)));
  REQUIRE(!alphaEq(k1, k2));
  PredPtr dxy = prDiff(real(), tmVar(1), tmVar(0));
  PredPtr dyx = prDiff(real(), tmVar(0), tmVar(1));
  REQUIRE(!alphaEq(dxy, dyx));
}

TEST_CASE("substitution composition law") {
  // tm[u/x][v/y] = tm[v/y][ u[v/y] /x ]  whenever x not free in v
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    TermPtr tm = genTerm(rng, 4, 2);  // context [y, x]: x = 0, y = 1
    TermPtr u = genTerm(rng, 3, 1);   // for x, expressed over [y]
    TermPtr v = genTerm(rng, 3, 0);   // for y, closed, so x is not free in v
    TermPtr lhs = substProg(substProg(tm, 0, u), 0, v);
    TermPtr rhs = substProg(substProg(tm, 1, v), 0, substProg(u, 0, v));
    INFO("iteration " << i);
    REQUIRE(alphaEq(lhs, rhs));
  }
}

TEST_CASE("shift then substitute a fresh variable is the identity") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    TermPtr tm = genTerm(rng, 4, 1);
    TermPtr shifted = shiftProg(tm, 1, 0);
    REQUIRE(alphaEq(substProg(shifted, 0, tmConst("fresh")), tm));
  }
}

TEST_CASE("program and difference substitution commute across sorts") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    // a difference term with one free program var (0) and one free diff var (0)
    DiffPtr base = dJ(motive(real(), prDiff(real(), tmVar(1), tmVar(0))), tmVar(0), tmVar(0), dVar(0),
                      dRefl(genTerm(rng, 2, 2)));
    TermPtr p = genTerm(rng, 2, 0);
    DiffPtr q = dRefl(genTerm(rng, 2, 0));
    DiffPtr one = substDiff(substProg(base, 0, p), 0, q);
    DiffPtr two = substProg(substDiff(base, 0, q), 0, p);
    REQUIRE(alphaEq(one, two));
  }
}

TEST_CASE("context lookups shift stored predicates") {
  Context ctx;
  ctx = ctx.pushProg("x", real());
  ctx = ctx.pushDiff("e", prDiff(real(), tmVar(0), tmVar(0)));
  ctx = ctx.pushProg("y", real());
  // e's predicate mentioned x at index 0 when declared; after y it must be 1
  PredPtr p = ctx.diffPred(0);
  REQUIRE(alphaEq(p, prDiff(real(), tmVar(1), tmVar(1))));
  REQUIRE(typeEq(ctx.progType(0), real()));
  REQUIRE(ctx.progSize() == 2);
  REQUIRE(ctx.diffSize() == 1);
}
