#pragma once

#include <optional>
#include <string>

#include "dtt/prog_typing.hpp"
#include "dtt/rewriter.hpp"
#include "dtt/signature.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Predicate normalization and equality. Index terms are compared up to
// beta-eta (and delta rules); the extensionality axioms, when enabled,
// decompose difference types at product / arrow carriers.
// ---------------------------------------------------------------------------

inline PredPtr normalizePredicate(const PredPtr& p, const Signature& sig, const RuleSet& rs,
                                  long long fuel = kDefaultFuel) {
  using P = Predicate::Tag;
  RuleSet prs = rs;
  prs.eta = true;  // program-term equality is full beta-eta
  switch (p->tag) {
    case P::Diff: {
      TermPtr t = normalizeProgram(p->t, prs, sig, fuel);
      TermPtr u = normalizeProgram(p->u, prs, sig, fuel);
      const TypePtr& a = p->carrier;
      if (rs.cext && a->tag == SimpleType::Tag::Product) {
        PredPtr l = prDiff(a->a, tmProj(1, t), tmProj(1, u));
        PredPtr r = prDiff(a->b, tmProj(2, t), tmProj(2, u));
        return prProduct(normalizePredicate(l, sig, rs, fuel), normalizePredicate(r, sig, rs, fuel));
      }
      if (rs.fext1 && a->tag == SimpleType::Tag::Arrow) {
        PredPtr body = prDiff(a->b, tmApp(shiftProg(t, 1, 0), tmVar(0)), tmApp(shiftProg(u, 1, 0), tmVar(0)));
        return prPiPoint(a->a, normalizePredicate(body, sig, rs, fuel));
      }
      if (rs.fext2 && a->tag == SimpleType::Tag::Arrow) {
        PredPtr body = prDiff(a->b, tmApp(shiftProg(t, 2, 0), tmVar(1)), tmApp(shiftProg(u, 2, 0), tmVar(0)));
        return prPiDiff(a->a, normalizePredicate(body, sig, rs, fuel));
      }
      return prDiff(a, t, u);
    }
    case P::PProduct:
      return prProduct(normalizePredicate(p->p, sig, rs, fuel), normalizePredicate(p->q, sig, rs, fuel));
    case P::PiPoint: return prPiPoint(p->carrier, normalizePredicate(p->p, sig, rs, fuel));
    case P::PiDiff: return prPiDiff(p->carrier, normalizePredicate(p->p, sig, rs, fuel));
  }
  throw MalformedTerm("unreachable");
}

inline bool predEqualModulo(const PredPtr& a, const PredPtr& b, const Signature& sig, const RuleSet& rs,
                            long long fuel = kDefaultFuel) {
  if (alphaEq(a, b)) return true;
  return alphaEq(normalizePredicate(a, sig, rs, fuel), normalizePredicate(b, sig, rs, fuel));
}

// ---------------------------------------------------------------------------
// Predicate well-formedness: every Diff node's sides must have exactly the
// carrier type.
// ---------------------------------------------------------------------------

inline void checkPredicate(const Signature& sig, const Context& ctx, const PredPtr& p) {
  using P = Predicate::Tag;
  Printer pp;
  switch (p->tag) {
    case P::Diff: {
      TypePtr tl = inferProgram(sig, ctx, p->t);
      TypePtr tr = inferProgram(sig, ctx, p->u);
      if (!typeEq(tl, p->carrier))
        throw checkErrorTyped("difference type carrier mismatch on the left", pp.type(p->carrier), pp.type(tl));
      if (!typeEq(tr, p->carrier))
        throw checkErrorTyped("difference type carrier mismatch on the right", pp.type(p->carrier), pp.type(tr));
      return;
    }
    case P::PProduct:
      checkPredicate(sig, ctx, p->p);
      checkPredicate(sig, ctx, p->q);
      return;
    case P::PiPoint: checkPredicate(sig, ctx.pushProg("_", p->carrier), p->p); return;
    case P::PiDiff: {
      Context c2 = ctx.pushProg("_", p->carrier).pushProg("_", p->carrier);
      checkPredicate(sig, c2, p->p);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Difference-term typing
// ---------------------------------------------------------------------------

struct CheckOptions {
  RuleSet rules;          // rule set used for predicate comparisons
  long long fuel = kDefaultFuel;
};

inline PredPtr inferDifference(const Signature& sig, const Context& ctx, const DiffPtr& a,
                               const CheckOptions& opt = {}) {
  using D = DifferenceTerm::Tag;
  Printer pp;
  switch (a->tag) {
    case D::DVar: {
      try {
        return ctx.diffPred(a->index);
      } catch (const MalformedTerm& e) {
        throw checkError(std::string("unbound difference variable: ") + e.what());
      }
    }
    case D::DConst: {
      if (auto p = sig.axiomPred(a->name)) return shiftProg(*p, ctx.progSize(), 0);
      throw checkError("unknown difference constant: " + a->name);
    }
    case D::Refl: {
      TypePtr ty = inferProgram(sig, ctx, a->t);
      return prDiff(ty, a->t, a->t);
    }
    case D::DLamPoint: {
      if (!a->ann) throw checkError("point lambda needs a domain annotation for inference");
      PredPtr body = inferDifference(sig, ctx.pushProg("_", a->ann), a->a, opt);
      return prPiPoint(a->ann, body);
    }
    case D::DAppPoint: {
      PredPtr fn = inferDifference(sig, ctx, a->a, opt);
      if (fn->tag != Predicate::Tag::PiPoint)
        throw checkErrorTyped("point application head is not a point product", "Pi _ : _. _", pp.pred(fn));
      TypePtr arg = inferProgram(sig, ctx, a->t);
      if (!typeEq(arg, fn->carrier))
        throw checkErrorTyped("point argument type mismatch", pp.type(fn->carrier), pp.type(arg));
      return substProg(fn->p, 0, a->t);
    }
    case D::DLamDiff: {
      if (!a->ann) throw checkError("difference lambda needs a domain annotation for inference");
      Context c2 = ctx.pushProg("_", a->ann).pushProg("_", a->ann);
      c2 = c2.pushDiff("_", prDiff(a->ann, tmVar(1), tmVar(0)));
      PredPtr body = inferDifference(sig, c2, a->a, opt);
      return prPiDiff(a->ann, body);
    }
    case D::DAppDiff: {
      PredPtr fn = inferDifference(sig, ctx, a->a, opt);
      if (fn->tag != Predicate::Tag::PiDiff)
        throw checkErrorTyped("difference application head is not a difference product",
                              "Pi _ _ : _. D -> _", pp.pred(fn));
      TypePtr tl = inferProgram(sig, ctx, a->t);
      TypePtr tr = inferProgram(sig, ctx, a->u);
      if (!typeEq(tl, fn->carrier))
        throw checkErrorTyped("difference application left point mismatch", pp.type(fn->carrier), pp.type(tl));
      if (!typeEq(tr, fn->carrier))
        throw checkErrorTyped("difference application right point mismatch", pp.type(fn->carrier), pp.type(tr));
      PredPtr argP = inferDifference(sig, ctx, a->b, opt);
      PredPtr want = prDiff(fn->carrier, a->t, a->u);
      if (!predEqualModulo(argP, want, sig, opt.rules, opt.fuel))
        throw checkErrorTyped("difference argument predicate mismatch", pp.pred(want), pp.pred(argP));
      return instantiate2(fn->p, a->t, a->u);
    }
    case D::DPair: {
      PredPtr l = inferDifference(sig, ctx, a->a, opt);
      PredPtr r = inferDifference(sig, ctx, a->b, opt);
      return prProduct(l, r);
    }
    case D::DProj: {
      PredPtr p = inferDifference(sig, ctx, a->a, opt);
      if (p->tag != Predicate::Tag::PProduct)
        throw checkErrorTyped("projection of a non-product difference", "_ * _", pp.pred(p));
      return a->index == 1 ? p->p : p->q;
    }
    case D::J: {
      const TypePtr& A = a->mot->carrier;
      TypePtr tl = inferProgram(sig, ctx, a->t);
      TypePtr tr = inferProgram(sig, ctx, a->u);
      if (!typeEq(tl, A))
        throw checkErrorTyped("J left endpoint carrier mismatch", pp.type(A), pp.type(tl));
      if (!typeEq(tr, A))
        throw checkErrorTyped("J right endpoint carrier mismatch", pp.type(A), pp.type(tr));
      Context cm = ctx.pushProg("_", A).pushProg("_", A);
      checkPredicate(sig, cm, a->mot->body);
      PredPtr diffP = inferDifference(sig, ctx, a->a, opt);
      PredPtr wantDiff = prDiff(A, a->t, a->u);
      if (!predEqualModulo(diffP, wantDiff, sig, opt.rules, opt.fuel))
        throw checkErrorTyped("J difference argument is not a difference at the endpoints",
                              pp.pred(wantDiff), pp.pred(diffP));
      // diagonal instance of the motive: both binders mapped to the branch variable
      PSubst diag{{tmVar(0), tmVar(0)}, 1};
      PredPtr diagonal = diag(a->mot->body);
      PredPtr branchP = inferDifference(sig, ctx.pushProg("_", A), a->b, opt);
      if (!predEqualModulo(branchP, diagonal, sig, opt.rules, opt.fuel))
        throw checkErrorTyped("J branch does not inhabit the diagonal of the motive", pp.pred(diagonal),
                              pp.pred(branchP));
      return motiveAt(a->mot, a->t, a->u);
    }
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Purification: every predicate factors as a pure predicate applied to two
// index terms (the four structural cases of the underlying lemma).
// The pure predicate binds its two carrier variables at indices 1 (lhs) and
// 0 (rhs) over the empty context.
// ---------------------------------------------------------------------------

// structural skeleton of a pure predicate, used by the denotational backends
struct PureShape;
using PureShapePtr = std::shared_ptr<const PureShape>;
struct PureShape {
  Predicate::Tag k;   // Diff | PProduct | PiPoint | PiDiff
  TypePtr carrier;    // Diff carrier, or the Pi domain
  PureShapePtr l, r;  // PProduct children; Pi body in l
};

inline PureShapePtr shapeDist(TypePtr c) {
  return std::make_shared<PureShape>(PureShape{Predicate::Tag::Diff, std::move(c), nullptr, nullptr});
}
inline PureShapePtr shapeProd(PureShapePtr a, PureShapePtr b) {
  return std::make_shared<PureShape>(PureShape{Predicate::Tag::PProduct, nullptr, std::move(a), std::move(b)});
}
inline PureShapePtr shapePiPoint(TypePtr dom, PureShapePtr body) {
  return std::make_shared<PureShape>(PureShape{Predicate::Tag::PiPoint, std::move(dom), std::move(body), nullptr});
}
inline PureShapePtr shapePiDiff(TypePtr dom, PureShapePtr body) {
  return std::make_shared<PureShape>(PureShape{Predicate::Tag::PiDiff, std::move(dom), std::move(body), nullptr});
}

struct PureFactorization {
  TypePtr carrier;
  PredPtr pure;  // binds two program variables
  TermPtr lhs;
  TermPtr rhs;
  PureShapePtr shape;
};

inline PureFactorization purify(const Signature& sig, const Context& ctx, const PredPtr& p) {
  using P = Predicate::Tag;
  switch (p->tag) {
    case P::Diff: {
      // D_C(t, u): carrier C, pure D_C(y, y'), terms (t, u)
      return PureFactorization{p->carrier, prDiff(p->carrier, tmVar(1), tmVar(0)), p->t, p->u,
                               shapeDist(p->carrier)};
    }
    case P::PProduct: {
      PureFactorization f1 = purify(sig, ctx, p->p);
      PureFactorization f2 = purify(sig, ctx, p->q);
      TypePtr carrier = tyProduct(f1.carrier, f2.carrier);
      // C1'(fst w, fst w') x C2'(snd w, snd w')
      PSubst s1{{tmProj(1, tmVar(0)), tmProj(1, tmVar(1))}, 2};
      PSubst s2{{tmProj(2, tmVar(0)), tmProj(2, tmVar(1))}, 2};
      PredPtr pure = prProduct(s1(f1.pure), s2(f2.pure));
      return PureFactorization{carrier, pure, tmPair(f1.lhs, f2.lhs), tmPair(f1.rhs, f2.rhs),
                               shapeProd(f1.shape, f2.shape)};
    }
    case P::PiPoint: {
      const TypePtr& D = p->carrier;
      PureFactorization f = purify(sig, ctx.pushProg("_", D), p->p);
      TypePtr carrier = tyArrow(D, f.carrier);
      // (Pi w : D) B'(x w, y w); inner terms bind the point variable
      PSubst s{{tmApp(tmVar(1), tmVar(0)), tmApp(tmVar(2), tmVar(0))}, 3};
      PredPtr pure = prPiPoint(D, s(f.pure));
      return PureFactorization{carrier, pure, tmLam(D, f.lhs), tmLam(D, f.rhs),
                               shapePiPoint(D, f.shape)};
    }
    case P::PiDiff: {
      const TypePtr& C = p->carrier;
      Context c2 = ctx.pushProg("_", C).pushProg("_", C);
      PureFactorization f = purify(sig, c2, p->p);
      TypePtr carrier = tyArrow(C, tyArrow(C, f.carrier));
      // (Pi w w' : C)(D_C(w,w') -> B'(x w w', y w w'))
      PSubst s{{tmApp(tmApp(tmVar(2), tmVar(1)), tmVar(0)), tmApp(tmApp(tmVar(3), tmVar(1)), tmVar(0))}, 4};
      PredPtr pure = prPiDiff(C, s(f.pure));
      return PureFactorization{carrier, pure, tmLam(C, tmLam(C, f.lhs)), tmLam(C, tmLam(C, f.rhs)),
                               shapePiDiff(C, f.shape)};
    }
  }
  throw MalformedTerm("unreachable");
}

// reconstruction: substituting (lhs, rhs) into the pure predicate and
// beta-normalizing yields the input again
inline PredPtr purifyReconstruct(const Signature& sig, const PureFactorization& f,
                                 long long fuel = kDefaultFuel) {
  PredPtr inst = instantiate2(f.pure, f.lhs, f.rhs);
  RuleSet rs;
  return normalizePredicate(inst, sig, rs, fuel);
}

}  // namespace dtt
