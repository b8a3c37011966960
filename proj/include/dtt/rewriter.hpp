#pragma once

#include <optional>
#include <string>

#include "dtt/printer.hpp"
#include "dtt/prog_typing.hpp"
#include "dtt/signature.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// Rewrite axioms enabled for a normalization / equality query. beta is always
// on. fext1 and fext2 induce incompatible derivative semantics and are
// mutually exclusive. jetaPlus is the deliberately unsound strong eta; it
// exists only so the trivialization it causes can be demonstrated.
struct RuleSet {
  bool eta = false;
  bool betaD = false;
  bool etaD = false;
  bool dchain = false;
  bool jw = false;
  bool cext = false;
  bool fext1 = false;
  bool fext2 = false;
  bool jetaPlus = false;

  void validate() const {
    if (fext1 && fext2) throw MalformedTerm("fext1 and fext2 are mutually exclusive");
  }

  static RuleSet all() {
    RuleSet r;
    r.eta = r.betaD = r.etaD = r.dchain = r.jw = r.cext = true;
    return r;
  }
};

constexpr long long kDefaultFuel = 10000;

struct FuelExhausted : std::runtime_error {
  std::string lastTerm;
  explicit FuelExhausted(std::string t)
      : std::runtime_error("fuel exhausted; last redex at: " + t), lastTerm(std::move(t)) {}
};

enum class Strategy { Outermost, Innermost };

// ---------------------------------------------------------------------------
// Program-term stepping: beta for lambdas, pairs and the let forms, optional
// eta contraction, and signature delta rules.
// ---------------------------------------------------------------------------

inline std::optional<TermPtr> rootStepProgram(const TermPtr& t, const RuleSet& rs, const Signature& sig) {
  using T = ProgramTerm::Tag;
  if (t->tag == T::App && t->t->tag == T::Lam) return substProg(t->t->t, 0, t->u);
  if (t->tag == T::Proj && t->t->tag == T::Pair) return t->index == 1 ? t->t->t : t->t->u;
  if (t->tag == T::LetBang && t->t->tag == T::BangIntro) return substProg(t->u, 0, t->t->t);
  if (t->tag == T::LetTensor && t->t->tag == T::TensorPair) {
    TermPtr s1 = substProg(t->u, 0, shiftProg(t->t->u, 1, 0));
    return substProg(s1, 0, t->t->t);
  }
  if (rs.eta) {
    if (t->tag == T::Lam && t->t->tag == T::App && t->t->u->tag == T::Var && t->t->u->index == 0 &&
        !usesProgVar(t->t->t, 0))
      return shiftProg(t->t->t, -1, 0);
    if (t->tag == T::Pair && t->t->tag == T::Proj && t->t->index == 1 && t->u->tag == T::Proj &&
        t->u->index == 2 && alphaEq(t->t->t, t->u->t))
      return t->t->t;
  }
  for (const auto& r : sig.rules)
    if (auto out = applyDelta(r, t)) return out;
  return std::nullopt;
}

inline std::optional<TermPtr> stepProgram(const TermPtr& t, const RuleSet& rs, const Signature& sig,
                                          Strategy strat = Strategy::Outermost) {
  using T = ProgramTerm::Tag;
  auto onChildren = [&]() -> std::optional<TermPtr> {
    switch (t->tag) {
      case T::Var:
      case T::Const: return std::nullopt;
      case T::Lam:
        if (auto b = stepProgram(t->t, rs, sig, strat)) return tmLam(t->ann, *b);
        return std::nullopt;
      case T::Proj:
      case T::BangIntro: {
        if (auto b = stepProgram(t->t, rs, sig, strat))
          return t->tag == T::Proj ? tmProj(t->index, *b) : tmBang(*b);
        return std::nullopt;
      }
      default: {
        if (auto l = stepProgram(t->t, rs, sig, strat)) {
          switch (t->tag) {
            case T::App: return tmApp(*l, t->u);
            case T::Pair: return tmPair(*l, t->u);
            case T::LetBang: return tmLetBang(*l, t->u);
            case T::TensorPair: return tmTensorPair(*l, t->u);
            case T::LetTensor: return tmLetTensor(*l, t->u);
            default: break;
          }
        }
        if (auto r = stepProgram(t->u, rs, sig, strat)) {
          switch (t->tag) {
            case T::App: return tmApp(t->t, *r);
            case T::Pair: return tmPair(t->t, *r);
            case T::LetBang: return tmLetBang(t->t, *r);
            case T::TensorPair: return tmTensorPair(t->t, *r);
            case T::LetTensor: return tmLetTensor(t->t, *r);
            default: break;
          }
        }
        return std::nullopt;
      }
    }
  };
  if (strat == Strategy::Outermost) {
    if (auto r = rootStepProgram(t, rs, sig)) return r;
    return onChildren();
  }
  if (auto r = onChildren()) return r;
  return rootStepProgram(t, rs, sig);
}

inline TermPtr normalizeProgram(const TermPtr& t0, const RuleSet& rs, const Signature& sig,
                                long long fuel = kDefaultFuel, Strategy strat = Strategy::Outermost) {
  TermPtr t = t0;
  while (auto s = stepProgram(t, rs, sig, strat)) {
    t = *s;
    if (--fuel <= 0) throw FuelExhausted(Printer{}.term(t));
  }
  return t;
}

// definitional equality of program terms: beta-eta plus delta rules
inline bool progEqual(const TermPtr& a, const TermPtr& b, const Signature& sig,
                      long long fuel = kDefaultFuel) {
  if (alphaEq(a, b)) return true;
  RuleSet rs;
  rs.eta = true;
  return alphaEq(normalizeProgram(a, rs, sig, fuel), normalizeProgram(b, rs, sig, fuel));
}

// ---------------------------------------------------------------------------
// Difference-term stepping
// ---------------------------------------------------------------------------

// matches a fully applied derivative-shaped J:
//   J[x y. D[C](f x, f y)](t, u, a, [w] refl (f w))
struct DerAppMatch {
  TermPtr fn;
  TypePtr carrier;  // motive carrier (domain of fn)
  TypePtr cod;      // codomain
};

inline std::optional<DerAppMatch> matchDerJ(const DiffPtr& j) {
  using D = DifferenceTerm::Tag;
  if (!j || j->tag != D::J) return std::nullopt;
  const DiffPtr& br = j->b;
  if (!br || br->tag != D::Refl || !br->t || br->t->tag != ProgramTerm::Tag::App) return std::nullopt;
  const TermPtr& app = br->t;
  if (!(app->u->tag == ProgramTerm::Tag::Var && app->u->index == 0)) return std::nullopt;
  if (usesProgVar(app->t, 0)) return std::nullopt;
  TermPtr fn = shiftProg(app->t, -1, 0);
  const PredPtr& mb = j->mot->body;
  if (!mb || mb->tag != Predicate::Tag::Diff) return std::nullopt;
  if (!(mb->t->tag == ProgramTerm::Tag::App && mb->t->u->tag == ProgramTerm::Tag::Var && mb->t->u->index == 1))
    return std::nullopt;
  if (!(mb->u->tag == ProgramTerm::Tag::App && mb->u->u->tag == ProgramTerm::Tag::Var && mb->u->u->index == 0))
    return std::nullopt;
  if (!alphaEq(mb->t->t, mb->u->t) || freeBelow(mb->t->t, 2)) return std::nullopt;
  if (!alphaEq(shiftProg(mb->t->t, -2, 0), fn)) return std::nullopt;
  return DerAppMatch{fn, j->mot->carrier, mb->carrier};
}

// the diagonal motive D[A](x, y) over the two motive binders
inline bool isDiagonalMotive(const MotivePtr& m) {
  const PredPtr& b = m->body;
  return b->tag == Predicate::Tag::Diff && typeEq(b->carrier, m->carrier) &&
         b->t->tag == ProgramTerm::Tag::Var && b->t->index == 1 && b->u->tag == ProgramTerm::Tag::Var &&
         b->u->index == 0;
}

inline bool isEtaBranch(const DiffPtr& br) {
  return br->tag == DifferenceTerm::Tag::Refl && br->t->tag == ProgramTerm::Tag::Var && br->t->index == 0;
}

class Rewriter {
 public:
  Rewriter(const Signature& sig, RuleSet rs, Strategy strat = Strategy::Outermost)
      : sig_(sig), rs_(rs), strat_(strat) {
    rs_.validate();
  }

  std::optional<DiffPtr> step(const DiffPtr& a, const Context& ctx) const { return stepDiff(a, ctx); }

  DiffPtr normalize(const DiffPtr& a0, const Context& ctx, long long fuel = kDefaultFuel) const {
    DiffPtr a = a0;
    while (auto s = stepDiff(a, ctx)) {
      a = *s;
      if (--fuel <= 0) throw FuelExhausted(Printer{}.diff(a));
    }
    return a;
  }

  bool equalModulo(const DiffPtr& a, const DiffPtr& b, const Context& ctx,
                   long long fuel = kDefaultFuel) const {
    if (alphaEq(a, b)) return true;
    return alphaEq(normalize(a, ctx, fuel), normalize(b, ctx, fuel));
  }

  std::optional<TermPtr> step(const TermPtr& t) const { return stepProgram(t, rs_, sig_, strat_); }

  TermPtr normalize(const TermPtr& t, long long fuel = kDefaultFuel) const {
    return normalizeProgram(t, rs_, sig_, fuel, strat_);
  }

  bool equalModulo(const TermPtr& a, const TermPtr& b, long long fuel = kDefaultFuel) const {
    if (alphaEq(a, b)) return true;
    return alphaEq(normalize(a, fuel), normalize(b, fuel));
  }

  const RuleSet& rules() const { return rs_; }
  const Signature& signature() const { return sig_; }

 private:
  const Signature& sig_;
  RuleSet rs_;
  Strategy strat_;

  std::optional<DiffPtr> rootStep(const DiffPtr& a, const Context& ctx) const {
    using D = DifferenceTerm::Tag;
    // beta for the three binder forms
    if (a->tag == D::DAppPoint && a->a->tag == D::DLamPoint) return substProg(a->a->a, 0, a->t);
    if (a->tag == D::DAppDiff && a->a->tag == D::DLamDiff) {
      DiffPtr s1 = substDiff(a->a->a, 0, shiftProg(a->b, 2, 0));
      DiffPtr s2 = substProg(s1, 0, shiftProg(a->u, 1, 0));
      return substProg(s2, 0, a->t);
    }
    if (a->tag == D::DProj && a->a->tag == D::DPair) return a->index == 1 ? a->a->a : a->a->b;

    if (rs_.eta) {
      if (a->tag == D::DLamPoint && a->a->tag == D::DAppPoint && a->a->t->tag == ProgramTerm::Tag::Var &&
          a->a->t->index == 0 && !usesProgVar(a->a->a, 0))
        return shiftProg(a->a->a, -1, 0);
      if (a->tag == D::DLamDiff && a->a->tag == D::DAppDiff) {
        const DiffPtr& inner = a->a;
        if (inner->t->tag == ProgramTerm::Tag::Var && inner->t->index == 1 &&
            inner->u->tag == ProgramTerm::Tag::Var && inner->u->index == 0 &&
            inner->b->tag == D::DVar && inner->b->index == 0 && !usesProgVar(inner->a, 0) &&
            !usesProgVar(inner->a, 1) && !usesDiffVar(inner->a, 0))
          return shiftDiff(shiftProg(inner->a, -2, 0), -1, 0);
      }
      if (a->tag == D::DPair && a->a->tag == D::DProj && a->a->index == 1 && a->b->tag == D::DProj &&
          a->b->index == 2 && alphaEq(a->a->a, a->b->a))
        return a->a->a;
    }

    if (a->tag == D::J) {
      // J-beta: J(t, t, refl t, [x]b) -> b[t/x]
      if (rs_.betaD && a->a->tag == D::Refl && alphaEq(a->t, a->u) && alphaEq(a->t, a->a->t))
        return substProg(a->b, 0, a->t);
      // J-eta: J(t, u, a, [x] refl x) -> a, only at the diagonal motive
      if (rs_.etaD && isEtaBranch(a->b) && isDiagonalMotive(a->mot)) return a->a;
      // the forbidden strong eta: collapses any eta-shaped branch to refl t
      if (rs_.jetaPlus && isEtaBranch(a->b)) return dRefl(a->t);
      // Jw: branch ignores its binder
      if (rs_.jw && !usesProgVar(a->b, 0)) return shiftProg(a->b, -1, 0);
      // Dchain: fold a derivative of a derivative into the derivative of the composite
      if (rs_.dchain) {
        if (auto outer = matchDerJ(a)) {
          if (auto inner = matchDerJ(a->a)) {
            if (alphaEq(a->t, tmApp(inner->fn, a->a->t)) && alphaEq(a->u, tmApp(inner->fn, a->a->u))) {
              TermPtr f2 = shiftProg(inner->fn, 2, 0), g2 = shiftProg(outer->fn, 2, 0);
              TermPtr f1 = shiftProg(inner->fn, 1, 0), g1 = shiftProg(outer->fn, 1, 0);
              PredPtr mbody = prDiff(outer->cod, tmApp(g2, tmApp(f2, tmVar(1))), tmApp(g2, tmApp(f2, tmVar(0))));
              DiffPtr branch = dRefl(tmApp(g1, tmApp(f1, tmVar(0))));
              return dJ(motive(inner->carrier, mbody), a->a->t, a->a->u, a->a->a, branch);
            }
          }
        }
      }
      if (rs_.cext && a->b->tag == D::DPair && a->mot->body->tag == Predicate::Tag::PProduct) {
        // J x b: split a pair branch into a pair of transports
        MotivePtr m1 = motive(a->mot->carrier, a->mot->body->p);
        MotivePtr m2 = motive(a->mot->carrier, a->mot->body->q);
        return dPair(dJ(m1, a->t, a->u, a->a, a->b->a), dJ(m2, a->t, a->u, a->a, a->b->b));
      }
      if (rs_.fext1 && a->b->tag == D::DLamPoint && a->mot->body->tag == Predicate::Tag::PiPoint)
        return jLambda1(a);
      if (rs_.fext2 && a->b->tag == D::DLamDiff && a->mot->body->tag == Predicate::Tag::PiDiff)
        return jLambda2(a);
    }

    // J x c: push a projection into the branch, splitting the product motive
    if (rs_.cext && a->tag == D::DProj && a->a->tag == D::J &&
        a->a->mot->body->tag == Predicate::Tag::PProduct) {
      const DiffPtr& j = a->a;
      PredPtr comp = a->index == 1 ? j->mot->body->p : j->mot->body->q;
      return dJ(motive(j->mot->carrier, comp), j->t, j->u, j->a, dProj(a->index, j->b));
    }

    if (a->tag == D::Refl) {
      // J x a: self-difference of a pair is the pair of self-differences
      if (rs_.cext && a->t->tag == ProgramTerm::Tag::Pair)
        return dPair(dRefl(a->t->t), dRefl(a->t->u));
      // J lambda 1a: self-difference of a function, pointwise form
      if (rs_.fext1 && a->t->tag == ProgramTerm::Tag::Lam)
        return dLamPoint(a->t->ann, dRefl(a->t->t));
      // J lambda 2a: self-difference of a function is its derivative
      if (rs_.fext2 && a->t->tag == ProgramTerm::Tag::Lam) {
        TypePtr fnTy = inferProgram(sig_, ctx, a->t);
        return derTerm(a->t, fnTy->a, fnTy->b);
      }
    }
    return std::nullopt;
  }

  // J lambda 1b:
  //   J[x x'. Pi w:B. C](t, u, a, [x] fun (w:B) => b)
  //     -> fun (w:B) => J[z z'. C'](<t,w>, <u,w>, <a, refl w>, [z] b')
  // with C' = C[x:=fst z, x':=fst z', w:=snd z] and b' = b[x:=fst z, w:=snd z].
  DiffPtr jLambda1(const DiffPtr& a) const {
    TypePtr A = a->mot->carrier;
    TypePtr B = a->mot->body->carrier;
    PredPtr C = a->mot->body->p;  // vars: x=2, x'=1, w=0
    PSubst mSub{{tmProj(2, tmVar(1)), tmProj(1, tmVar(0)), tmProj(1, tmVar(1))}, 2};
    PredPtr Cnew = mSub(C);
    DiffPtr b = a->b->a;  // vars: x=1, w=0
    PSubst bSub{{tmProj(2, tmVar(0)), tmProj(1, tmVar(0))}, 1};
    DiffPtr bNew = bSub(b);
    TypePtr AB = tyProduct(A, B);
    // under the new point binder w
    TermPtr t1 = shiftProg(a->t, 1, 0), u1 = shiftProg(a->u, 1, 0);
    DiffPtr a1 = shiftProg(a->a, 1, 0);
    return dLamPoint(B, dJ(motive(AB, shiftProg(Cnew, 1, 2)), tmPair(t1, tmVar(0)), tmPair(u1, tmVar(0)),
                           dPair(a1, dRefl(tmVar(0))), shiftProg(bNew, 1, 1)));
  }

  // J lambda 2b (uncurried form):
  //   J[x x'. Pi w w':B. D[B](w,w') -> C](t, u, a, [x] fun (w w':B) d => b)
  //     -> fun (w w':B) d => J[z z'. C'](<t,w>, <u,w'>, <a,d>, [z] b')
  // with C' = C[x:=fst z, x':=fst z', w:=snd z, w':=snd z'] and
  //      b' = b[d:=refl (snd z)][x:=fst z, w:=snd z, w':=snd z].
  DiffPtr jLambda2(const DiffPtr& a) const {
    TypePtr A = a->mot->carrier;
    TypePtr B = a->mot->body->carrier;
    PredPtr C = a->mot->body->p;  // vars: x=3, x'=2, w=1, w'=0
    PSubst mSub{{tmProj(2, tmVar(0)), tmProj(2, tmVar(1)), tmProj(1, tmVar(0)), tmProj(1, tmVar(1))}, 2};
    PredPtr Cnew = mSub(C);
    DiffPtr b = a->b->a;  // prog vars: x=2, w=1, w'=0; diff var d=0
    DiffPtr bDiag = substDiff(b, 0, dRefl(tmVar(0)));
    PSubst bSub{{tmProj(2, tmVar(0)), tmProj(2, tmVar(0)), tmProj(1, tmVar(0))}, 1};
    DiffPtr bNew = bSub(bDiag);
    TypePtr AB = tyProduct(A, B);
    // under the new binders w, w' (program) and d (difference)
    TermPtr t2 = shiftProg(a->t, 2, 0), u2 = shiftProg(a->u, 2, 0);
    DiffPtr a2 = shiftDiff(shiftProg(a->a, 2, 0), 1, 0);
    return dLamDiff(B, dJ(motive(AB, shiftProg(Cnew, 2, 2)), tmPair(t2, tmVar(1)), tmPair(u2, tmVar(0)),
                          dPair(a2, dVar(0)), shiftDiff(shiftProg(bNew, 2, 1), 1, 0)));
  }

  std::optional<PredPtr> stepPred(const PredPtr& p) const {
    using P = Predicate::Tag;
    switch (p->tag) {
      case P::Diff:
        if (auto t = stepProgram(p->t, rs_, sig_, strat_)) return prDiff(p->carrier, *t, p->u);
        if (auto u = stepProgram(p->u, rs_, sig_, strat_)) return prDiff(p->carrier, p->t, *u);
        return std::nullopt;
      case P::PProduct:
        if (auto l = stepPred(p->p)) return prProduct(*l, p->q);
        if (auto r = stepPred(p->q)) return prProduct(p->p, *r);
        return std::nullopt;
      case P::PiPoint:
        if (auto b = stepPred(p->p)) return prPiPoint(p->carrier, *b);
        return std::nullopt;
      case P::PiDiff:
        if (auto b = stepPred(p->p)) return prPiDiff(p->carrier, *b);
        return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<DiffPtr> stepChildren(const DiffPtr& a, const Context& ctx) const {
    using D = DifferenceTerm::Tag;
    switch (a->tag) {
      case D::DVar:
      case D::DConst: return std::nullopt;
      case D::DLamPoint:
        if (auto b = stepDiff(a->a, ctx.pushProg("_", a->ann))) return dLamPoint(a->ann, *b);
        return std::nullopt;
      case D::DLamDiff: {
        Context c2 = ctx.pushProg("_", a->ann).pushProg("_", a->ann);
        c2 = c2.pushDiff("_", prDiff(a->ann, tmVar(1), tmVar(0)));
        if (auto b = stepDiff(a->a, c2)) return dLamDiff(a->ann, *b);
        return std::nullopt;
      }
      case D::DAppPoint:
        if (auto f = stepDiff(a->a, ctx)) return dAppPoint(*f, a->t);
        if (auto t = stepProgram(a->t, rs_, sig_, strat_)) return dAppPoint(a->a, *t);
        return std::nullopt;
      case D::DAppDiff:
        if (auto f = stepDiff(a->a, ctx)) return dAppDiff(*f, a->t, a->u, a->b);
        if (auto t = stepProgram(a->t, rs_, sig_, strat_)) return dAppDiff(a->a, *t, a->u, a->b);
        if (auto u = stepProgram(a->u, rs_, sig_, strat_)) return dAppDiff(a->a, a->t, *u, a->b);
        if (auto d = stepDiff(a->b, ctx)) return dAppDiff(a->a, a->t, a->u, *d);
        return std::nullopt;
      case D::DPair:
        if (auto l = stepDiff(a->a, ctx)) return dPair(*l, a->b);
        if (auto r = stepDiff(a->b, ctx)) return dPair(a->a, *r);
        return std::nullopt;
      case D::DProj:
        if (auto b = stepDiff(a->a, ctx)) return dProj(a->index, *b);
        return std::nullopt;
      case D::Refl:
        if (auto t = stepProgram(a->t, rs_, sig_, strat_)) return dRefl(*t);
        return std::nullopt;
      case D::J: {
        if (auto mb = stepPred(a->mot->body))
          return dJ(motive(a->mot->carrier, *mb), a->t, a->u, a->a, a->b);
        if (auto t = stepProgram(a->t, rs_, sig_, strat_)) return dJ(a->mot, *t, a->u, a->a, a->b);
        if (auto u = stepProgram(a->u, rs_, sig_, strat_)) return dJ(a->mot, a->t, *u, a->a, a->b);
        if (auto d = stepDiff(a->a, ctx)) return dJ(a->mot, a->t, a->u, *d, a->b);
        if (auto b = stepDiff(a->b, ctx.pushProg("_", a->mot->carrier)))
          return dJ(a->mot, a->t, a->u, a->a, *b);
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::optional<DiffPtr> stepDiff(const DiffPtr& a, const Context& ctx) const {
    if (strat_ == Strategy::Outermost) {
      if (auto r = rootStep(a, ctx)) return r;
      return stepChildren(a, ctx);
    }
    if (auto r = stepChildren(a, ctx)) return r;
    return rootStep(a, ctx);
  }
};

}  // namespace dtt
