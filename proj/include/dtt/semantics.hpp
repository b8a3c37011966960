#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dtt/checker.hpp"
#include "dtt/signature.hpp"
#include "dtt/subexp.hpp"
#include "dtt/syntax.hpp"
#include "dtt/value.hpp"

namespace dtt {

// The backend contract: a dTT-category instance. Each backend supplies
// semantic objects for simple types, value-level constants, the chosen
// distance predicate on every object, refl sections, and a diagonal filler.
template <class B>
concept DttBackend = requires(B b, const std::string& n, const typename B::Obj& o, const ValPtr& v) {
  typename B::Obj;
  typename B::Pure;
  { b.objOfBase(n) } -> std::convertible_to<typename B::Obj>;
  { b.reflVal(o, v) } -> std::convertible_to<ValPtr>;
};

struct UnsupportedDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Env {
  std::vector<ValPtr> prog;  // innermost last
  std::vector<ValPtr> diff;

  Env withProg(const ValPtr& v) const {
    Env e = *this;
    e.prog.push_back(v);
    return e;
  }
  Env withDiff(const ValPtr& v) const {
    Env e = *this;
    e.diff.push_back(v);
    return e;
  }
  const ValPtr& progAt(int i) const {
    int k = static_cast<int>(prog.size()) - 1 - i;
    if (k < 0) throw EvalFailure("program variable not bound in environment");
    return prog[k];
  }
  const ValPtr& diffAt(int i) const {
    int k = static_cast<int>(diff.size()) - 1 - i;
    if (k < 0) throw EvalFailure("difference variable not bound in environment");
    return diff[k];
  }
};

template <class B>
class Interp {
 public:
  using Obj = typename B::Obj;
  using Pure = typename B::Pure;

  Interp(const Signature& sig, B& backend) : sig_(sig), b_(backend) {}

  const Signature& signature() const { return sig_; }
  B& backend() { return b_; }

  // -- types ----------------------------------------------------------------
  Obj type(const TypePtr& ty) {
    using T = SimpleType::Tag;
    switch (ty->tag) {
      case T::Base: return b_.objOfBase(ty->base);
      case T::Arrow: return b_.exponential(type(ty->a), type(ty->b));
      case T::Lolli: return b_.exponential(type(ty->a), type(ty->b));
      case T::Product: return b_.product(type(ty->a), type(ty->b));
      case T::Tensor: return b_.tensor(type(ty->a), type(ty->b));
      case T::Bang: return b_.rescale(ty->scale, type(ty->a));
    }
    throw MalformedTerm("unreachable");
  }

  // -- program terms ----------------------------------------------------------
  ValPtr prog(const TermPtr& t, const Env& env) {
    using T = ProgramTerm::Tag;
    switch (t->tag) {
      case T::Var: return env.progAt(t->index);
      case T::Const: return b_.constVal(t->name);
      case T::Lam: {
        Env captured = env;
        TermPtr body = t->t;
        return vFn([this, captured, body](const ValPtr& x) { return prog(body, captured.withProg(x)); });
      }
      case T::App: return apply(prog(t->t, env), prog(t->u, env));
      case T::Pair:
      case T::TensorPair: return vTuple({prog(t->t, env), prog(t->u, env)});
      case T::Proj: {
        const auto& tup = asTuple(prog(t->t, env));
        return tup.at(t->index - 1);
      }
      case T::BangIntro: return prog(t->t, env);
      case T::LetBang: return prog(t->u, env.withProg(prog(t->t, env)));
      case T::LetTensor: {
        const auto& tup = asTuple(prog(t->t, env));
        return prog(t->u, env.withProg(tup.at(0)).withProg(tup.at(1)));
      }
    }
    throw MalformedTerm("unreachable");
  }

  // -- pure predicate representations ------------------------------------------
  Pure pureRep(const PureShapePtr& s) {
    switch (s->k) {
      case Predicate::Tag::Diff: return b_.distOf(type(s->carrier));
      case Predicate::Tag::PProduct: return b_.prodPure(pureRep(s->l), pureRep(s->r));
      case Predicate::Tag::PiPoint: return b_.piPointPure(type(s->carrier), pureRep(s->l));
      case Predicate::Tag::PiDiff: return b_.piDiffPure(type(s->carrier), pureRep(s->l));
    }
    throw MalformedTerm("unreachable");
  }

  // semantic form of a predicate: pure part plus the two index terms
  struct PredSem {
    TypePtr carrierTy;
    Pure pure;
    TermPtr lhs, rhs;  // over the same context as the predicate
  };

  PredSem predicate(const Context& ctx, const PredPtr& p) {
    PureFactorization f = purify(sig_, ctx, p);
    return PredSem{f.carrier, pureRep(f.shape), f.lhs, f.rhs};
  }

  // -- difference terms ----------------------------------------------------------

  // request passed to the backend's diagonal filler
  struct JRequest {
    Interp& interp;
    const Context& ctx;   // context of the J node
    Env env;
    TypePtr carrierTy;    // motive carrier A
    Obj carrier;
    Pure target;          // interpreted pure part of the motive
    TermPtr lhsIdx, rhsIdx;  // index terms over ctx + (x y : A)
    std::function<ValPtr(const ValPtr&, const ValPtr&)> fIdx, gIdx;
    std::function<ValPtr(const ValPtr&)> branch;
    ValPtr vt, vu, va;
  };

  ValPtr diff(const Context& ctx, const DiffPtr& d, const Env& env) {
    using D = DifferenceTerm::Tag;
    switch (d->tag) {
      case D::DVar: return env.diffAt(d->index);
      case D::DConst: return b_.axiomVal(d->name);
      case D::Refl: {
        TypePtr ty = progTypeOf(ctx, d->t);
        return b_.reflVal(type(ty), prog(d->t, env));
      }
      case D::DLamPoint: {
        Env captured = env;
        Context c2 = ctx.pushProg("_", d->ann);
        DiffPtr body = d->a;
        return vFn([this, captured, c2, body](const ValPtr& x) { return diff(c2, body, captured.withProg(x)); });
      }
      case D::DAppPoint: return apply(diff(ctx, d->a, env), prog(d->t, env));
      case D::DLamDiff: {
        Env captured = env;
        Context c2 = ctx.pushProg("_", d->ann).pushProg("_", d->ann);
        c2 = c2.pushDiff("_", prDiff(d->ann, tmVar(1), tmVar(0)));
        DiffPtr body = d->a;
        return vFn([this, captured, c2, body](const ValPtr& x) {
          return vFn([this, captured, c2, body, x](const ValPtr& y) {
            return vFn([this, captured, c2, body, x, y](const ValPtr& e) {
              return diff(c2, body, captured.withProg(x).withProg(y).withDiff(e));
            });
          });
        });
      }
      case D::DAppDiff: {
        ValPtr f = diff(ctx, d->a, env);
        ValPtr r = apply(apply(f, prog(d->t, env)), prog(d->u, env));
        return apply(r, diff(ctx, d->b, env));
      }
      case D::DPair: return vTuple({diff(ctx, d->a, env), diff(ctx, d->b, env)});
      case D::DProj: return asTuple(diff(ctx, d->a, env)).at(d->index - 1);
      case D::J: {
        const TypePtr& A = d->mot->carrier;
        Context cm = ctx.pushProg("_", A).pushProg("_", A);
        PureFactorization fact = purify(sig_, cm, d->mot->body);
        JRequest req{*this,
                     ctx,
                     env,
                     A,
                     type(A),
                     pureRep(fact.shape),
                     fact.lhs,
                     fact.rhs,
                     {},
                     {},
                     {},
                     prog(d->t, env),
                     prog(d->u, env),
                     diff(ctx, d->a, env)};
        Env captured = env;
        TermPtr lhs = fact.lhs, rhs = fact.rhs;
        req.fIdx = [this, captured, lhs](const ValPtr& x, const ValPtr& y) {
          return prog(lhs, captured.withProg(x).withProg(y));
        };
        req.gIdx = [this, captured, rhs](const ValPtr& x, const ValPtr& y) {
          return prog(rhs, captured.withProg(x).withProg(y));
        };
        Context cb = ctx.pushProg("_", A);
        DiffPtr branch = d->b;
        req.branch = [this, captured, cb, branch](const ValPtr& x) {
          return diff(cb, branch, captured.withProg(x));
        };
        return b_.filler(req);
      }
    }
    throw MalformedTerm("unreachable");
  }

  // -- factorization (any program arrow factors through the distance predicate
  //    of its codomain; the first leg tags each point with a refl witness) -----
  struct Factorization {
    std::function<ValPtr(const ValPtr&)> iPart;
    std::function<ValPtr(const ValPtr&)> pPart;
  };

  Factorization factorize(const TypePtr& cod, const ValPtr& fn) {
    Obj codObj = type(cod);
    auto i = [this, codObj, fn](const ValPtr& x) {
      ValPtr fx = apply(fn, x);
      return vTuple({vTuple({x, fx}), b_.reflVal(codObj, fx)});
    };
    auto p = [](const ValPtr& v) { return asTuple(asTuple(v).at(0)).at(1); };
    return Factorization{i, p};
  }

 private:
  const Signature& sig_;
  B& b_;

  TypePtr progTypeOf(const Context& ctx, const TermPtr& t) {
    if constexpr (requires(B& bb) { bb.monoidalMode(); }) {
      if (b_.monoidalMode()) {
        std::vector<TypePtr> scope;
        for (const auto& e : ctx.entries)
          if (e.isProg) scope.push_back(e.ty);
        return detail::synthTypeOnly(sig_, scope, t);
      }
    }
    return inferProgram(sig_, ctx, t);
  }
};

}  // namespace dtt
