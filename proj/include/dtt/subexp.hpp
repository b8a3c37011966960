#pragma once

#include <string>
#include <vector>

#include "dtt/diagnostics.hpp"
#include "dtt/printer.hpp"
#include "dtt/signature.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Sensitivity contexts for the sub-exponential fragment.
// ---------------------------------------------------------------------------

struct SensEntry {
  std::string name;
  TypePtr ty;
  Sens sens;
};

struct SensContext {
  std::vector<SensEntry> entries;

  const SensEntry* find(const std::string& n) const {
    for (const auto& e : entries)
      if (e.name == n) return &e;
    return nullptr;
  }
};

inline SensContext ctxAdd(const SensContext& a, const SensContext& b) {
  SensContext out = a;
  for (const auto& e : b.entries) {
    bool merged = false;
    for (auto& o : out.entries) {
      if (o.name != e.name) continue;
      if (!typeEq(o.ty, e.ty))
        throw checkError("context clash: " + e.name + " declared at two different types");
      o.sens = o.sens + e.sens;
      merged = true;
      break;
    }
    if (!merged) out.entries.push_back(e);
  }
  return out;
}

inline SensContext ctxScale(const Sens& s, const SensContext& a) {
  SensContext out = a;
  for (auto& e : out.entries) e.sens = s * e.sens;
  return out;
}

inline SensContext ctxScale(const Rat& r, const SensContext& a) {
  if (r < Rat(0)) throw checkError("negative scale");
  return ctxScale(Sens::of(r), a);
}

// ---------------------------------------------------------------------------
// Bang peeling: a variable declared at !_s T is used at the core type T, each
// use drawing s from the declared budget. Nested bangs multiply.
// ---------------------------------------------------------------------------

inline std::pair<TypePtr, Sens> peelBang(const TypePtr& ty) {
  TypePtr core = ty;
  Sens mult = Sens::of(Rat(1));
  while (core->tag == SimpleType::Tag::Bang) {
    mult = mult * Sens::of(core->scale);
    core = core->a;
  }
  return {core, mult};
}

inline void requireSubExpType(const TypePtr& ty) {
  using T = SimpleType::Tag;
  switch (ty->tag) {
    case T::Base: return;
    case T::Bang: requireSubExpType(ty->a); return;
    case T::Lolli:
    case T::Tensor:
      requireSubExpType(ty->a);
      requireSubExpType(ty->b);
      return;
    case T::Arrow:
    case T::Product:
      throw checkError("cartesian type former in strict sub-exponential mode: " + Printer{}.type(ty));
  }
}

// ---------------------------------------------------------------------------
// Bidirectional checking with bottom-up sensitivity synthesis. The synthesized
// vector holds, per scope entry, the least required use of its *core* type.
// ---------------------------------------------------------------------------

struct BangDerivation {
  SensContext least;  // least-sensitivity context for the judgement
  TypePtr type;
  std::vector<std::string> trace;
};

namespace detail {

struct BangScope {
  struct E {
    std::string name;
    TypePtr core;
    Sens mult;  // product of peeled bang scales
  };
  std::vector<E> items;  // innermost last
};

struct BangUse {
  std::vector<Sens> req;  // aligned with scope, innermost last
};

inline BangUse zeroUse(size_t n) { return BangUse{std::vector<Sens>(n, Sens::of(Rat(0)))}; }

inline BangUse addUse(const BangUse& a, const BangUse& b) {
  BangUse out = a;
  for (size_t i = 0; i < out.req.size(); ++i) out.req[i] = out.req[i] + b.req[i];
  return out;
}

inline BangUse scaleUse(const Sens& s, const BangUse& a) {
  BangUse out = a;
  for (auto& r : out.req) r = s * r;
  return out;
}

class BangChecker {
 public:
  BangChecker(const Signature& sig, std::vector<std::string>* trace) : sig_(sig), trace_(trace) {}

  // returns required use vector; throws on failure
  BangUse check(BangScope& scope, const TermPtr& t, const TypePtr& ty) {
    using T = ProgramTerm::Tag;
    requireSubExpType(ty);
    if (t->tag == T::Lam) {
      TypePtr want = ty;
      if (want->tag != SimpleType::Tag::Lolli)
        throw checkErrorTyped("lambda against a non-lolli type", "_ -o _", Printer{}.type(ty));
      if (t->ann && !typeEq(t->ann, want->a))
        throw checkErrorTyped("binder annotation mismatch", Printer{}.type(want->a), Printer{}.type(t->ann));
      auto [core, mult] = peelBang(want->a);
      scope.items.push_back({"_", core, mult});
      BangUse u = check(scope, t->t, want->b);
      scope.items.pop_back();
      Sens used = u.req.back();
      u.req.pop_back();
      if (!(used <= mult))
        throw checkError("sensitivity overrun: binder used " + show(used) + " but budget is " + show(mult));
      note("lolli-intro");
      return u;
    }
    if (t->tag == T::BangIntro) {
      if (ty->tag != SimpleType::Tag::Bang)
        throw checkErrorTyped("! against a non-! type", "!_ _", Printer{}.type(ty));
      BangUse u = check(scope, t->t, ty->a);
      note("bang-intro");
      return scaleUse(Sens::of(ty->scale), u);
    }
    auto [sty, u] = synth(scope, t);
    if (!typeEq(sty, ty))
      throw checkErrorTyped("type mismatch", Printer{}.type(ty), Printer{}.type(sty));
    return u;
  }

  std::pair<TypePtr, BangUse> synth(BangScope& scope, const TermPtr& t) {
    using T = ProgramTerm::Tag;
    switch (t->tag) {
      case T::Var: {
        int i = t->index;
        int k = static_cast<int>(scope.items.size()) - 1 - i;
        if (k < 0) throw checkError("unbound variable in sub-exponential term");
        BangUse u = zeroUse(scope.items.size());
        u.req[k] = Sens::of(Rat(1));
        note("var");
        return {scope.items[k].core, u};
      }
      case T::Const: {
        auto ty = sig_.constType(t->name);
        if (!ty) throw checkError("unknown constant: " + t->name);
        requireSubExpType(*ty);
        note("const");
        return {*ty, zeroUse(scope.items.size())};
      }
      case T::Lam: {
        if (!t->ann) throw checkError("lambda needs an annotation or a checking type");
        auto [core, mult] = peelBang(t->ann);
        scope.items.push_back({"_", core, mult});
        auto [bty, u] = synth(scope, t->t);
        scope.items.pop_back();
        Sens used = u.req.back();
        u.req.pop_back();
        if (!(used <= mult))
          throw checkError("sensitivity overrun: binder used " + show(used) + " but budget is " + show(mult));
        note("lolli-intro");
        return {tyLolli(t->ann, bty), u};
      }
      case T::App: {
        auto [fty, uf] = synth(scope, t->t);
        if (fty->tag != SimpleType::Tag::Lolli)
          throw checkErrorTyped("application head is not a lolli", "_ -o _", Printer{}.type(fty));
        BangUse ua = check(scope, t->u, fty->a);
        note("lolli-elim");
        return {fty->b, addUse(uf, ua)};
      }
      case T::TensorPair: {
        auto [lty, ul] = synth(scope, t->t);
        auto [rty, ur] = synth(scope, t->u);
        note("tensor-intro");
        return {tyTensor(lty, rty), addUse(ul, ur)};
      }
      case T::LetTensor: {
        auto [sty, us] = synth(scope, t->t);
        if (sty->tag != SimpleType::Tag::Tensor)
          throw checkErrorTyped("let (x,y) scrutinee is not a tensor", "_ (x) _", Printer{}.type(sty));
        auto [coreL, multL] = peelBang(sty->a);
        auto [coreR, multR] = peelBang(sty->b);
        scope.items.push_back({"_", coreL, multL});
        scope.items.push_back({"_", coreR, multR});
        auto [bty, ub] = synth(scope, t->u);
        scope.items.pop_back();
        scope.items.pop_back();
        Sens qy = ub.req.back();
        ub.req.pop_back();
        Sens qx = ub.req.back();
        ub.req.pop_back();
        // the components are consumed at sensitivity r = max of the two
        // (scaled by the declared bangs); the scrutinee is scaled by r
        Sens rx = sensDiv(qx, multL), ry = sensDiv(qy, multR);
        Sens r = rx <= ry ? ry : rx;
        note("tensor-elim");
        return {bty, addUse(scaleUse(r, us), ub)};
      }
      case T::BangIntro: throw checkError("cannot synthesize the scale of !; add a checking type");
      case T::LetBang: {
        auto [sty, us] = synth(scope, t->t);
        if (sty->tag != SimpleType::Tag::Bang)
          throw checkErrorTyped("let !x scrutinee is not a bang", "!_ _", Printer{}.type(sty));
        Sens s = Sens::of(sty->scale);
        auto [core, mult] = peelBang(sty->a);
        scope.items.push_back({"_", core, mult});
        auto [bty, ub] = synth(scope, t->u);
        scope.items.pop_back();
        Sens q = ub.req.back();
        ub.req.pop_back();
        Sens r = sensDiv(q, s * mult);
        if (s.isZero() && !q.isZero())
          throw checkError("sensitivity overrun: variable of a !0 type is used");
        note("bang-elim");
        return {bty, addUse(scaleUse(r, us), ub)};
      }
      case T::Pair:
      case T::Proj:
        throw checkError("cartesian pair/projection in strict sub-exponential mode");
    }
    throw MalformedTerm("unreachable");
  }

 private:
  const Signature& sig_;
  std::vector<std::string>* trace_;
  void note(const char* rule) {
    if (trace_) trace_->push_back(rule);
  }
};

}  // namespace detail

// Checks `tm` against `ty` under the declared context; the synthesized
// context is the least one for the checking direction.
inline BangDerivation checkBang(const Signature& sig, const SensContext& ctx, const TermPtr& tm,
                                const TypePtr& ty) {
  BangDerivation d;
  detail::BangChecker bc(sig, &d.trace);
  detail::BangScope scope;
  for (const auto& e : ctx.entries) {
    requireSubExpType(e.ty);
    auto [core, mult] = peelBang(e.ty);
    scope.items.push_back({e.name, core, mult});
  }
  detail::BangUse u = bc.check(scope, tm, ty);
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    Sens need = sensDiv(u.req[i], peelBang(ctx.entries[i].ty).second);
    if (!(need <= ctx.entries[i].sens))
      throw checkError("sensitivity overrun for " + ctx.entries[i].name + ": requires " + show(need) +
                       " but context provides " + show(ctx.entries[i].sens));
    d.least.entries.push_back({ctx.entries[i].name, ctx.entries[i].ty, need});
  }
  d.type = ty;
  return d;
}

// ---------------------------------------------------------------------------
// The forgetful translation into plain STlC.
// ---------------------------------------------------------------------------

inline TypePtr forgetType(const TypePtr& ty) {
  using T = SimpleType::Tag;
  switch (ty->tag) {
    case T::Base: return ty;
    case T::Bang: return forgetType(ty->a);
    case T::Lolli: return tyArrow(forgetType(ty->a), forgetType(ty->b));
    case T::Tensor: return tyProduct(forgetType(ty->a), forgetType(ty->b));
    case T::Arrow: return tyArrow(forgetType(ty->a), forgetType(ty->b));
    case T::Product: return tyProduct(forgetType(ty->a), forgetType(ty->b));
  }
  throw MalformedTerm("unreachable");
}

namespace detail {

inline TypePtr synthTypeOnly(const Signature& sig, std::vector<TypePtr>& scope, const TermPtr& t);

// threads binder types so the generated lambdas can be annotated
inline TermPtr forgetTerm(const Signature& sig, std::vector<TypePtr>& scope, const TermPtr& t) {
  using T = ProgramTerm::Tag;
  switch (t->tag) {
    case T::Var: return t;
    case T::Const: return t;
    case T::Lam: {
      if (!t->ann) throw checkError("forget requires annotated lambdas");
      scope.push_back(t->ann);
      TermPtr body = forgetTerm(sig, scope, t->t);
      scope.pop_back();
      return tmLam(forgetType(t->ann), body);
    }
    case T::App: return tmApp(forgetTerm(sig, scope, t->t), forgetTerm(sig, scope, t->u));
    case T::BangIntro: return forgetTerm(sig, scope, t->t);
    case T::LetBang: {
      // (let !x = t in u)* = (fun x => u*) t*
      TypePtr sty = synthTypeOnly(sig, scope, t->t);
      if (sty->tag != SimpleType::Tag::Bang) throw checkError("let !x scrutinee is not a bang");
      TermPtr scrut = forgetTerm(sig, scope, t->t);
      scope.push_back(sty->a);
      TermPtr body = forgetTerm(sig, scope, t->u);
      scope.pop_back();
      return tmApp(tmLam(forgetType(sty->a), body), scrut);
    }
    case T::TensorPair:
      return tmPair(forgetTerm(sig, scope, t->t), forgetTerm(sig, scope, t->u));
    case T::LetTensor: {
      // (let (x,y) = t in u)* = (fun x y => u*) (fst t*) (snd t*)
      TypePtr sty = synthTypeOnly(sig, scope, t->t);
      if (sty->tag != SimpleType::Tag::Tensor) throw checkError("let (x,y) scrutinee is not a tensor");
      TermPtr scrut = forgetTerm(sig, scope, t->t);
      scope.push_back(sty->a);
      scope.push_back(sty->b);
      TermPtr body = forgetTerm(sig, scope, t->u);
      scope.pop_back();
      scope.pop_back();
      TermPtr fn = tmLam(forgetType(sty->a), tmLam(forgetType(sty->b), body));
      return tmApp(tmApp(fn, tmProj(1, scrut)), tmProj(2, scrut));
    }
    case T::Pair:
    case T::Proj: throw checkError("cartesian node in sub-exponential term");
  }
  throw MalformedTerm("unreachable");
}

// plain type synthesis on the sub-exponential side (no sensitivity tracking)
inline TypePtr synthTypeOnly(const Signature& sig, std::vector<TypePtr>& scope, const TermPtr& t) {
  using T = ProgramTerm::Tag;
  switch (t->tag) {
    case T::Var: {
      int k = static_cast<int>(scope.size()) - 1 - t->index;
      if (k < 0) throw checkError("unbound variable");
      auto [core, mult] = peelBang(scope[k]);
      (void)mult;
      return core;
    }
    case T::Const: {
      auto ty = sig.constType(t->name);
      if (!ty) throw checkError("unknown constant: " + t->name);
      return *ty;
    }
    case T::Lam: {
      scope.push_back(t->ann);
      TypePtr b = synthTypeOnly(sig, scope, t->t);
      scope.pop_back();
      return tyLolli(t->ann, b);
    }
    case T::App: {
      TypePtr f = synthTypeOnly(sig, scope, t->t);
      if (f->tag != SimpleType::Tag::Lolli) throw checkError("application head is not a lolli");
      return f->b;
    }
    case T::TensorPair:
      return tyTensor(synthTypeOnly(sig, scope, t->t), synthTypeOnly(sig, scope, t->u));
    case T::LetTensor: {
      TypePtr s = synthTypeOnly(sig, scope, t->t);
      if (s->tag != SimpleType::Tag::Tensor) throw checkError("let (x,y) scrutinee is not a tensor");
      scope.push_back(s->a);
      scope.push_back(s->b);
      TypePtr b = synthTypeOnly(sig, scope, t->u);
      scope.pop_back();
      scope.pop_back();
      return b;
    }
    case T::LetBang: {
      TypePtr s = synthTypeOnly(sig, scope, t->t);
      if (s->tag != SimpleType::Tag::Bang) throw checkError("let !x scrutinee is not a bang");
      scope.push_back(s->a);
      TypePtr b = synthTypeOnly(sig, scope, t->u);
      scope.pop_back();
      return b;
    }
    default: throw checkError("cannot synthesize sub-exponential type");
  }
}

}  // namespace detail

inline TermPtr forget(const Signature& sig, const SensContext& ctx, const TermPtr& t) {
  std::vector<TypePtr> scope;
  for (const auto& e : ctx.entries) scope.push_back(e.ty);
  return detail::forgetTerm(sig, scope, t);
}

inline TermPtr forget(const Signature& sig, const TermPtr& t) { return forget(sig, SensContext{}, t); }

}  // namespace dtt
