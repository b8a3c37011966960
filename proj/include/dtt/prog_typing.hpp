#pragma once

#include "dtt/diagnostics.hpp"
#include "dtt/printer.hpp"
#include "dtt/signature.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// Standard simply typed inference for program terms (the cartesian fragment).
// Sub-exponential terms are handled by the Fuzz checker instead.
inline TypePtr inferProgram(const Signature& sig, const Context& ctx, const TermPtr& t) {
  using T = ProgramTerm::Tag;
  Printer pp;
  switch (t->tag) {
    case T::Var: {
      try {
        return ctx.progType(t->index);
      } catch (const MalformedTerm& e) {
        throw checkError(std::string("unbound variable: ") + e.what());
      }
    }
    case T::Const: {
      if (auto ty = sig.constType(t->name)) return *ty;
      throw checkError("unknown constant: " + t->name);
    }
    case T::Lam: {
      if (!t->ann) throw checkError("lambda needs a domain annotation for inference");
      TypePtr body = inferProgram(sig, ctx.pushProg("_", t->ann), t->t);
      return tyArrow(t->ann, body);
    }
    case T::App: {
      TypePtr fn = inferProgram(sig, ctx, t->t);
      if (fn->tag != SimpleType::Tag::Arrow)
        throw checkErrorTyped("application head is not a function", "arrow type", pp.type(fn));
      TypePtr arg = inferProgram(sig, ctx, t->u);
      if (!typeEq(fn->a, arg))
        throw checkErrorTyped("argument type mismatch", pp.type(fn->a), pp.type(arg));
      return fn->b;
    }
    case T::Pair: {
      return tyProduct(inferProgram(sig, ctx, t->t), inferProgram(sig, ctx, t->u));
    }
    case T::Proj: {
      TypePtr p = inferProgram(sig, ctx, t->t);
      if (p->tag != SimpleType::Tag::Product)
        throw checkErrorTyped("projection of a non-product", "product type", pp.type(p));
      return t->index == 1 ? p->a : p->b;
    }
    default:
      throw checkError("sub-exponential term in plain simply typed mode (use --calculus=fuzz)");
  }
}

}  // namespace dtt
