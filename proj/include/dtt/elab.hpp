#pragma once

#include <map>
#include <string>
#include <vector>

#include "dtt/checker.hpp"
#include "dtt/parser.hpp"
#include "dtt/subexp.hpp"

namespace dtt {

inline RuleSet parseRuleNames(const std::vector<std::string>& words) {
  RuleSet rs;
  for (const auto& w : words) {
    if (w == "beta") continue;  // always on
    else if (w == "eta") rs.eta = true;
    else if (w == "betad") rs.betaD = true;
    else if (w == "etad") rs.etaD = true;
    else if (w == "dchain") rs.dchain = true;
    else if (w == "jw") rs.jw = true;
    else if (w == "cext") rs.cext = true;
    else if (w == "fext1") rs.fext1 = true;
    else if (w == "fext2") rs.fext2 = true;
    else if (w == "jetaplus") rs.jetaPlus = true;
    else throw checkError("unknown rule flag: " + w);
  }
  rs.validate();
  return rs;
}

struct Definition {
  std::string name;
  bool isProg = true;
  TermPtr tm;
  TypePtr ty;
  DiffPtr df;
  PredPtr pred;
};

struct DeclStatus {
  std::string name;
  std::string kind;  // def | const | axiom | rule | type | directive
  bool ok = true;
  std::string classifier;  // printed type or predicate
  std::string message;     // first diagnostic if failed
};

struct ModuleResult {
  Signature sig;
  RuleSet rules;
  std::string calculus = "stlc";
  long long fuel = kDefaultFuel;
  std::vector<Definition> defs;
  std::vector<DeclStatus> statuses;
  std::vector<Diagnostic> diags;
  bool ok = true;

  const Definition* find(const std::string& n) const {
    for (const auto& d : defs)
      if (d.name == n) return &d;
    return nullptr;
  }
};

enum class Sort { Prog, Diff };

class Elaborator {
 public:
  Elaborator() { out_.sig.baseTypes = {}; }

  ModuleResult& result() { return out_; }

  void addSource(const std::string& src) {
    Parser p(src, out_.calculus == "fuzz");
    auto decls = p.parseFile();
    for (auto& d : p.diagnostics()) {
      out_.diags.push_back(d);
      out_.ok = false;
    }
    for (const auto& d : decls) processDecl(d);
  }

 private:
  ModuleResult out_;

  void fail(const RawDecl& d, const std::string& kind, const Diagnostic& diag) {
    out_.ok = false;
    out_.diags.push_back(diag);
    out_.statuses.push_back({d.name, kind, false, "", diag.render()});
  }

  void processDecl(const RawDecl& d) {
    Printer pp;
    try {
      switch (d.k) {
        case RawDecl::K::Directive: {
          if (d.name == "rules") out_.rules = parseRuleNames(d.words);
          else if (d.name == "calculus") {
            if (d.words.empty() || (d.words[0] != "stlc" && d.words[0] != "fuzz"))
              throw checkError("#calculus expects stlc or fuzz", d.span);
            out_.calculus = d.words[0];
          } else if (d.name == "numerals") {
            if (d.words.empty()) throw checkError("#numerals expects a base type name", d.span);
            out_.sig.numeralType = d.words[0];
          } else if (d.name == "fuel") {
            if (d.words.empty()) throw checkError("#fuel expects a number", d.span);
            out_.fuel = std::stoll(d.words[0]);
          } else {
            throw checkError("unknown directive: #" + d.name, d.span);
          }
          out_.statuses.push_back({d.name, "directive", true, "", ""});
          return;
        }
        case RawDecl::K::TypeDecl: {
          if (!d.ty) out_.sig.baseTypes.push_back(d.name);
          out_.statuses.push_back({d.name, "type", true, "", ""});
          return;
        }
        case RawDecl::K::ConstDecl: {
          validateType(d.ty, d.span);
          out_.sig.constants[d.name] = d.ty;
          out_.statuses.push_back({d.name, "const", true, pp.type(d.ty), ""});
          return;
        }
        case RawDecl::K::AxiomDecl: {
          Context ctx0;
          PredPtr p = elabPred(d.pred, ctx0);
          checkPredicate(out_.sig, ctx0, p);
          out_.sig.axioms[d.name] = p;
          out_.statuses.push_back({d.name, "axiom", true, pp.pred(p), ""});
          return;
        }
        case RawDecl::K::RuleDecl: {
          DeltaRule r;
          r.head = d.name;
          Context scope;
          for (const auto& prm : d.params) {
            bool isConst = out_.sig.constType(prm).has_value();
            r.pats.push_back({!isConst, prm});
            if (!isConst) {
              bool seen = false;
              for (const auto& v : r.varOrder) seen = seen || v == prm;
              if (!seen) {
                r.varOrder.push_back(prm);
                scope = scope.pushProg(prm, tyBase("_pattern"));
              }
            }
          }
          r.rhs = elabProg(d.body, scope);
          out_.sig.rules.push_back(r);
          out_.statuses.push_back({d.name, "rule", true, "", ""});
          return;
        }
        case RawDecl::K::Def: {
          processDef(d);
          return;
        }
      }
    } catch (const CheckError& e) {
      Diagnostic diag = e.diag;
      if (diag.span.line == 0) diag.span = d.span;
      fail(d, d.k == RawDecl::K::Def ? "def" : "decl", diag);
    } catch (const FuelExhausted& e) {
      fail(d, "def", Diagnostic{Diagnostic::Severity::Error, d.span, e.what(), "", ""});
    } catch (const MalformedTerm& e) {
      fail(d, "def", Diagnostic{Diagnostic::Severity::Error, d.span, e.what(), "", ""});
    }
  }

  void processDef(const RawDecl& d) {
    Printer pp;
    Context ctx0;
    CheckOptions opt{out_.rules, out_.fuel};
    if (d.pred) {
      PredPtr want = elabPred(d.pred, ctx0);
      checkPredicate(out_.sig, ctx0, want);
      DiffPtr df = elabDiffCheck(d.body, ctx0, want);
      PredPtr got = inferDifference(out_.sig, ctx0, df, opt);
      if (!predEqualModulo(got, want, out_.sig, out_.rules, out_.fuel))
        throw checkErrorTyped("definition does not match its ascription", pp.pred(want), pp.pred(got), d.span);
      out_.defs.push_back({d.name, false, nullptr, nullptr, df, want});
      out_.statuses.push_back({d.name, "def", true, pp.pred(want), ""});
      return;
    }
    Sort s = d.defTy ? Sort::Prog : classify(d.body, ctx0);
    if (s == Sort::Prog) {
      TermPtr tm = d.defTy ? elabProgCheck(d.body, ctx0, d.defTy) : elabProg(d.body, ctx0);
      TypePtr ty;
      if (out_.calculus == "fuzz") {
        ty = d.defTy ? d.defTy : fuzzTypeOf(ctx0, tm);
        checkBang(out_.sig, SensContext{}, tm, ty);
      } else {
        ty = inferProgram(out_.sig, ctx0, tm);
        if (d.defTy && !typeEq(ty, d.defTy))
          throw checkErrorTyped("definition does not match its ascription", pp.type(d.defTy), pp.type(ty),
                                d.span);
      }
      out_.defs.push_back({d.name, true, tm, ty, nullptr, nullptr});
      out_.statuses.push_back({d.name, "def", true, pp.type(ty), ""});
    } else {
      DiffPtr df = elabDiff(d.body, ctx0);
      PredPtr got = inferDifference(out_.sig, ctx0, df, opt);
      out_.defs.push_back({d.name, false, nullptr, nullptr, df, got});
      out_.statuses.push_back({d.name, "def", true, pp.pred(got), ""});
    }
  }

  void validateType(const TypePtr& t, Span sp) {
    using T = SimpleType::Tag;
    switch (t->tag) {
      case T::Base:
        if (!out_.sig.hasBase(t->base)) throw checkError("undeclared base type: " + t->base, sp);
        return;
      case T::Bang: validateType(t->a, sp); return;
      default:
        validateType(t->a, sp);
        validateType(t->b, sp);
        return;
    }
  }

  // -- scope lookup ---------------------------------------------------------

  struct NameHit {
    enum class K { ProgVar, DiffVar, ProgDef, DiffDef, Const, Axiom } k;
    int index = 0;
    const Definition* def = nullptr;
  };

  NameHit lookup(const std::string& n, const Context& ctx, Span sp) {
    int prog = 0, diff = 0;
    for (auto it = ctx.entries.rbegin(); it != ctx.entries.rend(); ++it) {
      if (it->isProg) {
        if (it->name == n) return {NameHit::K::ProgVar, prog, nullptr};
        ++prog;
      } else {
        if (it->name == n) return {NameHit::K::DiffVar, diff, nullptr};
        ++diff;
      }
    }
    if (const Definition* def = out_.find(n))
      return {def->isProg ? NameHit::K::ProgDef : NameHit::K::DiffDef, 0, def};
    if (out_.sig.axiomPred(n)) return {NameHit::K::Axiom, 0, nullptr};
    if (out_.sig.constType(n)) return {NameHit::K::Const, 0, nullptr};
    throw checkError("unknown name: " + n, sp);
  }

  Sort classify(const SExprPtr& e, const Context& ctx) {
    using K = SExpr::K;
    switch (e->k) {
      case K::Num:
      case K::BangIntro:
      case K::LetBang:
      case K::LetTensor: return Sort::Prog;
      case K::Refl:
      case K::Der:
      case K::J: return Sort::Diff;
      case K::Name: {
        NameHit h = lookup(e->name, ctx, e->span);
        switch (h.k) {
          case NameHit::K::ProgVar:
          case NameHit::K::ProgDef:
          case NameHit::K::Const: return Sort::Prog;
          default: return Sort::Diff;
        }
      }
      case K::Fun: {
        Context c2 = ctx;
        for (size_t i = 0; i < e->binders.size(); ++i) {
          const auto& b = e->binders[i];
          if (b.names.size() == 2) {
            c2 = c2.pushProg(b.names[0], b.ann).pushProg(b.names[1], b.ann);
            if (i + 1 < e->binders.size() && e->binders[i + 1].names.size() == 1) {
              c2 = c2.pushDiff(e->binders[i + 1].names[0], nullptr);
              ++i;
            }
          } else {
            c2 = c2.pushProg(b.names[0], b.ann);
          }
        }
        return classify(e->args[0], c2);
      }
      case K::App: return classify(e->args[0], ctx);
      case K::Tuple: {
        Sort a = classify(e->args[0], ctx);
        Sort b = classify(e->args[1], ctx);
        return (a == Sort::Diff || b == Sort::Diff) ? Sort::Diff : Sort::Prog;
      }
      case K::Proj: return classify(e->args[0], ctx);
    }
    return Sort::Prog;
  }

  // -- program elaboration ---------------------------------------------------

  TypePtr fuzzTypeOf(const Context& ctx, const TermPtr& tm) {
    std::vector<TypePtr> scope;
    for (const auto& en : ctx.entries)
      if (en.isProg) scope.push_back(en.ty);
    return detail::synthTypeOnly(out_.sig, scope, tm);
  }

  TypePtr progTypeOf(const Context& ctx, const TermPtr& tm) {
    if (out_.calculus == "fuzz") return fuzzTypeOf(ctx, tm);
    return inferProgram(out_.sig, ctx, tm);
  }

  TermPtr elabProg(const SExprPtr& e, const Context& ctx) {
    using K = SExpr::K;
    switch (e->k) {
      case K::Num: return tmConst(e->name);
      case K::Name: {
        NameHit h = lookup(e->name, ctx, e->span);
        switch (h.k) {
          case NameHit::K::ProgVar: return tmVar(h.index);
          case NameHit::K::ProgDef: return h.def->tm;
          case NameHit::K::Const: return tmConst(e->name);
          default: throw checkError("difference-sorted name in program position: " + e->name, e->span);
        }
      }
      case K::Fun: {
        if (e->binders.empty()) return elabProg(e->args[0], ctx);
        Context c2 = ctx;
        std::vector<TypePtr> anns;
        for (const auto& b : e->binders) {
          if (b.names.size() != 1)
            throw checkError("paired binder group in program position", b.span);
          if (!b.ann) throw checkError("binder needs a type annotation here", b.span);
          anns.push_back(b.ann);
          c2 = c2.pushProg(b.names[0], b.ann);
        }
        TermPtr body = elabProg(e->args[0], c2);
        for (auto it = anns.rbegin(); it != anns.rend(); ++it) body = tmLam(*it, body);
        return body;
      }
      case K::App: {
        TermPtr acc = elabProg(e->args[0], ctx);
        for (size_t i = 1; i < e->args.size(); ++i) acc = tmApp(acc, elabProg(e->args[i], ctx));
        return acc;
      }
      case K::Tuple: {
        TermPtr l = elabProg(e->args[0], ctx), r = elabProg(e->args[1], ctx);
        return out_.calculus == "fuzz" ? tmTensorPair(l, r) : tmPair(l, r);
      }
      case K::Proj: return tmProj(e->side, elabProg(e->args[0], ctx));
      case K::BangIntro: return tmBang(elabProg(e->args[0], ctx));
      case K::LetBang: {
        TermPtr scrut = elabProg(e->args[0], ctx);
        TypePtr sty = fuzzTypeOf(ctx, scrut);
        if (sty->tag != SimpleType::Tag::Bang) throw checkError("let ! scrutinee is not a bang", e->span);
        Context c2 = ctx.pushProg(e->names2[0], sty->a);
        return tmLetBang(scrut, elabProg(e->args[1], c2));
      }
      case K::LetTensor: {
        TermPtr scrut = elabProg(e->args[0], ctx);
        TypePtr sty = fuzzTypeOf(ctx, scrut);
        if (sty->tag != SimpleType::Tag::Tensor)
          throw checkError("let (x,y) scrutinee is not a tensor", e->span);
        Context c2 = ctx.pushProg(e->names2[0], sty->a).pushProg(e->names2[1], sty->b);
        return tmLetTensor(scrut, elabProg(e->args[1], c2));
      }
      default: throw checkError("difference construct in program position", e->span);
    }
  }

  TermPtr elabProgCheck(const SExprPtr& e, const Context& ctx, const TypePtr& want) {
    using K = SExpr::K;
    if (e->k == K::Fun && !e->binders.empty()) {
      Context c2 = ctx;
      TypePtr rest = want;
      std::vector<TypePtr> anns;
      for (const auto& b : e->binders) {
        if (b.names.size() != 1) throw checkError("paired binder group in program position", b.span);
        if (rest->tag != SimpleType::Tag::Arrow && rest->tag != SimpleType::Tag::Lolli)
          throw checkError("more binders than the ascription provides", b.span);
        TypePtr dom = b.ann ? b.ann : rest->a;
        if (b.ann && !typeEq(b.ann, rest->a))
          throw checkErrorTyped("binder annotation mismatch", Printer{}.type(rest->a), Printer{}.type(b.ann),
                                b.span);
        anns.push_back(dom);
        c2 = c2.pushProg(b.names[0], dom);
        rest = rest->b;
      }
      TermPtr body = elabProgCheck(e->args[0], c2, rest);
      for (auto it = anns.rbegin(); it != anns.rend(); ++it) body = tmLam(*it, body);
      return body;
    }
    if (e->k == K::BangIntro && want->tag == SimpleType::Tag::Bang)
      return tmBang(elabProgCheck(e->args[0], ctx, want->a));
    if (e->k == K::Tuple &&
        (want->tag == SimpleType::Tag::Product || want->tag == SimpleType::Tag::Tensor)) {
      TermPtr l = elabProgCheck(e->args[0], ctx, want->a);
      TermPtr r = elabProgCheck(e->args[1], ctx, want->b);
      return want->tag == SimpleType::Tag::Tensor ? tmTensorPair(l, r) : tmPair(l, r);
    }
    return elabProg(e, ctx);
  }

  // -- predicate elaboration --------------------------------------------------

  PredPtr elabPred(const SPredPtr& p, const Context& ctx) {
    using K = SPred::K;
    switch (p->k) {
      case K::Diff: {
        validateType(p->carrier, p->span);
        return prDiff(p->carrier, elabProg(p->t, ctx), elabProg(p->u, ctx));
      }
      case K::Prod: return prProduct(elabPred(p->p, ctx), elabPred(p->q, ctx));
      case K::PiPoint: {
        validateType(p->carrier, p->span);
        return prPiPoint(p->carrier, elabPred(p->p, ctx.pushProg(p->names[0], p->carrier)));
      }
      case K::PiDiff: {
        validateType(p->carrier, p->span);
        Context c2 = ctx.pushProg(p->names[0], p->carrier).pushProg(p->names[1], p->carrier);
        return prPiDiff(p->carrier, elabPred(p->p, c2));
      }
    }
    throw MalformedTerm("unreachable");
  }

  // -- difference elaboration --------------------------------------------------

  DiffPtr elabDiff(const SExprPtr& e, const Context& ctx) {
    using K = SExpr::K;
    switch (e->k) {
      case K::Name: {
        NameHit h = lookup(e->name, ctx, e->span);
        switch (h.k) {
          case NameHit::K::DiffVar: return dVar(h.index);
          case NameHit::K::DiffDef: return h.def->df;
          case NameHit::K::Axiom: return dConst(e->name);
          default: throw checkError("program-sorted name in difference position: " + e->name, e->span);
        }
      }
      case K::Refl: return dRefl(elabProg(e->args[0], ctx));
      case K::Der: {
        TermPtr f = elabProg(e->args[0], ctx);
        TypePtr fty = progTypeOf(ctx, f);
        if (fty->tag != SimpleType::Tag::Arrow && fty->tag != SimpleType::Tag::Lolli)
          throw checkError("Der expects a function", e->span);
        return derTerm(f, fty->a, fty->b);
      }
      case K::J: {
        TermPtr t = elabProg(e->args[0], ctx);
        TermPtr u = elabProg(e->args[1], ctx);
        TypePtr carrier = progTypeOf(ctx, t);
        Context cm = ctx.pushProg(e->motNames[0], carrier).pushProg(e->motNames[1], carrier);
        PredPtr mb = elabPred(e->motive, cm);
        DiffPtr a = elabDiff(e->args[2], ctx);
        DiffPtr b = elabDiff(e->args[3], ctx.pushProg(e->names2[0], carrier));
        return dJ(motive(carrier, mb), t, u, a, b);
      }
      case K::Fun: {
        if (e->binders.empty()) return elabDiff(e->args[0], ctx);
        Context c2 = ctx;
        struct Layer {
          bool paired;
          TypePtr ann;
        };
        std::vector<Layer> layers;
        for (size_t i = 0; i < e->binders.size(); ++i) {
          const auto& b = e->binders[i];
          if (b.names.size() == 2) {
            if (!b.ann) throw checkError("paired binder needs a type annotation", b.span);
            if (i + 1 >= e->binders.size() || e->binders[i + 1].names.size() != 1 || e->binders[i + 1].ann)
              throw checkError("paired binder must be followed by a bare difference binder", b.span);
            c2 = c2.pushProg(b.names[0], b.ann).pushProg(b.names[1], b.ann);
            c2 = c2.pushDiff(e->binders[i + 1].names[0], prDiff(b.ann, tmVar(1), tmVar(0)));
            layers.push_back({true, b.ann});
            ++i;
          } else {
            if (!b.ann) throw checkError("binder needs a type annotation here", b.span);
            c2 = c2.pushProg(b.names[0], b.ann);
            layers.push_back({false, b.ann});
          }
        }
        DiffPtr body = elabDiff(e->args[0], c2);
        for (auto it = layers.rbegin(); it != layers.rend(); ++it)
          body = it->paired ? dLamDiff(it->ann, body) : dLamPoint(it->ann, body);
        return body;
      }
      case K::App: {
        DiffPtr acc = elabDiff(e->args[0], ctx);
        size_t i = 1;
        while (i < e->args.size()) {
          Sort si = classify(e->args[i], ctx);
          if (si == Sort::Prog && i + 2 < e->args.size() && classify(e->args[i + 1], ctx) == Sort::Prog &&
              classify(e->args[i + 2], ctx) == Sort::Diff) {
            acc = dAppDiff(acc, elabProg(e->args[i], ctx), elabProg(e->args[i + 1], ctx),
                           elabDiff(e->args[i + 2], ctx));
            i += 3;
          } else if (si == Sort::Prog) {
            acc = dAppPoint(acc, elabProg(e->args[i], ctx));
            i += 1;
          } else {
            throw checkError("difference argument must follow two program points", e->args[i]->span);
          }
        }
        return acc;
      }
      case K::Tuple: return dPair(elabDiff(e->args[0], ctx), elabDiff(e->args[1], ctx));
      case K::Proj: return dProj(e->side, elabDiff(e->args[0], ctx));
      default: throw checkError("program construct in difference position", e->span);
    }
  }

  DiffPtr elabDiffCheck(const SExprPtr& e, const Context& ctx, const PredPtr& want) {
    using K = SExpr::K;
    if (e->k == K::Fun && !e->binders.empty()) {
      struct Layer {
        bool paired;
        TypePtr ann;
      };
      std::vector<Layer> layers;
      Context c2 = ctx;
      PredPtr rest = want;
      size_t i = 0;
      Printer pp;
      while (i < e->binders.size()) {
        const auto& b = e->binders[i];
        if (rest->tag == Predicate::Tag::PiDiff) {
          TypePtr dom = rest->carrier;
          std::string nx, ny, ne;
          if (b.names.size() == 2) {
            if (b.ann && !typeEq(b.ann, dom))
              throw checkErrorTyped("binder annotation mismatch", pp.type(dom), pp.type(b.ann), b.span);
            if (i + 1 >= e->binders.size() || e->binders[i + 1].names.size() != 1)
              throw checkError("paired binder must be followed by a difference binder", b.span);
            nx = b.names[0];
            ny = b.names[1];
            ne = e->binders[i + 1].names[0];
            i += 2;
          } else {
            if (i + 2 >= e->binders.size() || e->binders[i + 1].names.size() != 1 ||
                e->binders[i + 2].names.size() != 1)
              throw checkError("expected three binders for a paired Pi", b.span);
            if (b.ann && !typeEq(b.ann, dom))
              throw checkErrorTyped("binder annotation mismatch", pp.type(dom), pp.type(b.ann), b.span);
            nx = b.names[0];
            ny = e->binders[i + 1].names[0];
            ne = e->binders[i + 2].names[0];
            i += 3;
          }
          c2 = c2.pushProg(nx, dom).pushProg(ny, dom);
          c2 = c2.pushDiff(ne, prDiff(dom, tmVar(1), tmVar(0)));
          layers.push_back({true, dom});
          rest = rest->p;
          continue;
        }
        if (rest->tag == Predicate::Tag::PiPoint) {
          if (b.names.size() != 1)
            throw checkError("paired binder against a point Pi", b.span);
          TypePtr dom = rest->carrier;
          if (b.ann && !typeEq(b.ann, dom))
            throw checkErrorTyped("binder annotation mismatch", pp.type(dom), pp.type(b.ann), b.span);
          c2 = c2.pushProg(b.names[0], dom);
          layers.push_back({false, dom});
          rest = rest->p;
          ++i;
          continue;
        }
        throw checkError("more binders than the ascribed predicate provides", b.span);
      }
      DiffPtr body = elabDiffCheck(e->args[0], c2, rest);
      for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        body = it->paired ? dLamDiff(it->ann, body) : dLamPoint(it->ann, body);
      return body;
    }
    if (e->k == K::Tuple && want->tag == Predicate::Tag::PProduct)
      return dPair(elabDiffCheck(e->args[0], ctx, want->p), elabDiffCheck(e->args[1], ctx, want->q));
    return elabDiff(e, ctx);
  }
};

// convenience: parse + elaborate a whole source text
inline ModuleResult elaborate(const std::string& src) {
  Elaborator e;
  e.addSource(src);
  return e.result();
}

}  // namespace dtt
