#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dtt/syntax.hpp"

namespace dtt {

// -- Der recognition ---------------------------------------------------------
// Der f expands to  fun (x y : A) e => J[x' y'. D[B](f x', f y')](x, y, e, [w] refl (f w))
// The printer folds that shape back into "Der f".

inline TermPtr unshiftProg(const TermPtr& t, int d) { return shiftProg(t, -d, 0); }

inline bool freeBelow(const TermPtr& t, int n) {
  for (int i = 0; i < n; ++i)
    if (usesProgVar(t, i)) return true;
  return false;
}

struct DerMatch {
  TermPtr fn;
  TypePtr dom;
  TypePtr cod;
};

inline std::optional<DerMatch> matchDer(const DiffPtr& d) {
  using D = DifferenceTerm::Tag;
  if (!d || d->tag != D::DLamDiff) return std::nullopt;
  const DiffPtr& j = d->a;
  if (!j || j->tag != D::J) return std::nullopt;
  if (!(j->t && j->t->tag == ProgramTerm::Tag::Var && j->t->index == 1)) return std::nullopt;
  if (!(j->u && j->u->tag == ProgramTerm::Tag::Var && j->u->index == 0)) return std::nullopt;
  if (!(j->a && j->a->tag == D::DVar && j->a->index == 0)) return std::nullopt;
  const DiffPtr& br = j->b;
  if (!br || br->tag != D::Refl) return std::nullopt;
  const TermPtr& app = br->t;
  if (!app || app->tag != ProgramTerm::Tag::App) return std::nullopt;
  if (!(app->u && app->u->tag == ProgramTerm::Tag::Var && app->u->index == 0)) return std::nullopt;
  const TermPtr& g = app->t;  // f shifted by 3
  if (freeBelow(g, 3)) return std::nullopt;
  const PredPtr& mb = j->mot->body;
  if (!mb || mb->tag != Predicate::Tag::Diff) return std::nullopt;
  if (!(mb->t && mb->t->tag == ProgramTerm::Tag::App && mb->t->u && mb->t->u->tag == ProgramTerm::Tag::Var &&
        mb->t->u->index == 1))
    return std::nullopt;
  if (!(mb->u && mb->u->tag == ProgramTerm::Tag::App && mb->u->u && mb->u->u->tag == ProgramTerm::Tag::Var &&
        mb->u->u->index == 0))
    return std::nullopt;
  if (!alphaEq(mb->t->t, mb->u->t)) return std::nullopt;
  if (freeBelow(mb->t->t, 4)) return std::nullopt;
  TermPtr f = unshiftProg(g, 3);
  if (!alphaEq(unshiftProg(mb->t->t, 4), f)) return std::nullopt;
  return DerMatch{f, d->ann, j->mot->carrier};
}

// constructs the expansion of Der f at A -> B
inline DiffPtr derTerm(const TermPtr& f, const TypePtr& dom, const TypePtr& cod) {
  TermPtr f2 = shiftProg(f, 2, 0);
  TermPtr f3 = shiftProg(f, 3, 0);
  TermPtr f4 = shiftProg(f, 4, 0);
  PredPtr mbody = prDiff(cod, tmApp(f4, tmVar(1)), tmApp(f4, tmVar(0)));
  DiffPtr branch = dRefl(tmApp(f3, tmVar(0)));
  (void)f2;
  return dLamDiff(dom, dJ(motive(dom, mbody), tmVar(1), tmVar(0), dVar(0), branch));
}

// -- printing ----------------------------------------------------------------

class Printer {
 public:
  explicit Printer(std::set<std::string> reserved = {}) : reserved_(std::move(reserved)) {}

  std::string type(const TypePtr& t) const { return ty(t, 0); }

  std::string term(const TermPtr& t, std::vector<std::string> progNames = {}) const {
    Names n;
    n.prog = std::move(progNames);
    return tm(t, n, 0);
  }
  std::string pred(const PredPtr& p, std::vector<std::string> progNames = {}) const {
    Names n;
    n.prog = std::move(progNames);
    return pr(p, n, 0);
  }
  std::string diff(const DiffPtr& d, std::vector<std::string> progNames = {},
                   std::vector<std::string> diffNames = {}) const {
    Names n;
    n.prog = std::move(progNames);
    n.diff = std::move(diffNames);
    return df(d, n, 0);
  }

 private:
  struct Names {
    std::vector<std::string> prog;  // innermost last
    std::vector<std::string> diff;
  };

  std::set<std::string> reserved_;

  std::string freshProg(const Names& n) const {
    static const char* pool[] = {"x", "y", "z", "w", "v", "u", "r", "s"};
    return fresh(n, pool, 8, "x");
  }
  std::string freshDiff(const Names& n) const {
    static const char* pool[] = {"e", "d", "p", "q"};
    return fresh(n, pool, 4, "e");
  }
  std::string fresh(const Names& n, const char* const* pool, int poolLen, const char* stem) const {
    auto used = [&](const std::string& s) {
      if (reserved_.count(s)) return true;
      for (const auto& x : n.prog)
        if (x == s) return true;
      for (const auto& x : n.diff)
        if (x == s) return true;
      return false;
    };
    for (int i = 0; i < poolLen; ++i)
      if (!used(pool[i])) return pool[i];
    for (int k = 1;; ++k) {
      std::string cand = std::string(stem) + std::to_string(k);
      if (!used(cand)) return cand;
    }
  }

  static std::string wrap(bool cond, const std::string& s) { return cond ? "(" + s + ")" : s; }

  std::string ty(const TypePtr& t, int lvl) const {
    using T = SimpleType::Tag;
    switch (t->tag) {
      case T::Base: return t->base;
      case T::Arrow: return wrap(lvl > 0, ty(t->a, 1) + " -> " + ty(t->b, 0));
      case T::Lolli: return wrap(lvl > 0, ty(t->a, 1) + " -o " + ty(t->b, 0));
      case T::Product:
      case T::Tensor: return wrap(lvl > 1, ty(t->a, 2) + " * " + ty(t->b, 1));
      case T::Bang: return wrap(lvl > 2, "!" + show(t->scale) + " " + ty(t->a, 3));
    }
    return "?";
  }

  std::string progVar(const Names& n, int i) const {
    int k = static_cast<int>(n.prog.size()) - 1 - i;
    if (k < 0) return "#p" + std::to_string(i - static_cast<int>(n.prog.size()));
    return n.prog[k];
  }
  std::string diffVar(const Names& n, int i) const {
    int k = static_cast<int>(n.diff.size()) - 1 - i;
    if (k < 0) return "#d" + std::to_string(i - static_cast<int>(n.diff.size()));
    return n.diff[k];
  }

  std::string tm(const TermPtr& t, const Names& n, int lvl) const {
    using T = ProgramTerm::Tag;
    switch (t->tag) {
      case T::Var: return progVar(n, t->index);
      case T::Const: return t->name;
      case T::Lam: {
        std::string x = freshProg(n);
        Names n2 = n;
        n2.prog.push_back(x);
        return wrap(lvl > 0, "fun (" + x + " : " + ty(t->ann, 0) + ") => " + tm(t->t, n2, 0));
      }
      case T::App: return wrap(lvl > 2, tm(t->t, n, 2) + " " + tm(t->u, n, 3));
      case T::Pair: return "(" + tm(t->t, n, 0) + ", " + tm(t->u, n, 0) + ")";
      case T::Proj:
        return wrap(lvl > 2, std::string(t->index == 1 ? "fst " : "snd ") + tm(t->t, n, 3));
      case T::BangIntro: return wrap(lvl > 2, "! " + tm(t->t, n, 3));
      case T::LetBang: {
        std::string x = freshProg(n);
        Names n2 = n;
        n2.prog.push_back(x);
        return wrap(lvl > 0, "let !" + x + " = " + tm(t->t, n, 0) + " in " + tm(t->u, n2, 0));
      }
      case T::TensorPair: return "(" + tm(t->t, n, 0) + ", " + tm(t->u, n, 0) + ")";
      case T::LetTensor: {
        Names n2 = n;
        std::string x = freshProg(n2);
        n2.prog.push_back(x);
        std::string y = freshProg(n2);
        n2.prog.push_back(y);
        return wrap(lvl > 0, "let (" + x + ", " + y + ") = " + tm(t->t, n, 0) + " in " + tm(t->u, n2, 0));
      }
    }
    return "?";
  }

  std::string pr(const PredPtr& p, const Names& n, int lvl) const {
    using P = Predicate::Tag;
    switch (p->tag) {
      case P::Diff:
        return "D[" + ty(p->carrier, 0) + "](" + tm(p->t, n, 0) + ", " + tm(p->u, n, 0) + ")";
      case P::PProduct: return wrap(lvl > 1, pr(p->p, n, 2) + " * " + pr(p->q, n, 1));
      case P::PiPoint: {
        std::string x = freshProg(n);
        Names n2 = n;
        n2.prog.push_back(x);
        return wrap(lvl > 0, "Pi " + x + " : " + ty(p->carrier, 0) + ". " + pr(p->p, n2, 0));
      }
      case P::PiDiff: {
        Names n2 = n;
        std::string x = freshProg(n2);
        n2.prog.push_back(x);
        std::string y = freshProg(n2);
        n2.prog.push_back(y);
        return wrap(lvl > 0, "Pi " + x + " " + y + " : " + ty(p->carrier, 0) + ". D[" + ty(p->carrier, 0) +
                                 "](" + x + ", " + y + ") -> " + pr(p->p, n2, 0));
      }
    }
    return "?";
  }

  std::string df(const DiffPtr& d, const Names& n, int lvl) const {
    using D = DifferenceTerm::Tag;
    if (auto m = matchDer(d)) return wrap(lvl > 2, "Der " + tm(m->fn, n, 3));
    switch (d->tag) {
      case D::DVar: return diffVar(n, d->index);
      case D::DConst: return d->name;
      case D::DLamPoint: {
        std::string x = freshProg(n);
        Names n2 = n;
        n2.prog.push_back(x);
        return wrap(lvl > 0, "fun (" + x + " : " + ty(d->ann, 0) + ") => " + df(d->a, n2, 0));
      }
      case D::DAppPoint: return wrap(lvl > 2, df(d->a, n, 2) + " " + tm(d->t, n, 3));
      case D::DLamDiff: {
        Names n2 = n;
        std::string x = freshProg(n2);
        n2.prog.push_back(x);
        std::string y = freshProg(n2);
        n2.prog.push_back(y);
        std::string e = freshDiff(n2);
        n2.diff.push_back(e);
        return wrap(lvl > 0,
                    "fun (" + x + " " + y + " : " + ty(d->ann, 0) + ") " + e + " => " + df(d->a, n2, 0));
      }
      case D::DAppDiff:
        return wrap(lvl > 2, df(d->a, n, 2) + " " + tm(d->t, n, 3) + " " + tm(d->u, n, 3) + " " + df(d->b, n, 3));
      case D::DPair: return "(" + df(d->a, n, 0) + ", " + df(d->b, n, 0) + ")";
      case D::DProj:
        return wrap(lvl > 2, std::string(d->index == 1 ? "fst " : "snd ") + df(d->a, n, 3));
      case D::Refl: return wrap(lvl > 2, "refl " + tm(d->t, n, 3));
      case D::J: {
        Names n2 = n;
        std::string x = freshProg(n2);
        n2.prog.push_back(x);
        std::string y = freshProg(n2);
        n2.prog.push_back(y);
        Names nb = n;
        std::string z = freshProg(nb);
        nb.prog.push_back(z);
        return "J[" + x + " " + y + ". " + pr(d->mot->body, n2, 0) + "](" + tm(d->t, n, 0) + ", " +
               tm(d->u, n, 0) + ", " + df(d->a, n, 0) + ", [" + z + "] " + df(d->b, nb, 0) + ")";
      }
    }
    return "?";
  }
};

}  // namespace dtt
