#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtt/rational.hpp"

namespace dtt {

struct MalformedTerm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Simple types (the Type universe). Plain simple types for STlC, plus the
// sub-exponential formers !_r A, A -o B, A (x) B for the Fuzz fragment.
// ---------------------------------------------------------------------------

struct SimpleType;
using TypePtr = std::shared_ptr<const SimpleType>;

struct SimpleType {
  enum class Tag { Base, Arrow, Product, Bang, Lolli, Tensor };
  Tag tag;
  std::string base;  // Base
  Rat scale{0};      // Bang
  TypePtr a, b;      // Arrow/Lolli dom,cod; Product/Tensor left,right; Bang body in a
};

inline TypePtr tyBase(std::string n) {
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Base, std::move(n), Rat(0), nullptr, nullptr});
}
inline TypePtr tyArrow(TypePtr d, TypePtr c) {
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Arrow, "", Rat(0), std::move(d), std::move(c)});
}
inline TypePtr tyProduct(TypePtr l, TypePtr r) {
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Product, "", Rat(0), std::move(l), std::move(r)});
}
inline TypePtr tyBang(Rat s, TypePtr body) {
  if (s < Rat(0)) throw MalformedTerm("negative scale in !");
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Bang, "", s, std::move(body), nullptr});
}
inline TypePtr tyLolli(TypePtr d, TypePtr c) {
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Lolli, "", Rat(0), std::move(d), std::move(c)});
}
inline TypePtr tyTensor(TypePtr l, TypePtr r) {
  return std::make_shared<SimpleType>(SimpleType{SimpleType::Tag::Tensor, "", Rat(0), std::move(l), std::move(r)});
}

inline bool typeEq(const TypePtr& x, const TypePtr& y) {
  if (x == y) return true;
  if (!x || !y || x->tag != y->tag) return false;
  switch (x->tag) {
    case SimpleType::Tag::Base: return x->base == y->base;
    case SimpleType::Tag::Bang: return x->scale == y->scale && typeEq(x->a, y->a);
    default: return typeEq(x->a, y->a) && typeEq(x->b, y->b);
  }
}

// ---------------------------------------------------------------------------
// Program terms: lambda terms with pairs, constants, and (in sub-exponential
// mode) !t, let !x = t in u, tensor pairs and let (x,y) = t in u.
// De Bruijn indices; program and difference variables live in disjoint index
// spaces.
// ---------------------------------------------------------------------------

struct ProgramTerm;
using TermPtr = std::shared_ptr<const ProgramTerm>;

struct ProgramTerm {
  enum class Tag { Var, Const, Lam, App, Pair, Proj, BangIntro, LetBang, TensorPair, LetTensor };
  Tag tag;
  int index = 0;      // Var index; Proj side (1 or 2)
  std::string name;   // Const
  TypePtr ann;        // Lam annotation
  TermPtr t, u;       // children; Lam body in t; LetBang/LetTensor: t scrutinee, u body
};

inline TermPtr tmVar(int i) { return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::Var, i}); }
inline TermPtr tmConst(std::string n) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::Const, 0, std::move(n)});
}
inline TermPtr tmLam(TypePtr ann, TermPtr body) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::Lam, 0, "", std::move(ann), std::move(body), nullptr});
}
inline TermPtr tmApp(TermPtr f, TermPtr x) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::App, 0, "", nullptr, std::move(f), std::move(x)});
}
inline TermPtr tmPair(TermPtr l, TermPtr r) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::Pair, 0, "", nullptr, std::move(l), std::move(r)});
}
inline TermPtr tmProj(int side, TermPtr x) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::Proj, side, "", nullptr, std::move(x), nullptr});
}
inline TermPtr tmBang(TermPtr x) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::BangIntro, 0, "", nullptr, std::move(x), nullptr});
}
inline TermPtr tmLetBang(TermPtr scrut, TermPtr body) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::LetBang, 0, "", nullptr, std::move(scrut), std::move(body)});
}
inline TermPtr tmTensorPair(TermPtr l, TermPtr r) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::TensorPair, 0, "", nullptr, std::move(l), std::move(r)});
}
inline TermPtr tmLetTensor(TermPtr scrut, TermPtr body) {
  return std::make_shared<ProgramTerm>(ProgramTerm{ProgramTerm::Tag::LetTensor, 0, "", nullptr, std::move(scrut), std::move(body)});
}

// ---------------------------------------------------------------------------
// Predicates (the DType universe). Diff carries two program terms of the
// carrier type; PiPoint binds one program variable, PiDiff binds two (its
// difference hypothesis is implicit: predicates never mention difference
// variables).
// ---------------------------------------------------------------------------

struct Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

struct Predicate {
  enum class Tag { Diff, PProduct, PiPoint, PiDiff };
  Tag tag;
  TypePtr carrier;  // Diff carrier; PiPoint/PiDiff domain
  TermPtr t, u;     // Diff lhs, rhs
  PredPtr p, q;     // PProduct left,right; PiPoint/PiDiff body in p
};

inline PredPtr prDiff(TypePtr a, TermPtr t, TermPtr u) {
  return std::make_shared<Predicate>(Predicate{Predicate::Tag::Diff, std::move(a), std::move(t), std::move(u), nullptr, nullptr});
}
inline PredPtr prProduct(PredPtr l, PredPtr r) {
  return std::make_shared<Predicate>(Predicate{Predicate::Tag::PProduct, nullptr, nullptr, nullptr, std::move(l), std::move(r)});
}
inline PredPtr prPiPoint(TypePtr dom, PredPtr body) {
  return std::make_shared<Predicate>(Predicate{Predicate::Tag::PiPoint, std::move(dom), nullptr, nullptr, std::move(body), nullptr});
}
inline PredPtr prPiDiff(TypePtr dom, PredPtr body) {
  return std::make_shared<Predicate>(Predicate{Predicate::Tag::PiDiff, std::move(dom), nullptr, nullptr, std::move(body), nullptr});
}

// ---------------------------------------------------------------------------
// Difference terms. J carries an explicit motive: the eliminated predicate
// with its two program binders.
// ---------------------------------------------------------------------------

struct DifferenceTerm;
using DiffPtr = std::shared_ptr<const DifferenceTerm>;

struct Motive {
  TypePtr carrier;
  PredPtr body;  // binds two program variables (lhs var = index 1, rhs var = index 0)
};
using MotivePtr = std::shared_ptr<const Motive>;

inline MotivePtr motive(TypePtr carrier, PredPtr body) {
  return std::make_shared<Motive>(Motive{std::move(carrier), std::move(body)});
}

struct DifferenceTerm {
  enum class Tag { DVar, DConst, DLamPoint, DAppPoint, DLamDiff, DAppDiff, DPair, DProj, Refl, J };
  Tag tag;
  int index = 0;     // DVar index; DProj side
  std::string name;  // DConst
  TypePtr ann;       // DLamPoint/DLamDiff domain annotation
  TermPtr t, u;      // program arguments (DAppPoint arg in t; DAppDiff lhs,rhs; J lhs,rhs; Refl body in t)
  DiffPtr a, b;      // difference children (fn/body in a; DAppDiff diff arg and J branch in b)
  MotivePtr mot;     // J motive
};

inline DiffPtr dVar(int i) { return std::make_shared<DifferenceTerm>(DifferenceTerm{DifferenceTerm::Tag::DVar, i}); }
inline DiffPtr dConst(std::string n) {
  return std::make_shared<DifferenceTerm>(DifferenceTerm{DifferenceTerm::Tag::DConst, 0, std::move(n)});
}
inline DiffPtr dLamPoint(TypePtr dom, DiffPtr body) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DLamPoint, 0, "", std::move(dom), nullptr, nullptr, std::move(body), nullptr, nullptr});
}
inline DiffPtr dAppPoint(DiffPtr fn, TermPtr arg) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DAppPoint, 0, "", nullptr, std::move(arg), nullptr, std::move(fn), nullptr, nullptr});
}
inline DiffPtr dLamDiff(TypePtr dom, DiffPtr body) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DLamDiff, 0, "", std::move(dom), nullptr, nullptr, std::move(body), nullptr, nullptr});
}
inline DiffPtr dAppDiff(DiffPtr fn, TermPtr lhs, TermPtr rhs, DiffPtr diff) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DAppDiff, 0, "", nullptr, std::move(lhs), std::move(rhs), std::move(fn), std::move(diff), nullptr});
}
inline DiffPtr dPair(DiffPtr l, DiffPtr r) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DPair, 0, "", nullptr, nullptr, nullptr, std::move(l), std::move(r), nullptr});
}
inline DiffPtr dProj(int side, DiffPtr body) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::DProj, side, "", nullptr, nullptr, nullptr, std::move(body), nullptr, nullptr});
}
inline DiffPtr dRefl(TermPtr t) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::Refl, 0, "", nullptr, std::move(t), nullptr, nullptr, nullptr, nullptr});
}
inline DiffPtr dJ(MotivePtr mot, TermPtr lhs, TermPtr rhs, DiffPtr diff, DiffPtr branch) {
  return std::make_shared<DifferenceTerm>(
      DifferenceTerm{DifferenceTerm::Tag::J, 0, "", nullptr, std::move(lhs), std::move(rhs), std::move(diff), std::move(branch), std::move(mot)});
}

// ---------------------------------------------------------------------------
// Context: a telescope of program-variable declarations and difference
// hypotheses. Var(i) resolves to the i-th program entry from the right,
// DVar(j) to the j-th difference entry from the right. Stored difference
// predicates are relative to their declaration point and are shifted on
// lookup.
// ---------------------------------------------------------------------------

struct CtxEntry {
  bool isProg;
  std::string name;  // surface name, for printing only
  TypePtr ty;        // program entry
  Sens budget;       // program entry, sub-exponential mode (defaults to oo)
  PredPtr pred;      // difference entry
};

PredPtr shiftProg(const PredPtr& p, int d, int cutoff);

struct Context {
  std::vector<CtxEntry> entries;

  Context pushProg(std::string name, TypePtr ty, Sens budget = Sens::inf()) const {
    Context c = *this;
    c.entries.push_back(CtxEntry{true, std::move(name), std::move(ty), budget, nullptr});
    return c;
  }
  Context pushDiff(std::string name, PredPtr pred) const {
    Context c = *this;
    c.entries.push_back(CtxEntry{false, std::move(name), nullptr, Sens::inf(), std::move(pred)});
    return c;
  }

  // type of program variable i (simple types contain no variables, no shift)
  TypePtr progType(int i) const {
    int seen = 0;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      if (!it->isProg) continue;
      if (seen == i) return it->ty;
      ++seen;
    }
    throw MalformedTerm("program variable index out of range: " + std::to_string(i));
  }

  // predicate of difference variable j, shifted to the full program zone
  PredPtr diffPred(int j) const {
    int seenDiff = 0, progAfter = 0;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      if (it->isProg) {
        ++progAfter;
        continue;
      }
      if (seenDiff == j) return shiftProg(it->pred, progAfter, 0);
      ++seenDiff;
    }
    throw MalformedTerm("difference variable index out of range: " + std::to_string(j));
  }

  int progSize() const {
    int n = 0;
    for (const auto& e : entries) n += e.isProg ? 1 : 0;
    return n;
  }
  int diffSize() const {
    int n = 0;
    for (const auto& e : entries) n += e.isProg ? 0 : 1;
    return n;
  }
};

// ---------------------------------------------------------------------------
// Shifting
// ---------------------------------------------------------------------------

inline TermPtr shiftProg(const TermPtr& t, int d, int cutoff) {
  if (!t || d == 0) return t;
  using T = ProgramTerm::Tag;
  switch (t->tag) {
    case T::Var:
      if (t->index < cutoff) return t;
      if (t->index + d < 0) throw MalformedTerm("negative index after shift");
      return tmVar(t->index + d);
    case T::Const: return t;
    case T::Lam: return tmLam(t->ann, shiftProg(t->t, d, cutoff + 1));
    case T::App: return tmApp(shiftProg(t->t, d, cutoff), shiftProg(t->u, d, cutoff));
    case T::Pair: return tmPair(shiftProg(t->t, d, cutoff), shiftProg(t->u, d, cutoff));
    case T::Proj: return tmProj(t->index, shiftProg(t->t, d, cutoff));
    case T::BangIntro: return tmBang(shiftProg(t->t, d, cutoff));
    case T::LetBang: return tmLetBang(shiftProg(t->t, d, cutoff), shiftProg(t->u, d, cutoff + 1));
    case T::TensorPair: return tmTensorPair(shiftProg(t->t, d, cutoff), shiftProg(t->u, d, cutoff));
    case T::LetTensor: return tmLetTensor(shiftProg(t->t, d, cutoff), shiftProg(t->u, d, cutoff + 2));
  }
  throw MalformedTerm("unreachable");
}

inline PredPtr shiftProg(const PredPtr& p, int d, int cutoff) {
  if (!p || d == 0) return p;
  using P = Predicate::Tag;
  switch (p->tag) {
    case P::Diff: return prDiff(p->carrier, shiftProg(p->t, d, cutoff), shiftProg(p->u, d, cutoff));
    case P::PProduct: return prProduct(shiftProg(p->p, d, cutoff), shiftProg(p->q, d, cutoff));
    case P::PiPoint: return prPiPoint(p->carrier, shiftProg(p->p, d, cutoff + 1));
    case P::PiDiff: return prPiDiff(p->carrier, shiftProg(p->p, d, cutoff + 2));
  }
  throw MalformedTerm("unreachable");
}

inline MotivePtr shiftProg(const MotivePtr& m, int d, int cutoff) {
  if (!m || d == 0) return m;
  return motive(m->carrier, shiftProg(m->body, d, cutoff + 2));
}

inline DiffPtr shiftProg(const DiffPtr& a, int d, int cutoff) {
  if (!a || d == 0) return a;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar:
    case D::DConst: return a;
    case D::DLamPoint: return dLamPoint(a->ann, shiftProg(a->a, d, cutoff + 1));
    case D::DAppPoint: return dAppPoint(shiftProg(a->a, d, cutoff), shiftProg(a->t, d, cutoff));
    case D::DLamDiff: return dLamDiff(a->ann, shiftProg(a->a, d, cutoff + 2));
    case D::DAppDiff:
      return dAppDiff(shiftProg(a->a, d, cutoff), shiftProg(a->t, d, cutoff), shiftProg(a->u, d, cutoff),
                      shiftProg(a->b, d, cutoff));
    case D::DPair: return dPair(shiftProg(a->a, d, cutoff), shiftProg(a->b, d, cutoff));
    case D::DProj: return dProj(a->index, shiftProg(a->a, d, cutoff));
    case D::Refl: return dRefl(shiftProg(a->t, d, cutoff));
    case D::J:
      return dJ(shiftProg(a->mot, d, cutoff), shiftProg(a->t, d, cutoff), shiftProg(a->u, d, cutoff),
                shiftProg(a->a, d, cutoff), shiftProg(a->b, d, cutoff + 1));
  }
  throw MalformedTerm("unreachable");
}

inline DiffPtr shiftDiff(const DiffPtr& a, int d, int cutoff) {
  if (!a || d == 0) return a;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar:
      if (a->index < cutoff) return a;
      if (a->index + d < 0) throw MalformedTerm("negative index after shift");
      return dVar(a->index + d);
    case D::DConst: return a;
    case D::DLamPoint: return dLamPoint(a->ann, shiftDiff(a->a, d, cutoff));
    case D::DAppPoint: return dAppPoint(shiftDiff(a->a, d, cutoff), a->t);
    case D::DLamDiff: return dLamDiff(a->ann, shiftDiff(a->a, d, cutoff + 1));
    case D::DAppDiff: return dAppDiff(shiftDiff(a->a, d, cutoff), a->t, a->u, shiftDiff(a->b, d, cutoff));
    case D::DPair: return dPair(shiftDiff(a->a, d, cutoff), shiftDiff(a->b, d, cutoff));
    case D::DProj: return dProj(a->index, shiftDiff(a->a, d, cutoff));
    case D::Refl: return a;  // program terms carry no difference variables
    case D::J: return dJ(a->mot, a->t, a->u, shiftDiff(a->a, d, cutoff), shiftDiff(a->b, d, cutoff));
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Substitution of the program variable with index `j` (capture-avoiding).
// Variables above j are decremented.
// ---------------------------------------------------------------------------

inline TermPtr substProg(const TermPtr& t, int j, const TermPtr& s) {
  if (!t) return t;
  using T = ProgramTerm::Tag;
  switch (t->tag) {
    case T::Var:
      if (t->index == j) return s;
      return t->index > j ? tmVar(t->index - 1) : t;
    case T::Const: return t;
    case T::Lam: return tmLam(t->ann, substProg(t->t, j + 1, shiftProg(s, 1, 0)));
    case T::App: return tmApp(substProg(t->t, j, s), substProg(t->u, j, s));
    case T::Pair: return tmPair(substProg(t->t, j, s), substProg(t->u, j, s));
    case T::Proj: return tmProj(t->index, substProg(t->t, j, s));
    case T::BangIntro: return tmBang(substProg(t->t, j, s));
    case T::LetBang: return tmLetBang(substProg(t->t, j, s), substProg(t->u, j + 1, shiftProg(s, 1, 0)));
    case T::TensorPair: return tmTensorPair(substProg(t->t, j, s), substProg(t->u, j, s));
    case T::LetTensor: return tmLetTensor(substProg(t->t, j, s), substProg(t->u, j + 2, shiftProg(s, 2, 0)));
  }
  throw MalformedTerm("unreachable");
}

inline PredPtr substProg(const PredPtr& p, int j, const TermPtr& s) {
  if (!p) return p;
  using P = Predicate::Tag;
  switch (p->tag) {
    case P::Diff: return prDiff(p->carrier, substProg(p->t, j, s), substProg(p->u, j, s));
    case P::PProduct: return prProduct(substProg(p->p, j, s), substProg(p->q, j, s));
    case P::PiPoint: return prPiPoint(p->carrier, substProg(p->p, j + 1, shiftProg(s, 1, 0)));
    case P::PiDiff: return prPiDiff(p->carrier, substProg(p->p, j + 2, shiftProg(s, 2, 0)));
  }
  throw MalformedTerm("unreachable");
}

inline MotivePtr substProg(const MotivePtr& m, int j, const TermPtr& s) {
  if (!m) return m;
  return motive(m->carrier, substProg(m->body, j + 2, shiftProg(s, 2, 0)));
}

inline DiffPtr substProg(const DiffPtr& a, int j, const TermPtr& s) {
  if (!a) return a;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar:
    case D::DConst: return a;
    case D::DLamPoint: return dLamPoint(a->ann, substProg(a->a, j + 1, shiftProg(s, 1, 0)));
    case D::DAppPoint: return dAppPoint(substProg(a->a, j, s), substProg(a->t, j, s));
    case D::DLamDiff: return dLamDiff(a->ann, substProg(a->a, j + 2, shiftProg(s, 2, 0)));
    case D::DAppDiff:
      return dAppDiff(substProg(a->a, j, s), substProg(a->t, j, s), substProg(a->u, j, s), substProg(a->b, j, s));
    case D::DPair: return dPair(substProg(a->a, j, s), substProg(a->b, j, s));
    case D::DProj: return dProj(a->index, substProg(a->a, j, s));
    case D::Refl: return dRefl(substProg(a->t, j, s));
    case D::J:
      return dJ(substProg(a->mot, j, s), substProg(a->t, j, s), substProg(a->u, j, s), substProg(a->a, j, s),
                substProg(a->b, j + 1, shiftProg(s, 1, 0)));
  }
  throw MalformedTerm("unreachable");
}

// substitution of difference variable j; d(t) is unaffected by construction
inline DiffPtr substDiff(const DiffPtr& a, int j, const DiffPtr& s) {
  if (!a) return a;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar:
      if (a->index == j) return s;
      return a->index > j ? dVar(a->index - 1) : a;
    case D::DConst: return a;
    case D::DLamPoint: return dLamPoint(a->ann, substDiff(a->a, j, shiftProg(s, 1, 0)));
    case D::DAppPoint: return dAppPoint(substDiff(a->a, j, s), a->t);
    case D::DLamDiff: return dLamDiff(a->ann, substDiff(a->a, j + 1, shiftProg(shiftDiff(s, 1, 0), 2, 0)));
    case D::DAppDiff: return dAppDiff(substDiff(a->a, j, s), a->t, a->u, substDiff(a->b, j, s));
    case D::DPair: return dPair(substDiff(a->a, j, s), substDiff(a->b, j, s));
    case D::DProj: return dProj(a->index, substDiff(a->a, j, s));
    case D::Refl: return a;
    case D::J: return dJ(a->mot, a->t, a->u, substDiff(a->a, j, s), substDiff(a->b, j, shiftProg(s, 1, 0)));
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Occurrence checks
// ---------------------------------------------------------------------------

inline bool usesProgVar(const TermPtr& t, int j) {
  if (!t) return false;
  using T = ProgramTerm::Tag;
  switch (t->tag) {
    case T::Var: return t->index == j;
    case T::Const: return false;
    case T::Lam: return usesProgVar(t->t, j + 1);
    case T::App:
    case T::Pair:
    case T::TensorPair: return usesProgVar(t->t, j) || usesProgVar(t->u, j);
    case T::Proj:
    case T::BangIntro: return usesProgVar(t->t, j);
    case T::LetBang: return usesProgVar(t->t, j) || usesProgVar(t->u, j + 1);
    case T::LetTensor: return usesProgVar(t->t, j) || usesProgVar(t->u, j + 2);
  }
  return false;
}

inline bool usesProgVar(const PredPtr& p, int j) {
  if (!p) return false;
  using P = Predicate::Tag;
  switch (p->tag) {
    case P::Diff: return usesProgVar(p->t, j) || usesProgVar(p->u, j);
    case P::PProduct: return usesProgVar(p->p, j) || usesProgVar(p->q, j);
    case P::PiPoint: return usesProgVar(p->p, j + 1);
    case P::PiDiff: return usesProgVar(p->p, j + 2);
  }
  return false;
}

inline bool usesProgVar(const DiffPtr& a, int j) {
  if (!a) return false;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar:
    case D::DConst: return false;
    case D::DLamPoint: return usesProgVar(a->a, j + 1);
    case D::DAppPoint: return usesProgVar(a->a, j) || usesProgVar(a->t, j);
    case D::DLamDiff: return usesProgVar(a->a, j + 2);
    case D::DAppDiff:
      return usesProgVar(a->a, j) || usesProgVar(a->t, j) || usesProgVar(a->u, j) || usesProgVar(a->b, j);
    case D::DPair: return usesProgVar(a->a, j) || usesProgVar(a->b, j);
    case D::DProj: return usesProgVar(a->a, j);
    case D::Refl: return usesProgVar(a->t, j);
    case D::J:
      return usesProgVar(a->mot->body, j + 2) || usesProgVar(a->t, j) || usesProgVar(a->u, j) ||
             usesProgVar(a->a, j) || usesProgVar(a->b, j + 1);
  }
  return false;
}

inline bool usesDiffVar(const DiffPtr& a, int j) {
  if (!a) return false;
  using D = DifferenceTerm::Tag;
  switch (a->tag) {
    case D::DVar: return a->index == j;
    case D::DConst:
    case D::Refl: return false;
    case D::DLamPoint: return usesDiffVar(a->a, j);
    case D::DAppPoint: return usesDiffVar(a->a, j);
    case D::DLamDiff: return usesDiffVar(a->a, j + 1);
    case D::DAppDiff: return usesDiffVar(a->a, j) || usesDiffVar(a->b, j);
    case D::DPair: return usesDiffVar(a->a, j) || usesDiffVar(a->b, j);
    case D::DProj: return usesDiffVar(a->a, j);
    case D::J: return usesDiffVar(a->a, j) || usesDiffVar(a->b, j);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Alpha equality: plain structural equality on the nameless representation.
// ---------------------------------------------------------------------------

inline bool alphaEq(const TermPtr& x, const TermPtr& y) {
  if (x == y) return true;
  if (!x || !y || x->tag != y->tag) return false;
  using T = ProgramTerm::Tag;
  switch (x->tag) {
    case T::Var: return x->index == y->index;
    case T::Const: return x->name == y->name;
    case T::Lam: return typeEq(x->ann, y->ann) && alphaEq(x->t, y->t);
    case T::Proj: return x->index == y->index && alphaEq(x->t, y->t);
    case T::BangIntro: return alphaEq(x->t, y->t);
    default: return alphaEq(x->t, y->t) && alphaEq(x->u, y->u);
  }
}

inline bool alphaEq(const PredPtr& x, const PredPtr& y) {
  if (x == y) return true;
  if (!x || !y || x->tag != y->tag) return false;
  using P = Predicate::Tag;
  switch (x->tag) {
    case P::Diff: return typeEq(x->carrier, y->carrier) && alphaEq(x->t, y->t) && alphaEq(x->u, y->u);
    case P::PProduct: return alphaEq(x->p, y->p) && alphaEq(x->q, y->q);
    case P::PiPoint:
    case P::PiDiff: return typeEq(x->carrier, y->carrier) && alphaEq(x->p, y->p);
  }
  return false;
}

inline bool alphaEq(const DiffPtr& x, const DiffPtr& y) {
  if (x == y) return true;
  if (!x || !y || x->tag != y->tag) return false;
  using D = DifferenceTerm::Tag;
  switch (x->tag) {
    case D::DVar: return x->index == y->index;
    case D::DConst: return x->name == y->name;
    case D::DLamPoint:
    case D::DLamDiff: return typeEq(x->ann, y->ann) && alphaEq(x->a, y->a);
    case D::DAppPoint: return alphaEq(x->a, y->a) && alphaEq(x->t, y->t);
    case D::DAppDiff:
      return alphaEq(x->a, y->a) && alphaEq(x->t, y->t) && alphaEq(x->u, y->u) && alphaEq(x->b, y->b);
    case D::DPair: return alphaEq(x->a, y->a) && alphaEq(x->b, y->b);
    case D::DProj: return x->index == y->index && alphaEq(x->a, y->a);
    case D::Refl: return alphaEq(x->t, y->t);
    case D::J:
      return typeEq(x->mot->carrier, y->mot->carrier) && alphaEq(x->mot->body, y->mot->body) &&
             alphaEq(x->t, y->t) && alphaEq(x->u, y->u) && alphaEq(x->a, y->a) && alphaEq(x->b, y->b);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parallel substitution of the lowest program variables: var i < images.size()
// becomes images[i] (expressed in the target context), var k >= images.size()
// becomes k - images.size() + newDepth.
// ---------------------------------------------------------------------------

struct PSubst {
  std::vector<TermPtr> images;
  int newDepth;

  TermPtr var(int i, int c) const {
    if (i < c) return tmVar(i);
    int k = i - c;
    if (k < static_cast<int>(images.size())) return shiftProg(images[k], c, 0);
    return tmVar(i - static_cast<int>(images.size()) + newDepth);
  }

  TermPtr operator()(const TermPtr& t, int c = 0) const {
    if (!t) return t;
    using T = ProgramTerm::Tag;
    switch (t->tag) {
      case T::Var: return var(t->index, c);
      case T::Const: return t;
      case T::Lam: return tmLam(t->ann, (*this)(t->t, c + 1));
      case T::App: return tmApp((*this)(t->t, c), (*this)(t->u, c));
      case T::Pair: return tmPair((*this)(t->t, c), (*this)(t->u, c));
      case T::Proj: return tmProj(t->index, (*this)(t->t, c));
      case T::BangIntro: return tmBang((*this)(t->t, c));
      case T::LetBang: return tmLetBang((*this)(t->t, c), (*this)(t->u, c + 1));
      case T::TensorPair: return tmTensorPair((*this)(t->t, c), (*this)(t->u, c));
      case T::LetTensor: return tmLetTensor((*this)(t->t, c), (*this)(t->u, c + 2));
    }
    throw MalformedTerm("unreachable");
  }

  PredPtr operator()(const PredPtr& p, int c = 0) const {
    if (!p) return p;
    using P = Predicate::Tag;
    switch (p->tag) {
      case P::Diff: return prDiff(p->carrier, (*this)(p->t, c), (*this)(p->u, c));
      case P::PProduct: return prProduct((*this)(p->p, c), (*this)(p->q, c));
      case P::PiPoint: return prPiPoint(p->carrier, (*this)(p->p, c + 1));
      case P::PiDiff: return prPiDiff(p->carrier, (*this)(p->p, c + 2));
    }
    throw MalformedTerm("unreachable");
  }

  DiffPtr operator()(const DiffPtr& a, int c = 0) const {
    if (!a) return a;
    using D = DifferenceTerm::Tag;
    switch (a->tag) {
      case D::DVar:
      case D::DConst: return a;
      case D::DLamPoint: return dLamPoint(a->ann, (*this)(a->a, c + 1));
      case D::DAppPoint: return dAppPoint((*this)(a->a, c), (*this)(a->t, c));
      case D::DLamDiff: return dLamDiff(a->ann, (*this)(a->a, c + 2));
      case D::DAppDiff:
        return dAppDiff((*this)(a->a, c), (*this)(a->t, c), (*this)(a->u, c), (*this)(a->b, c));
      case D::DPair: return dPair((*this)(a->a, c), (*this)(a->b, c));
      case D::DProj: return dProj(a->index, (*this)(a->a, c));
      case D::Refl: return dRefl((*this)(a->t, c));
      case D::J:
        return dJ(motive(a->mot->carrier, (*this)(a->mot->body, c + 2)), (*this)(a->t, c), (*this)(a->u, c),
                  (*this)(a->a, c), (*this)(a->b, c + 1));
    }
    throw MalformedTerm("unreachable");
  }
};

// substitute the two binders of a motive/pure predicate body
inline PredPtr instantiate2(const PredPtr& body, const TermPtr& lhs, const TermPtr& rhs) {
  // body binds lhs at index 1, rhs at index 0
  PredPtr step1 = substProg(body, 0, shiftProg(rhs, 1, 0));  // leaves lhs var at index 0
  return substProg(step1, 0, lhs);
}

inline PredPtr motiveAt(const MotivePtr& m, const TermPtr& lhs, const TermPtr& rhs) {
  return instantiate2(m->body, lhs, rhs);
}

}  // namespace dtt
