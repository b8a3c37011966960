#pragma once

#include <functional>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "dtt/poly.hpp"
#include "dtt/rational.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// A finite multiset of integers. Changes over bags are (removals, additions).
struct Bag {
  std::map<long long, long long> counts;  // element -> multiplicity (> 0)

  void add(long long x, long long n = 1) {
    counts[x] += n;
    if (counts[x] <= 0) counts.erase(x);
  }
  long long total() const {
    long long s = 0;
    for (auto& [k, n] : counts) s += k * n;
    return s;
  }
  friend bool operator==(const Bag& a, const Bag& b) { return a.counts == b.counts; }
};

struct Val;
using ValPtr = std::shared_ptr<const Val>;
using ValFn = std::function<ValPtr(const ValPtr&)>;

struct Val {
  std::variant<double, long long, Bag, std::vector<ValPtr>, ValFn, PolyArrow> v;
};

inline ValPtr vReal(double d) { return std::make_shared<Val>(Val{d}); }
inline ValPtr vInt(long long i) { return std::make_shared<Val>(Val{i}); }
inline ValPtr vBag(Bag b) { return std::make_shared<Val>(Val{std::move(b)}); }
inline ValPtr vTuple(std::vector<ValPtr> xs) { return std::make_shared<Val>(Val{std::move(xs)}); }
inline ValPtr vFn(ValFn f) { return std::make_shared<Val>(Val{std::move(f)}); }
inline ValPtr vPoly(PolyArrow p) { return std::make_shared<Val>(Val{std::move(p)}); }

struct EvalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double asReal(const ValPtr& v) {
  if (auto* d = std::get_if<double>(&v->v)) return *d;
  if (auto* i = std::get_if<long long>(&v->v)) return static_cast<double>(*i);
  throw EvalFailure("expected a numeric value");
}
inline long long asInt(const ValPtr& v) {
  if (auto* i = std::get_if<long long>(&v->v)) return *i;
  throw EvalFailure("expected an integer value");
}
inline const Bag& asBag(const ValPtr& v) {
  if (auto* b = std::get_if<Bag>(&v->v)) return *b;
  throw EvalFailure("expected a bag value");
}
inline const std::vector<ValPtr>& asTuple(const ValPtr& v) {
  if (auto* t = std::get_if<std::vector<ValPtr>>(&v->v)) return *t;
  throw EvalFailure("expected a tuple value");
}
inline const PolyArrow& asPoly(const ValPtr& v) {
  if (auto* p = std::get_if<PolyArrow>(&v->v)) return *p;
  throw EvalFailure("expected a polynomial value");
}
inline bool isFn(const ValPtr& v) { return std::holds_alternative<ValFn>(v->v); }
inline bool isPolyVal(const ValPtr& v) { return std::holds_alternative<PolyArrow>(v->v); }

inline ValPtr apply(const ValPtr& f, const ValPtr& x) {
  if (auto* fn = std::get_if<ValFn>(&f->v)) return (*fn)(x);
  if (auto* p = std::get_if<PolyArrow>(&f->v)) {
    // symbolic application: compose with the (flattened) polynomial argument
    if (auto* q = std::get_if<PolyArrow>(&x->v)) return vPoly(compose(*p, *q));
    if (auto* t = std::get_if<std::vector<ValPtr>>(&x->v)) {
      PolyArrow acc{0, 0, {}};
      bool first = true;
      for (const auto& c : *t) {
        const PolyArrow& pc = asPoly(c);
        acc = first ? pc : pairArrow(acc, pc);
        first = false;
      }
      return vPoly(compose(*p, acc));
    }
  }
  throw EvalFailure("value is not applicable");
}

// structural equality with a tolerance on reals; functions are not compared
inline bool valEq(const ValPtr& a, const ValPtr& b, double tol = 1e-9) {
  if (a->v.index() != b->v.index()) {
    // allow int/real mixing
    if ((std::holds_alternative<double>(a->v) || std::holds_alternative<long long>(a->v)) &&
        (std::holds_alternative<double>(b->v) || std::holds_alternative<long long>(b->v)))
      return std::abs(asReal(a) - asReal(b)) <= tol;
    return false;
  }
  if (auto* d = std::get_if<double>(&a->v)) return std::abs(*d - std::get<double>(b->v)) <= tol;
  if (auto* i = std::get_if<long long>(&a->v)) return *i == std::get<long long>(b->v);
  if (auto* g = std::get_if<Bag>(&a->v)) return *g == std::get<Bag>(b->v);
  if (auto* t = std::get_if<std::vector<ValPtr>>(&a->v)) {
    const auto& s = std::get<std::vector<ValPtr>>(b->v);
    if (t->size() != s.size()) return false;
    for (size_t i = 0; i < t->size(); ++i)
      if (!valEq((*t)[i], s[i], tol)) return false;
    return true;
  }
  if (auto* p = std::get_if<PolyArrow>(&a->v)) return *p == std::get<PolyArrow>(b->v);
  return false;  // functions: compare extensionally at the call site
}

inline std::string showVal(const ValPtr& v) {
  if (auto* d = std::get_if<double>(&v->v)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", *d);
    return buf;
  }
  if (auto* i = std::get_if<long long>(&v->v)) return std::to_string(*i);
  if (auto* b = std::get_if<Bag>(&v->v)) {
    std::string s = "{";
    bool first = true;
    for (auto& [k, n] : b->counts)
      for (long long j = 0; j < n; ++j) {
        if (!first) s += ", ";
        first = false;
        s += std::to_string(k);
      }
    return s + "}";
  }
  if (auto* t = std::get_if<std::vector<ValPtr>>(&v->v)) {
    std::string s = "(";
    for (size_t i = 0; i < t->size(); ++i) {
      if (i) s += ", ";
      s += showVal((*t)[i]);
    }
    return s + ")";
  }
  if (auto* p = std::get_if<PolyArrow>(&v->v)) {
    std::string s = "[";
    for (int i = 0; i < p->codDim; ++i) {
      if (i) s += "; ";
      s += p->comps[i].show();
    }
    return s + "]";
  }
  return "<fn>";
}

}  // namespace dtt
