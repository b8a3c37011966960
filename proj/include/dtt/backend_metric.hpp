#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtt/semantics.hpp"
#include "dtt/value.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Pseudo-metric spaces. Function spaces measure distances as sups over the
// enumerated domain, so real carriers come with a finite sample grid.
// ---------------------------------------------------------------------------

struct MetricSpace;
using MSpacePtr = std::shared_ptr<const MetricSpace>;

struct MetricSpace {
  enum class K { Finite, RealLine, Tensor, Hom, Rescale };
  K k;
  // Finite
  std::vector<ValPtr> points;
  std::vector<std::vector<double>> table;
  // RealLine
  double gridMin = 0, gridMax = 0, gridStep = 1;
  // Tensor / Hom
  MSpacePtr a, b;
  // Rescale
  double factor = 1;
};

inline MSpacePtr msFinite(std::vector<ValPtr> pts, std::vector<std::vector<double>> tab) {
  auto m = std::make_shared<MetricSpace>();
  m->k = MetricSpace::K::Finite;
  m->points = std::move(pts);
  m->table = std::move(tab);
  return m;
}
inline MSpacePtr msReal(double mn, double mx, double step) {
  auto m = std::make_shared<MetricSpace>();
  m->k = MetricSpace::K::RealLine;
  m->gridMin = mn;
  m->gridMax = mx;
  m->gridStep = step;
  return m;
}
inline MSpacePtr msTensor(MSpacePtr a, MSpacePtr b) {
  auto m = std::make_shared<MetricSpace>();
  m->k = MetricSpace::K::Tensor;
  m->a = std::move(a);
  m->b = std::move(b);
  return m;
}
inline MSpacePtr msHom(MSpacePtr a, MSpacePtr b) {
  auto m = std::make_shared<MetricSpace>();
  m->k = MetricSpace::K::Hom;
  m->a = std::move(a);
  m->b = std::move(b);
  return m;
}
inline MSpacePtr msRescale(double r, MSpacePtr body) {
  auto m = std::make_shared<MetricSpace>();
  m->k = MetricSpace::K::Rescale;
  m->factor = r;
  m->a = std::move(body);
  return m;
}

inline std::vector<ValPtr> msEnum(const MSpacePtr& s) {
  switch (s->k) {
    case MetricSpace::K::Finite: return s->points;
    case MetricSpace::K::RealLine: {
      std::vector<ValPtr> out;
      for (double x = s->gridMin; x <= s->gridMax + 1e-12; x += s->gridStep) out.push_back(vReal(x));
      return out;
    }
    case MetricSpace::K::Rescale: return msEnum(s->a);
    case MetricSpace::K::Tensor: {
      std::vector<ValPtr> out;
      for (const auto& x : msEnum(s->a))
        for (const auto& y : msEnum(s->b)) out.push_back(vTuple({x, y}));
      return out;
    }
    case MetricSpace::K::Hom:
      throw UnsupportedDomain("cannot enumerate a metric function space");
  }
  throw MalformedTerm("unreachable");
}

inline int msFiniteIndex(const MSpacePtr& s, const ValPtr& v) {
  for (size_t i = 0; i < s->points.size(); ++i)
    if (valEq(s->points[i], v)) return static_cast<int>(i);
  throw EvalFailure("point is not in the finite carrier");
}

inline double msDist(const MSpacePtr& s, const ValPtr& x, const ValPtr& y) {
  switch (s->k) {
    case MetricSpace::K::Finite: return s->table[msFiniteIndex(s, x)][msFiniteIndex(s, y)];
    case MetricSpace::K::RealLine: return std::abs(asReal(x) - asReal(y));
    case MetricSpace::K::Rescale: return s->factor * msDist(s->a, x, y);
    case MetricSpace::K::Tensor: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      return msDist(s->a, tx[0], ty[0]) + msDist(s->b, tx[1], ty[1]);
    }
    case MetricSpace::K::Hom: {
      // sup distance over the enumerated domain
      double sup = 0;
      for (const auto& p : msEnum(s->a)) sup = std::max(sup, msDist(s->b, apply(x, p), apply(y, p)));
      return sup;
    }
  }
  throw MalformedTerm("unreachable");
}

// rescaling as an operation on spaces (collapses nested factors)
inline MSpacePtr rescale(const Rat& r, const MSpacePtr& s) {
  if (r < Rat(0)) throw MalformedTerm("negative rescale factor");
  return msRescale(toDouble(r), s);
}

// ---------------------------------------------------------------------------
// Pure predicates over a space: the space itself at Dist positions, closed
// under products and the two dependent products.
// ---------------------------------------------------------------------------

struct MetricPure;
using MetricPurePtr = std::shared_ptr<const MetricPure>;
struct MetricPure {
  enum class K { Dist, Prod, PiPoint, PiDiff };
  K k;
  MSpacePtr space;  // Dist target; Pi domain
  MetricPurePtr l, r;
};

inline MetricPurePtr mpDist(MSpacePtr s) {
  return std::make_shared<MetricPure>(MetricPure{MetricPure::K::Dist, std::move(s), nullptr, nullptr});
}
inline MetricPurePtr mpProd(MetricPurePtr a, MetricPurePtr b) {
  return std::make_shared<MetricPure>(MetricPure{MetricPure::K::Prod, nullptr, std::move(a), std::move(b)});
}
inline MetricPurePtr mpPiPoint(MSpacePtr dom, MetricPurePtr body) {
  return std::make_shared<MetricPure>(MetricPure{MetricPure::K::PiPoint, std::move(dom), std::move(body), nullptr});
}
inline MetricPurePtr mpPiDiff(MSpacePtr dom, MetricPurePtr body) {
  return std::make_shared<MetricPure>(MetricPure{MetricPure::K::PiDiff, std::move(dom), std::move(body), nullptr});
}

// adds a scalar bound to every leaf of a witness
inline ValPtr witnessAdd(const ValPtr& w, double r) {
  if (std::holds_alternative<double>(w->v)) return vReal(asReal(w) + r);
  if (std::holds_alternative<long long>(w->v)) return vReal(asReal(w) + r);
  if (auto* t = std::get_if<std::vector<ValPtr>>(&w->v)) {
    std::vector<ValPtr> out;
    for (const auto& c : *t) out.push_back(witnessAdd(c, r));
    return vTuple(out);
  }
  if (isFn(w)) return vFn([w, r](const ValPtr& x) { return witnessAdd(apply(w, x), r); });
  throw EvalFailure("not a metric witness");
}

// witness(k) >= dist for every parameter, checked by enumeration / sampling
inline bool witnessSound(const MetricPurePtr& p, const ValPtr& lhs, const ValPtr& rhs, const ValPtr& w,
                         double tol = 1e-9) {
  switch (p->k) {
    case MetricPure::K::Dist: return asReal(w) + tol >= msDist(p->space, lhs, rhs);
    case MetricPure::K::Prod: {
      const auto& t = asTuple(w);
      return witnessSound(p->l, lhs, rhs, t[0], tol) && witnessSound(p->r, lhs, rhs, t[1], tol);
    }
    case MetricPure::K::PiPoint: {
      for (const auto& z : msEnum(p->space))
        if (!witnessSound(p->l, apply(lhs, z), apply(rhs, z), apply(w, z), tol)) return false;
      return true;
    }
    case MetricPure::K::PiDiff: {
      for (const auto& x : msEnum(p->space)) {
        for (const auto& y : msEnum(p->space)) {
          double base = msDist(p->space, x, y);
          for (double extra : {0.0, 0.5}) {
            ValPtr eps = vReal(base + extra);
            ValPtr wl = apply(apply(apply(w, x), y), eps);
            if (!witnessSound(p->l, apply(apply(lhs, x), y), apply(apply(rhs, x), y), wl, tol)) return false;
          }
        }
      }
      return true;
    }
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

class MetricBackend {
 public:
  using Obj = MSpacePtr;
  using Pure = MetricPurePtr;

  std::map<std::string, MSpacePtr> bases;
  std::map<std::string, ValPtr> consts;
  std::map<std::string, ValPtr> axioms;

  bool monoidalMode() const { return true; }

  Obj objOfBase(const std::string& n) const {
    auto it = bases.find(n);
    if (it == bases.end()) throw EvalFailure("metric environment has no base space " + n);
    return it->second;
  }
  Obj product(Obj a, Obj b) const { return msTensor(std::move(a), std::move(b)); }
  Obj tensor(Obj a, Obj b) const { return msTensor(std::move(a), std::move(b)); }
  Obj exponential(Obj a, Obj b) const { return msHom(std::move(a), std::move(b)); }
  Obj rescale(const Rat& r, Obj a) const { return dtt::rescale(r, a); }

  Pure distOf(Obj o) const { return mpDist(std::move(o)); }
  Pure prodPure(Pure a, Pure b) const { return mpProd(std::move(a), std::move(b)); }
  Pure piPointPure(Obj dom, Pure body) const { return mpPiPoint(std::move(dom), std::move(body)); }
  Pure piDiffPure(Obj dom, Pure body) const { return mpPiDiff(std::move(dom), std::move(body)); }

  ValPtr constVal(const std::string& n) const {
    auto it = consts.find(n);
    if (it != consts.end()) return it->second;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) || n[0] == '-'))
      return vReal(std::stod(n));
    throw EvalFailure("metric environment has no constant " + n);
  }
  ValPtr axiomVal(const std::string& n) const {
    auto it = axioms.find(n);
    if (it == axioms.end()) throw EvalFailure("metric environment has no axiom " + n);
    return it->second;
  }

  // self-differences are the null error
  ValPtr reflVal(const Obj&, const ValPtr&) const { return vReal(0.0); }

  // the transported bound is c'(x) + r over every parameter
  template <class Req>
  ValPtr filler(Req& req) const {
    double r = asReal(req.va);
    ValPtr cx = req.branch(req.vt);
    return witnessAdd(cx, r);
  }
};

}  // namespace dtt
