#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtt/semantics.hpp"
#include "dtt/value.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Change structures: carrier, per-point change sets, oplus and ominus with
// x (+) (y (-) x) = y. Shipped carriers: integers, finite bags, explicitly
// tabulated finite structures, products and the function-space structure.
// ---------------------------------------------------------------------------

struct ChangeStructure;
using CSPtr = std::shared_ptr<const ChangeStructure>;

struct ChangeStructure {
  enum class K { Ints, Reals, Bags, Finite, Prod, Fn };
  K k;
  // Finite
  std::vector<ValPtr> points;
  // change tables: for each base point index, the list of (change label, target index)
  std::vector<std::vector<std::pair<long long, int>>> changes;
  std::vector<std::vector<long long>> ominusChoice;  // [base][target] -> change label
  bool uniqueChanges = false;
  // enumeration bounds for Ints / Reals
  long long intMin = -8, intMax = 8;
  // Prod / Fn
  CSPtr a, b;
};

inline CSPtr csInts(long long mn = -8, long long mx = 8) {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Ints;
  s->uniqueChanges = true;
  s->intMin = mn;
  s->intMax = mx;
  return s;
}
inline CSPtr csReals() {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Reals;
  s->uniqueChanges = true;
  return s;
}
inline CSPtr csBags() {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Bags;
  s->uniqueChanges = false;
  return s;
}
inline CSPtr csFinite(std::vector<ValPtr> pts, std::vector<std::vector<std::pair<long long, int>>> ch,
                      std::vector<std::vector<long long>> om, bool unique) {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Finite;
  s->points = std::move(pts);
  s->changes = std::move(ch);
  s->ominusChoice = std::move(om);
  s->uniqueChanges = unique;
  return s;
}
inline CSPtr csProd(CSPtr a, CSPtr b) {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Prod;
  s->uniqueChanges = a->uniqueChanges && b->uniqueChanges;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}
inline CSPtr csFn(CSPtr a, CSPtr b) {
  auto s = std::make_shared<ChangeStructure>();
  s->k = ChangeStructure::K::Fn;
  s->uniqueChanges = false;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

inline int csPointIndex(const CSPtr& s, const ValPtr& v) {
  for (size_t i = 0; i < s->points.size(); ++i)
    if (valEq(s->points[i], v)) return static_cast<int>(i);
  throw EvalFailure("point is not in the finite change carrier");
}

// bag changes are (removals, additions), kept disjoint
inline ValPtr bagChange(Bag removals, Bag additions) {
  for (auto it = removals.counts.begin(); it != removals.counts.end();) {
    auto jt = additions.counts.find(it->first);
    if (jt != additions.counts.end()) {
      long long c = std::min(it->second, jt->second);
      it->second -= c;
      jt->second -= c;
      if (jt->second == 0) additions.counts.erase(jt);
      if (it->second == 0) {
        it = removals.counts.erase(it);
        continue;
      }
    }
    ++it;
  }
  return vTuple({vBag(removals), vBag(additions)});
}

inline ValPtr csOplus(const CSPtr& s, const ValPtr& x, const ValPtr& dx);
inline ValPtr csOminus(const CSPtr& s, const ValPtr& target, const ValPtr& base);
inline ValPtr csNil(const CSPtr& s, const ValPtr& x) { return csOminus(s, x, x); }

inline ValPtr csOplus(const CSPtr& s, const ValPtr& x, const ValPtr& dx) {
  switch (s->k) {
    case ChangeStructure::K::Ints: return vInt(asInt(x) + asInt(dx));
    case ChangeStructure::K::Reals: return vReal(asReal(x) + asReal(dx));
    case ChangeStructure::K::Bags: {
      Bag out = asBag(x);
      const auto& t = asTuple(dx);
      for (auto& [e, n] : asBag(t[0]).counts) out.add(e, -n);
      for (auto& [e, n] : asBag(t[1]).counts) out.add(e, n);
      return vBag(out);
    }
    case ChangeStructure::K::Finite: {
      int xi = csPointIndex(s, x);
      for (const auto& [label, target] : s->changes[xi])
        if (label == asInt(dx)) return s->points[target];
      throw EvalFailure("change is not valid at this point");
    }
    case ChangeStructure::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& td = asTuple(dx);
      return vTuple({csOplus(s->a, tx[0], td[0]), csOplus(s->b, tx[1], td[1])});
    }
    case ChangeStructure::K::Fn: {
      // (f (+) phi)(x) = f(x) (+) phi(x, 0_x)
      CSPtr dom = s->a, cod = s->b;
      return vFn([dom, cod, x, dx](const ValPtr& p) {
        ValPtr nil = csNil(dom, p);
        return csOplus(cod, apply(x, p), apply(apply(dx, p), nil));
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline ValPtr csOminus(const CSPtr& s, const ValPtr& target, const ValPtr& base) {
  switch (s->k) {
    case ChangeStructure::K::Ints: return vInt(asInt(target) - asInt(base));
    case ChangeStructure::K::Reals: return vReal(asReal(target) - asReal(base));
    case ChangeStructure::K::Bags: {
      Bag rem, add;
      const Bag& t = asBag(target);
      const Bag& b = asBag(base);
      for (auto& [e, n] : b.counts) {
        long long tn = t.counts.count(e) ? t.counts.at(e) : 0;
        if (n > tn) rem.add(e, n - tn);
      }
      for (auto& [e, n] : t.counts) {
        long long bn = b.counts.count(e) ? b.counts.at(e) : 0;
        if (n > bn) add.add(e, n - bn);
      }
      return bagChange(rem, add);
    }
    case ChangeStructure::K::Finite: {
      int ti = csPointIndex(s, target), bi = csPointIndex(s, base);
      return vInt(s->ominusChoice[bi][ti]);
    }
    case ChangeStructure::K::Prod: {
      const auto& tt = asTuple(target);
      const auto& tb = asTuple(base);
      return vTuple({csOminus(s->a, tt[0], tb[0]), csOminus(s->b, tt[1], tb[1])});
    }
    case ChangeStructure::K::Fn: {
      // (f (-) g)(x, dx) = f(x (+) dx) (-) g(x)
      CSPtr dom = s->a, cod = s->b;
      return vFn([dom, cod, target, base](const ValPtr& p) {
        return vFn([dom, cod, target, base, p](const ValPtr& dp) {
          return csOminus(cod, apply(target, csOplus(dom, p, dp)), apply(base, p));
        });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline bool csIsNil(const CSPtr& s, const ValPtr& base, const ValPtr& dx) {
  switch (s->k) {
    case ChangeStructure::K::Ints: return asInt(dx) == 0;
    case ChangeStructure::K::Reals: return asReal(dx) == 0.0;
    case ChangeStructure::K::Bags: {
      const auto& t = asTuple(dx);
      return asBag(t[0]).counts.empty() && asBag(t[1]).counts.empty();
    }
    case ChangeStructure::K::Finite: return valEq(dx, csNil(s, base));
    case ChangeStructure::K::Prod: {
      const auto& tb = asTuple(base);
      const auto& td = asTuple(dx);
      return csIsNil(s->a, tb[0], td[0]) && csIsNil(s->b, tb[1], td[1]);
    }
    case ChangeStructure::K::Fn: return false;  // not decidable; composition stays explicit
  }
  return false;
}

// dx + dy based at x, with nil changes acting as strict units
inline ValPtr csPlus(const CSPtr& s, const ValPtr& x, const ValPtr& dx, const ValPtr& dy) {
  if (csIsNil(s, x, dx)) return dy;
  ValPtr mid = csOplus(s, x, dx);
  if (csIsNil(s, mid, dy)) return dx;
  return csOminus(s, csOplus(s, mid, dy), x);
}

// (-) dx: the reverse change, defined when x (+) dx = y
inline ValPtr csNegate(const CSPtr& s, const ValPtr& x, const ValPtr& dx) {
  ValPtr y = csOplus(s, x, dx);
  return csOminus(s, x, y);
}

// the change derivative df(x, dx) = f(x (+) dx) (-) f(x)
inline ValPtr changeDerivative(const CSPtr& cod, const CSPtr& dom, const ValPtr& f, const ValPtr& x,
                               const ValPtr& dx) {
  return csOminus(cod, apply(f, csOplus(dom, x, dx)), apply(f, x));
}

inline std::vector<ValPtr> csEnum(const CSPtr& s) {
  switch (s->k) {
    case ChangeStructure::K::Ints: {
      std::vector<ValPtr> out;
      for (long long i = s->intMin; i <= s->intMax; ++i) out.push_back(vInt(i));
      return out;
    }
    case ChangeStructure::K::Finite: return s->points;
    case ChangeStructure::K::Prod: {
      std::vector<ValPtr> out;
      for (const auto& x : csEnum(s->a))
        for (const auto& y : csEnum(s->b)) out.push_back(vTuple({x, y}));
      return out;
    }
    default: throw UnsupportedDomain("change carrier is not enumerable");
  }
}

// valid changes at a base point, for exhaustive axiom checks
inline std::vector<ValPtr> csEnumChangesAt(const CSPtr& s, const ValPtr& x) {
  switch (s->k) {
    case ChangeStructure::K::Ints: {
      std::vector<ValPtr> out;
      for (long long i = s->intMin; i <= s->intMax; ++i) out.push_back(vInt(i - asInt(x)));
      return out;
    }
    case ChangeStructure::K::Finite: {
      std::vector<ValPtr> out;
      for (const auto& [label, target] : s->changes[csPointIndex(s, x)]) out.push_back(vInt(label));
      return out;
    }
    case ChangeStructure::K::Prod: {
      const auto& tx = asTuple(x);
      std::vector<ValPtr> out;
      for (const auto& da : csEnumChangesAt(s->a, tx[0]))
        for (const auto& db : csEnumChangesAt(s->b, tx[1])) out.push_back(vTuple({da, db}));
      return out;
    }
    default: throw UnsupportedDomain("change set is not enumerable");
  }
}

// ---------------------------------------------------------------------------
// Pure predicates
// ---------------------------------------------------------------------------

struct CsPure;
using CsPurePtr = std::shared_ptr<const CsPure>;
struct CsPure {
  enum class K { Dist, Prod, PiPoint, PiDiff };
  K k;
  CSPtr space;  // Dist target; Pi domain
  CsPurePtr l, r;
};

inline CsPurePtr cpDist(CSPtr s) {
  return std::make_shared<CsPure>(CsPure{CsPure::K::Dist, std::move(s), nullptr, nullptr});
}
inline CsPurePtr cpProd(CsPurePtr a, CsPurePtr b) {
  return std::make_shared<CsPure>(CsPure{CsPure::K::Prod, nullptr, std::move(a), std::move(b)});
}
inline CsPurePtr cpPiPoint(CSPtr dom, CsPurePtr body) {
  return std::make_shared<CsPure>(CsPure{CsPure::K::PiPoint, std::move(dom), std::move(body), nullptr});
}
inline CsPurePtr cpPiDiff(CSPtr dom, CsPurePtr body) {
  return std::make_shared<CsPure>(CsPure{CsPure::K::PiDiff, std::move(dom), std::move(body), nullptr});
}

// the target change structure of a Dist-shaped pure predicate
inline CSPtr csTargetOf(const CsPurePtr& p) {
  if (p->k == CsPure::K::Dist) return p->space;
  throw UnsupportedDomain("change filler needs a distance-shaped motive");
}

// soundness of a change value: l (+) w = r
inline bool csSound(const CsPurePtr& p, const ValPtr& l, const ValPtr& r, const ValPtr& w,
                    double tol = 1e-9) {
  switch (p->k) {
    case CsPure::K::Dist: return valEq(csOplus(p->space, l, w), r, tol);
    case CsPure::K::Prod: {
      const auto& tw = asTuple(w);
      const auto& tl = asTuple(l);
      const auto& tr = asTuple(r);
      return csSound(p->l, tl[0], tr[0], tw[0], tol) && csSound(p->r, tl[1], tr[1], tw[1], tol);
    }
    case CsPure::K::PiPoint: {
      for (const auto& z : csEnum(p->space))
        if (!csSound(p->l, apply(l, z), apply(r, z), apply(w, z), tol)) return false;
      return true;
    }
    case CsPure::K::PiDiff: {
      for (const auto& x : csEnum(p->space))
        for (const auto& dx : csEnumChangesAt(p->space, x)) {
          ValPtr y = csOplus(p->space, x, dx);
          ValPtr wv = apply(apply(apply(w, x), y), dx);
          if (!csSound(p->l, apply(apply(l, x), y), apply(apply(r, x), y), wv, tol)) return false;
        }
      return true;
    }
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

class ChangeBackend {
 public:
  using Obj = CSPtr;
  using Pure = CsPurePtr;

  std::map<std::string, CSPtr> bases;
  std::map<std::string, ValPtr> consts;
  std::map<std::string, ValPtr> axioms;

  Obj objOfBase(const std::string& n) const {
    auto it = bases.find(n);
    if (it == bases.end()) throw EvalFailure("change environment has no base structure " + n);
    return it->second;
  }
  Obj product(Obj a, Obj b) const { return csProd(std::move(a), std::move(b)); }
  Obj tensor(Obj a, Obj b) const { return csProd(std::move(a), std::move(b)); }
  Obj exponential(Obj a, Obj b) const { return csFn(std::move(a), std::move(b)); }
  Obj rescale(const Rat&, Obj) const {
    throw UnsupportedDomain("the change backend is cartesian; it has no rescaling");
  }

  Pure distOf(Obj o) const { return cpDist(std::move(o)); }
  Pure prodPure(Pure a, Pure b) const { return cpProd(std::move(a), std::move(b)); }
  Pure piPointPure(Obj dom, Pure body) const { return cpPiPoint(std::move(dom), std::move(body)); }
  Pure piDiffPure(Obj dom, Pure body) const { return cpPiDiff(std::move(dom), std::move(body)); }

  ValPtr constVal(const std::string& n) const {
    auto it = consts.find(n);
    if (it != consts.end()) return it->second;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) || n[0] == '-'))
      return vInt(std::stoll(n));
    throw EvalFailure("change environment has no constant " + n);
  }
  ValPtr axiomVal(const std::string& n) const {
    auto it = axioms.find(n);
    if (it == axioms.end()) throw EvalFailure("change environment has no axiom " + n);
    return it->second;
  }

  // self-differences are nil changes (for functions this is the derivative)
  ValPtr reflVal(const Obj& o, const ValPtr& v) const { return csNil(o, v); }

  // j((x,x'),dx) = df((x,x'), (0, -dx)) + c'(x) + dg((x,x), (0, dx)),
  // composed at f(x,x') with nil changes as strict units
  template <class Req>
  ValPtr filler(Req& req) const {
    CSPtr target = csTargetOf(req.target);
    const ValPtr& x = req.vt;
    const ValPtr& x2 = req.vu;
    ValPtr fxx = req.fIdx(x, x);
    ValPtr fxx2 = req.fIdx(x, x2);
    ValPtr gxx = req.gIdx(x, x);
    ValPtr gxx2 = req.gIdx(x, x2);
    ValPtr d1 = csOminus(target, fxx, fxx2);  // df((x,x'), (0, -dx))
    ValPtr d2 = req.branch(x);                // c'(x)
    ValPtr d3 = csOminus(target, gxx2, gxx);  // dg((x,x), (0, dx))
    // left-to-right composition based at f(x,x')
    ValPtr base = fxx2;
    ValPtr cur = base;
    ValPtr acc;
    bool accNil = true;
    for (const ValPtr& d : {d1, d2, d3}) {
      if (csIsNil(target, cur, d)) continue;
      cur = csOplus(target, cur, d);
      if (accNil) {
        acc = d;
        accNil = false;
      } else {
        acc = csOminus(target, cur, base);
      }
    }
    return accNil ? csNil(target, base) : acc;
  }
};

}  // namespace dtt
