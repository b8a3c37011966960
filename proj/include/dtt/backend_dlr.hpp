#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dtt/semantics.hpp"
#include "dtt/value.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Finite complete lattices given by an explicit order.
// ---------------------------------------------------------------------------

struct FinLattice {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq;
  std::vector<std::vector<int>> joinTab, meetTab;
  int bottom = 0, top = 0;

  int size() const { return static_cast<int>(names.size()); }

  // builds join/meet tables; throws if some pair has no lub or glb
  void finalize() {
    int n = size();
    joinTab.assign(n, std::vector<int>(n, -1));
    meetTab.assign(n, std::vector<int>(n, -1));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        int lub = -1, glb = -1;
        for (int c = 0; c < n; ++c) {
          if (leq[a][c] && leq[b][c] && (lub < 0 || leq[c][lub])) lub = c;
          if (leq[c][a] && leq[c][b] && (glb < 0 || leq[glb][c])) glb = c;
        }
        // verify the candidates really are bounds below/above all others
        for (int c = 0; c < n; ++c) {
          if (leq[a][c] && leq[b][c] && lub >= 0 && !leq[lub][c]) lub = -2;
          if (leq[c][a] && leq[c][b] && glb >= 0 && !leq[c][glb]) glb = -2;
        }
        if (lub < 0 || glb < 0) throw MalformedTerm("order table is not a lattice");
        joinTab[a][b] = lub;
        meetTab[a][b] = glb;
      }
    bottom = 0;
    top = 0;
    for (int c = 0; c < n; ++c) {
      bool isBot = true, isTop = true;
      for (int d = 0; d < n; ++d) {
        isBot = isBot && leq[c][d];
        isTop = isTop && leq[d][c];
      }
      if (isBot) bottom = c;
      if (isTop) top = c;
    }
  }
};
using FinLatticePtr = std::shared_ptr<const FinLattice>;

// ---------------------------------------------------------------------------
// DLR spaces
// ---------------------------------------------------------------------------

struct DLRSpace;
using DLRSpacePtr = std::shared_ptr<const DLRSpace>;

struct DLRSpace {
  enum class K { Finite, Euclid, Prod, Exp };
  K k;
  // Finite
  std::vector<ValPtr> points;
  FinLatticePtr lattice;
  std::set<std::tuple<int, int, int>> rel;  // (point, lattice elem, point)
  // Euclid
  double gridMin = 0, gridMax = 0, gridStep = 1;
  // Prod / Exp
  DLRSpacePtr a, b;
};

inline DLRSpacePtr dlrFinite(std::vector<ValPtr> pts, FinLatticePtr lat,
                             std::set<std::tuple<int, int, int>> rel) {
  auto s = std::make_shared<DLRSpace>();
  s->k = DLRSpace::K::Finite;
  s->points = std::move(pts);
  s->lattice = std::move(lat);
  s->rel = std::move(rel);
  return s;
}
inline DLRSpacePtr dlrEuclid(double mn, double mx, double step) {
  auto s = std::make_shared<DLRSpace>();
  s->k = DLRSpace::K::Euclid;
  s->gridMin = mn;
  s->gridMax = mx;
  s->gridStep = step;
  return s;
}
inline DLRSpacePtr dlrProd(DLRSpacePtr a, DLRSpacePtr b) {
  auto s = std::make_shared<DLRSpace>();
  s->k = DLRSpace::K::Prod;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}
inline DLRSpacePtr dlrExp(DLRSpacePtr a, DLRSpacePtr b) {
  auto s = std::make_shared<DLRSpace>();
  s->k = DLRSpace::K::Exp;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

inline int dlrPointIndex(const DLRSpacePtr& s, const ValPtr& v) {
  for (size_t i = 0; i < s->points.size(); ++i)
    if (valEq(s->points[i], v)) return static_cast<int>(i);
  throw EvalFailure("point is not in the finite DLR carrier");
}

inline std::vector<ValPtr> dlrEnum(const DLRSpacePtr& s) {
  switch (s->k) {
    case DLRSpace::K::Finite: return s->points;
    case DLRSpace::K::Euclid: {
      std::vector<ValPtr> out;
      for (double x = s->gridMin; x <= s->gridMax + 1e-12; x += s->gridStep) out.push_back(vReal(x));
      return out;
    }
    case DLRSpace::K::Prod: {
      std::vector<ValPtr> out;
      for (const auto& x : dlrEnum(s->a))
        for (const auto& y : dlrEnum(s->b)) out.push_back(vTuple({x, y}));
      return out;
    }
    case DLRSpace::K::Exp: {
      // all functions between the (small) finite carriers, as lookup closures
      std::vector<ValPtr> dom = dlrEnum(s->a);
      std::vector<ValPtr> cod = dlrEnum(s->b);
      size_t n = dom.size();
      std::vector<ValPtr> out;
      std::vector<size_t> pick(n, 0);
      while (true) {
        auto table = std::make_shared<std::vector<ValPtr>>();
        for (size_t i = 0; i < n; ++i) table->push_back(cod[pick[i]]);
        DLRSpacePtr domSp = s->a;
        out.push_back(vFn([table, domSp, dom](const ValPtr& x) {
          for (size_t i = 0; i < dom.size(); ++i)
            if (valEq(dom[i], x)) return (*table)[i];
          throw EvalFailure("function argument outside the finite carrier");
        }));
        size_t i = 0;
        while (i < n && ++pick[i] == cod.size()) pick[i++] = 0;
        if (i == n) break;
      }
      return out;
    }
  }
  throw MalformedTerm("unreachable");
}

// -- lattice of a space -------------------------------------------------------

inline ValPtr latBottom(const DLRSpacePtr& s);
inline ValPtr latTop(const DLRSpacePtr& s);
inline ValPtr latJoin(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y);
inline ValPtr latMeet(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y);
inline bool latLeq(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y);
inline std::vector<ValPtr> latEnum(const DLRSpacePtr& s);
inline bool rhoHolds(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& eps, const ValPtr& y);
inline bool rhoTilde(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& eps, const ValPtr& y);

inline ValPtr latBottom(const DLRSpacePtr& s) {
  switch (s->k) {
    case DLRSpace::K::Finite: return vInt(s->lattice->bottom);
    case DLRSpace::K::Euclid: return vReal(0.0);
    case DLRSpace::K::Prod: return vTuple({latBottom(s->a), latBottom(s->b)});
    case DLRSpace::K::Exp: {
      DLRSpacePtr cod = s->b;
      return vFn([cod](const ValPtr&) {
        return vFn([cod](const ValPtr&) { return vFn([cod](const ValPtr&) { return latBottom(cod); }); });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline ValPtr latTop(const DLRSpacePtr& s) {
  switch (s->k) {
    case DLRSpace::K::Finite: return vInt(s->lattice->top);
    case DLRSpace::K::Euclid: return vReal(std::numeric_limits<double>::infinity());
    case DLRSpace::K::Prod: return vTuple({latTop(s->a), latTop(s->b)});
    case DLRSpace::K::Exp: {
      DLRSpacePtr cod = s->b;
      return vFn([cod](const ValPtr&) {
        return vFn([cod](const ValPtr&) { return vFn([cod](const ValPtr&) { return latTop(cod); }); });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline ValPtr latJoin(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite:
      return vInt(s->lattice->joinTab[asInt(x)][asInt(y)]);
    case DLRSpace::K::Euclid: return vReal(std::max(asReal(x), asReal(y)));
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      return vTuple({latJoin(s->a, tx[0], ty[0]), latJoin(s->b, tx[1], ty[1])});
    }
    case DLRSpace::K::Exp: {
      DLRSpacePtr sp = s;
      return vFn([sp, x, y](const ValPtr& p) {
        return vFn([sp, x, y, p](const ValPtr& q) {
          return vFn([sp, x, y, p, q](const ValPtr& d) {
            ValPtr xl = apply(apply(apply(x, p), q), d);
            ValPtr yl = apply(apply(apply(y, p), q), d);
            return latJoin(sp->b, xl, yl);
          });
        });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline ValPtr latMeet(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite:
      return vInt(s->lattice->meetTab[asInt(x)][asInt(y)]);
    case DLRSpace::K::Euclid: return vReal(std::min(asReal(x), asReal(y)));
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      return vTuple({latMeet(s->a, tx[0], ty[0]), latMeet(s->b, tx[1], ty[1])});
    }
    case DLRSpace::K::Exp: {
      DLRSpacePtr sp = s;
      return vFn([sp, x, y](const ValPtr& p) {
        return vFn([sp, x, y, p](const ValPtr& q) {
          return vFn([sp, x, y, p, q](const ValPtr& d) {
            ValPtr xl = apply(apply(apply(x, p), q), d);
            ValPtr yl = apply(apply(apply(y, p), q), d);
            return latMeet(sp->b, xl, yl);
          });
        });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline bool latLeq(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite: return s->lattice->leq[asInt(x)][asInt(y)];
    case DLRSpace::K::Euclid: return asReal(x) <= asReal(y) + 1e-12;
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      return latLeq(s->a, tx[0], ty[0]) && latLeq(s->b, tx[1], ty[1]);
    }
    case DLRSpace::K::Exp: {
      for (const auto& p : dlrEnum(s->a))
        for (const auto& q : dlrEnum(s->a))
          for (const auto& d : latEnum(s->a)) {
            ValPtr xl = apply(apply(apply(x, p), q), d);
            ValPtr yl = apply(apply(apply(y, p), q), d);
            if (!latLeq(s->b, xl, yl)) return false;
          }
      return true;
    }
  }
  throw MalformedTerm("unreachable");
}

inline std::vector<ValPtr> latEnum(const DLRSpacePtr& s) {
  switch (s->k) {
    case DLRSpace::K::Finite: {
      std::vector<ValPtr> out;
      for (int i = 0; i < s->lattice->size(); ++i) out.push_back(vInt(i));
      return out;
    }
    case DLRSpace::K::Euclid: throw UnsupportedDomain("the euclidean error lattice is not enumerable");
    case DLRSpace::K::Prod: {
      std::vector<ValPtr> out;
      for (const auto& x : latEnum(s->a))
        for (const auto& y : latEnum(s->b)) out.push_back(vTuple({x, y}));
      return out;
    }
    case DLRSpace::K::Exp: {
      // all functions (p, q, d) -> cod lattice over the finite triple domain
      std::vector<std::tuple<ValPtr, ValPtr, ValPtr>> domTriples;
      for (const auto& p : dlrEnum(s->a))
        for (const auto& q : dlrEnum(s->a))
          for (const auto& d : latEnum(s->a)) domTriples.emplace_back(p, q, d);
      std::vector<ValPtr> codVals = latEnum(s->b);
      size_t n = domTriples.size();
      std::vector<size_t> pick(n, 0);
      std::vector<ValPtr> out;
      while (true) {
        auto table = std::make_shared<std::vector<std::pair<std::tuple<ValPtr, ValPtr, ValPtr>, ValPtr>>>();
        for (size_t i = 0; i < n; ++i) table->push_back({domTriples[i], codVals[pick[i]]});
        out.push_back(vFn([table](const ValPtr& p) {
          return vFn([table, p](const ValPtr& q) {
            return vFn([table, p, q](const ValPtr& d) {
              for (const auto& [key, v] : *table) {
                if (valEq(std::get<0>(key), p) && valEq(std::get<1>(key), q) && valEq(std::get<2>(key), d))
                  return v;
              }
              throw EvalFailure("triple outside the enumerated domain");
            });
          });
        }));
        size_t i = 0;
        while (i < n && ++pick[i] == codVals.size()) pick[i++] = 0;
        if (i == n) break;
      }
      return out;
    }
  }
  throw MalformedTerm("unreachable");
}

inline bool rhoHolds(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& eps, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite:
      return s->rel.count({dlrPointIndex(s, x), static_cast<int>(asInt(eps)), dlrPointIndex(s, y)}) > 0;
    case DLRSpace::K::Euclid: return asReal(eps) + 1e-12 >= std::abs(asReal(x) - asReal(y));
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      const auto& te = asTuple(eps);
      return rhoHolds(s->a, tx[0], te[0], ty[0]) && rhoHolds(s->b, tx[1], te[1], ty[1]);
    }
    case DLRSpace::K::Exp: {
      // the four crossed conditions of the exponential relation
      for (const auto& p : dlrEnum(s->a))
        for (const auto& q : dlrEnum(s->a))
          for (const auto& d : latEnum(s->a)) {
            if (!rhoHolds(s->a, p, d, q)) continue;
            ValPtr m = apply(apply(apply(eps, p), q), d);
            ValPtr xp = apply(x, p), xq = apply(x, q);
            ValPtr yp = apply(y, p), yq = apply(y, q);
            if (!rhoHolds(s->b, xp, m, xq)) return false;
            if (!rhoHolds(s->b, xp, m, yq)) return false;
            if (!rhoHolds(s->b, yp, m, xq)) return false;
            if (!rhoHolds(s->b, yp, m, yq)) return false;
          }
      return true;
    }
  }
  throw MalformedTerm("unreachable");
}

// ||x,y|| = inf rho~(x,y); the flag reports an empty difference set
struct DistResult {
  ValPtr v;
  bool empty = false;
};

inline DistResult distFn(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite: {
      int xi = dlrPointIndex(s, x), yi = dlrPointIndex(s, y);
      bool any = false;
      int acc = s->lattice->top;
      for (const auto& [a, l, b] : s->rel) {
        if (a == xi && b == yi) {
          acc = any ? s->lattice->meetTab[acc][l] : l;
          any = true;
        }
      }
      return {vInt(acc), !any};
    }
    case DLRSpace::K::Euclid: return {vReal(std::abs(asReal(x) - asReal(y))), false};
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      DistResult l = distFn(s->a, tx[0], ty[0]);
      DistResult r = distFn(s->b, tx[1], ty[1]);
      return {vTuple({l.v, r.v}), l.empty || r.empty};
    }
    case DLRSpace::K::Exp: {
      // pointwise least auxiliary map validating the four conditions
      DLRSpacePtr sp = s;
      ValPtr f = x, g = y;
      return {vFn([sp, f, g](const ValPtr& p) {
                return vFn([sp, f, g, p](const ValPtr& q) {
                  return vFn([sp, f, g, p, q](const ValPtr& d) {
                    if (!rhoHolds(sp->a, p, d, q)) return latBottom(sp->b);
                    ValPtr fp = apply(f, p), fq = apply(f, q);
                    ValPtr gp = apply(g, p), gq = apply(g, q);
                    bool any = false;
                    ValPtr acc = latTop(sp->b);
                    for (const auto& m : latEnum(sp->b)) {
                      bool ok = rhoTilde(sp->b, fp, m, fq) && rhoTilde(sp->b, fp, m, gq) &&
                                rhoTilde(sp->b, gp, m, fq) && rhoTilde(sp->b, gp, m, gq);
                      if (ok) {
                        acc = any ? latMeet(sp->b, acc, m) : m;
                        any = true;
                      }
                    }
                    return acc;
                  });
                });
              }),
              false};
    }
  }
  throw MalformedTerm("unreachable");
}

// membership in the inflated relation: exists delta <= eps with rho(x,delta,y)
inline bool rhoTilde(const DLRSpacePtr& s, const ValPtr& x, const ValPtr& eps, const ValPtr& y) {
  switch (s->k) {
    case DLRSpace::K::Finite: {
      int xi = dlrPointIndex(s, x), yi = dlrPointIndex(s, y);
      for (const auto& [a, l, b] : s->rel)
        if (a == xi && b == yi && s->lattice->leq[l][asInt(eps)]) return true;
      return false;
    }
    case DLRSpace::K::Euclid: return asReal(eps) + 1e-12 >= std::abs(asReal(x) - asReal(y));
    case DLRSpace::K::Prod: {
      const auto& tx = asTuple(x);
      const auto& ty = asTuple(y);
      const auto& te = asTuple(eps);
      return rhoTilde(s->a, tx[0], te[0], ty[0]) && rhoTilde(s->b, tx[1], te[1], ty[1]);
    }
    case DLRSpace::K::Exp: {
      for (const auto& d : latEnum(s)) {
        if (!latLeq(s, d, eps)) continue;
        if (rhoHolds(s, x, d, y)) return true;
      }
      return false;
    }
  }
  throw MalformedTerm("unreachable");
}

// separatedness: ||i|| in rho~(i, j) implies i = j (finite spaces)
inline bool dlrSeparated(const DLRSpacePtr& s) {
  if (s->k != DLRSpace::K::Finite) return true;
  for (size_t i = 0; i < s->points.size(); ++i) {
    DistResult sd = distFn(s, s->points[i], s->points[i]);
    if (sd.empty) continue;
    for (size_t j = 0; j < s->points.size(); ++j) {
      if (i == j) continue;
      if (rhoTilde(s, s->points[i], sd.v, s->points[j])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Pure predicates and their value-level operations
// ---------------------------------------------------------------------------

struct DlrPure;
using DlrPurePtr = std::shared_ptr<const DlrPure>;
struct DlrPure {
  enum class K { Dist, Prod, PiPoint, PiDiff };
  K k;
  DLRSpacePtr space;  // Dist target; Pi domain
  DlrPurePtr l, r;
};

inline DlrPurePtr dpDist(DLRSpacePtr s) {
  return std::make_shared<DlrPure>(DlrPure{DlrPure::K::Dist, std::move(s), nullptr, nullptr});
}
inline DlrPurePtr dpProd(DlrPurePtr a, DlrPurePtr b) {
  return std::make_shared<DlrPure>(DlrPure{DlrPure::K::Prod, nullptr, std::move(a), std::move(b)});
}
inline DlrPurePtr dpPiPoint(DLRSpacePtr dom, DlrPurePtr body) {
  return std::make_shared<DlrPure>(DlrPure{DlrPure::K::PiPoint, std::move(dom), std::move(body), nullptr});
}
inline DlrPurePtr dpPiDiff(DLRSpacePtr dom, DlrPurePtr body) {
  return std::make_shared<DlrPure>(DlrPure{DlrPure::K::PiDiff, std::move(dom), std::move(body), nullptr});
}

inline ValPtr pureDist(const DlrPurePtr& p, const ValPtr& a, const ValPtr& b) {
  switch (p->k) {
    case DlrPure::K::Dist: return distFn(p->space, a, b).v;
    case DlrPure::K::Prod: {
      const auto& ta = asTuple(a);
      const auto& tb = asTuple(b);
      return vTuple({pureDist(p->l, ta[0], tb[0]), pureDist(p->r, ta[1], tb[1])});
    }
    case DlrPure::K::PiPoint: {
      DlrPurePtr body = p->l;
      return vFn([body, a, b](const ValPtr& z) { return pureDist(body, apply(a, z), apply(b, z)); });
    }
    case DlrPure::K::PiDiff: {
      DlrPurePtr body = p->l;
      return vFn([body, a, b](const ValPtr& x) {
        return vFn([body, a, b, x](const ValPtr& y) {
          return vFn([body, a, b, x, y](const ValPtr&) {
            return pureDist(body, apply(apply(a, x), y), apply(apply(b, x), y));
          });
        });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

inline ValPtr pureJoin(const DlrPurePtr& p, const ValPtr& a, const ValPtr& b) {
  switch (p->k) {
    case DlrPure::K::Dist: return latJoin(p->space, a, b);
    case DlrPure::K::Prod: {
      const auto& ta = asTuple(a);
      const auto& tb = asTuple(b);
      return vTuple({pureJoin(p->l, ta[0], tb[0]), pureJoin(p->r, ta[1], tb[1])});
    }
    case DlrPure::K::PiPoint: {
      DlrPurePtr body = p->l;
      return vFn([body, a, b](const ValPtr& z) { return pureJoin(body, apply(a, z), apply(b, z)); });
    }
    case DlrPure::K::PiDiff: {
      DlrPurePtr body = p->l;
      return vFn([body, a, b](const ValPtr& x) {
        return vFn([body, a, b, x](const ValPtr& y) {
          return vFn([body, a, b, x, y](const ValPtr& e) {
            ValPtr av = apply(apply(apply(a, x), y), e);
            ValPtr bv = apply(apply(apply(b, x), y), e);
            return pureJoin(body, av, bv);
          });
        });
      });
    }
  }
  throw MalformedTerm("unreachable");
}

// membership of a witness in the interpreted predicate at (l, r)
inline bool pureSound(const DlrPurePtr& p, const ValPtr& l, const ValPtr& r, const ValPtr& w) {
  switch (p->k) {
    case DlrPure::K::Dist: return rhoTilde(p->space, l, w, r);
    case DlrPure::K::Prod: {
      const auto& tw = asTuple(w);
      const auto& tl = asTuple(l);
      const auto& tr = asTuple(r);
      return pureSound(p->l, tl[0], tr[0], tw[0]) && pureSound(p->r, tl[1], tr[1], tw[1]);
    }
    case DlrPure::K::PiPoint: {
      for (const auto& z : dlrEnum(p->space))
        if (!pureSound(p->l, apply(l, z), apply(r, z), apply(w, z))) return false;
      return true;
    }
    case DlrPure::K::PiDiff: {
      for (const auto& x : dlrEnum(p->space))
        for (const auto& y : dlrEnum(p->space))
          for (const auto& e : latEnum(p->space)) {
            if (!rhoHolds(p->space, x, e, y)) continue;
            ValPtr wv = apply(apply(apply(w, x), y), e);
            if (!pureSound(p->l, apply(apply(l, x), y), apply(apply(r, x), y), wv)) return false;
          }
      return true;
    }
  }
  throw MalformedTerm("unreachable");
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

class DlrBackend {
 public:
  using Obj = DLRSpacePtr;
  using Pure = DlrPurePtr;

  std::map<std::string, DLRSpacePtr> bases;
  std::map<std::string, ValPtr> consts;
  std::map<std::string, ValPtr> axioms;

  Obj objOfBase(const std::string& n) const {
    auto it = bases.find(n);
    if (it == bases.end()) throw EvalFailure("dlr environment has no base space " + n);
    return it->second;
  }
  Obj product(Obj a, Obj b) const { return dlrProd(std::move(a), std::move(b)); }
  Obj tensor(Obj a, Obj b) const { return dlrProd(std::move(a), std::move(b)); }
  Obj exponential(Obj a, Obj b) const { return dlrExp(std::move(a), std::move(b)); }
  Obj rescale(const Rat&, Obj) const {
    throw UnsupportedDomain("the dlr backend is cartesian; it has no rescaling");
  }

  Pure distOf(Obj o) const { return dpDist(std::move(o)); }
  Pure prodPure(Pure a, Pure b) const { return dpProd(std::move(a), std::move(b)); }
  Pure piPointPure(Obj dom, Pure body) const { return dpPiPoint(std::move(dom), std::move(body)); }
  Pure piDiffPure(Obj dom, Pure body) const { return dpPiDiff(std::move(dom), std::move(body)); }

  ValPtr constVal(const std::string& n) const {
    auto it = consts.find(n);
    if (it != consts.end()) return it->second;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) || n[0] == '-'))
      return vReal(std::stod(n));
    throw EvalFailure("dlr environment has no constant " + n);
  }
  ValPtr axiomVal(const std::string& n) const {
    auto it = axioms.find(n);
    if (it == axioms.end()) throw EvalFailure("dlr environment has no axiom " + n);
    return it->second;
  }

  // the self-difference is the self-distance ||v||
  ValPtr reflVal(const Obj& o, const ValPtr& v) const { return distFn(o, v, v).v; }

  // j((x,y),eps) = sup{ c'(x), ||f(x,z), g(x,z)|| : z in carrier, rho(x,eps,z) }
  template <class Req>
  ValPtr filler(Req& req) const {
    ValPtr acc = req.branch(req.vt);
    const Obj& carrier = req.interp.type(req.carrierTy);
    for (const auto& z : dlrEnum(carrier)) {
      if (!rhoHolds(carrier, req.vt, req.va, z)) continue;
      ValPtr d = pureDist(req.target, req.fIdx(req.vt, z), req.gIdx(req.vt, z));
      acc = pureJoin(req.target, acc, d);
    }
    return acc;
  }
};

// Reference enumeration of the same formula, kept deliberately naive and
// separate from the backend so the two paths can be compared.
inline ValPtr dlrFillerBruteForce(const DLRSpacePtr& carrier, const DLRSpacePtr& target,
                                  const std::function<ValPtr(const ValPtr&, const ValPtr&)>& f,
                                  const std::function<ValPtr(const ValPtr&, const ValPtr&)>& g,
                                  const std::function<ValPtr(const ValPtr&)>& cPrime, const ValPtr& x,
                                  const ValPtr& eps) {
  std::vector<ValPtr> candidates;
  candidates.push_back(cPrime(x));
  for (const auto& z : dlrEnum(carrier)) {
    if (!rhoHolds(carrier, x, eps, z)) continue;
    ValPtr fa = f(x, z), gb = g(x, z);
    // inf of the difference set by scanning the whole lattice
    bool any = false;
    ValPtr best = latTop(target);
    for (const auto& m : latEnum(target)) {
      if (!rhoTilde(target, fa, m, gb)) continue;
      best = any ? latMeet(target, best, m) : m;
      any = true;
    }
    candidates.push_back(best);
  }
  ValPtr acc = candidates[0];
  for (size_t i = 1; i < candidates.size(); ++i) acc = latJoin(target, acc, candidates[i]);
  return acc;
}

}  // namespace dtt
