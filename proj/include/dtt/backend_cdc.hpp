#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtt/poly.hpp"
#include "dtt/semantics.hpp"
#include "dtt/value.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Objects: Euclidean spaces R^n, plus formal exponentials for the
// higher-order layer (whose elements stay symbolic closures).
// ---------------------------------------------------------------------------

struct CdcObj_;
using CdcObjPtr = std::shared_ptr<const CdcObj_>;
struct CdcObj_ {
  bool fn = false;  // exponential marker
  int dim = 0;      // meaningful when !fn
  CdcObjPtr a, b;   // exponential dom/cod
};

inline CdcObjPtr cdcEuclid(int n) { return std::make_shared<CdcObj_>(CdcObj_{false, n, nullptr, nullptr}); }
inline CdcObjPtr cdcExp(CdcObjPtr a, CdcObjPtr b) {
  return std::make_shared<CdcObj_>(CdcObj_{true, 0, std::move(a), std::move(b)});
}

// adapts a closed (dim-0) polynomial value to an ambient domain dimension
inline PolyArrow cdcAt(const PolyArrow& p, int dom) {
  if (p.domDim == dom) return p;
  if (p.domDim == 0) {
    PolyArrow out{dom, p.codDim, {}};
    for (const Poly& c : p.comps) out.comps.push_back(c.subst({}, dom));
    return out;
  }
  throw EvalFailure("polynomial value over the wrong domain");
}

// flattens a (possibly tupled) polynomial value into one arrow over `dom` dims
inline PolyArrow cdcFlatten(const ValPtr& v, int dom) {
  if (isPolyVal(v)) return cdcAt(asPoly(v), dom);
  if (auto* t = std::get_if<std::vector<ValPtr>>(&v->v)) {
    PolyArrow acc{dom, 0, {}};
    for (const auto& c : *t) {
      PolyArrow pc = cdcFlatten(c, dom);
      acc = pairArrow(acc, pc);
    }
    return acc;
  }
  throw EvalFailure("value is not polynomial");
}

// ---------------------------------------------------------------------------
// Pure predicates: finite lists of value objects (the paper's Z^n slots)
// ---------------------------------------------------------------------------

struct CdcPure {
  std::vector<CdcObjPtr> comps;
};

// ---------------------------------------------------------------------------
// Axioms D1-D7 and the curry law, checked as exact polynomial identities.
// ---------------------------------------------------------------------------

struct AxiomReport {
  std::vector<std::pair<std::string, bool>> results;
  bool allOk = true;
  std::string witness;

  void record(const std::string& name, bool ok, const std::string& detail = "") {
    results.push_back({name, ok});
    if (!ok) {
      allOk = false;
      if (witness.empty()) witness = name + (detail.empty() ? "" : (": " + detail));
    }
  }
};

// partial derivative in one block of inputs: for f over dims [pre | blk | post],
// produce the arrow over [blk(direction) | pre | blk | post] differentiating in blk only
inline PolyArrow cdcPartialBlock(const PolyArrow& f, int pre, int blk) {
  int d = f.domDim;
  int outDim = blk + d;
  std::vector<Poly> reindexed;  // original inputs live at positions blk..blk+d-1
  for (int i = 0; i < d; ++i) reindexed.push_back(Poly::var(outDim, blk + i));
  PolyArrow out{outDim, f.codDim, {}};
  for (const Poly& p : f.comps) {
    Poly acc = Poly::zero(outDim);
    for (int i = 0; i < blk; ++i) {
      Poly dp = p.partial(pre + i).subst(reindexed, outDim);
      acc = acc + dp * Poly::var(outDim, i);
    }
    out.comps.push_back(acc);
  }
  return out;
}

inline AxiomReport checkAxioms(const PolyArrow& f, const PolyArrow& g) {
  AxiomReport rep;
  int d = f.domDim, c = f.codDim;

  // D1: additivity of the operator
  {
    bool ok = true;
    if (g.domDim == d && g.codDim == c) ok = cdcDerive(f + g) == cdcDerive(f) + cdcDerive(g);
    bool okZero = cdcDerive(PolyArrow::zero(d, c)) == PolyArrow::zero(2 * d, c);
    rep.record("D1", ok && okZero);
  }

  // D2: additivity in the direction
  {
    PolyArrow df = cdcDerive(f);
    PolyArrow h = PolyArrow::proj(3 * d, 0, d);
    PolyArrow k = PolyArrow::proj(3 * d, d, d);
    PolyArrow v = PolyArrow::proj(3 * d, 2 * d, d);
    PolyArrow lhs = compose(df, pairArrow(h + k, v));
    PolyArrow rhs = compose(df, pairArrow(h, v)) + compose(df, pairArrow(k, v));
    PolyArrow zeroDir = compose(df, pairArrow(PolyArrow::zero(d, d), PolyArrow::identity(d)));
    rep.record("D2", lhs == rhs && zeroDir == PolyArrow::zero(d, c));
  }

  // D3: derivative of identity and projections
  {
    bool okId = cdcDerive(PolyArrow::identity(d)) == PolyArrow::proj(2 * d, 0, d);
    PolyArrow p1 = PolyArrow::proj(2 * d, 0, d);
    PolyArrow p2 = PolyArrow::proj(2 * d, d, d);
    bool okP1 = cdcDerive(p1) == compose(p1, PolyArrow::proj(4 * d, 0, 2 * d));
    bool okP2 = cdcDerive(p2) == compose(p2, PolyArrow::proj(4 * d, 0, 2 * d));
    rep.record("D3", okId && okP1 && okP2);
  }

  // D4: pairing
  {
    bool ok = true;
    if (g.domDim == d) ok = cdcDerive(pairArrow(f, g)) == pairArrow(cdcDerive(f), cdcDerive(g));
    rep.record("D4", ok);
  }

  // D5: chain rule, for composable g . f
  {
    bool ok = true;
    if (g.domDim == c) {
      PolyArrow lhs = cdcDerive(compose(g, f));
      PolyArrow pointBlock = PolyArrow::proj(2 * d, d, d);
      PolyArrow rhs = compose(cdcDerive(g), pairArrow(cdcDerive(f), compose(f, pointBlock)));
      ok = lhs == rhs;
    }
    rep.record("D5", ok);
  }

  // D6: the derivative is linear
  {
    PolyArrow ddf = cdcDerive(cdcDerive(f));
    PolyArrow gg = PolyArrow::proj(3 * d, 0, d);
    PolyArrow h = PolyArrow::proj(3 * d, d, d);
    PolyArrow k = PolyArrow::proj(3 * d, 2 * d, d);
    PolyArrow lhs = compose(ddf, pairArrow(pairArrow(gg, PolyArrow::zero(3 * d, d)), pairArrow(h, k)));
    PolyArrow rhs = compose(cdcDerive(f), pairArrow(gg, k));
    rep.record("D6", lhs == rhs);
  }

  // D7: symmetry of second derivatives
  {
    PolyArrow ddf = cdcDerive(cdcDerive(f));
    PolyArrow gg = PolyArrow::proj(3 * d, 0, d);
    PolyArrow h = PolyArrow::proj(3 * d, d, d);
    PolyArrow k = PolyArrow::proj(3 * d, 2 * d, d);
    PolyArrow z = PolyArrow::zero(3 * d, d);
    PolyArrow lhs = compose(ddf, pairArrow(pairArrow(z, h), pairArrow(gg, k)));
    PolyArrow rhs = compose(ddf, pairArrow(pairArrow(z, gg), pairArrow(h, k)));
    rep.record("D7", lhs == rhs);
  }

  // D-curry: deriving in the first block agrees with the full derivative at a
  // frozen second block
  if (d >= 2) {
    for (int split = 1; split < d; ++split) {
      int dx = split, dy = d - split;
      PolyArrow partial = cdcPartialBlock(f, 0, dx);  // over [v | x y]
      // route through the full derivative: ((v, 0), (x, y))
      int dom = dx + d;
      PolyArrow v = PolyArrow::proj(dom, 0, dx);
      PolyArrow xy = PolyArrow::proj(dom, dx, d);
      PolyArrow dir = pairArrow(v, PolyArrow::zero(dom, dy));
      PolyArrow full = compose(cdcDerive(f), pairArrow(dir, xy));
      if (!(partial == full)) {
        rep.record("D-curry", false, "split at " + std::to_string(split));
        return rep;
      }
    }
    rep.record("D-curry", true);
  } else {
    rep.record("D-curry", true);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

class CdcBackend {
 public:
  using Obj = CdcObjPtr;
  using Pure = CdcPure;

  std::map<std::string, CdcObjPtr> bases;
  std::map<std::string, ValPtr> consts;
  std::map<std::string, ValPtr> axioms;

  // evaluation happens over a fixed ambient input dimension
  int ambientDim = 0;

  Obj objOfBase(const std::string& n) const {
    auto it = bases.find(n);
    if (it == bases.end()) throw EvalFailure("cdc environment has no base object " + n);
    return it->second;
  }
  Obj product(Obj a, Obj b) const {
    if (a->fn || b->fn) throw UnsupportedDomain("product of exponential objects");
    return cdcEuclid(a->dim + b->dim);
  }
  Obj tensor(Obj a, Obj b) const { return product(std::move(a), std::move(b)); }
  Obj exponential(Obj a, Obj b) const { return cdcExp(std::move(a), std::move(b)); }
  Obj rescale(const Rat&, Obj) const {
    throw UnsupportedDomain("the cdc backend is cartesian; it has no rescaling");
  }

  Pure distOf(Obj o) const { return Pure{{o}}; }
  Pure prodPure(Pure a, Pure b) const {
    Pure out = a;
    for (auto& c : b.comps) out.comps.push_back(c);
    return out;
  }
  Pure piPointPure(Obj dom, Pure body) const {
    Pure out;
    for (auto& c : body.comps) out.comps.push_back(cdcExp(dom, c));
    return out;
  }
  Pure piDiffPure(Obj dom, Pure body) const {
    Pure out;
    for (auto& c : body.comps) out.comps.push_back(cdcExp(cdcEuclid(dom->dim * 2), c));
    return out;
  }

  ValPtr constVal(const std::string& n) const {
    auto it = consts.find(n);
    if (it != consts.end()) return it->second;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) || n[0] == '-'))
      return vPoly(PolyArrow::constant(0, {parseRat(n)}));
    throw EvalFailure("cdc environment has no constant " + n);
  }
  ValPtr axiomVal(const std::string& n) const {
    auto it = axioms.find(n);
    if (it == axioms.end()) throw EvalFailure("cdc environment has no axiom " + n);
    return it->second;
  }

  // self-differences are the zero vector (pointwise at function objects)
  ValPtr reflVal(const Obj& o, const ValPtr& v) const {
    if (!o->fn) {
      int dom = isPolyVal(v) ? asPoly(v).domDim : 0;
      return vPoly(PolyArrow::zero(dom, o->dim));
    }
    CdcObjPtr cod = o->b;
    const CdcBackend* self = this;
    return vFn([self, cod, v](const ValPtr& x) { return self->reflVal(cod, apply(v, x)); });
  }

  // j((x,y),v) = c'(x) + dF((v,0),(x,y)) composed symbolically
  template <class Req>
  ValPtr filler(Req& req) const {
    for (const auto& comp : req.target.comps)
      if (comp->fn) throw UnsupportedDomain("cdc filler needs a euclidean motive");
    CdcObjPtr carrier = req.carrier;
    if (carrier->fn) throw UnsupportedDomain("cdc filler needs a euclidean carrier");
    int a = carrier->dim;
    int D = ambientDim;
    // evaluate the index terms over ambient + x-block + y-block
    int Dext = D + 2 * a;
    Env ext = req.env;
    for (auto& pv : ext.prog) pv = liftVal(pv, D, Dext);
    for (auto& dv : ext.diff) dv = liftVal(dv, D, Dext);
    ValPtr xBlock = vPoly(PolyArrow::proj(Dext, D, a));
    ValPtr yBlock = vPoly(PolyArrow::proj(Dext, D + a, a));
    Env envF = ext.withProg(xBlock).withProg(yBlock);
    PolyArrow Fext = cdcFlatten(req.interp.prog(req.lhsIdx, envF), Dext);
    // substitution images sending ambient to itself and blocks to (vt, vu)
    PolyArrow vt = cdcFlatten(req.vt, D), vu = cdcFlatten(req.vu, D);
    PolyArrow va = cdcFlatten(req.va, D);
    std::vector<Poly> images;
    for (int i = 0; i < D; ++i) images.push_back(Poly::var(D, i));
    for (int i = 0; i < a; ++i) images.push_back(vt.comps[i]);
    for (int i = 0; i < a; ++i) images.push_back(vu.comps[i]);
    // directional derivative in the x block, direction va
    PolyArrow dirPart{D, Fext.codDim, {}};
    for (const Poly& p : Fext.comps) {
      Poly acc = Poly::zero(D);
      for (int i = 0; i < a; ++i) acc = acc + p.partial(D + i).subst(images, D) * va.comps[i];
      dirPart.comps.push_back(acc);
    }
    // c'(x); componentwise the paired index term plays the paper's <df>^n role
    PolyArrow cPart = cdcFlatten(req.branch(req.vt), D);
    if (cPart.codDim != dirPart.codDim) throw EvalFailure("cdc filler component mismatch");
    return vPoly(cPart + dirPart);
  }

 private:
  static ValPtr liftVal(const ValPtr& v, int D, int Dext) {
    if (isPolyVal(v)) {
      PolyArrow p = cdcAt(asPoly(v), D);
      return vPoly(compose(p, PolyArrow::proj(Dext, 0, D)));
    }
    if (auto* t = std::get_if<std::vector<ValPtr>>(&v->v)) {
      std::vector<ValPtr> out;
      for (const auto& c : *t) out.push_back(liftVal(c, D, Dext));
      return vTuple(out);
    }
    throw UnsupportedDomain("cdc filler over higher-order environment values");
  }
};

}  // namespace dtt
