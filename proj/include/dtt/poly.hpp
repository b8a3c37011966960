#pragma once

#include <map>
#include <string>
#include <vector>

#include "dtt/rational.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// Multivariate polynomials with exact rational coefficients. Monomials are
// exponent vectors over a fixed variable count.
struct Poly {
  int nvars = 0;
  std::map<std::vector<int>, Rat> terms;  // exponents -> coefficient, no zero coeffs

  static Poly zero(int n) { return Poly{n, {}}; }
  static Poly constant(int n, Rat c) {
    Poly p{n, {}};
    if (c != Rat(0)) p.terms[std::vector<int>(n, 0)] = c;
    return p;
  }
  static Poly var(int n, int i) {
    Poly p{n, {}};
    std::vector<int> e(n, 0);
    e[i] = 1;
    p.terms[e] = Rat(1);
    return p;
  }

  bool isZero() const { return terms.empty(); }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [e, c] : b.terms) {
      Rat nc = (out.terms.count(e) ? out.terms[e] : Rat(0)) + c;
      if (nc == Rat(0)) out.terms.erase(e);
      else out.terms[e] = nc;
    }
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (Rat(-1) * b); }
  friend Poly operator*(const Rat& s, const Poly& a) {
    Poly out{a.nvars, {}};
    if (s == Rat(0)) return out;
    for (const auto& [e, c] : a.terms) out.terms[e] = s * c;
    return out;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out{a.nvars, {}};
    for (const auto& [ea, ca] : a.terms) {
      for (const auto& [eb, cb] : b.terms) {
        std::vector<int> e(a.nvars);
        for (int i = 0; i < a.nvars; ++i) e[i] = ea[i] + eb[i];
        Rat nc = (out.terms.count(e) ? out.terms[e] : Rat(0)) + ca * cb;
        if (nc == Rat(0)) out.terms.erase(e);
        else out.terms[e] = nc;
      }
    }
    return out;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms == b.terms; }

  Poly partial(int i) const {
    Poly out{nvars, {}};
    for (const auto& [e, c] : terms) {
      if (e[i] == 0) continue;
      std::vector<int> e2 = e;
      e2[i] -= 1;
      out.terms[e2] = (out.terms.count(e2) ? out.terms[e2] : Rat(0)) + c * Rat(e[i]);
    }
    return out;
  }

  // substitute every variable by a polynomial over m variables
  Poly subst(const std::vector<Poly>& images, int m) const {
    Poly out = Poly::zero(m);
    for (const auto& [e, c] : terms) {
      Poly term = Poly::constant(m, c);
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) term = term * images[i];
      out = out + term;
    }
    return out;
  }

  double evalD(const std::vector<double>& xs) const {
    double acc = 0;
    for (const auto& [e, c] : terms) {
      double m = toDouble(c);
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) m *= xs[i];
      acc += m;
    }
    return acc;
  }

  Rat evalR(const std::vector<Rat>& xs) const {
    Rat acc(0);
    for (const auto& [e, c] : terms) {
      Rat m = c;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) m = m * xs[i];
      acc = acc + m;
    }
    return acc;
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  std::string show() const {
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms) {
      if (!first) out += " + ";
      first = false;
      std::string mono;
      for (int i = 0; i < nvars; ++i) {
        for (int k = 0; k < e[i]; ++k) {
          if (!mono.empty()) mono += "*";
          mono += "x" + std::to_string(i);
        }
      }
      if (mono.empty()) out += dtt::show(c);
      else if (c == Rat(1)) out += mono;
      else out += dtt::show(c) + "*" + mono;
    }
    return out;
  }
};

// An arrow R^dom -> R^cod with polynomial components.
struct PolyArrow {
  int domDim = 0;
  int codDim = 0;
  std::vector<Poly> comps;

  static PolyArrow identity(int n) {
    PolyArrow a{n, n, {}};
    for (int i = 0; i < n; ++i) a.comps.push_back(Poly::var(n, i));
    return a;
  }
  static PolyArrow zero(int dom, int cod) {
    PolyArrow a{dom, cod, {}};
    for (int i = 0; i < cod; ++i) a.comps.push_back(Poly::zero(dom));
    return a;
  }
  static PolyArrow constant(int dom, std::vector<Rat> cs) {
    PolyArrow a{dom, static_cast<int>(cs.size()), {}};
    for (auto& c : cs) a.comps.push_back(Poly::constant(dom, c));
    return a;
  }
  // projection onto the block [start, start+len)
  static PolyArrow proj(int dom, int start, int len) {
    PolyArrow a{dom, len, {}};
    for (int i = 0; i < len; ++i) a.comps.push_back(Poly::var(dom, start + i));
    return a;
  }

  friend PolyArrow operator+(const PolyArrow& a, const PolyArrow& b) {
    PolyArrow out{a.domDim, a.codDim, {}};
    for (int i = 0; i < a.codDim; ++i) out.comps.push_back(a.comps[i] + b.comps[i]);
    return out;
  }
  friend bool operator==(const PolyArrow& a, const PolyArrow& b) {
    return a.domDim == b.domDim && a.codDim == b.codDim && a.comps == b.comps;
  }
};

// f after g: (f . g)(x) = f(g(x))
inline PolyArrow compose(const PolyArrow& f, const PolyArrow& g) {
  if (f.domDim != g.codDim) throw MalformedTerm("polynomial arrow dimension mismatch in composition");
  PolyArrow out{g.domDim, f.codDim, {}};
  for (const Poly& p : f.comps) out.comps.push_back(p.subst(g.comps, g.domDim));
  return out;
}

inline PolyArrow pairArrow(const PolyArrow& a, const PolyArrow& b) {
  PolyArrow out{a.domDim, a.codDim + b.codDim, {}};
  for (const Poly& p : a.comps) out.comps.push_back(p);
  for (const Poly& p : b.comps) out.comps.push_back(p);
  return out;
}

// the derivative operator: for f : R^d -> R^c produce df : R^d x R^d -> R^c
// with df(v, x) = Jacobian of f at x applied to the direction v
inline PolyArrow cdcDerive(const PolyArrow& f) {
  int d = f.domDim;
  PolyArrow out{2 * d, f.codDim, {}};
  // re-express f over the point block (variables d..2d-1)
  std::vector<Poly> pointVars;
  for (int i = 0; i < d; ++i) pointVars.push_back(Poly::var(2 * d, d + i));
  for (const Poly& p : f.comps) {
    Poly acc = Poly::zero(2 * d);
    for (int i = 0; i < d; ++i) {
      Poly dp = p.partial(i).subst(pointVars, 2 * d);
      acc = acc + dp * Poly::var(2 * d, i);
    }
    out.comps.push_back(acc);
  }
  return out;
}

}  // namespace dtt
