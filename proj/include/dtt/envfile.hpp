#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "dtt/backend_cdc.hpp"
#include "dtt/backend_change.hpp"
#include "dtt/backend_dlr.hpp"
#include "dtt/backend_metric.hpp"

namespace dtt {

using Json = nlohmann::json;

inline Json loadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EvalFailure("cannot open environment file " + path);
  Json j;
  in >> j;
  return j;
}

inline double jsonNum(const Json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "oo") return std::numeric_limits<double>::infinity();
    return std::stod(s);
  }
  return j.get<double>();
}

inline ValPtr jsonPoint(const Json& j) {
  if (j.is_number_integer()) return vInt(j.get<long long>());
  if (j.is_number()) return vReal(j.get<double>());
  if (j.is_array()) {
    std::vector<ValPtr> xs;
    for (const auto& c : j) xs.push_back(jsonPoint(c));
    return vTuple(xs);
  }
  if (j.is_string()) return vReal(jsonNum(j));
  throw EvalFailure("bad point literal in environment");
}

// ---------------------------------------------------------------------------
// constant builders shared by the concrete backends
// ---------------------------------------------------------------------------

inline ValPtr numericUnary(const std::function<double(double)>& fd,
                           const std::function<long long(long long)>& fi) {
  return vFn([fd, fi](const ValPtr& x) -> ValPtr {
    if (std::holds_alternative<long long>(x->v)) return vInt(fi(asInt(x)));
    return vReal(fd(asReal(x)));
  });
}

inline void collectLeaves(const ValPtr& v, std::vector<double>& out) {
  if (auto* t = std::get_if<std::vector<ValPtr>>(&v->v)) {
    for (const auto& c : *t) collectLeaves(c, out);
    return;
  }
  out.push_back(asReal(v));
}

inline ValPtr builtinVal(const std::string& name, const Json& spec) {
  if (name == "identity") return vFn([](const ValPtr& x) { return x; });
  if (name == "square")
    return numericUnary([](double x) { return x * x; }, [](long long x) { return x * x; });
  if (name == "negate")
    return numericUnary([](double x) { return -x; }, [](long long x) { return -x; });
  if (name == "affine") {
    double a = jsonNum(spec.value("a", Json(1.0)));
    double b = jsonNum(spec.value("b", Json(0.0)));
    return vFn([a, b](const ValPtr& x) { return vReal(a * asReal(x) + b); });
  }
  if (name == "average") {
    return vFn([](const ValPtr& x) {
      std::vector<double> leaves;
      collectLeaves(x, leaves);
      double s = 0;
      for (double v : leaves) s += v;
      return vReal(leaves.empty() ? 0 : s / static_cast<double>(leaves.size()));
    });
  }
  if (name == "sum") {
    return vFn([](const ValPtr& x) -> ValPtr {
      if (std::holds_alternative<Bag>(x->v)) return vInt(asBag(x).total());
      std::vector<double> leaves;
      collectLeaves(x, leaves);
      double s = 0;
      for (double v : leaves) s += v;
      return vReal(s);
    });
  }
  if (name == "case") {
    // case b x y: picks x at 0 and y at 1
    return vFn([](const ValPtr& b) {
      return vFn([b](const ValPtr& x) {
        return vFn([b, x](const ValPtr& y) { return asReal(b) == 0.0 ? x : y; });
      });
    });
  }
  throw EvalFailure("unknown builtin constant: " + name);
}

inline ValPtr jsonConst(const Json& spec) {
  std::string kind = spec.value("kind", "scalar");
  if (kind == "scalar") {
    const Json& v = spec.at("value");
    if (v.is_number_integer()) return vInt(v.get<long long>());
    return vReal(jsonNum(v));
  }
  if (kind == "int") return vInt(spec.at("value").get<long long>());
  if (kind == "bag") {
    Bag b;
    for (const auto& e : spec.at("items")) b.add(e.get<long long>());
    return vBag(b);
  }
  if (kind == "tuple") {
    std::vector<ValPtr> xs;
    for (const auto& c : spec.at("items")) xs.push_back(jsonConst(c));
    return vTuple(xs);
  }
  if (kind == "builtin") return builtinVal(spec.at("name").get<std::string>(), spec);
  if (kind == "table") {
    auto entries = std::make_shared<std::vector<std::pair<ValPtr, ValPtr>>>();
    for (const auto& row : spec.at("map")) entries->push_back({jsonPoint(row.at(0)), jsonConst(row.at(1))});
    return vFn([entries](const ValPtr& x) {
      for (const auto& [k, v] : *entries)
        if (valEq(k, x)) return v;
      throw EvalFailure("table constant applied outside its domain");
    });
  }
  if (kind == "fn-alternating") {
    double even = jsonNum(spec.at("even"));
    double odd = jsonNum(spec.at("odd"));
    return vFn([even, odd](const ValPtr& x) {
      long long i = static_cast<long long>(asReal(x));
      return vReal(i % 2 == 0 ? even : odd);
    });
  }
  if (kind == "poly") {
    int dom = spec.at("dom").get<int>();
    PolyArrow arrow{dom, 0, {}};
    for (const auto& comp : spec.at("comps")) {
      Poly p = Poly::zero(dom);
      for (const auto& mono : comp) {
        Rat coeff = parseRat(mono.at(0).is_string() ? mono.at(0).get<std::string>()
                                                    : std::to_string(mono.at(0).get<double>()));
        std::vector<int> exps = mono.at(1).get<std::vector<int>>();
        exps.resize(dom, 0);
        Poly term = Poly::constant(dom, coeff);
        for (int i = 0; i < dom; ++i)
          for (int k = 0; k < exps[i]; ++k) term = term * Poly::var(dom, i);
        p = p + term;
      }
      arrow.comps.push_back(p);
      arrow.codDim++;
    }
    return vPoly(arrow);
  }
  throw EvalFailure("unknown constant kind in environment: " + kind);
}

// ---------------------------------------------------------------------------
// per-backend environment loading
// ---------------------------------------------------------------------------

inline void loadMetricEnv(MetricBackend& b, const Json& j) {
  for (const auto& [name, spec] : j.value("bases", Json::object()).items()) {
    std::string kind = spec.value("kind", "real");
    if (kind == "real") {
      const Json& g = spec.at("grid");
      b.bases[name] = msReal(jsonNum(g.at("min")), jsonNum(g.at("max")), jsonNum(g.at("step")));
    } else if (kind == "finite") {
      std::vector<ValPtr> pts;
      for (const auto& p : spec.at("points")) pts.push_back(jsonPoint(p));
      std::vector<std::vector<double>> tab;
      for (const auto& row : spec.at("dist")) {
        std::vector<double> r;
        for (const auto& d : row) r.push_back(jsonNum(d));
        tab.push_back(r);
      }
      b.bases[name] = msFinite(pts, tab);
    } else {
      throw EvalFailure("unknown metric base kind: " + kind);
    }
  }
  for (const auto& [name, spec] : j.value("consts", Json::object()).items()) b.consts[name] = jsonConst(spec);
  for (const auto& [name, spec] : j.value("axioms", Json::object()).items()) b.axioms[name] = jsonConst(spec);
}

inline FinLatticePtr jsonLattice(const Json& spec) {
  auto lat = std::make_shared<FinLattice>();
  for (const auto& n : spec.at("names")) lat->names.push_back(n.get<std::string>());
  for (const auto& row : spec.at("leq")) {
    std::vector<bool> r;
    for (const auto& v : row) r.push_back(v.get<int>() != 0);
    lat->leq.push_back(r);
  }
  lat->finalize();
  return lat;
}

inline void loadDlrEnv(DlrBackend& b, const Json& j) {
  for (const auto& [name, spec] : j.value("bases", Json::object()).items()) {
    std::string kind = spec.value("kind", "euclidean");
    if (kind == "euclidean") {
      const Json& g = spec.at("grid");
      b.bases[name] = dlrEuclid(jsonNum(g.at("min")), jsonNum(g.at("max")), jsonNum(g.at("step")));
    } else if (kind == "finite") {
      std::vector<ValPtr> pts;
      for (const auto& p : spec.at("points")) pts.push_back(jsonPoint(p));
      FinLatticePtr lat = jsonLattice(spec.at("lattice"));
      std::set<std::tuple<int, int, int>> rel;
      for (const auto& t : spec.at("rel"))
        rel.insert({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
      DLRSpacePtr sp = dlrFinite(pts, lat, rel);
      if (!dlrSeparated(sp)) throw EvalFailure("base DLR " + name + " is not separated");
      b.bases[name] = sp;
    } else {
      throw EvalFailure("unknown dlr base kind: " + kind);
    }
  }
  for (const auto& [name, spec] : j.value("consts", Json::object()).items()) b.consts[name] = jsonConst(spec);
  for (const auto& [name, spec] : j.value("axioms", Json::object()).items()) b.axioms[name] = jsonConst(spec);
}

inline void loadChangeEnv(ChangeBackend& b, const Json& j) {
  for (const auto& [name, spec] : j.value("bases", Json::object()).items()) {
    std::string kind = spec.value("kind", "ints");
    if (kind == "ints") {
      b.bases[name] = csInts(spec.value("min", -8), spec.value("max", 8));
    } else if (kind == "reals") {
      b.bases[name] = csReals();
    } else if (kind == "bags") {
      b.bases[name] = csBags();
    } else if (kind == "finite") {
      std::vector<ValPtr> pts;
      for (const auto& p : spec.at("points")) pts.push_back(jsonPoint(p));
      size_t n = pts.size();
      std::vector<std::vector<std::pair<long long, int>>> ch(n);
      for (const auto& t : spec.at("changes"))
        ch[t.at(0).get<int>()].push_back({t.at(1).get<long long>(), t.at(2).get<int>()});
      std::vector<std::vector<long long>> om(n, std::vector<long long>(n, 0));
      for (const auto& t : spec.at("ominus")) om[t.at(0).get<int>()][t.at(1).get<int>()] = t.at(2).get<long long>();
      b.bases[name] = csFinite(pts, ch, om, spec.value("unique", false));
    } else {
      throw EvalFailure("unknown change base kind: " + kind);
    }
  }
  for (const auto& [name, spec] : j.value("consts", Json::object()).items()) b.consts[name] = jsonConst(spec);
  for (const auto& [name, spec] : j.value("axioms", Json::object()).items()) b.axioms[name] = jsonConst(spec);
}

inline void loadCdcEnv(CdcBackend& b, const Json& j) {
  for (const auto& [name, spec] : j.value("bases", Json::object()).items()) {
    b.bases[name] = cdcEuclid(spec.value("dim", 1));
  }
  for (const auto& [name, spec] : j.value("consts", Json::object()).items()) b.consts[name] = jsonConst(spec);
  for (const auto& [name, spec] : j.value("axioms", Json::object()).items()) b.axioms[name] = jsonConst(spec);
}

}  // namespace dtt
