#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtt/syntax.hpp"

namespace dtt {

// A first-order rewrite rule for constants: the left side is a constant
// applied to patterns, each pattern a variable name or a constant literal.
// Repeated variable names impose equality of the matched subterms.
struct DeltaRule {
  std::string head;
  struct Pat {
    bool isVar;
    std::string name;  // pattern variable or constant name
  };
  std::vector<Pat> pats;
  TermPtr rhs;  // over pattern variables encoded as Var(k), k = index among distinct vars, rightmost = 0
  std::vector<std::string> varOrder;
};

// Declared constants, difference axioms (typed difference constants) and
// delta rules. Base types live here too so files can be checked without an
// evaluation environment.
struct Signature {
  std::vector<std::string> baseTypes;
  std::map<std::string, TypePtr> constants;
  std::map<std::string, PredPtr> axioms;  // closed predicates
  std::vector<DeltaRule> rules;
  std::string numeralType = "Real";  // type given to numeric literals

  bool hasBase(const std::string& n) const {
    for (const auto& b : baseTypes)
      if (b == n) return true;
    return false;
  }
  std::optional<TypePtr> constType(const std::string& n) const {
    auto it = constants.find(n);
    if (it != constants.end()) return it->second;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) ||
                       (n.size() > 1 && n[0] == '-' && std::isdigit(static_cast<unsigned char>(n[1]))))) {
      if (hasBase(numeralType)) return tyBase(numeralType);
    }
    return std::nullopt;
  }
  std::optional<PredPtr> axiomPred(const std::string& n) const {
    auto it = axioms.find(n);
    if (it != axioms.end()) return it->second;
    return std::nullopt;
  }
};

// Tries to match `tm` against rule; on success returns the instantiated rhs.
inline std::optional<TermPtr> applyDelta(const DeltaRule& r, const TermPtr& tm) {
  // peel the application spine
  std::vector<TermPtr> args;
  TermPtr head = tm;
  while (head && head->tag == ProgramTerm::Tag::App) {
    args.push_back(head->u);
    head = head->t;
  }
  if (!head || head->tag != ProgramTerm::Tag::Const || head->name != r.head) return std::nullopt;
  if (args.size() != r.pats.size()) return std::nullopt;
  std::reverse(args.begin(), args.end());

  std::map<std::string, TermPtr> bind;
  for (size_t i = 0; i < args.size(); ++i) {
    const auto& p = r.pats[i];
    if (p.isVar) {
      auto it = bind.find(p.name);
      if (it == bind.end()) {
        bind[p.name] = args[i];
      } else if (!alphaEq(it->second, args[i])) {
        return std::nullopt;  // nonlinear pattern mismatch
      }
    } else {
      if (args[i]->tag != ProgramTerm::Tag::Const || args[i]->name != p.name) return std::nullopt;
    }
  }
  // rhs variables are indexed by position in varOrder, rightmost = 0
  TermPtr out = r.rhs;
  for (size_t k = 0; k < r.varOrder.size(); ++k) {
    // always substitute index 0: each substitution shifts the remaining ones down
    out = substProg(out, 0, bind.at(r.varOrder[r.varOrder.size() - 1 - k]));
  }
  return out;
}

}  // namespace dtt
