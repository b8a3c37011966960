#pragma once

#include <cctype>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtt/checker.hpp"
#include "dtt/diagnostics.hpp"
#include "dtt/printer.hpp"
#include "dtt/signature.hpp"
#include "dtt/subexp.hpp"
#include "dtt/syntax.hpp"

namespace dtt {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Id, Num, Sym, End };
  Kind kind;
  std::string text;
  Span span;
};

inline std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Token::Kind k, std::string s, int l, int c) { out.push_back({k, std::move(s), {l, c}}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int l0 = line, c0 = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) ++j;
      push(Token::Kind::Id, src.substr(i, j - i), l0, c0);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else if (j < src.size() && src[j] == '/' && j + 1 < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      push(Token::Kind::Num, src.substr(i, j - i), l0, c0);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    // multi-char symbols
    static const char* multi[] = {":=", "=>", "->", "-o"};
    bool took = false;
    for (const char* m : multi) {
      size_t len = std::strlen(m);
      if (src.compare(i, len, m) == 0) {
        push(Token::Kind::Sym, m, l0, c0);
        i += len;
        col += static_cast<int>(len);
        took = true;
        break;
      }
    }
    if (took) continue;
    static const std::string singles = "()[]{}.,:*!#=";
    if (singles.find(c) != std::string::npos) {
      push(Token::Kind::Sym, std::string(1, c), l0, c0);
      ++i;
      ++col;
      continue;
    }
    diags.push_back({Diagnostic::Severity::Error, {l0, c0}, std::string("unexpected character '") + c + "'", "", ""});
    ++i;
    ++col;
  }
  out.push_back({Token::Kind::End, "", {line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Surface trees (sort-agnostic expressions, resolved during elaboration)
// ---------------------------------------------------------------------------

struct SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;
struct SPred;
using SPredPtr = std::shared_ptr<const SPred>;

struct SBinder {
  std::vector<std::string> names;  // one name, or two names for a paired group
  TypePtr ann;                     // may be null
  Span span;
};

struct SExpr {
  enum class K { Name, Num, Fun, App, Tuple, Proj, Refl, Der, BangIntro, LetBang, LetTensor, J };
  K k;
  Span span;
  std::string name;                // Name/Num; LetBang/LetTensor binder names in names2
  std::vector<std::string> names2; // let binders; J branch binder at names2[0]
  std::vector<SBinder> binders;    // Fun
  std::vector<SExprPtr> args;      // App spine (args[0] = head), Tuple comps, children
  SPredPtr motive;                 // J
  std::vector<std::string> motNames;  // J motive binder names
  int side = 0;                    // Proj
};

struct SPred {
  enum class K { Diff, Prod, PiPoint, PiDiff };
  K k;
  Span span;
  TypePtr carrier;
  SExprPtr t, u;
  SPredPtr p, q;
  std::vector<std::string> names;  // binder names
};

struct RawDecl {
  enum class K { TypeDecl, ConstDecl, AxiomDecl, RuleDecl, Def, Directive };
  K k;
  Span span;
  std::string name;
  TypePtr ty;                       // ConstDecl; TypeDecl abbreviation target
  SPredPtr pred;                    // AxiomDecl; Def predicate ascription
  TypePtr defTy;                    // Def type ascription
  SExprPtr body;                    // Def / RuleDecl rhs
  std::vector<std::string> params;  // RuleDecl patterns (names or constants)
  std::vector<std::string> words;   // Directive arguments
};

// ---------------------------------------------------------------------------
// Parser (recursive descent with backtracking on token position)
// ---------------------------------------------------------------------------

class Parser {
 public:
  Parser(std::string src, bool tensorMode = false) : tensorMode_(tensorMode) {
    toks_ = lex(src, diags_);
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

  std::vector<RawDecl> parseFile() {
    std::vector<RawDecl> out;
    while (!atEnd()) {
      size_t before = pos_;
      try {
        out.push_back(parseDecl());
      } catch (const CheckError& e) {
        diags_.push_back(e.diag);
        // resynchronize at the next declaration keyword
        if (pos_ == before) ++pos_;
        while (!atEnd() && !startsDecl()) ++pos_;
      }
      if (!out.empty() && out.back().k == RawDecl::K::Directive) applyModeDirective(out.back());
      if (!out.empty() && out.back().k == RawDecl::K::TypeDecl && out.back().ty)
        abbrevs_[out.back().name] = out.back().ty;
    }
    return out;
  }

  // entry points used by tests
  TypePtr parseTypeOnly() { return parseType(); }
  SExprPtr parseExprOnly() { return parseExpr(); }
  SPredPtr parsePredOnly() { return parsePred(); }

  void setTensorMode(bool b) { tensorMode_ = b; }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  bool tensorMode_;  // '*' parses as tensor, '->' rejected in favor of '-o'

  const Token& cur() const { return toks_[pos_]; }
  bool atEnd() const { return cur().kind == Token::Kind::End; }
  bool isSym(const char* s) const { return cur().kind == Token::Kind::Sym && cur().text == s; }
  bool isId(const char* s) const { return cur().kind == Token::Kind::Id && cur().text == s; }
  Token eat() { return toks_[pos_++]; }
  void expectSym(const char* s) {
    if (!isSym(s)) throw checkError(std::string("expected '") + s + "' but found '" + cur().text + "'", cur().span);
    ++pos_;
  }
  std::string expectId() {
    if (cur().kind != Token::Kind::Id)
      throw checkError("expected an identifier but found '" + cur().text + "'", cur().span);
    return eat().text;
  }

  bool startsDecl() const {
    return isId("type") || isId("const") || isId("axiom") || isId("rule") || isId("def") || isSym("#");
  }

  void applyModeDirective(const RawDecl& d) {
    if (d.name == "calculus" && !d.words.empty()) tensorMode_ = d.words[0] == "fuzz";
  }

  RawDecl parseDecl() {
    Span sp = cur().span;
    if (isSym("#")) {
      ++pos_;
      RawDecl d{RawDecl::K::Directive, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      while (cur().kind == Token::Kind::Id || cur().kind == Token::Kind::Num) {
        d.words.push_back(eat().text);
        if (isSym(",")) ++pos_;
      }
      return d;
    }
    if (isId("type")) {
      ++pos_;
      RawDecl d{RawDecl::K::TypeDecl, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      if (isSym("=")) {
        ++pos_;
        d.ty = parseType();
      }
      return d;
    }
    if (isId("const")) {
      ++pos_;
      RawDecl d{RawDecl::K::ConstDecl, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      expectSym(":");
      d.ty = parseType();
      return d;
    }
    if (isId("axiom")) {
      ++pos_;
      RawDecl d{RawDecl::K::AxiomDecl, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      expectSym(":");
      d.pred = parsePred();
      return d;
    }
    if (isId("rule")) {
      ++pos_;
      RawDecl d{RawDecl::K::RuleDecl, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      while (cur().kind == Token::Kind::Id || cur().kind == Token::Kind::Num) d.params.push_back(eat().text);
      expectSym("=>");
      d.body = parseExpr();
      return d;
    }
    if (isId("def")) {
      ++pos_;
      RawDecl d{RawDecl::K::Def, sp, expectId(), nullptr, nullptr, nullptr, nullptr, {}, {}};
      if (isSym(":")) {
        ++pos_;
        size_t save = pos_;
        try {
          d.pred = parsePred();
          if (!isSym(":=")) throw checkError("not a predicate ascription", cur().span);
        } catch (const CheckError&) {
          pos_ = save;
          d.pred = nullptr;
          d.defTy = parseType();
        }
      }
      expectSym(":=");
      d.body = parseExpr();
      return d;
    }
    throw checkError("expected a declaration but found '" + cur().text + "'", cur().span);
  }

  // -- types --
  TypePtr parseType() {
    TypePtr l = parseTypeProd();
    if (isSym("->") || isSym("-o")) {
      bool lolli = cur().text == "-o";
      ++pos_;
      TypePtr r = parseType();
      return lolli ? tyLolli(l, r) : tyArrow(l, r);
    }
    return l;
  }
  TypePtr parseTypeProd() {
    TypePtr l = parseTypePre();
    if (isSym("*")) {
      ++pos_;
      TypePtr r = parseTypeProd();
      return tensorMode_ ? tyTensor(l, r) : tyProduct(l, r);
    }
    return l;
  }
  TypePtr parseTypePre() {
    if (isSym("!")) {
      ++pos_;
      if (cur().kind != Token::Kind::Num) throw checkError("expected a scale after '!'", cur().span);
      Rat s = parseRat(eat().text);
      return tyBang(s, parseTypePre());
    }
    return parseTypeAtom();
  }
  TypePtr parseTypeAtom() {
    if (isSym("(")) {
      ++pos_;
      TypePtr t = parseType();
      expectSym(")");
      return t;
    }
    if (cur().kind == Token::Kind::Id) {
      std::string n = eat().text;
      auto it = abbrevs_.find(n);
      if (it != abbrevs_.end()) return it->second;
      return tyBase(n);
    }
    throw checkError("expected a type but found '" + cur().text + "'", cur().span);
  }

 public:
  void addAbbrev(const std::string& n, TypePtr t) { abbrevs_[n] = std::move(t); }

 private:
  std::map<std::string, TypePtr> abbrevs_;

  // -- predicates --
  SPredPtr parsePred() {
    Span sp = cur().span;
    if (isId("Pi")) {
      ++pos_;
      std::vector<std::string> names;
      names.push_back(expectId());
      if (cur().kind == Token::Kind::Id && !isId("Pi")) names.push_back(eat().text);
      expectSym(":");
      TypePtr dom = parseType();
      expectSym(".");
      if (names.size() == 1) {
        auto body = parsePred();
        auto n = std::make_shared<SPred>();
        n->k = SPred::K::PiPoint;
        n->span = sp;
        n->carrier = dom;
        n->p = body;
        n->names = names;
        return n;
      }
      // Pi x y : A. D[A](x, y) -> P
      auto guard = parsePredAtom();
      if (guard->k != SPred::K::Diff || !typeEq(guard->carrier, dom) || !guard->t || !guard->u ||
          guard->t->k != SExpr::K::Name || guard->u->k != SExpr::K::Name || guard->t->name != names[0] ||
          guard->u->name != names[1])
        throw checkError("the guard of a paired Pi must be the diagonal difference of its binders", sp);
      expectSym("->");
      auto body = parsePred();
      auto n = std::make_shared<SPred>();
      n->k = SPred::K::PiDiff;
      n->span = sp;
      n->carrier = dom;
      n->p = body;
      n->names = names;
      return n;
    }
    SPredPtr l = parsePredAtom();
    if (isSym("*")) {
      ++pos_;
      SPredPtr r = parsePred();
      auto n = std::make_shared<SPred>();
      n->k = SPred::K::Prod;
      n->span = sp;
      n->p = l;
      n->q = r;
      return n;
    }
    return l;
  }

  SPredPtr parsePredAtom() {
    Span sp = cur().span;
    if (isId("D")) {
      ++pos_;
      expectSym("[");
      TypePtr carrier = parseType();
      expectSym("]");
      expectSym("(");
      SExprPtr t = parseExpr();
      expectSym(",");
      SExprPtr u = parseExpr();
      expectSym(")");
      auto n = std::make_shared<SPred>();
      n->k = SPred::K::Diff;
      n->span = sp;
      n->carrier = carrier;
      n->t = t;
      n->u = u;
      return n;
    }
    if (isSym("(")) {
      ++pos_;
      SPredPtr p = parsePred();
      expectSym(")");
      return p;
    }
    if (isId("Pi")) return parsePred();
    throw checkError("expected a predicate but found '" + cur().text + "'", cur().span);
  }

  // -- expressions --
  SExprPtr parseExpr() {
    Span sp = cur().span;
    if (isId("fun")) {
      ++pos_;
      auto n = std::make_shared<SExpr>();
      n->k = SExpr::K::Fun;
      n->span = sp;
      while (!isSym("=>")) {
        SBinder b;
        b.span = cur().span;
        if (isSym("(")) {
          ++pos_;
          b.names.push_back(expectId());
          if (cur().kind == Token::Kind::Id && !isSym(":")) b.names.push_back(eat().text);
          expectSym(":");
          b.ann = parseType();
          expectSym(")");
        } else {
          b.names.push_back(expectId());
        }
        n->binders.push_back(std::move(b));
      }
      expectSym("=>");
      n->args.push_back(parseExpr());
      return n;
    }
    if (isId("let")) {
      ++pos_;
      auto n = std::make_shared<SExpr>();
      n->span = sp;
      if (isSym("!")) {
        ++pos_;
        n->k = SExpr::K::LetBang;
        n->names2.push_back(expectId());
      } else {
        expectSym("(");
        n->k = SExpr::K::LetTensor;
        n->names2.push_back(expectId());
        expectSym(",");
        n->names2.push_back(expectId());
        expectSym(")");
      }
      expectSym("=");
      n->args.push_back(parseExpr());
      if (!isId("in")) throw checkError("expected 'in'", cur().span);
      ++pos_;
      n->args.push_back(parseExpr());
      return n;
    }
    // application spine
    auto head = parseAtom();
    std::vector<SExprPtr> spine{head};
    while (startsAtom()) spine.push_back(parseAtom());
    if (spine.size() == 1) return head;
    auto n = std::make_shared<SExpr>();
    n->k = SExpr::K::App;
    n->span = sp;
    n->args = std::move(spine);
    return n;
  }

  bool startsAtom() const {
    if (cur().kind == Token::Kind::Num) return true;
    if (cur().kind == Token::Kind::Id)
      return !isId("in") && !isId("fun") && !isId("let") && !startsDecl();
    return isSym("(") || isSym("!");
  }

  SExprPtr parseAtom() {
    Span sp = cur().span;
    auto mk = [&](SExpr::K k) {
      auto n = std::make_shared<SExpr>();
      n->k = k;
      n->span = sp;
      return n;
    };
    if (cur().kind == Token::Kind::Num) {
      auto n = mk(SExpr::K::Num);
      n->name = eat().text;
      return n;
    }
    if (isSym("!")) {
      ++pos_;
      auto n = mk(SExpr::K::BangIntro);
      n->args.push_back(parseAtom());
      return n;
    }
    if (isSym("(")) {
      ++pos_;
      SExprPtr first = parseExpr();
      if (isSym(",")) {
        ++pos_;
        SExprPtr second = parseExpr();
        expectSym(")");
        auto n = mk(SExpr::K::Tuple);
        n->args = {first, second};
        return n;
      }
      expectSym(")");
      return first;
    }
    if (isId("fst") || isId("snd")) {
      bool f = isId("fst");
      ++pos_;
      auto n = mk(SExpr::K::Proj);
      n->side = f ? 1 : 2;
      n->args.push_back(parseAtom());
      return n;
    }
    if (isId("refl")) {
      ++pos_;
      auto n = mk(SExpr::K::Refl);
      n->args.push_back(parseAtom());
      return n;
    }
    if (isId("Der")) {
      ++pos_;
      auto n = mk(SExpr::K::Der);
      n->args.push_back(parseAtom());
      return n;
    }
    if (isId("J")) {
      ++pos_;
      expectSym("[");
      auto n = mk(SExpr::K::J);
      n->motNames.push_back(expectId());
      n->motNames.push_back(expectId());
      expectSym(".");
      n->motive = parsePred();
      expectSym("]");
      expectSym("(");
      n->args.push_back(parseExpr());
      expectSym(",");
      n->args.push_back(parseExpr());
      expectSym(",");
      n->args.push_back(parseExpr());
      expectSym(",");
      expectSym("[");
      n->names2.push_back(expectId());
      expectSym("]");
      n->args.push_back(parseExpr());
      expectSym(")");
      return n;
    }
    if (cur().kind == Token::Kind::Id) {
      auto n = mk(SExpr::K::Name);
      n->name = eat().text;
      return n;
    }
    throw checkError("expected an expression but found '" + cur().text + "'", cur().span);
  }
};

}  // namespace dtt
