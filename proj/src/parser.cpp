#include "prhl/parser.hpp"

#include <array>
#include <cctype>
#include <set>
#include <vector>

namespace prhl {

namespace {

enum class Tok { ident, number, sym, end };

struct Token {
  Tok kind;
  std::string text;
  Nat value = 0;
  int line = 1;
  int col = 1;
};

const std::set<std::string> kKeywords = {"skip",  "while", "do",   "invariant", "if",    "then",
                                         "else",  "true",  "false", "exists",   "forall"};

struct Unicode {
  std::string_view bytes;
  Tok kind;
  const char* text;
};

const std::array<Unicode, 14> kUnicode = {{
    {"\xC2\xAC", Tok::sym, "!"},
    {"\xE2\x88\xA7", Tok::sym, "&&"},
    {"\xE2\x88\xA8", Tok::sym, "||"},
    {"\xE2\x86\x92", Tok::sym, "->"},
    {"\xE2\x88\x83", Tok::ident, "exists"},
    {"\xE2\x88\x80", Tok::ident, "forall"},
    {"\xE2\x89\xA4", Tok::sym, "<="},
    {"\xE2\x89\xA5", Tok::sym, ">="},
    {"\xE2\x89\xA0", Tok::sym, "!="},
    {"\xE2\x8A\xA4", Tok::ident, "true"},
    {"\xE2\x8A\xA5", Tok::ident, "false"},
    {"\xE2\x88\x92", Tok::sym, "-"},
    {"\xCE\xB5", Tok::ident, "skip"},
    {"\xC2\xB7", Tok::sym, "."},
}};

constexpr std::string_view kPrime = "\xE2\x80\xB2";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::sym, "", 0, line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Tok::ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
      int primes = 0;
      while (i < s.size()) {
        if (s[i] == '\'') {
          advance(1);
        } else if (s.substr(i, kPrime.size()) == kPrime) {
          advance(kPrime.size());
        } else {
          break;
        }
        ++primes;
      }
      if (primes > 0) t.text += "_p" + std::to_string(primes);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      Nat v = 0;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
        Nat d = static_cast<Nat>(s[j] - '0');
        if (v > (UINT64_MAX - d) / 10) throw ParseError("numeric literal too large", line, col);
        v = v * 10 + d;
        ++j;
      }
      t.kind = Tok::number;
      t.value = v;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const auto& u : kUnicode) {
      if (s.substr(i, u.bytes.size()) == u.bytes) {
        t.kind = u.kind;
        t.text = u.text;
        advance(u.bytes.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      static const std::array<std::string_view, 9> two = {":=", "<=", ">=", "!=", "&&", "||", "->", "/\\", "\\/"};
      for (auto sym : two) {
        if (s.substr(i, 2) == sym) {
          t.text = sym == "/\\" ? "&&" : sym == "\\/" ? "||" : std::string(sym);
          advance(2);
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      static const std::string_view one = "+-*/%()={}<>!;.,";
      if (one.find(c) == std::string_view::npos) {
        throw ParseError("unexpected character '" + std::string(1, c) + "'", line, col);
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::end, "", 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Prog program() {
    Prog p = seq();
    expect_end();
    return p;
  }

  Assertion assertion() {
    Assertion a = implication();
    expect_end();
    return a;
  }

  Expr expression() {
    Expr e = expr(false);
    expect_end();
    return e;
  }

  BoolExpr condition() {
    BoolExpr b = bool_or();
    expect_end();
    return b;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(std::string_view sym, std::size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == Tok::sym || t.kind == Tok::ident) && t.text == sym;
  }
  bool accept(std::string_view sym) {
    if (!at(sym)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.line, t.col);
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
  }
  void expect_end() {
    if (peek().kind != Tok::end) fail("expected end of input");
  }
  Var identifier() {
    const Token& t = peek();
    if (t.kind != Tok::ident || kKeywords.contains(t.text)) fail("expected identifier");
    ++pos_;
    return t.text;
  }

  // --- programs -----------------------------------------------------------

  bool starts_program(std::size_t k) const {
    const Token& t = peek(k);
    if (t.kind == Tok::ident) {
      if (t.text == "skip" || t.text == "while" || t.text == "if") return true;
      return !kKeywords.contains(t.text) && at(":=", k + 1);
    }
    if (t.kind == Tok::sym && t.text == "{") return true;
    if (t.kind == Tok::sym && t.text == "(") return starts_program(k + 1);
    return false;
  }

  Prog seq() {
    Prog head = choice();
    if (accept(";")) {
      // A trailing separator before a closing bracket or the end is allowed.
      if (peek().kind == Tok::end || at("}") || at(")")) return head;
      return Prog::seq(head, seq());
    }
    return head;
  }

  Prog choice() {
    Prog p = statement();
    while (at("+")) {
      ++pos_;
      p = Prog::choice(p, statement());
    }
    return p;
  }

  Prog statement() {
    if (accept("skip")) return Prog::empty();
    if (accept("{")) {
      Prog p = at("}") ? Prog::empty() : seq();
      expect("}");
      return p;
    }
    if (accept("(")) {
      Prog p = seq();
      expect(")");
      return p;
    }
    if (accept("while")) {
      BoolExpr guard = bool_or();
      std::optional<Assertion> inv;
      if (accept("invariant")) inv = rename_bound_apart(implication());
      expect("do");
      expect("{");
      Prog body = at("}") ? Prog::empty() : seq();
      expect("}");
      return Prog::while_loop(guard, body, inv);
    }
    if (accept("if")) {
      BoolExpr guard = bool_or();
      expect("then");
      Prog then_branch = choice();
      expect("else");
      Prog else_branch = choice();
      return desugar_if(guard, then_branch, else_branch);
    }
    if (peek().kind == Tok::ident && at(":=", 1)) {
      Var x = identifier();
      ++pos_;
      return Prog::assign(x, expr(true));
    }
    fail("expected a statement");
  }

  // if B then C0 else C1  ==>  t := 0; while (B && t = 0) { C0; t := 1 };
  //                            while (!B && t = 0) { C1; t := 1 }
  Prog desugar_if(const BoolExpr& b, const Prog& c0, const Prog& c1) {
    VarSet used;
    for (const auto& t : toks_)
      if (t.kind == Tok::ident) used.insert(t.text);
    Var t = fresh_var(used, "t");
    Expr tv = Expr::var(t);
    BoolExpr t_zero = BoolExpr::eq(tv, Expr::constant(0));
    Prog set_done = Prog::assign(t, Expr::constant(1));
    return Prog::seq(Prog::assign(t, Expr::constant(0)),
                     Prog::seq(Prog::while_loop(BoolExpr::conj(b, t_zero), Prog::seq(c0, set_done)),
                               Prog::while_loop(BoolExpr::conj(BoolExpr::negation(b), t_zero),
                                                Prog::seq(c1, set_done))));
  }

  // --- expressions --------------------------------------------------------

  // In program context an expression stops before a `+` that begins the
  // right operand of a choice.
  Expr expr(bool in_program) {
    Expr e = term();
    for (;;) {
      if (at("+")) {
        if (in_program && starts_program(1)) break;
        ++pos_;
        e = e + term();
      } else if (accept("-")) {
        e = e - term();
      } else {
        break;
      }
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept("*")) {
        e = e * factor();
      } else if (accept("/")) {
        e = e / factor();
      } else if (accept("%")) {
        e = e % factor();
      } else {
        break;
      }
    }
    return e;
  }

  Expr factor() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      ++pos_;
      return Expr::constant(t.value);
    }
    if (accept("(")) {
      Expr e = expr(false);
      expect(")");
      return e;
    }
    if (t.kind == Tok::ident && !kKeywords.contains(t.text) && at("(", 1)) {
      throw ParseError("unknown function symbol '" + t.text + "' (only + - * / % are built in)", t.line, t.col);
    }
    return Expr::var(identifier());
  }

  // --- boolean conditions ---------------------------------------------------

  BoolExpr bool_or() {
    BoolExpr b = bool_and();
    while (accept("||")) b = BoolExpr::disj(b, bool_and());
    return b;
  }

  BoolExpr bool_and() {
    BoolExpr b = bool_not();
    while (accept("&&")) b = BoolExpr::conj(b, bool_not());
    return b;
  }

  BoolExpr bool_not() {
    if (accept("!")) return BoolExpr::negation(bool_not());
    return bool_atom();
  }

  BoolExpr bool_atom() {
    if (accept("true")) return BoolExpr::truth();
    if (accept("false")) return BoolExpr::falsity();
    if (at("(")) {
      std::size_t save = pos_;
      try {
        return comparison();
      } catch (const ParseError&) {
        pos_ = save;
      }
      expect("(");
      BoolExpr b = bool_or();
      expect(")");
      return b;
    }
    return comparison();
  }

  BoolExpr comparison() {
    Expr a = expr(false);
    const Token& t = peek();
    std::string op = t.kind == Tok::sym ? t.text : "";
    if (op != "=" && op != "!=" && op != "<=" && op != "<" && op != ">=" && op != ">")
      fail("expected comparison operator");
    ++pos_;
    Expr b = expr(false);
    if (op == "=") return BoolExpr::eq(a, b);
    if (op == "!=") return BoolExpr::ne(a, b);
    if (op == "<=") return BoolExpr::le(a, b);
    if (op == "<") return BoolExpr::lt(a, b);
    if (op == ">=") return BoolExpr::ge(a, b);
    return BoolExpr::gt(a, b);
  }

  // --- assertions -----------------------------------------------------------

  Assertion implication() {
    Assertion a = disjunction();
    if (accept("->")) return Assertion::implies(a, implication());
    return a;
  }

  Assertion disjunction() {
    Assertion a = conjunction();
    while (accept("||")) a = Assertion::disj(a, conjunction());
    return a;
  }

  Assertion conjunction() {
    Assertion a = negation();
    while (accept("&&")) a = Assertion::conj(a, negation());
    return a;
  }

  Assertion negation() {
    if (accept("!")) return Assertion::negation(negation());
    if (at("exists") || at("forall")) {
      bool ex = at("exists");
      ++pos_;
      std::vector<Var> binders{identifier()};
      while (accept(",") || (peek().kind == Tok::ident && !kKeywords.contains(peek().text)))
        binders.push_back(identifier());
      // `exists x. P` extends as far right as possible; `exists x (P)` binds
      // only the bracketed formula.
      Assertion body = accept(".") ? implication() : negation();
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        body = ex ? Assertion::exists(*it, body) : Assertion::forall(*it, body);
      return body;
    }
    return assertion_atom();
  }

  Assertion assertion_atom() {
    if (accept("true")) return Assertion::truth();
    if (accept("false")) return Assertion::falsity();
    if (at("(")) {
      std::size_t save = pos_;
      try {
        return Assertion::atom(comparison());
      } catch (const ParseError&) {
        pos_ = save;
      }
      expect("(");
      Assertion a = implication();
      expect(")");
      return a;
    }
    return Assertion::atom(comparison());
  }
};

}  // namespace

Prog parse_program(std::string_view text) { return Parser(text).program(); }

Assertion parse_assertion(std::string_view text) { return rename_bound_apart(Parser(text).assertion()); }

Expr parse_expr(std::string_view text) { return Parser(text).expression(); }

BoolExpr parse_bool(std::string_view text) { return Parser(text).condition(); }

}  // namespace prhl
