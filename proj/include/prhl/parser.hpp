#pragma once

#include <string_view>

#include "prhl/ast.hpp"

namespace prhl {

class ParseError : public LangError {
 public:
  ParseError(const std::string& msg, int line, int column)
      : LangError(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Concrete syntax:
//
//   C ::= skip | x := E | C ; C | C + C | { C } | ( C )
//       | while B [invariant P] do { C } | if B then C else C
//   E ::= n | x | E (+|-|*|/|%) E | ( E )
//   B ::= true | false | E (=|!=|<=|<|>=|>) E | !B | B && B | B || B | ( B )
//   P ::= B | !P | P && P | P || P | P -> P | exists x. P | forall x. P | ( P )
//
// `;` binds loosest and associates to the right; `+` on programs associates
// to the left. Unicode connectives and primed names (x', x′ → x_p1) are
// accepted.
Prog parse_program(std::string_view text);
Assertion parse_assertion(std::string_view text);
Expr parse_expr(std::string_view text);
BoolExpr parse_bool(std::string_view text);

}  // namespace prhl
