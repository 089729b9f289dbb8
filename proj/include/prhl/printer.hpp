#pragma once

#include <ostream>
#include <string>

#include "prhl/ast.hpp"

namespace prhl {

// Output is accepted back by the parser and yields a structurally equal tree.
std::string to_string(const Expr& e);
std::string to_string(const BoolExpr& b);
std::string to_string(const Assertion& a);
std::string to_string(const Prog& p);

/// Renders generated `_pN` suffixes as N primes, for human-facing reports.
std::string with_primes(const std::string& text);

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }
inline std::ostream& operator<<(std::ostream& os, const BoolExpr& b) { return os << to_string(b); }
inline std::ostream& operator<<(std::ostream& os, const Assertion& a) { return os << to_string(a); }
inline std::ostream& operator<<(std::ostream& os, const Prog& p) { return os << to_string(p); }

}  // namespace prhl
