#include "prhl/printer.hpp"

#include <cctype>

namespace prhl {

namespace {

int prec(ArithOp op) { return op == ArithOp::add || op == ArithOp::sub ? 1 : 2; }

const char* symbol(ArithOp op) {
  switch (op) {
    case ArithOp::add: return " + ";
    case ArithOp::sub: return " - ";
    case ArithOp::mul: return " * ";
    case ArithOp::div: return " / ";
    case ArithOp::mod: return " % ";
  }
  return " ? ";
}

void print(std::string& out, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::var: out += e.name(); return;
    case Expr::Kind::constant: out += std::to_string(e.value()); return;
    case Expr::Kind::binary: {
      int p = prec(e.op());
      auto operand = [&](const Expr& sub, bool right) {
        bool paren = sub.kind() == Expr::Kind::binary && (right ? prec(sub.op()) <= p : prec(sub.op()) < p);
        if (paren) out += '(';
        print(out, sub);
        if (paren) out += ')';
      };
      operand(e.lhs(), false);
      out += symbol(e.op());
      operand(e.rhs(), true);
      return;
    }
  }
}

bool is_true(const BoolExpr& b) {
  return b.kind() == BoolExpr::Kind::eq && b.left().kind() == Expr::Kind::constant && b.left().value() == 0 &&
         b.right().kind() == Expr::Kind::constant && b.right().value() == 0;
}

// Precedence levels shared by conditions and assertions:
// 1 implication, 2 disjunction, 3 conjunction, 4 negation, 5 atomic.
int level(const BoolExpr& b) {
  switch (b.kind()) {
    case BoolExpr::Kind::disjunction: return 2;
    case BoolExpr::Kind::conjunction: return 3;
    case BoolExpr::Kind::negation: {
      const BoolExpr& s = b.sub(0);
      if (s.kind() == BoolExpr::Kind::eq || s.kind() == BoolExpr::Kind::le) return 5;
      return 4;
    }
    default: return 5;
  }
}

void print(std::string& out, const BoolExpr& b);

void print_at(std::string& out, const BoolExpr& b, int min_level) {
  bool paren = level(b) < min_level;
  if (paren) out += '(';
  print(out, b);
  if (paren) out += ')';
}

void comparison(std::string& out, const Expr& a, const char* op, const Expr& b) {
  print(out, a);
  out += op;
  print(out, b);
}

void print(std::string& out, const BoolExpr& b) {
  switch (b.kind()) {
    case BoolExpr::Kind::eq:
      if (is_true(b)) {
        out += "true";
      } else {
        comparison(out, b.left(), " = ", b.right());
      }
      return;
    case BoolExpr::Kind::le:
      if (b.left().kind() == Expr::Kind::constant && b.right().kind() != Expr::Kind::constant) {
        comparison(out, b.right(), " >= ", b.left());
      } else {
        comparison(out, b.left(), " <= ", b.right());
      }
      return;
    case BoolExpr::Kind::negation: {
      const BoolExpr& s = b.sub(0);
      if (is_true(s)) {
        out += "false";
      } else if (s.kind() == BoolExpr::Kind::eq) {
        comparison(out, s.left(), " != ", s.right());
      } else if (s.kind() == BoolExpr::Kind::le) {
        if (s.left().kind() == Expr::Kind::constant && s.right().kind() != Expr::Kind::constant) {
          comparison(out, s.right(), " < ", s.left());
        } else {
          comparison(out, s.left(), " > ", s.right());
        }
      } else {
        out += '!';
        // Keep `!` visually attached to a bracketed operand.
        out += '(';
        print(out, s);
        out += ')';
      }
      return;
    }
    case BoolExpr::Kind::conjunction:
      print_at(out, b.sub(0), 3);
      out += " && ";
      print_at(out, b.sub(1), 4);
      return;
    case BoolExpr::Kind::disjunction:
      print_at(out, b.sub(0), 2);
      out += " || ";
      print_at(out, b.sub(1), 3);
      return;
  }
}

int level(const Assertion& a) {
  switch (a.kind()) {
    case Assertion::Kind::atom: return level(a.as_bool());
    case Assertion::Kind::negation: return 4;
    case Assertion::Kind::conjunction: return 3;
    case Assertion::Kind::disjunction: return 2;
    case Assertion::Kind::implication: return 1;
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: return 0;
  }
  return 0;
}

void print(std::string& out, const Assertion& a);

void print_at(std::string& out, const Assertion& a, int min_level) {
  bool paren = level(a) < min_level;
  if (paren) out += '(';
  print(out, a);
  if (paren) out += ')';
}

void print(std::string& out, const Assertion& a) {
  switch (a.kind()) {
    case Assertion::Kind::atom: print(out, a.as_bool()); return;
    case Assertion::Kind::negation:
      out += "!(";
      print(out, a.sub(0));
      out += ')';
      return;
    case Assertion::Kind::conjunction:
      print_at(out, a.sub(0), 3);
      out += " && ";
      print_at(out, a.sub(1), 4);
      return;
    case Assertion::Kind::disjunction:
      print_at(out, a.sub(0), 2);
      out += " || ";
      print_at(out, a.sub(1), 3);
      return;
    case Assertion::Kind::implication:
      print_at(out, a.sub(0), 2);
      out += " -> ";
      print_at(out, a.sub(1), 1);
      return;
    case Assertion::Kind::exists:
    case Assertion::Kind::forall:
      out += a.kind() == Assertion::Kind::exists ? "exists " : "forall ";
      out += a.bound();
      out += ". ";
      print(out, a.body());
      return;
  }
}

void print(std::string& out, const Prog& p) {
  switch (p.kind()) {
    case Prog::Kind::empty: out += "skip"; return;
    case Prog::Kind::assign:
      out += p.target();
      out += " := ";
      print(out, p.expr());
      return;
    case Prog::Kind::seq:
      print(out, p.sub(0));
      out += "; ";
      print(out, p.sub(1));
      return;
    case Prog::Kind::choice: {
      const Prog& l = p.sub(0);
      const Prog& r = p.sub(1);
      bool pl = l.kind() == Prog::Kind::seq;
      bool pr = r.kind() == Prog::Kind::seq || r.kind() == Prog::Kind::choice;
      if (pl) out += '(';
      print(out, l);
      out += pl ? ") + " : " + ";
      if (pr) out += '(';
      print(out, r);
      if (pr) out += ')';
      return;
    }
    case Prog::Kind::while_loop:
      out += "while ";
      print(out, p.guard());
      if (p.invariant()) {
        out += " invariant ";
        print(out, *p.invariant());
      }
      out += " do { ";
      print(out, p.body());
      out += " }";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string s;
  print(s, e);
  return s;
}

std::string to_string(const BoolExpr& b) {
  std::string s;
  print(s, b);
  return s;
}

std::string to_string(const Assertion& a) {
  std::string s;
  print(s, a);
  return s;
}

std::string to_string(const Prog& p) {
  std::string s;
  print(s, p);
  return s;
}

std::string with_primes(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 2, "_p") == 0 && i > 0 &&
        (std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_')) {
      std::size_t j = i + 2;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      bool word_end = j == text.size() || !(std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_');
      if (j > i + 2 && word_end && j - i - 2 < 4) {
        int n = std::stoi(text.substr(i + 2, j - i - 2));
        for (int k = 0; k < n; ++k) out += "\xE2\x80\xB2";
        i = j;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace prhl
