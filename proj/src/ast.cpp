#include "prhl/ast.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace prhl {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t str_hash(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(constant(0)) {}

Expr Expr::var(Var name) {
  if (name.empty()) throw LangError("empty variable name");
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::var;
  n->vars.insert(name);
  n->hash = mix(1, str_hash(name));
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::constant(Nat value) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::constant;
  n->value = value;
  n->hash = mix(2, std::hash<Nat>{}(value));
  return Expr(std::move(n));
}

Expr Expr::binary(ArithOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::binary;
  n->op = op;
  n->vars = lhs.vars();
  n->vars.insert(rhs.vars().begin(), rhs.vars().end());
  n->hash = mix(mix(mix(3, static_cast<std::size_t>(op)), lhs.hash()), rhs.hash());
  n->kids = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::var: return a.name() == b.name();
    case Expr::Kind::constant: return a.value() == b.value();
    case Expr::Kind::binary: return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// BoolExpr

BoolExpr::BoolExpr() : BoolExpr(eq(Expr::constant(0), Expr::constant(0))) {}

BoolExpr BoolExpr::eq(Expr a, Expr b) {
  auto n = std::make_shared<detail::BoolNode>();
  n->kind = Kind::eq;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(mix(11, static_cast<std::size_t>(Kind::eq)), a.hash()), b.hash());
  n->terms = {std::move(a), std::move(b)};
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::le(Expr a, Expr b) {
  auto n = std::make_shared<detail::BoolNode>();
  n->kind = Kind::le;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(mix(11, static_cast<std::size_t>(Kind::le)), a.hash()), b.hash());
  n->terms = {std::move(a), std::move(b)};
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::negation(BoolExpr b) {
  auto n = std::make_shared<detail::BoolNode>();
  n->kind = Kind::negation;
  n->vars = b.vars();
  n->hash = mix(mix(11, static_cast<std::size_t>(Kind::negation)), b.hash());
  n->kids = {std::move(b)};
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::conj(BoolExpr a, BoolExpr b) {
  auto n = std::make_shared<detail::BoolNode>();
  n->kind = Kind::conjunction;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(mix(11, static_cast<std::size_t>(Kind::conjunction)), a.hash()), b.hash());
  n->kids = {std::move(a), std::move(b)};
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::disj(BoolExpr a, BoolExpr b) {
  auto n = std::make_shared<detail::BoolNode>();
  n->kind = Kind::disjunction;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(mix(11, static_cast<std::size_t>(Kind::disjunction)), a.hash()), b.hash());
  n->kids = {std::move(a), std::move(b)};
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::truth() { return eq(Expr::constant(0), Expr::constant(0)); }
BoolExpr BoolExpr::falsity() { return negation(truth()); }

bool operator==(const BoolExpr& a, const BoolExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case BoolExpr::Kind::eq:
    case BoolExpr::Kind::le: return a.left() == b.left() && a.right() == b.right();
    case BoolExpr::Kind::negation: return a.sub(0) == b.sub(0);
    case BoolExpr::Kind::conjunction:
    case BoolExpr::Kind::disjunction: return a.sub(0) == b.sub(0) && a.sub(1) == b.sub(1);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Assertion

Assertion::Assertion() : Assertion(atom(BoolExpr::truth())) {}

Assertion Assertion::atom(BoolExpr b) {
  auto n = std::make_shared<detail::AssertionNode>();
  n->kind = Kind::atom;
  n->free_vars = b.vars();
  n->hash = mix(21, b.hash());
  n->atom = std::move(b);
  return Assertion(std::move(n));
}

namespace {

std::shared_ptr<detail::AssertionNode> compound(Assertion::Kind kind, std::vector<Assertion> kids) {
  auto n = std::make_shared<detail::AssertionNode>();
  n->kind = kind;
  std::size_t h = mix(21, static_cast<std::size_t>(kind));
  for (const auto& k : kids) {
    n->free_vars.insert(k.free_vars().begin(), k.free_vars().end());
    h = mix(h, k.hash());
  }
  n->hash = h;
  n->kids = std::move(kids);
  return n;
}

}  // namespace

Assertion Assertion::negation(Assertion a) {
  if (a.kind() == Kind::atom) return atom(BoolExpr::negation(a.as_bool()));
  return Assertion(compound(Kind::negation, {std::move(a)}));
}

Assertion Assertion::conj(Assertion a, Assertion b) {
  if (a.kind() == Kind::atom && b.kind() == Kind::atom) return atom(BoolExpr::conj(a.as_bool(), b.as_bool()));
  return Assertion(compound(Kind::conjunction, {std::move(a), std::move(b)}));
}

Assertion Assertion::disj(Assertion a, Assertion b) {
  if (a.kind() == Kind::atom && b.kind() == Kind::atom) return atom(BoolExpr::disj(a.as_bool(), b.as_bool()));
  return Assertion(compound(Kind::disjunction, {std::move(a), std::move(b)}));
}

Assertion Assertion::implies(Assertion a, Assertion b) {
  return Assertion(compound(Kind::implication, {std::move(a), std::move(b)}));
}

Assertion Assertion::exists(Var x, Assertion body) {
  if (x.empty()) throw LangError("empty binder");
  auto n = compound(Kind::exists, {std::move(body)});
  n->free_vars.erase(x);
  n->hash = mix(n->hash, str_hash(x));
  n->bound = std::move(x);
  return Assertion(std::move(n));
}

Assertion Assertion::forall(Var x, Assertion body) {
  if (x.empty()) throw LangError("empty binder");
  auto n = compound(Kind::forall, {std::move(body)});
  n->free_vars.erase(x);
  n->hash = mix(n->hash, str_hash(x));
  n->bound = std::move(x);
  return Assertion(std::move(n));
}

bool operator==(const Assertion& a, const Assertion& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Assertion::Kind::atom: return a.as_bool() == b.as_bool();
    case Assertion::Kind::negation: return a.sub(0) == b.sub(0);
    case Assertion::Kind::conjunction:
    case Assertion::Kind::disjunction:
    case Assertion::Kind::implication: return a.sub(0) == b.sub(0) && a.sub(1) == b.sub(1);
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: return a.bound() == b.bound() && a.sub(0) == b.sub(0);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Prog

Prog::Prog() {
  static const auto empty_node = [] {
    auto n = std::make_shared<detail::ProgNode>();
    n->kind = Kind::empty;
    n->hash = 31;
    return n;
  }();
  node_ = empty_node;
}

Prog Prog::assign(Var x, Expr e) {
  if (x.empty()) throw LangError("empty assignment target");
  auto n = std::make_shared<detail::ProgNode>();
  n->kind = Kind::assign;
  n->vars = e.vars();
  n->vars.insert(x);
  n->hash = mix(mix(32, str_hash(x)), e.hash());
  n->target = std::move(x);
  n->expr = std::move(e);
  return Prog(std::move(n));
}

Prog Prog::seq(Prog a, Prog b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  if (a.kind() == Kind::seq) return seq(a.sub(0), seq(a.sub(1), std::move(b)));
  auto n = std::make_shared<detail::ProgNode>();
  n->kind = Kind::seq;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(33, a.hash()), b.hash());
  n->kids = {std::move(a), std::move(b)};
  return Prog(std::move(n));
}

Prog Prog::while_loop(BoolExpr guard, Prog body, std::optional<Assertion> invariant) {
  auto n = std::make_shared<detail::ProgNode>();
  n->kind = Kind::while_loop;
  n->vars = guard.vars();
  n->vars.insert(body.vars().begin(), body.vars().end());
  std::size_t h = mix(mix(34, guard.hash()), body.hash());
  if (invariant) h = mix(h, invariant->hash());
  n->hash = h;
  n->guard = std::move(guard);
  n->invariant = std::move(invariant);
  n->kids = {std::move(body)};
  return Prog(std::move(n));
}

Prog Prog::choice(Prog a, Prog b) {
  auto n = std::make_shared<detail::ProgNode>();
  n->kind = Kind::choice;
  n->vars = a.vars();
  n->vars.insert(b.vars().begin(), b.vars().end());
  n->hash = mix(mix(35, a.hash()), b.hash());
  n->kids = {std::move(a), std::move(b)};
  return Prog(std::move(n));
}

bool operator==(const Prog& a, const Prog& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Prog::Kind::empty: return true;
    case Prog::Kind::assign: return a.target() == b.target() && a.expr() == b.expr();
    case Prog::Kind::seq:
    case Prog::Kind::choice: return a.sub(0) == b.sub(0) && a.sub(1) == b.sub(1);
    case Prog::Kind::while_loop:
      return a.guard() == b.guard() && a.body() == b.body() && a.invariant() == b.invariant();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Variables

VarSet all_vars(const Assertion& a) {
  VarSet out;
  std::function<void(const Assertion&)> go = [&](const Assertion& f) {
    if (f.kind() == Assertion::Kind::atom) {
      out.insert(f.as_bool().vars().begin(), f.as_bool().vars().end());
      return;
    }
    if (f.is_quantifier()) out.insert(f.bound());
    for (std::size_t i = 0; i < (f.kind() == Assertion::Kind::negation || f.is_quantifier() ? 1u : 2u); ++i)
      go(f.sub(i));
  };
  go(a);
  return out;
}

Var fresh_var(const VarSet& avoid, const Var& hint) {
  if (!avoid.contains(hint)) return hint;
  Var base = hint;
  auto pos = base.rfind("_p");
  if (pos != Var::npos && pos + 2 < base.size() &&
      std::all_of(base.begin() + static_cast<long>(pos) + 2, base.end(), [](char c) { return c >= '0' && c <= '9'; }))
    base.resize(pos);
  for (unsigned n = 1;; ++n) {
    Var candidate = base + "_p" + std::to_string(n);
    if (!avoid.contains(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Substitution

Expr subst(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  switch (e.kind()) {
    case Expr::Kind::constant: return e;
    case Expr::Kind::var:
      for (const auto& [x, v] : bindings)
        if (x == e.name()) return v;
      return e;
    case Expr::Kind::binary: {
      bool touched = std::any_of(bindings.begin(), bindings.end(),
                                 [&](const auto& b) { return e.vars().contains(b.first); });
      if (!touched) return e;
      return Expr::binary(e.op(), subst(e.lhs(), bindings), subst(e.rhs(), bindings));
    }
  }
  return e;
}

BoolExpr subst(const BoolExpr& b, const Bindings& bindings) {
  bool touched = std::any_of(bindings.begin(), bindings.end(),
                             [&](const auto& x) { return b.vars().contains(x.first); });
  if (!touched) return b;
  switch (b.kind()) {
    case BoolExpr::Kind::eq: return BoolExpr::eq(subst(b.left(), bindings), subst(b.right(), bindings));
    case BoolExpr::Kind::le: return BoolExpr::le(subst(b.left(), bindings), subst(b.right(), bindings));
    case BoolExpr::Kind::negation: return BoolExpr::negation(subst(b.sub(0), bindings));
    case BoolExpr::Kind::conjunction: return BoolExpr::conj(subst(b.sub(0), bindings), subst(b.sub(1), bindings));
    case BoolExpr::Kind::disjunction: return BoolExpr::disj(subst(b.sub(0), bindings), subst(b.sub(1), bindings));
  }
  return b;
}

namespace {

Assertion rebuild(const Assertion& a, std::vector<Assertion> kids) {
  switch (a.kind()) {
    case Assertion::Kind::negation: return Assertion::negation(kids[0]);
    case Assertion::Kind::conjunction: return Assertion::conj(kids[0], kids[1]);
    case Assertion::Kind::disjunction: return Assertion::disj(kids[0], kids[1]);
    case Assertion::Kind::implication: return Assertion::implies(kids[0], kids[1]);
    case Assertion::Kind::exists: return Assertion::exists(a.bound(), kids[0]);
    case Assertion::Kind::forall: return Assertion::forall(a.bound(), kids[0]);
    case Assertion::Kind::atom: break;
  }
  return a;
}

std::size_t arity(const Assertion& a) {
  switch (a.kind()) {
    case Assertion::Kind::atom: return 0;
    case Assertion::Kind::negation:
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: return 1;
    default: return 2;
  }
}

}  // namespace

Assertion subst(const Assertion& a, const Bindings& bindings) {
  // Only bindings for free variables matter.
  Bindings live;
  for (const auto& b : bindings)
    if (a.free_vars().contains(b.first)) live.push_back(b);
  if (live.empty()) return a;

  if (a.kind() == Assertion::Kind::atom) return Assertion::atom(subst(a.as_bool(), live));
  if (!a.is_quantifier()) {
    std::vector<Assertion> kids;
    for (std::size_t i = 0; i < arity(a); ++i) kids.push_back(subst(a.sub(i), live));
    return rebuild(a, std::move(kids));
  }

  // The binder is not free, so `live` has no binding for it. Rename it if a
  // substituted expression mentions it.
  Var x = a.bound();
  Assertion body = a.body();
  bool captures = std::any_of(live.begin(), live.end(), [&](const auto& b) { return b.second.vars().contains(x); });
  if (captures) {
    VarSet avoid = all_vars(body);
    for (const auto& [y, e] : live) {
      avoid.insert(y);
      avoid.insert(e.vars().begin(), e.vars().end());
    }
    Var y = fresh_var(avoid, x);
    body = subst(body, Bindings{{x, Expr::var(y)}});
    x = y;
  }
  body = subst(body, live);
  return a.kind() == Assertion::Kind::exists ? Assertion::exists(x, body) : Assertion::forall(x, body);
}

Assertion rename_bound_apart(const Assertion& a) {
  VarSet used = all_vars(a);
  VarSet taken = a.free_vars();
  std::function<Assertion(const Assertion&)> go = [&](const Assertion& f) -> Assertion {
    if (f.kind() == Assertion::Kind::atom) return f;
    if (f.is_quantifier()) {
      Var x = f.bound();
      Assertion body = f.body();
      if (taken.contains(x)) {
        Var y = fresh_var(used, x);
        used.insert(y);
        body = subst(body, Bindings{{x, Expr::var(y)}});
        x = y;
      }
      taken.insert(x);
      body = go(body);
      return f.kind() == Assertion::Kind::exists ? Assertion::exists(x, body) : Assertion::forall(x, body);
    }
    std::vector<Assertion> kids;
    for (std::size_t i = 0; i < arity(f); ++i) kids.push_back(go(f.sub(i)));
    return rebuild(f, std::move(kids));
  };
  return go(a);
}

namespace {

// Bound variables are identified by binding depth; free ones by name.
using Env = std::map<Var, int>;

bool alpha_expr(const Expr& a, const Expr& b, const Env& ea, const Env& eb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::constant: return a.value() == b.value();
    case Expr::Kind::var: {
      auto ia = ea.find(a.name());
      auto ib = eb.find(b.name());
      if (ia == ea.end() || ib == eb.end()) return ia == ea.end() && ib == eb.end() && a.name() == b.name();
      return ia->second == ib->second;
    }
    case Expr::Kind::binary:
      return a.op() == b.op() && alpha_expr(a.lhs(), b.lhs(), ea, eb) && alpha_expr(a.rhs(), b.rhs(), ea, eb);
  }
  return false;
}

bool alpha_bool(const BoolExpr& a, const BoolExpr& b, const Env& ea, const Env& eb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case BoolExpr::Kind::eq:
    case BoolExpr::Kind::le:
      return alpha_expr(a.left(), b.left(), ea, eb) && alpha_expr(a.right(), b.right(), ea, eb);
    case BoolExpr::Kind::negation: return alpha_bool(a.sub(0), b.sub(0), ea, eb);
    case BoolExpr::Kind::conjunction:
    case BoolExpr::Kind::disjunction:
      return alpha_bool(a.sub(0), b.sub(0), ea, eb) && alpha_bool(a.sub(1), b.sub(1), ea, eb);
  }
  return false;
}

bool alpha(const Assertion& a, const Assertion& b, Env& ea, Env& eb, int depth) {
  if (a.kind() != b.kind()) return false;
  if (ea.empty() && eb.empty() && a == b) return true;
  switch (a.kind()) {
    case Assertion::Kind::atom: return alpha_bool(a.as_bool(), b.as_bool(), ea, eb);
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: {
      Env na = ea, nb = eb;
      na[a.bound()] = depth;
      nb[b.bound()] = depth;
      return alpha(a.body(), b.body(), na, nb, depth + 1);
    }
    default:
      for (std::size_t i = 0; i < arity(a); ++i)
        if (!alpha(a.sub(i), b.sub(i), ea, eb, depth)) return false;
      return true;
  }
}

}  // namespace

bool alpha_equal(const Assertion& a, const Assertion& b) {
  if (a == b) return true;
  if (a.free_vars() != b.free_vars()) return false;
  Env ea, eb;
  return alpha(a, b, ea, eb, 0);
}

// ---------------------------------------------------------------------------
// Programs

Prog normalize(const Prog& p) {
  switch (p.kind()) {
    case Prog::Kind::empty:
    case Prog::Kind::assign: return p;
    case Prog::Kind::seq: return Prog::seq(normalize(p.sub(0)), normalize(p.sub(1)));
    case Prog::Kind::choice: return Prog::choice(normalize(p.sub(0)), normalize(p.sub(1)));
    case Prog::Kind::while_loop: return Prog::while_loop(p.guard(), normalize(p.body()), p.invariant());
  }
  return p;
}

std::pair<Prog, Prog> decompose_head(const Prog& p) {
  switch (p.kind()) {
    case Prog::Kind::empty: throw LangError("decompose_head: empty program");
    case Prog::Kind::seq: return {p.sub(0), p.sub(1)};
    default: return {p, Prog::empty()};
  }
}

Prog strip_annotations(const Prog& p) {
  switch (p.kind()) {
    case Prog::Kind::empty:
    case Prog::Kind::assign: return p;
    case Prog::Kind::seq: return Prog::seq(strip_annotations(p.sub(0)), strip_annotations(p.sub(1)));
    case Prog::Kind::choice: return Prog::choice(strip_annotations(p.sub(0)), strip_annotations(p.sub(1)));
    case Prog::Kind::while_loop: return Prog::while_loop(p.guard(), strip_annotations(p.body()));
  }
  return p;
}

}  // namespace prhl
