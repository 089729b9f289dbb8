#pragma once

// Abstract syntax of the While language: expressions, boolean conditions,
// assertions and programs. All trees are immutable and shared; every node
// caches its structural hash and its variable set.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prhl {

using Nat = std::uint64_t;
using Var = std::string;
using VarSet = std::set<Var>;

class LangError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ArithOp { add, sub, mul, div, mod };

namespace detail {
struct ExprNode;
struct BoolNode;
struct AssertionNode;
struct ProgNode;
}  // namespace detail

class Expr {
 public:
  enum class Kind { var, constant, binary };

  /// The constant 0.
  Expr();
  static Expr var(Var name);
  static Expr constant(Nat value);
  static Expr binary(ArithOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  const Var& name() const;
  Nat value() const;
  ArithOp op() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  const VarSet& vars() const;
  std::size_t hash() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::ExprNode> node_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::binary(ArithOp::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(ArithOp::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(ArithOp::mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::binary(ArithOp::div, std::move(a), std::move(b)); }
inline Expr operator%(Expr a, Expr b) { return Expr::binary(ArithOp::mod, std::move(a), std::move(b)); }

class BoolExpr {
 public:
  enum class Kind { eq, le, negation, conjunction, disjunction };

  /// `0 = 0`, the encoding of true.
  BoolExpr();
  static BoolExpr eq(Expr a, Expr b);
  static BoolExpr le(Expr a, Expr b);
  static BoolExpr negation(BoolExpr b);
  static BoolExpr conj(BoolExpr a, BoolExpr b);
  static BoolExpr disj(BoolExpr a, BoolExpr b);

  // Derived forms.
  static BoolExpr truth();
  static BoolExpr falsity();
  static BoolExpr lt(Expr a, Expr b) { return negation(le(std::move(b), std::move(a))); }
  static BoolExpr gt(Expr a, Expr b) { return negation(le(std::move(a), std::move(b))); }
  static BoolExpr ge(Expr a, Expr b) { return le(std::move(b), std::move(a)); }
  static BoolExpr ne(Expr a, Expr b) { return negation(eq(std::move(a), std::move(b))); }

  Kind kind() const;
  /// Operands of eq / le.
  const Expr& left() const;
  const Expr& right() const;
  /// Operands of negation (sub(0)) and of the binary connectives.
  const BoolExpr& sub(std::size_t i) const;
  const VarSet& vars() const;
  std::size_t hash() const;

  friend bool operator==(const BoolExpr& a, const BoolExpr& b);

 private:
  explicit BoolExpr(std::shared_ptr<const detail::BoolNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::BoolNode> node_;
};

// Assertions are kept in a canonical form: negation, conjunction and
// disjunction whose operands are all quantifier-free boolean conditions are
// folded into a single atom. Every constructor below maintains this, so
// structural equality of parsed and constructed assertions coincides.
class Assertion {
 public:
  enum class Kind { atom, negation, conjunction, disjunction, implication, exists, forall };

  /// The atom `0 = 0`.
  Assertion();
  static Assertion atom(BoolExpr b);
  static Assertion negation(Assertion a);
  static Assertion conj(Assertion a, Assertion b);
  static Assertion disj(Assertion a, Assertion b);
  static Assertion implies(Assertion a, Assertion b);
  static Assertion exists(Var x, Assertion body);
  static Assertion forall(Var x, Assertion body);
  static Assertion truth() { return atom(BoolExpr::truth()); }
  static Assertion falsity() { return atom(BoolExpr::falsity()); }

  Kind kind() const;
  const BoolExpr& as_bool() const;
  const Assertion& sub(std::size_t i) const;
  /// Binder of exists / forall.
  const Var& bound() const;
  const Assertion& body() const { return sub(0); }
  const VarSet& free_vars() const;
  std::size_t hash() const;
  bool is_quantifier() const { return kind() == Kind::exists || kind() == Kind::forall; }

  friend bool operator==(const Assertion& a, const Assertion& b);

 private:
  explicit Assertion(std::shared_ptr<const detail::AssertionNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::AssertionNode> node_;
};

class Prog {
 public:
  enum class Kind { empty, assign, seq, while_loop, choice };

  /// The empty program.
  Prog();
  static Prog empty() { return Prog(); }
  static Prog assign(Var x, Expr e);
  /// Sequential composition, normalized: empty operands are elided and
  /// sequences are kept right-nested, so the first operand of a Seq node
  /// is never itself a Seq or empty.
  static Prog seq(Prog a, Prog b);
  static Prog while_loop(BoolExpr guard, Prog body, std::optional<Assertion> invariant = std::nullopt);
  static Prog choice(Prog a, Prog b);

  Kind kind() const;
  bool is_empty() const { return kind() == Kind::empty; }
  const Var& target() const;
  const Expr& expr() const;
  const BoolExpr& guard() const;
  const Prog& body() const { return sub(0); }
  const std::optional<Assertion>& invariant() const;
  const Prog& sub(std::size_t i) const;
  /// Variables occurring in the program (invariant annotations excluded).
  const VarSet& vars() const;
  std::size_t hash() const;

  friend bool operator==(const Prog& a, const Prog& b);

 private:
  explicit Prog(std::shared_ptr<const detail::ProgNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::ProgNode> node_;
};

namespace detail {

struct ExprNode {
  Expr::Kind kind{};
  Var name;
  Nat value = 0;
  ArithOp op{};
  std::vector<Expr> kids;
  VarSet vars;
  std::size_t hash = 0;
};

struct BoolNode {
  BoolExpr::Kind kind{};
  std::vector<Expr> terms;
  std::vector<BoolExpr> kids;
  VarSet vars;
  std::size_t hash = 0;
};

struct AssertionNode {
  Assertion::Kind kind{};
  std::optional<BoolExpr> atom;
  Var bound;
  std::vector<Assertion> kids;
  VarSet free_vars;
  std::size_t hash = 0;
};

struct ProgNode {
  Prog::Kind kind{};
  Var target;
  std::optional<Expr> expr;
  std::optional<BoolExpr> guard;
  std::optional<Assertion> invariant;
  std::vector<Prog> kids;
  VarSet vars;
  std::size_t hash = 0;
};

}  // namespace detail

inline Expr::Kind Expr::kind() const { return node_->kind; }
inline const Var& Expr::name() const { return node_->name; }
inline Nat Expr::value() const { return node_->value; }
inline ArithOp Expr::op() const { return node_->op; }
inline const Expr& Expr::lhs() const { return node_->kids[0]; }
inline const Expr& Expr::rhs() const { return node_->kids[1]; }
inline const VarSet& Expr::vars() const { return node_->vars; }
inline std::size_t Expr::hash() const { return node_->hash; }

inline BoolExpr::Kind BoolExpr::kind() const { return node_->kind; }
inline const Expr& BoolExpr::left() const { return node_->terms[0]; }
inline const Expr& BoolExpr::right() const { return node_->terms[1]; }
inline const BoolExpr& BoolExpr::sub(std::size_t i) const { return node_->kids[i]; }
inline const VarSet& BoolExpr::vars() const { return node_->vars; }
inline std::size_t BoolExpr::hash() const { return node_->hash; }

inline Assertion::Kind Assertion::kind() const { return node_->kind; }
inline const BoolExpr& Assertion::as_bool() const { return *node_->atom; }
inline const Assertion& Assertion::sub(std::size_t i) const { return node_->kids[i]; }
inline const Var& Assertion::bound() const { return node_->bound; }
inline const VarSet& Assertion::free_vars() const { return node_->free_vars; }
inline std::size_t Assertion::hash() const { return node_->hash; }

inline Prog::Kind Prog::kind() const { return node_->kind; }
inline const Var& Prog::target() const { return node_->target; }
inline const Expr& Prog::expr() const { return *node_->expr; }
inline const BoolExpr& Prog::guard() const { return *node_->guard; }
inline const std::optional<Assertion>& Prog::invariant() const { return node_->invariant; }
inline const Prog& Prog::sub(std::size_t i) const { return node_->kids[i]; }
inline const VarSet& Prog::vars() const { return node_->vars; }
inline std::size_t Prog::hash() const { return node_->hash; }

// ---------------------------------------------------------------------------
// Variable analysis

inline const VarSet& free_vars(const Assertion& a) { return a.free_vars(); }
inline const VarSet& vars(const Prog& p) { return p.vars(); }
inline const VarSet& vars(const Expr& e) { return e.vars(); }
inline const VarSet& vars(const BoolExpr& b) { return b.vars(); }

/// Every variable name occurring in `a`, bound or free.
VarSet all_vars(const Assertion& a);

/// Deterministic fresh name: `hint` itself if unused, otherwise the base of
/// `hint` with the smallest `_pN` suffix not in `avoid`.
Var fresh_var(const VarSet& avoid, const Var& hint);

// ---------------------------------------------------------------------------
// Substitution

using Bindings = std::vector<std::pair<Var, Expr>>;

/// Simultaneous substitution. For assertions it is capture avoiding: a binder
/// that would capture a variable of a substituted expression is renamed.
Expr subst(const Expr& e, const Bindings& bindings);
BoolExpr subst(const BoolExpr& b, const Bindings& bindings);
Assertion subst(const Assertion& a, const Bindings& bindings);

/// Renames binders so they differ from each other and from the free variables.
Assertion rename_bound_apart(const Assertion& a);

/// Structural equality modulo renaming of bound variables.
bool alpha_equal(const Assertion& a, const Assertion& b);

// ---------------------------------------------------------------------------
// Programs

/// Rebuilds `p` through the normalizing constructors.
Prog normalize(const Prog& p);

/// Splits a non-empty program into its first statement (assignment, loop or
/// choice) and the remaining continuation.
std::pair<Prog, Prog> decompose_head(const Prog& p);

/// Drops invariant annotations from every loop.
Prog strip_annotations(const Prog& p);

}  // namespace prhl

template <>
struct std::hash<prhl::Prog> {
  std::size_t operator()(const prhl::Prog& p) const noexcept { return p.hash(); }
};
