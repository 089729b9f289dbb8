#pragma once

// States, the small-step relation and bounded execution, and the semantic
// validity oracle for triples.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prhl/ast.hpp"

namespace prhl {

class ArithmeticOverflow : public std::runtime_error {
 public:
  ArithmeticOverflow() : std::runtime_error("arithmetic overflow") {}
};

// A total map Var -> Nat. Unmapped variables read as 0, and zero entries are
// never stored, so equality is extensional.
class State {
 public:
  State() = default;
  State(std::initializer_list<std::pair<const Var, Nat>> init);

  Nat get(const Var& x) const {
    auto it = m_.find(x);
    return it == m_.end() ? 0 : it->second;
  }
  void set(const Var& x, Nat v);
  State with(const Var& x, Nat v) const {
    State s = *this;
    s.set(x, v);
    return s;
  }
  const std::map<Var, Nat>& entries() const { return m_; }
  std::size_t hash() const;

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::map<Var, Nat> m_;
};

/// `{i:5, x:10}`; with `vars`, lists exactly those variables.
std::string to_string(const State& s);
std::string to_string(const State& s, const std::vector<Var>& vars);

struct Bounds {
  Nat domain_max = 8;
  Nat step_bound = 10000;
  Nat quant_bound = 16;
};

Nat eval_expr(const Expr& e, const State& s);
bool eval_bool(const BoolExpr& b, const State& s);

struct Config {
  Prog prog;
  State state;
  friend bool operator==(const Config&, const Config&) = default;
};

/// All one-step successors.
std::vector<Config> step(const Config& c);

struct FinalState {
  State state;
  std::size_t steps;  // length of the shortest run reaching it
};

struct RunResult {
  std::vector<FinalState> finals;  // in order of discovery (shortest first)
  bool truncated = false;          // some branch was cut at the step budget
  bool overflow = false;           // some branch hit arithmetic overflow
};

/// Every final state reachable within `step_bound` steps along any branch.
RunResult run_all(const Prog& p, const State& s, const Bounds& b);

/// Calls `f` on every state over `vars` with values in 0..domain_max, in
/// lexicographic order (first variable most significant). Stops early when
/// `f` returns false.
void for_each_state(const std::vector<Var>& vars, Nat domain_max, const std::function<bool(const State&)>& f);
std::vector<State> enumerate_states(const std::vector<Var>& vars, Nat domain_max);

/// Lexicographic comparison of the values of `vars`.
bool state_less(const State& a, const State& b, const std::vector<Var>& vars);

// ---------------------------------------------------------------------------
// Verdicts

enum class UnknownReason { step_budget_exhausted, quantifier_bounded, arithmetic_overflow };

struct Witness {
  State initial;
  std::optional<State> final_state;
  std::size_t steps = 0;
};

struct Verdict {
  enum class Kind { valid, invalid, unknown };
  Kind kind = Kind::valid;
  std::optional<Witness> witness;
  std::optional<UnknownReason> reason;
  Bounds bounds;
  std::vector<Var> vars;  // the enumerated variables

  bool valid() const { return kind == Kind::valid; }
  bool invalid() const { return kind == Kind::invalid; }
  bool unknown() const { return kind == Kind::unknown; }
};

std::string to_string(UnknownReason r);
std::string to_string(const Verdict& v);

// ---------------------------------------------------------------------------
// Predicate transformers and triple validity

enum class Transformer { wpr, wlp, sp, slp };

using StatePredicate = std::function<bool(const State&)>;

struct TransformerResult {
  std::vector<State> states;  // enumeration order
  bool truncated = false;
};

/// The set defined by the corresponding equivalence, over states on `vars`
/// with values in 0..domain_max. For wpr and wlp the result ranges over
/// initial states; for sp and slp over final states.
TransformerResult transformer_set(Transformer kind, const Prog& p, const StatePredicate& pred,
                                  const std::vector<Var>& vars, const Bounds& b);

enum class Logic { partial_reverse, partial_hoare, total_hoare, incorrectness };

std::optional<Logic> parse_logic(const std::string& name);
std::string to_string(Logic l);

/// The variables a triple is enumerated over: FV(P) ∪ FV(Q) ∪ vars(C), sorted.
std::vector<Var> relevant_vars(const Assertion& pre, const Prog& p, const Assertion& post);

/// Decides the triple by enumerating initial states. For partial reverse
/// triples, an Invalid witness is a run from a state violating `pre` to a
/// state satisfying `post`; the shortest such run is reported.
Verdict check_triple(Logic logic, const Assertion& pre, const Prog& p, const Assertion& post, const Bounds& b);

}  // namespace prhl

template <>
struct std::hash<prhl::State> {
  std::size_t operator()(const prhl::State& s) const noexcept { return s.hash(); }
};
