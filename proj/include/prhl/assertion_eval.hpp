#pragma once

// Bounded evaluation of assertions and the entailment oracle.

#include <memory>

#include "prhl/ast.hpp"
#include "prhl/semantics.hpp"

namespace prhl {

// `value` is always the bounded semantics (quantified variables range over
// 0..quant_bound). `exact` is set when the evaluator could also establish
// that the unbounded semantics agrees.
struct Truth {
  bool value = true;
  bool exact = true;
};

Truth evaluate(const Assertion& a, const State& s, Nat quant_bound);

/// Bounded satisfaction.
bool assert_holds(const State& s, const Assertion& a, Nat quant_bound);

struct EntailmentQuery {
  Assertion lhs;
  Assertion rhs;
  std::vector<Var> relevant_vars;  // empty: FV(lhs) ∪ FV(rhs)
  Bounds bounds;
};

/// Invalid carries the first state (in enumeration order) where lhs holds
/// and rhs fails, both established exactly. Valid means no such state exists
/// and every evaluation was exact; otherwise Unknown.
Verdict entails(const EntailmentQuery& q);

/// `⊨ a`.
Verdict models_tautology(const Assertion& a, const std::vector<Var>& vars, const Bounds& b);

class EntailmentOracle {
 public:
  virtual ~EntailmentOracle() = default;
  virtual Verdict decide(const EntailmentQuery& q) = 0;
};

class BoundedOracle : public EntailmentOracle {
 public:
  Verdict decide(const EntailmentQuery& q) override { return entails(q); }
};

}  // namespace prhl
