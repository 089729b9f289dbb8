#pragma once

// Symbolic weakest pre-conditions (existential: some run reaches the post).

#include <stdexcept>
#include <utility>
#include <vector>

#include "prhl/ast.hpp"

namespace prhl {

class SearchExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingInvariant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// β(a, b, i, x) ≙ x = a % (1 + (1 + i) * b)
Assertion beta(const Expr& a, const Expr& b, const Expr& i, const Expr& x);

/// Smallest (by m, then n) pair with β(n, m, j, values[j]) for every j.
std::pair<Nat, Nat> encode_sequence(const std::vector<Nat>& values, Nat ceiling = 1'000'000);
std::vector<Nat> decode_sequence(Nat n, Nat m, std::size_t length);

struct LoopMode {
  enum class Kind { beta, invariant, unroll };
  Kind kind = Kind::beta;
  unsigned unroll_depth = 0;

  static LoopMode beta_mode() { return {}; }
  static LoopMode invariant_mode() { return {Kind::invariant, 0}; }
  static LoopMode unroll(unsigned k) { return {Kind::unroll, k}; }
};

struct WprRequest {
  Prog program;
  Assertion post;
  LoopMode loop_mode;
};

/// beta: the arithmetic encoding of loop runs (exact).
/// invariant: each loop's annotation stands for its weakest pre-condition.
/// unroll: loops are replaced by k guarded unrollings, which can only
/// under-approximate.
Assertion wpr_formula(const WprRequest& req);
inline Assertion wpr_formula(const Prog& p, const Assertion& post, LoopMode mode = {}) {
  return wpr_formula(WprRequest{p, post, mode});
}

/// Whether `wpr_formula` output for this request is exact (no unrolling cut).
bool wpr_is_exact(const Prog& p, LoopMode mode);

}  // namespace prhl
