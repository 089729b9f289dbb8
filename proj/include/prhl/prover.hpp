#pragma once

// Proof construction for the ordinary system and its translation into
// cyclic pre-proofs.

#include <optional>

#include "prhl/assertion_eval.hpp"
#include "prhl/proof.hpp"
#include "prhl/wpr.hpp"

namespace prhl {

struct ProveRequest {
  Triple triple;
  LoopMode loop_mode;  // beta or invariant
  Bounds bounds;
};

struct ProveResult {
  /// Absent when the triple or one of the side conditions was refuted, or a
  /// loop lacked its annotation.
  std::optional<PrhlNode> proof;
  /// Valid when every side condition was decided. Invalid carries the
  /// refutation. Unknown marks a certificate whose side conditions could not
  /// all be decided at these bounds (the proof is still returned).
  Verdict verdict;
  std::string message;  // set on failures that are not verdicts
};

/// The certificate prove_prhl emits, built without consulting any oracle.
/// Its side conditions may fail; run check_prhl on it.
PrhlNode build_prhl(const Triple& t, LoopMode mode);

/// Builds a proof by structural recursion on the program with weakest
/// pre-conditions as intermediate assertions. The root triple is first
/// tested by enumeration, so an invalid triple fails with its run witness.
ProveResult prove_prhl(const ProveRequest& r, EntailmentOracle& oracle);

/// A cyclic pre-proof of ⦗pre⦘ C;continuation ⦗r⦘ whose proper open leaves
/// are labelled ⦗post⦘ continuation ⦗r⦘. When the continuation is empty and
/// r is the post-condition those leaves are closed with Axiom. Leaves that
/// re-enter a loop are back-linked to the While node of that loop.
CyclicPreProof transform_to_cyclic(const PrhlNode& p, const Prog& continuation, const Assertion& r);
CyclicPreProof transform_to_cyclic(const PrhlNode& p);

}  // namespace prhl
