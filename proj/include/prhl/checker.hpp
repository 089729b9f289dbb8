#pragma once

// Certificate checking for the ordinary and the cyclic proof systems.

#include <optional>
#include <string>
#include <vector>

#include "prhl/assertion_eval.hpp"
#include "prhl/proof.hpp"

namespace prhl {

struct NodeStatus {
  enum class Kind { ok, rule_mismatch, side_condition };
  NodeId id;
  Rule rule = Rule::axiom;
  Kind kind = Kind::ok;
  std::string detail;              // what failed, or which entailment was not certain
  std::optional<Verdict> verdict;  // side_condition: Invalid or Unknown
};

struct GlobalStatus {
  enum class Kind { ok, cons_cycle, open_leaves };
  Kind kind = Kind::ok;
  std::vector<NodeId> nodes;  // id order
};

enum class System { prhl, cprhl };

struct CheckReport {
  System system = System::prhl;
  std::vector<NodeStatus> nodes;  // id order
  GlobalStatus global;
  Bounds bounds;

  /// No rule mismatch, no refuted side condition, global condition holds.
  bool accepted() const;
  /// Accepted with every side condition decided without bounding.
  bool certain() const;
  /// Nodes whose side conditions came back Unknown.
  std::vector<const NodeStatus*> bounded() const;
};

struct CheckOptions {
  Bounds bounds;
  /// Also accept the fresh-assignment premise in the printed orientation
  /// x′ = E[x:=x′] ∧ P[x:=x′].
  bool strict_fig4_assign = false;
  /// Do not report proper open leaves (proofs with open leaves).
  bool allow_open_leaves = false;
};

CheckReport check_prhl(const PrhlNode& p, EntailmentOracle& oracle, const CheckOptions& opts = {});
CheckReport check_cprhl(const CyclicPreProof& c, EntailmentOracle& oracle, const CheckOptions& opts = {});
CheckReport check_certificate(const Certificate& c, EntailmentOracle& oracle, const CheckOptions& opts = {});

/// Ok iff no cycle of the proof graph stays inside Cons nodes (back-linked
/// leaves are identified with their companions). A reported cycle lists
/// its Cons nodes in id order.
GlobalStatus global_soundness(const CyclicPreProof& c);

}  // namespace prhl
