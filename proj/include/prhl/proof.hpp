#pragma once

// Proof certificates for the ordinary system (trees) and the cyclic system
// (node tables with back-links), plus their JSON form.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "prhl/ast.hpp"
#include "prhl/semantics.hpp"

namespace prhl {

using NodeId = std::string;

class ProofFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triple {
  Assertion pre;
  Prog prog;
  Assertion post;
};

/// Structural equality up to renaming of bound variables.
bool same_triple(const Triple& a, const Triple& b);
std::string to_string(const Triple& t);

/// Reads the plain-text triple format: sections introduced by `pre:`,
/// `prog:` and `post:` at the start of a line, each running until the next
/// section. `#` starts a comment. Throws ProofFormatError on a missing or
/// repeated section and ParseError on bad section text.
Triple parse_triple_file(const std::string& text);

enum class Rule {
  // ordinary system
  axiom,
  assign,
  seq,
  cons,
  disj,
  while_loop,
  // cyclic system (axiom, cons, disj and while_loop are shared)
  assign_subst,
  assign_fresh,
  open_leaf,
};

std::string to_string(Rule r);
std::optional<Rule> parse_rule(const std::string& name);

/// Number of premises a rule takes (While has one in the ordinary system
/// and two in the cyclic one).
std::size_t arity(Rule r, bool cyclic);

struct PrhlNode {
  NodeId id;  // filled in by number_nodes; empty until then
  Triple triple;
  Rule rule = Rule::axiom;
  std::vector<PrhlNode> children;
};

/// Assigns ids n0, n1, ... in preorder.
void number_nodes(PrhlNode& root);

struct CyclicNode {
  Triple triple;
  Rule rule = Rule::axiom;
  std::vector<NodeId> children;
  std::optional<Var> fresh;  // x′ of AssignFresh
};

struct CyclicPreProof {
  std::map<NodeId, CyclicNode> nodes;
  NodeId root;
  std::map<NodeId, NodeId> backlinks;  // open leaf -> companion

  const CyclicNode& at(const NodeId& id) const { return nodes.at(id); }
  /// Ids in natural order (n2 before n10).
  std::vector<NodeId> ids() const;
  /// Leaves with rule OpenLeaf and no back-link.
  std::vector<NodeId> proper_open_leaves() const;
};

/// Orders ids by their embedded numbers, so n2 < n10.
bool id_less(const NodeId& a, const NodeId& b);

using Certificate = std::variant<PrhlNode, CyclicPreProof>;

/// Canonical JSON: nodes in id order, two-space indentation.
std::string serialize(const PrhlNode& p);
std::string serialize(const CyclicPreProof& c);
std::string serialize(const Certificate& c);

/// Throws ProofFormatError on malformed documents, duplicate keys or ids,
/// dangling references, non-tree shapes and back-links that do not end at
/// an inner node, and ParseError on bad assertion or program text.
Certificate parse_proof(const std::string& text);

struct ProofGraph {
  std::vector<NodeId> nodes;                          // id order
  std::vector<std::pair<NodeId, NodeId>> edges;       // parent->child, then leaf->companion
};

ProofGraph proof_graph(const CyclicPreProof& c);

/// Checks the tree shape and back-link targets; throws ProofFormatError.
void validate_shape(const CyclicPreProof& c);

}  // namespace prhl
