#include "prhl/prover.hpp"

#include <functional>
#include <stdexcept>

#include "prhl/checker.hpp"
#include "prhl/printer.hpp"

namespace prhl {

namespace {

class PrhlBuilder {
 public:
  explicit PrhlBuilder(LoopMode mode) : mode_(mode) {}

  PrhlNode build(const Assertion& pre, const Prog& c, const Assertion& post) {
    switch (c.kind()) {
      case Prog::Kind::empty: return weaken(pre, leaf(Triple{post, c, post}, Rule::axiom));
      case Prog::Kind::assign:
        return weaken(pre, leaf(Triple{subst(post, Bindings{{c.target(), c.expr()}}), c, post}, Rule::assign));
      case Prog::Kind::seq: {
        Assertion mid = wpr_formula(c.sub(1), post, mode_);
        return PrhlNode{{}, Triple{pre, c, post}, Rule::seq, {build(pre, c.sub(0), mid), build(mid, c.sub(1), post)}};
      }
      case Prog::Kind::choice:
        return PrhlNode{{}, Triple{pre, c, post}, Rule::disj, {build(pre, c.sub(0), post), build(pre, c.sub(1), post)}};
      case Prog::Kind::while_loop: {
        Assertion inv = wpr_formula(c, post, mode_);
        Assertion body_pre = Assertion::implies(Assertion::atom(c.guard()), inv);
        Assertion exit = Assertion::implies(Assertion::atom(BoolExpr::negation(c.guard())), inv);
        PrhlNode loop{{}, Triple{inv, c, exit}, Rule::while_loop, {build(body_pre, c.body(), inv)}};
        return weaken(pre, post, std::move(loop));
      }
    }
    throw std::logic_error("unreachable");
  }

 private:
  LoopMode mode_;

  static PrhlNode leaf(Triple t, Rule r) { return PrhlNode{{}, std::move(t), r, {}}; }

  static PrhlNode weaken(const Assertion& pre, PrhlNode n) {
    Assertion post = n.triple.post;
    return weaken(pre, post, std::move(n));
  }

  // Cons to ⦗pre⦘ C ⦗post⦘, omitted when it would not change the triple.
  static PrhlNode weaken(const Assertion& pre, const Assertion& post, PrhlNode n) {
    if (alpha_equal(pre, n.triple.pre) && alpha_equal(post, n.triple.post)) return n;
    Triple t{pre, n.triple.prog, post};
    return PrhlNode{{}, std::move(t), Rule::cons, {std::move(n)}};
  }
};

}  // namespace

PrhlNode build_prhl(const Triple& t, LoopMode mode) {
  PrhlNode proof = PrhlBuilder(mode).build(t.pre, t.prog, t.post);
  number_nodes(proof);
  return proof;
}

ProveResult prove_prhl(const ProveRequest& r, EntailmentOracle& oracle) {
  const Triple& t = r.triple;
  ProveResult out;
  Verdict refuted = check_triple(Logic::partial_reverse, t.pre, t.prog, t.post, r.bounds);
  if (refuted.invalid()) {
    out.verdict = refuted;
    out.message = "the triple is not valid";
    return out;
  }

  PrhlNode proof = build_prhl(t, r.loop_mode);
  CheckReport report = check_prhl(proof, oracle, CheckOptions{r.bounds});
  out.verdict = Verdict{};
  out.verdict.bounds = r.bounds;
  for (const auto& s : report.nodes) {
    if (s.kind == NodeStatus::Kind::rule_mismatch)
      throw std::logic_error("prover built an ill-formed step at " + s.id + ": " + s.detail);
    if (s.kind != NodeStatus::Kind::side_condition) continue;
    if (s.verdict->invalid()) {
      out.verdict = *s.verdict;
      out.message = "side condition at " + s.id + " fails: " + s.detail;
      return out;
    }
    if (out.verdict.valid()) {
      out.verdict = *s.verdict;
      out.message = "side condition at " + s.id + " is not decided: " + s.detail;
    }
  }
  out.proof = std::move(proof);
  return out;
}

namespace {

class CyclicBuilder {
 public:
  using Plug = std::function<std::size_t()>;

  std::size_t build(const PrhlNode& n, const Prog& cont, const Assertion& r, const Plug& plug) {
    const Triple& t = n.triple;
    Prog prog = Prog::seq(t.prog, cont);
    switch (n.rule) {
      case Rule::axiom: return plug();
      case Rule::assign: {
        std::size_t leaf = plug();
        return add(Triple{t.pre, prog, r}, Rule::assign_subst, {leaf});
      }
      case Rule::seq: {
        const PrhlNode& second = n.children[1];
        Plug then = [&] { return build(second, cont, r, plug); };
        return build(n.children[0], Prog::seq(second.triple.prog, cont), r, then);
      }
      case Rule::cons: {
        const PrhlNode& premise = n.children[0];
        // The open leaves of the premise carry its post-condition; bridge
        // them back to this node's post-condition.
        Plug bridge = plug;
        if (!alpha_equal(premise.triple.post, t.post)) {
          bridge = [&] {
            std::size_t leaf = plug();
            return add(Triple{premise.triple.post, cont, r}, Rule::cons, {leaf});
          };
        }
        std::size_t inner = build(premise, cont, r, bridge);
        if (alpha_equal(premise.triple.pre, t.pre)) return inner;
        return add(Triple{t.pre, prog, r}, Rule::cons, {inner});
      }
      case Rule::disj: {
        std::size_t left = build(n.children[0], cont, r, plug);
        std::size_t right = build(n.children[1], cont, r, plug);
        return add(Triple{t.pre, prog, r}, Rule::disj, {left, right});
      }
      case Rule::while_loop: {
        Triple label{t.pre, prog, r};
        std::size_t self = add(label, Rule::while_loop, {});
        std::size_t exit = plug();
        Plug bud = [&] {
          std::size_t leaf = add(label, Rule::open_leaf, {});
          links_[leaf] = self;
          return leaf;
        };
        std::size_t body = build(n.children[0], prog, r, bud);
        nodes_[self].children = {exit, body};
        return self;
      }
      default: throw std::invalid_argument("not a rule of the ordinary system: " + to_string(n.rule));
    }
  }

  std::size_t add(Triple t, Rule rule, std::vector<std::size_t> children) {
    nodes_.push_back(Node{std::move(t), rule, std::move(children)});
    return nodes_.size() - 1;
  }

  // Renumbers in preorder from `root`.
  CyclicPreProof finish(std::size_t root) const {
    std::vector<std::size_t> order;
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
      order.push_back(i);
      for (auto c : nodes_[i].children) walk(c);
    };
    walk(root);
    std::map<std::size_t, NodeId> name;
    for (std::size_t k = 0; k < order.size(); ++k) name[order[k]] = "n" + std::to_string(k);
    CyclicPreProof out;
    out.root = name.at(root);
    for (auto i : order) {
      CyclicNode n{nodes_[i].triple, nodes_[i].rule, {}, std::nullopt};
      for (auto c : nodes_[i].children) n.children.push_back(name.at(c));
      out.nodes.insert_or_assign(name.at(i), std::move(n));
    }
    for (const auto& [leaf, comp] : links_) out.backlinks[name.at(leaf)] = name.at(comp);
    return out;
  }

 private:
  struct Node {
    Triple triple;
    Rule rule;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes_;
  std::map<std::size_t, std::size_t> links_;
};

}  // namespace

CyclicPreProof transform_to_cyclic(const PrhlNode& p, const Prog& continuation, const Assertion& r) {
  CyclicBuilder b;
  const Assertion& post = p.triple.post;
  CyclicBuilder::Plug close = [&] {
    if (continuation.is_empty() && alpha_equal(post, r)) return b.add(Triple{r, continuation, r}, Rule::axiom, {});
    return b.add(Triple{post, continuation, r}, Rule::open_leaf, {});
  };
  std::size_t root = b.build(p, continuation, r, close);
  return b.finish(root);
}

CyclicPreProof transform_to_cyclic(const PrhlNode& p) {
  return transform_to_cyclic(p, Prog::empty(), p.triple.post);
}

}  // namespace prhl
