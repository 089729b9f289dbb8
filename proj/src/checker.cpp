#include "prhl/checker.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "prhl/printer.hpp"

namespace prhl {

bool CheckReport::accepted() const {
  if (global.kind != GlobalStatus::Kind::ok) return false;
  return std::all_of(nodes.begin(), nodes.end(), [](const NodeStatus& s) {
    return s.kind == NodeStatus::Kind::ok || (s.kind == NodeStatus::Kind::side_condition && s.verdict->unknown());
  });
}

bool CheckReport::certain() const { return accepted() && bounded().empty(); }

std::vector<const NodeStatus*> CheckReport::bounded() const {
  std::vector<const NodeStatus*> out;
  for (const auto& s : nodes)
    if (s.kind == NodeStatus::Kind::side_condition && s.verdict->unknown()) out.push_back(&s);
  return out;
}

namespace {

bool prog_eq(const Prog& a, const Prog& b) { return strip_annotations(a) == strip_annotations(b); }

// Collects the outcome for one node; the first failure wins.
class NodeCheck {
 public:
  NodeCheck(NodeId id, Rule rule, EntailmentOracle& oracle, const Bounds& b) : oracle_(oracle), bounds_(b) {
    status_.id = std::move(id);
    status_.rule = rule;
  }

  bool failed() const { return status_.kind == NodeStatus::Kind::rule_mismatch || refuted_; }

  void mismatch(const std::string& detail) {
    if (failed()) return;
    status_ = NodeStatus{status_.id, status_.rule, NodeStatus::Kind::rule_mismatch, detail, std::nullopt};
  }

  void require(bool ok, const std::string& detail) {
    if (!ok) mismatch(detail);
  }

  void same(const Assertion& got, const Assertion& want, const std::string& what) {
    if (!alpha_equal(got, want)) mismatch(what + " is " + to_string(got) + ", expected " + to_string(want));
  }

  void same(const Prog& got, const Prog& want, const std::string& what) {
    if (!prog_eq(got, want)) mismatch(what + " is " + to_string(got) + ", expected " + to_string(want));
  }

  // lhs ⊨ rhs through the oracle.
  void entails(const Assertion& lhs, const Assertion& rhs) {
    if (failed() || alpha_equal(lhs, rhs)) return;
    Verdict v = oracle_.decide(EntailmentQuery{lhs, rhs, {}, bounds_});
    if (v.valid()) return;
    std::string detail = to_string(lhs) + " |= " + to_string(rhs);
    if (v.invalid()) {
      refuted_ = true;
      status_ = NodeStatus{status_.id, status_.rule, NodeStatus::Kind::side_condition, detail, v};
    } else if (status_.kind == NodeStatus::Kind::ok) {
      status_ = NodeStatus{status_.id, status_.rule, NodeStatus::Kind::side_condition, detail, v};
    }
  }

  NodeStatus result() const { return status_; }

 private:
  EntailmentOracle& oracle_;
  Bounds bounds_;
  NodeStatus status_;
  bool refuted_ = false;
};

Assertion not_guard_implies(const BoolExpr& b, const Assertion& p) {
  return Assertion::implies(Assertion::atom(BoolExpr::negation(b)), p);
}

Assertion guard_implies(const BoolExpr& b, const Assertion& p) { return Assertion::implies(Assertion::atom(b), p); }

void check_prhl_node(const PrhlNode& n, NodeCheck& chk) {
  const Triple& t = n.triple;
  if (n.children.size() != arity(n.rule, false)) {
    chk.mismatch(to_string(n.rule) + " takes " + std::to_string(arity(n.rule, false)) + " premises, found " +
                 std::to_string(n.children.size()));
    return;
  }
  auto child = [&](std::size_t i) -> const Triple& { return n.children[i].triple; };
  switch (n.rule) {
    case Rule::axiom:
      chk.require(t.prog.is_empty(), "program must be skip, found " + to_string(t.prog));
      chk.same(t.pre, t.post, "pre-condition");
      return;
    case Rule::assign:
      if (t.prog.kind() != Prog::Kind::assign) {
        chk.mismatch("program must be an assignment, found " + to_string(t.prog));
        return;
      }
      chk.same(t.pre, subst(t.post, Bindings{{t.prog.target(), t.prog.expr()}}), "pre-condition");
      return;
    case Rule::seq:
      chk.same(t.prog, Prog::seq(child(0).prog, child(1).prog), "program");
      chk.require(!child(0).prog.is_empty() && !child(1).prog.is_empty(), "premise programs must be non-empty");
      chk.same(child(0).pre, t.pre, "first premise pre-condition");
      chk.same(child(1).pre, child(0).post, "second premise pre-condition");
      chk.same(child(1).post, t.post, "second premise post-condition");
      return;
    case Rule::cons:
      chk.same(child(0).prog, t.prog, "premise program");
      chk.entails(child(0).pre, t.pre);
      chk.entails(t.post, child(0).post);
      return;
    case Rule::disj:
      if (t.prog.kind() != Prog::Kind::choice) {
        chk.mismatch("program must be a choice, found " + to_string(t.prog));
        return;
      }
      for (std::size_t i = 0; i < 2; ++i) {
        std::string which = i == 0 ? "left" : "right";
        chk.same(child(i).prog, t.prog.sub(i), which + " premise program");
        chk.same(child(i).pre, t.pre, which + " premise pre-condition");
        chk.same(child(i).post, t.post, which + " premise post-condition");
      }
      return;
    case Rule::while_loop: {
      if (t.prog.kind() != Prog::Kind::while_loop) {
        chk.mismatch("program must be a loop, found " + to_string(t.prog));
        return;
      }
      const BoolExpr& b = t.prog.guard();
      chk.same(t.post, not_guard_implies(b, t.pre), "post-condition");
      chk.same(child(0).prog, t.prog.body(), "premise program");
      chk.same(child(0).pre, guard_implies(b, t.pre), "premise pre-condition");
      chk.same(child(0).post, t.pre, "premise post-condition");
      return;
    }
    default: chk.mismatch(to_string(n.rule) + " is not a rule of the ordinary system");
  }
}

void check_cprhl_node(const CyclicPreProof& c, const NodeId& id, const CheckOptions& opts, NodeCheck& chk) {
  const CyclicNode& n = c.at(id);
  const Triple& t = n.triple;
  if (n.children.size() != arity(n.rule, true)) {
    chk.mismatch(to_string(n.rule) + " takes " + std::to_string(arity(n.rule, true)) + " premises, found " +
                 std::to_string(n.children.size()));
    return;
  }
  auto child = [&](std::size_t i) -> const Triple& { return c.at(n.children[i]).triple; };

  if (n.rule == Rule::axiom) {
    chk.require(t.prog.is_empty(), "program must be skip, found " + to_string(t.prog));
    chk.same(t.pre, t.post, "pre-condition");
    return;
  }
  if (n.rule == Rule::cons) {
    chk.same(child(0).prog, t.prog, "premise program");
    chk.entails(child(0).pre, t.pre);
    chk.entails(t.post, child(0).post);
    return;
  }
  if (n.rule == Rule::open_leaf) {
    auto link = c.backlinks.find(id);
    if (link == c.backlinks.end()) return;  // proper open leaf: a global matter
    const Triple& comp = c.at(link->second).triple;
    chk.same(t.prog, comp.prog, "program (companion " + link->second + ")");
    chk.same(t.pre, comp.pre, "pre-condition (companion " + link->second + ")");
    chk.same(t.post, comp.post, "post-condition (companion " + link->second + ")");
    return;
  }

  if (t.prog.is_empty()) {
    chk.mismatch(to_string(n.rule) + " needs a non-empty program");
    return;
  }
  auto [head, rest] = decompose_head(t.prog);
  switch (n.rule) {
    case Rule::assign_subst: {
      if (head.kind() != Prog::Kind::assign) {
        chk.mismatch("program must start with an assignment, found " + to_string(head));
        return;
      }
      chk.same(child(0).prog, rest, "premise program");
      chk.same(t.pre, subst(child(0).pre, Bindings{{head.target(), head.expr()}}), "pre-condition");
      chk.same(child(0).post, t.post, "premise post-condition");
      return;
    }
    case Rule::assign_fresh: {
      if (head.kind() != Prog::Kind::assign) {
        chk.mismatch("program must start with an assignment, found " + to_string(head));
        return;
      }
      if (!n.fresh) {
        chk.mismatch("missing \"fresh\" variable");
        return;
      }
      const Var& x = head.target();
      const Var& xp = *n.fresh;
      VarSet used = all_vars(t.pre);
      for (const auto& v : all_vars(t.post)) used.insert(v);
      used.insert(head.expr().vars().begin(), head.expr().vars().end());
      used.insert(rest.vars().begin(), rest.vars().end());
      used.insert(x);
      chk.require(!used.contains(xp), "fresh variable " + xp + " occurs in the conclusion");
      chk.same(child(0).prog, rest, "premise program");
      chk.same(child(0).post, t.post, "premise post-condition");
      Bindings rename{{x, Expr::var(xp)}};
      Expr old_e = subst(head.expr(), rename);
      Assertion old_p = subst(t.pre, rename);
      Assertion want = Assertion::conj(Assertion::atom(BoolExpr::eq(Expr::var(x), old_e)), old_p);
      if (opts.strict_fig4_assign && !chk.failed() && !alpha_equal(child(0).pre, want)) {
        Assertion printed = Assertion::conj(Assertion::atom(BoolExpr::eq(Expr::var(xp), old_e)), old_p);
        if (alpha_equal(child(0).pre, printed)) return;
      }
      chk.same(child(0).pre, want, "premise pre-condition");
      return;
    }
    case Rule::disj: {
      if (head.kind() != Prog::Kind::choice) {
        chk.mismatch("program must start with a choice, found " + to_string(head));
        return;
      }
      for (std::size_t i = 0; i < 2; ++i) {
        std::string which = i == 0 ? "left" : "right";
        chk.same(child(i).prog, Prog::seq(head.sub(i), rest), which + " premise program");
        chk.same(child(i).pre, t.pre, which + " premise pre-condition");
        chk.same(child(i).post, t.post, which + " premise post-condition");
      }
      return;
    }
    case Rule::while_loop: {
      if (head.kind() != Prog::Kind::while_loop) {
        chk.mismatch("program must start with a loop, found " + to_string(head));
        return;
      }
      const BoolExpr& b = head.guard();
      chk.same(child(0).prog, rest, "left premise program");
      chk.same(child(0).pre, not_guard_implies(b, t.pre), "left premise pre-condition");
      chk.same(child(0).post, t.post, "left premise post-condition");
      chk.same(child(1).prog, Prog::seq(head.body(), t.prog), "right premise program");
      chk.same(child(1).pre, guard_implies(b, t.pre), "right premise pre-condition");
      chk.same(child(1).post, t.post, "right premise post-condition");
      return;
    }
    default: chk.mismatch(to_string(n.rule) + " is not a rule of the cyclic system");
  }
}

}  // namespace

CheckReport check_prhl(const PrhlNode& p, EntailmentOracle& oracle, const CheckOptions& opts) {
  PrhlNode root = p;
  if (root.id.empty()) number_nodes(root);
  CheckReport report;
  report.system = System::prhl;
  report.bounds = opts.bounds;
  std::function<void(const PrhlNode&)> go = [&](const PrhlNode& n) {
    NodeCheck chk(n.id, n.rule, oracle, opts.bounds);
    check_prhl_node(n, chk);
    report.nodes.push_back(chk.result());
    for (const auto& c : n.children) go(c);
  };
  go(root);
  std::sort(report.nodes.begin(), report.nodes.end(),
            [](const NodeStatus& a, const NodeStatus& b) { return id_less(a.id, b.id); });
  return report;
}

GlobalStatus global_soundness(const CyclicPreProof& c) {
  // Vertices: Cons nodes and back-linked leaves. A cycle among them never
  // passes through any other rule.
  std::vector<NodeId> ids = c.ids();
  std::map<NodeId, std::vector<NodeId>> succ;
  auto in_scope = [&](const NodeId& id) { return c.at(id).rule == Rule::cons || c.backlinks.contains(id); };
  for (const auto& id : ids) {
    if (!in_scope(id)) continue;
    auto& out = succ[id];
    for (const auto& ch : c.at(id).children)
      if (in_scope(ch)) out.push_back(ch);
    if (auto link = c.backlinks.find(id); link != c.backlinks.end() && in_scope(link->second))
      out.push_back(link->second);
  }

  // Tarjan's strongly connected components.
  std::map<NodeId, int> index, low;
  std::set<NodeId> on_stack;
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>> cyclic;
  int counter = 0;
  std::function<void(const NodeId&)> visit = [&](const NodeId& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : succ[v]) {
      if (!index.contains(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.contains(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<NodeId> comp;
    NodeId w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      comp.push_back(w);
    } while (w != v);
    bool self_loop = std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
    if (comp.size() > 1 || self_loop) cyclic.push_back(comp);
  };
  for (const auto& [v, _] : succ)
    if (!index.contains(v)) visit(v);

  GlobalStatus out;
  if (cyclic.empty()) return out;
  for (auto& comp : cyclic) {
    std::erase_if(comp, [&](const NodeId& id) { return c.at(id).rule != Rule::cons; });
    std::sort(comp.begin(), comp.end(), id_less);
  }
  std::sort(cyclic.begin(), cyclic.end(),
            [](const auto& a, const auto& b) { return id_less(a.front(), b.front()); });
  out.kind = GlobalStatus::Kind::cons_cycle;
  out.nodes = cyclic.front();
  return out;
}

CheckReport check_cprhl(const CyclicPreProof& c, EntailmentOracle& oracle, const CheckOptions& opts) {
  validate_shape(c);
  CheckReport report;
  report.system = System::cprhl;
  report.bounds = opts.bounds;
  for (const auto& id : c.ids()) {
    NodeCheck chk(id, c.at(id).rule, oracle, opts.bounds);
    check_cprhl_node(c, id, opts, chk);
    report.nodes.push_back(chk.result());
  }
  report.global = global_soundness(c);
  if (report.global.kind == GlobalStatus::Kind::ok && !opts.allow_open_leaves) {
    auto open = c.proper_open_leaves();
    if (!open.empty()) report.global = GlobalStatus{GlobalStatus::Kind::open_leaves, open};
  }
  return report;
}

CheckReport check_certificate(const Certificate& c, EntailmentOracle& oracle, const CheckOptions& opts) {
  if (const auto* p = std::get_if<PrhlNode>(&c)) return check_prhl(*p, oracle, opts);
  return check_cprhl(std::get<CyclicPreProof>(c), oracle, opts);
}

}  // namespace prhl
