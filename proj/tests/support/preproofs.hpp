#pragma once

// Random pre-proof shapes and a path-unrolling reference for the global
// soundness condition.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "prhl/parser.hpp"
#include "prhl/proof.hpp"

namespace prhl::testing {

// Reference for the global condition: a node can take k more steps without
// leaving Cons nodes and back-linked leaves. Beyond 3·|nodes| steps the walk
// has gone round a cycle.
inline bool naive_cons_only_path(const CyclicPreProof& c) {
  auto ids = c.ids();
  std::size_t depth = 3 * ids.size();
  auto inside = [&](const NodeId& id) { return c.at(id).rule == Rule::cons || c.backlinks.contains(id); };
  std::map<NodeId, bool> can;
  for (const auto& id : ids) can[id] = inside(id);
  for (std::size_t k = 0; k < depth; ++k) {
    std::map<NodeId, bool> next;
    for (const auto& id : ids) {
      bool any = false;
      if (inside(id)) {
        for (const auto& ch : c.at(id).children) any = any || can[ch];
        if (auto l = c.backlinks.find(id); l != c.backlinks.end()) any = any || can[l->second];
      }
      next[id] = any;
    }
    can = std::move(next);
  }
  return std::any_of(ids.begin(), ids.end(), [&](const NodeId& id) { return can[id]; });
}

// Whether `id` lies on a cycle of Cons nodes and back-linked leaves.
inline bool on_cons_cycle(const CyclicPreProof& c, const NodeId& id) {
  auto inside = [&](const NodeId& v) { return c.at(v).rule == Rule::cons || c.backlinks.contains(v); };
  std::set<NodeId> seen;
  std::vector<NodeId> todo{id};
  while (!todo.empty()) {
    NodeId v = todo.back();
    todo.pop_back();
    std::vector<NodeId> succ = c.at(v).children;
    if (auto l = c.backlinks.find(v); l != c.backlinks.end()) succ.push_back(l->second);
    for (const auto& w : succ) {
      if (!inside(w)) continue;
      if (w == id) return true;
      if (seen.insert(w).second) todo.push_back(w);
    }
  }
  return false;
}

inline CyclicPreProof random_preproof(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  Assertion top = parse_assertion("true");
  Triple t{top, Prog::empty(), top};
  CyclicPreProof c;
  int budget = 3 + pick(10);
  int next = 0;
  std::vector<NodeId> inner, leaves;
  std::function<NodeId()> grow = [&]() -> NodeId {
    NodeId id = "n" + std::to_string(next++);
    int r = budget-- > 0 ? pick(10) : 9;
    CyclicNode n{t, Rule::open_leaf, {}, std::nullopt};
    if (r < 5) n.rule = Rule::cons;
    else if (r < 6) n.rule = Rule::while_loop;
    else if (r < 7) n.rule = Rule::assign_subst;
    else if (r < 8) n.rule = Rule::axiom;
    c.nodes.insert_or_assign(id, n);
    std::vector<NodeId> kids;
    for (std::size_t k = 0; k < arity(n.rule, true); ++k) kids.push_back(grow());
    c.nodes.at(id).children = kids;
    (kids.empty() ? leaves : inner).push_back(id);
    return id;
  };
  c.root = grow();
  for (const auto& leaf : leaves)
    if (c.at(leaf).rule == Rule::open_leaf && !inner.empty() && pick(5) != 0)
      c.backlinks[leaf] = inner[pick(static_cast<int>(inner.size()))];
  return c;
}

}  // namespace prhl::testing
