#include "prhl/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "prhl/assertion_eval.hpp"

namespace prhl {

// Guards against choice-heavy programs whose configuration graph explodes;
// exceeding it counts as truncation.
constexpr std::size_t kMaxConfigs = 20'000'000;

State::State(std::initializer_list<std::pair<const Var, Nat>> init) {
  for (const auto& [x, v] : init) set(x, v);
}

void State::set(const Var& x, Nat v) {
  if (v == 0) {
    m_.erase(x);
  } else {
    m_[x] = v;
  }
}

std::size_t State::hash() const {
  std::size_t h = 0x51ed;
  for (const auto& [x, v] : m_) {
    h ^= std::hash<Var>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<Nat>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::string to_string(const State& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [x, v] : s.entries()) {
    if (!first) os << ", ";
    first = false;
    os << x << ':' << v;
  }
  os << '}';
  return os.str();
}

std::string to_string(const State& s, const std::vector<Var>& vars) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ", ";
    os << vars[i] << ':' << s.get(vars[i]);
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Expressions

Nat eval_expr(const Expr& e, const State& s) {
  switch (e.kind()) {
    case Expr::Kind::constant: return e.value();
    case Expr::Kind::var: return s.get(e.name());
    case Expr::Kind::binary: {
      Nat a = eval_expr(e.lhs(), s);
      Nat b = eval_expr(e.rhs(), s);
      Nat r = 0;
      switch (e.op()) {
        case ArithOp::add:
          if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
          return r;
        case ArithOp::sub: return a > b ? a - b : 0;
        case ArithOp::mul:
          if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
          return r;
        case ArithOp::div: return b == 0 ? 0 : a / b;
        case ArithOp::mod: return b == 0 ? a : a % b;
      }
    }
  }
  return 0;
}

bool eval_bool(const BoolExpr& b, const State& s) {
  switch (b.kind()) {
    case BoolExpr::Kind::eq: return eval_expr(b.left(), s) == eval_expr(b.right(), s);
    case BoolExpr::Kind::le: return eval_expr(b.left(), s) <= eval_expr(b.right(), s);
    case BoolExpr::Kind::negation: return !eval_bool(b.sub(0), s);
    case BoolExpr::Kind::conjunction: return eval_bool(b.sub(0), s) && eval_bool(b.sub(1), s);
    case BoolExpr::Kind::disjunction: return eval_bool(b.sub(0), s) || eval_bool(b.sub(1), s);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Small steps

std::vector<Config> step(const Config& c) {
  const Prog& p = c.prog;
  switch (p.kind()) {
    case Prog::Kind::empty: return {};
    case Prog::Kind::assign: return {Config{Prog::empty(), c.state.with(p.target(), eval_expr(p.expr(), c.state))}};
    case Prog::Kind::seq: {
      std::vector<Config> out;
      for (auto& next : step(Config{p.sub(0), c.state}))
        out.push_back(Config{Prog::seq(next.prog, p.sub(1)), std::move(next.state)});
      return out;
    }
    case Prog::Kind::while_loop:
      if (eval_bool(p.guard(), c.state)) return {Config{Prog::seq(p.body(), p), c.state}};
      return {Config{Prog::empty(), c.state}};
    case Prog::Kind::choice: return {Config{p.sub(0), c.state}, Config{p.sub(1), c.state}};
  }
  return {};
}

namespace {

struct ConfigHash {
  std::size_t operator()(const Config& c) const { return c.prog.hash() * 31 + c.state.hash(); }
};

}  // namespace

RunResult run_all(const Prog& p, const State& s, const Bounds& b) {
  // Breadth-first over configurations. Duplicates are merged within a level
  // only, so a cycle in the configuration graph keeps the frontier alive
  // until the step budget cuts it.
  RunResult out;
  std::unordered_set<State> finals;
  std::vector<Config> frontier{Config{p, s}};
  std::size_t work = 0;
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    std::unordered_set<Config, ConfigHash> next_seen;
    std::vector<Config> next;
    for (const Config& c : frontier) {
      if (c.prog.is_empty()) {
        if (finals.insert(c.state).second) out.finals.push_back(FinalState{c.state, depth});
        continue;
      }
      if (depth >= b.step_bound || work >= kMaxConfigs) {
        out.truncated = true;
        continue;
      }
      std::vector<Config> succ;
      try {
        succ = step(c);
      } catch (const ArithmeticOverflow&) {
        out.overflow = true;
        out.truncated = true;
        continue;
      }
      for (auto& n : succ) {
        ++work;
        if (next_seen.insert(n).second) next.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

void for_each_state(const std::vector<Var>& vars, Nat domain_max, const std::function<bool(const State&)>& f) {
  std::vector<Nat> digits(vars.size(), 0);
  for (;;) {
    State s;
    for (std::size_t i = 0; i < vars.size(); ++i) s.set(vars[i], digits[i]);
    if (!f(s)) return;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (digits[i] < domain_max) {
        ++digits[i];
        break;
      }
      digits[i] = 0;
      if (i == 0) return;
    }
    if (vars.empty()) return;
  }
}

std::vector<State> enumerate_states(const std::vector<Var>& vars, Nat domain_max) {
  std::vector<State> out;
  for_each_state(vars, domain_max, [&](const State& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

bool state_less(const State& a, const State& b, const std::vector<Var>& vars) {
  for (const auto& x : vars) {
    Nat va = a.get(x), vb = b.get(x);
    if (va != vb) return va < vb;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Verdicts

std::string to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::step_budget_exhausted: return "step-budget-exhausted";
    case UnknownReason::quantifier_bounded: return "quantifier-bounded";
    case UnknownReason::arithmetic_overflow: return "arithmetic-overflow";
  }
  return "?";
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::valid: return "Valid";
    case Verdict::Kind::unknown: return "Unknown(" + to_string(v.reason.value_or(UnknownReason::quantifier_bounded)) + ")";
    case Verdict::Kind::invalid: {
      std::string s = "Invalid(";
      if (v.witness) {
        s += to_string(v.witness->initial, v.vars);
        if (v.witness->final_state) s += " -> " + to_string(*v.witness->final_state, v.vars);
      }
      return s + ")";
    }
  }
  return "?";
}

std::optional<Logic> parse_logic(const std::string& name) {
  if (name == "partial-reverse" || name == "prhl") return Logic::partial_reverse;
  if (name == "partial-hoare") return Logic::partial_hoare;
  if (name == "total-hoare") return Logic::total_hoare;
  if (name == "incorrectness") return Logic::incorrectness;
  return std::nullopt;
}

std::string to_string(Logic l) {
  switch (l) {
    case Logic::partial_reverse: return "partial-reverse";
    case Logic::partial_hoare: return "partial-hoare";
    case Logic::total_hoare: return "total-hoare";
    case Logic::incorrectness: return "incorrectness";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Transformers

TransformerResult transformer_set(Transformer kind, const Prog& p, const StatePredicate& pred,
                                  const std::vector<Var>& vars, const Bounds& b) {
  TransformerResult out;
  std::vector<State> space = enumerate_states(vars, b.domain_max);
  if (kind == Transformer::wpr || kind == Transformer::wlp) {
    for (const State& s : space) {
      RunResult r = run_all(p, s, b);
      out.truncated = out.truncated || r.truncated;
      bool any = false, all = true;
      for (const auto& f : r.finals) {
        bool q = pred(f.state);
        any = any || q;
        all = all && q;
      }
      if (kind == Transformer::wpr ? any : all) out.states.push_back(s);
    }
    return out;
  }
  // Forward transformers: collect, for each final state in the space, whether
  // some / every initial state reaching it satisfies pred.
  std::unordered_map<State, std::pair<bool, bool>> reach;  // (some pred, all pred)
  for (const State& s : space) {
    RunResult r = run_all(p, s, b);
    out.truncated = out.truncated || r.truncated;
    bool ps = pred(s);
    for (const auto& f : r.finals) {
      auto [it, fresh] = reach.try_emplace(f.state, ps, ps);
      if (!fresh) {
        it->second.first = it->second.first || ps;
        it->second.second = it->second.second && ps;
      }
    }
  }
  for (const State& t : space) {
    auto it = reach.find(t);
    bool some = it != reach.end() && it->second.first;
    bool all = it == reach.end() || it->second.second;
    if (kind == Transformer::sp ? some : all) out.states.push_back(t);
  }
  return out;
}

std::vector<Var> relevant_vars(const Assertion& pre, const Prog& p, const Assertion& post) {
  VarSet vs = pre.free_vars();
  vs.insert(post.free_vars().begin(), post.free_vars().end());
  vs.insert(p.vars().begin(), p.vars().end());
  return {vs.begin(), vs.end()};
}

namespace {

struct Tally {
  bool truncated = false;
  bool overflow = false;
  bool inexact = false;

  Verdict finish(Verdict v) const {
    if (overflow) {
      v.kind = Verdict::Kind::unknown;
      v.reason = UnknownReason::arithmetic_overflow;
    } else if (truncated) {
      v.kind = Verdict::Kind::unknown;
      v.reason = UnknownReason::step_budget_exhausted;
    } else if (inexact) {
      v.kind = Verdict::Kind::unknown;
      v.reason = UnknownReason::quantifier_bounded;
    }
    return v;
  }
};

// Evaluates, recording inexactness and overflow; returns nullopt when the
// value is not established exactly.
std::optional<bool> exact_holds(const Assertion& a, const State& s, Nat qb, Tally& t) {
  try {
    Truth r = evaluate(a, s, qb);
    if (!r.exact) {
      t.inexact = true;
      return std::nullopt;
    }
    return r.value;
  } catch (const ArithmeticOverflow&) {
    t.overflow = true;
    return std::nullopt;
  }
}

}  // namespace

Verdict check_triple(Logic logic, const Assertion& pre, const Prog& p, const Assertion& post, const Bounds& b) {
  Verdict v;
  v.bounds = b;
  v.vars = relevant_vars(pre, p, post);
  Tally tally;
  const Nat qb = b.quant_bound;
  std::vector<State> space = enumerate_states(v.vars, b.domain_max);

  auto better = [&](const Witness& w, const std::optional<Witness>& cur, std::size_t idx, std::size_t cur_idx) {
    if (!cur) return true;
    if (w.steps != cur->steps) return w.steps < cur->steps;
    if (idx != cur_idx) return idx < cur_idx;
    return w.final_state && cur->final_state && state_less(*w.final_state, *cur->final_state, v.vars);
  };

  std::optional<Witness> best;
  std::size_t best_idx = 0;

  switch (logic) {
    case Logic::partial_reverse:
    case Logic::partial_hoare: {
      bool reverse = logic == Logic::partial_reverse;
      for (std::size_t idx = 0; idx < space.size(); ++idx) {
        const State& s = space[idx];
        // Reverse: counterexamples start outside pre. Hoare: inside pre.
        std::optional<bool> in_pre = exact_holds(pre, s, qb, tally);
        if (!in_pre || *in_pre == reverse) continue;
        RunResult r = run_all(p, s, b);
        tally.truncated = tally.truncated || r.truncated;
        tally.overflow = tally.overflow || r.overflow;
        for (const auto& f : r.finals) {
          std::optional<bool> q = exact_holds(post, f.state, qb, tally);
          if (!q || *q != reverse) continue;
          Witness w{s, f.state, f.steps};
          if (better(w, best, idx, best_idx)) {
            best = w;
            best_idx = idx;
          }
        }
      }
      break;
    }
    case Logic::total_hoare: {
      for (const State& s : space) {
        std::optional<bool> in_pre = exact_holds(pre, s, qb, tally);
        if (!in_pre || !*in_pre) continue;
        RunResult r = run_all(p, s, b);
        bool reached = false, unsure = r.truncated;
        for (const auto& f : r.finals) {
          std::optional<bool> q = exact_holds(post, f.state, qb, tally);
          if (!q) unsure = true;
          if (q && *q) reached = true;
        }
        if (reached) continue;
        if (unsure) {
          tally.truncated = tally.truncated || r.truncated;
          tally.overflow = tally.overflow || r.overflow;
          continue;
        }
        best = Witness{s, std::nullopt, 0};
        break;
      }
      break;
    }
    case Logic::incorrectness: {
      // Every post-state in the space must be reachable from some pre-state.
      std::unordered_map<State, bool> reached;
      for (const State& s : space) {
        std::optional<bool> in_pre = exact_holds(pre, s, qb, tally);
        if (!in_pre) continue;
        RunResult r = run_all(p, s, b);
        tally.truncated = tally.truncated || r.truncated;
        tally.overflow = tally.overflow || r.overflow;
        if (!*in_pre) continue;
        for (const auto& f : r.finals) reached[f.state] = true;
      }
      for (const State& t : space) {
        std::optional<bool> q = exact_holds(post, t, qb, tally);
        if (!q || !*q || reached.contains(t)) continue;
        if (tally.truncated || tally.overflow || tally.inexact) continue;  // maybe reachable after all
        best = Witness{t, std::nullopt, 0};
        break;
      }
      break;
    }
  }

  if (best) {
    v.kind = Verdict::Kind::invalid;
    v.witness = best;
    return v;
  }
  v.kind = Verdict::Kind::valid;
  return tally.finish(v);
}

}  // namespace prhl
