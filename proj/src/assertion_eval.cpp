#include "prhl/assertion_eval.hpp"

#include <algorithm>
#include <functional>

namespace prhl {

namespace {

// How far past quant_bound the evaluator looks when trying to show that the
// bounded answer is also the unbounded one.
constexpr Nat kTailCap = 2048;

Truth and_then(Truth a, const std::function<Truth()>& b) {
  if (!a.value && a.exact) return a;
  Truth t = b();
  return {a.value && t.value, (a.exact && t.exact) || (!t.value && t.exact)};
}

Truth or_else(Truth a, const std::function<Truth()>& b) {
  if (a.value && a.exact) return a;
  Truth t = b();
  return {a.value || t.value, (a.exact && t.exact) || (t.value && t.exact)};
}

Truth implies_then(Truth a, const std::function<Truth()>& b) {
  if (!a.value && a.exact) return {true, true};
  Truth t = b();
  return {!a.value || t.value, (a.exact && t.exact) || (t.value && t.exact)};
}

void conjuncts(const Assertion& a, std::vector<Assertion>& out) {
  if (a.kind() == Assertion::Kind::conjunction) {
    conjuncts(a.sub(0), out);
    conjuncts(a.sub(1), out);
  } else if (a.kind() == Assertion::Kind::atom && a.as_bool().kind() == BoolExpr::Kind::conjunction) {
    conjuncts(Assertion::atom(a.as_bool().sub(0)), out);
    conjuncts(Assertion::atom(a.as_bool().sub(1)), out);
  } else {
    out.push_back(a);
  }
}

void disjuncts(const Assertion& a, std::vector<Assertion>& out) {
  if (a.kind() == Assertion::Kind::disjunction) {
    disjuncts(a.sub(0), out);
    disjuncts(a.sub(1), out);
  } else if (a.kind() == Assertion::Kind::atom && a.as_bool().kind() == BoolExpr::Kind::disjunction) {
    disjuncts(Assertion::atom(a.as_bool().sub(0)), out);
    disjuncts(Assertion::atom(a.as_bool().sub(1)), out);
  } else {
    out.push_back(a);
  }
}

// A => (B => C) is read as (A && B) => C.
void split_implication(const Assertion& a, std::vector<Assertion>& antecedents, Assertion& consequent) {
  Assertion cur = a;
  while (cur.kind() == Assertion::Kind::implication) {
    conjuncts(cur.sub(0), antecedents);
    cur = cur.sub(1);
  }
  consequent = cur;
}

Assertion conj_all(const std::vector<Assertion>& xs) {
  if (xs.empty()) return Assertion::truth();
  Assertion out = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) out = Assertion::conj(out, xs[i]);
  return out;
}

bool mentions_any(const VarSet& fv, const std::vector<Var>& vars) {
  return std::any_of(vars.begin(), vars.end(), [&](const Var& v) { return fv.contains(v); });
}

// --- monotonicity of expressions in one variable -----------------------------

// inc: non-decreasing and unbounded; dec: non-increasing.
enum class Dir { constant, inc, dec, unknown };

Dir direction(const Expr& e, const Var& v, const State& env) {
  if (!e.vars().contains(v)) return Dir::constant;
  if (e.kind() == Expr::Kind::var) return Dir::inc;
  Dir a = direction(e.lhs(), v, env);
  Dir b = direction(e.rhs(), v, env);
  if (a == Dir::unknown || b == Dir::unknown) return Dir::unknown;
  switch (e.op()) {
    case ArithOp::add:
      if (a == Dir::constant) return b;
      if (b == Dir::constant || a == b) return a;
      return Dir::unknown;
    case ArithOp::mul: {
      if (a == Dir::constant) {
        Nat k = eval_expr(e.lhs(), env);
        return k == 0 ? Dir::constant : b;
      }
      if (b == Dir::constant) {
        Nat k = eval_expr(e.rhs(), env);
        return k == 0 ? Dir::constant : a;
      }
      return a == b ? a : Dir::unknown;
    }
    case ArithOp::sub:
      if (b == Dir::constant) return a;
      if (a == Dir::inc && b == Dir::dec) return Dir::inc;
      if (a != Dir::inc && b == Dir::inc) return Dir::dec;
      return Dir::unknown;
    case ArithOp::div: {
      if (b != Dir::constant) return Dir::unknown;
      Nat k = eval_expr(e.rhs(), env);
      return k == 0 ? Dir::constant : a;
    }
    case ArithOp::mod: return Dir::unknown;
  }
  return Dir::unknown;
}

// True when the atom keeps its current truth value for every larger value of v.
bool atom_stable(const BoolExpr& atom, const Var& v, const State& env) {
  Dir l = direction(atom.left(), v, env);
  Dir r = direction(atom.right(), v, env);
  if (l == Dir::unknown || r == Dir::unknown) return false;
  if (l == Dir::constant && r == Dir::constant) return true;
  Nat lv = eval_expr(atom.left(), env);
  Nat rv = eval_expr(atom.right(), env);
  bool l_up = l == Dir::inc, r_up = r == Dir::inc;
  bool l_down = l != Dir::inc, r_down = r != Dir::inc;  // constant or dec
  if (atom.kind() == BoolExpr::Kind::le) {
    if (l_up && r_down) return lv > rv;           // stays false
    if (l_down && r_up) return lv <= rv;          // stays true
    if (l == Dir::dec && r == Dir::constant) return lv <= rv;
    if (l == Dir::constant && r == Dir::dec) return lv > rv;
    return false;
  }
  // equality
  if (l_up && r_down) return lv > rv;
  if (l_down && r_up) return lv < rv;
  if (l == Dir::dec && r == Dir::constant) return lv < rv;
  if (l == Dir::constant && r == Dir::dec) return lv > rv;
  return false;
}

void collect_atoms(const BoolExpr& b, const Var& v, std::vector<BoolExpr>& out) {
  if (!b.vars().contains(v)) return;
  switch (b.kind()) {
    case BoolExpr::Kind::eq:
    case BoolExpr::Kind::le: out.push_back(b); return;
    case BoolExpr::Kind::negation: collect_atoms(b.sub(0), v, out); return;
    default:
      collect_atoms(b.sub(0), v, out);
      collect_atoms(b.sub(1), v, out);
  }
}

// Atoms mentioning v; false if v occurs under a nested quantifier.
bool collect_atoms(const Assertion& a, const Var& v, std::vector<BoolExpr>& out) {
  if (!a.free_vars().contains(v)) return true;
  switch (a.kind()) {
    case Assertion::Kind::atom: collect_atoms(a.as_bool(), v, out); return true;
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: return false;
    case Assertion::Kind::negation: return collect_atoms(a.sub(0), v, out);
    default: return collect_atoms(a.sub(0), v, out) && collect_atoms(a.sub(1), v, out);
  }
}

// --- the evaluator -----------------------------------------------------------

class Evaluator {
 public:
  Evaluator(const State& s, Nat qb) : env_(s), qb_(qb) {}

  Truth eval(const Assertion& a) {
    switch (a.kind()) {
      case Assertion::Kind::atom: return {eval_bool(a.as_bool(), env_), true};
      case Assertion::Kind::negation: {
        Truth t = eval(a.sub(0));
        return {!t.value, t.exact};
      }
      case Assertion::Kind::conjunction: return and_then(eval(a.sub(0)), [&] { return eval(a.sub(1)); });
      case Assertion::Kind::disjunction: return or_else(eval(a.sub(0)), [&] { return eval(a.sub(1)); });
      case Assertion::Kind::implication: return implies_then(eval(a.sub(0)), [&] { return eval(a.sub(1)); });
      case Assertion::Kind::exists:
      case Assertion::Kind::forall:
        return block(a.kind() == Assertion::Kind::forall, {a.bound()}, a.body());
    }
    return {false, false};
  }

 private:
  State env_;
  Nat qb_;

  struct Binding {
    Evaluator& ev;
    Var x;
    Nat saved;
    Binding(Evaluator& e, const Var& v, Nat c) : ev(e), x(v), saved(e.env_.get(v)) { ev.env_.set(x, c); }
    ~Binding() { ev.env_.set(x, saved); }
    void set(Nat c) { ev.env_.set(x, c); }
  };

  // Q x1..xn. body, where Q is forall or exists.
  Truth block(bool forall, std::vector<Var> vars, Assertion body) {
    const auto same = forall ? Assertion::Kind::forall : Assertion::Kind::exists;
    auto add = [&](const Var& x) {
      if (std::find(vars.begin(), vars.end(), x) == vars.end()) vars.push_back(x);
    };
    // Absorb directly nested quantifiers of the same kind, also through the
    // consequent of an implication when the antecedent does not mention the
    // inner binder.
    for (;;) {
      if (body.kind() == same) {
        add(body.bound());
        body = body.body();
        continue;
      }
      if (forall && body.kind() == Assertion::Kind::implication) {
        std::vector<Assertion> ante;
        Assertion cons;
        split_implication(body, ante, cons);
        if (cons.kind() == same) {
          Assertion a = conj_all(ante);
          if (!a.free_vars().contains(cons.bound())) {
            add(cons.bound());
            body = Assertion::implies(a, cons.body());
            continue;
          }
        }
      }
      break;
    }
    std::erase_if(vars, [&](const Var& x) { return !body.free_vars().contains(x); });
    if (vars.empty()) return eval(body);

    // Distribute forall over conjunction and exists over disjunction.
    std::vector<Assertion> parts;
    if (forall) {
      conjuncts(body, parts);
    } else {
      disjuncts(body, parts);
    }
    if (parts.size() > 1) {
      Truth acc = block(forall, vars, parts[0]);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        auto next = [&] { return block(forall, vars, parts[i]); };
        acc = forall ? and_then(acc, next) : or_else(acc, next);
      }
      return acc;
    }

    // Pull out the parts that do not mention the block variables; the rest
    // are the guards used to pick enumeration ranges.
    std::vector<Assertion> guards;
    if (forall && body.kind() == Assertion::Kind::implication) {
      std::vector<Assertion> ante, outer;
      Assertion cons;
      split_implication(body, ante, cons);
      for (auto& g : ante) (mentions_any(g.free_vars(), vars) ? guards : outer).push_back(g);
      if (!outer.empty()) {
        Assertion inner = guards.empty() ? cons : Assertion::implies(conj_all(guards), cons);
        return implies_then(eval(conj_all(outer)), [&] { return block(true, vars, inner); });
      }
    } else if (!forall) {
      std::vector<Assertion> cs, outer;
      conjuncts(body, cs);
      for (auto& g : cs) (mentions_any(g.free_vars(), vars) ? guards : outer).push_back(g);
      if (!outer.empty()) {
        Assertion inner = conj_all(guards);
        return and_then(eval(conj_all(outer)), [&] { return block(false, vars, inner); });
      }
    }

    // Pick the next variable: one defined by an equation, then one with an
    // upper bound, then any.
    auto free_of_block = [&](const Expr& e) { return !mentions_any(e.vars(), vars); };
    for (const Var& v : vars) {
      for (const auto& g : guards) {
        if (g.kind() != Assertion::Kind::atom) continue;
        const BoolExpr& b = g.as_bool();
        if (b.kind() != BoolExpr::Kind::eq) continue;
        auto is_v = [&](const Expr& e) { return e.kind() == Expr::Kind::var && e.name() == v; };
        if (is_v(b.left()) && free_of_block(b.right())) return one_point(forall, vars, v, b.right(), body);
        if (is_v(b.right()) && free_of_block(b.left())) return one_point(forall, vars, v, b.left(), body);
      }
    }
    for (const Var& v : vars) {
      for (const auto& g : guards) {
        if (g.kind() != Assertion::Kind::atom) continue;
        const BoolExpr& b = g.as_bool();
        auto is_v = [&](const Expr& e) { return e.kind() == Expr::Kind::var && e.name() == v; };
        if (b.kind() == BoolExpr::Kind::le && is_v(b.left()) && free_of_block(b.right())) {
          return ranged(forall, vars, v, eval_expr(b.right(), env_), false, body);
        }
        if (b.kind() == BoolExpr::Kind::negation && b.sub(0).kind() == BoolExpr::Kind::le &&
            is_v(b.sub(0).right()) && free_of_block(b.sub(0).left())) {
          return ranged(forall, vars, v, eval_expr(b.sub(0).left(), env_), true, body);
        }
      }
    }
    return unguarded(forall, vars, vars.front(), body);
  }

  std::vector<Var> without(const std::vector<Var>& vars, const Var& v) {
    std::vector<Var> rest;
    for (const auto& x : vars)
      if (x != v) rest.push_back(x);
    return rest;
  }

  // Every value other than e falsifies a guard, so the block reduces to the
  // instance at e. When e lies outside the bounded range the bounded answer
  // is the vacuous one.
  Truth one_point(bool forall, const std::vector<Var>& vars, const Var& v, const Expr& def, const Assertion& body) {
    Nat e = eval_expr(def, env_);
    auto rest = without(vars, v);
    if (e <= qb_) {
      Binding bind(*this, v, e);
      return block(forall, rest, body);
    }
    Truth t{false, false};
    try {
      Binding bind(*this, v, e);
      t = block(forall, rest, body);
    } catch (const ArithmeticOverflow&) {
      return {forall, false};
    }
    bool vacuous = forall;
    return {vacuous, t.exact && t.value == vacuous};
  }

  Truth ranged(bool forall, const std::vector<Var>& vars, const Var& v, Nat bound, bool strict,
               const Assertion& body) {
    if (strict && bound == 0) return {forall, true};
    Nat hi = strict ? bound - 1 : bound;
    auto rest = without(vars, v);
    const bool decisive = !forall;
    Binding bind(*this, v, 0);
    bool seen_decisive = false, all_exact = true;
    for (Nat c = 0; c <= std::min(hi, qb_); ++c) {
      bind.set(c);
      Truth t = block(forall, rest, body);
      if (t.value == decisive) {
        if (t.exact) return {decisive, true};
        seen_decisive = true;
      }
      all_exact = all_exact && t.exact;
    }
    if (seen_decisive) return {decisive, false};
    if (!all_exact) return {!decisive, false};
    if (hi <= qb_) return {!decisive, true};
    if (hi - qb_ > kTailCap) return {!decisive, false};
    try {
      for (Nat c = qb_ + 1; c <= hi; ++c) {
        bind.set(c);
        Truth t = block(forall, rest, body);
        if (!t.exact || t.value == decisive) return {!decisive, false};
      }
    } catch (const ArithmeticOverflow&) {
      return {!decisive, false};
    }
    return {!decisive, true};
  }

  Truth unguarded(bool forall, const std::vector<Var>& vars, const Var& v, const Assertion& body) {
    auto rest = without(vars, v);
    const bool decisive = !forall;
    Binding bind(*this, v, 0);
    bool seen_decisive = false, all_exact = true;
    for (Nat c = 0; c <= qb_; ++c) {
      bind.set(c);
      Truth t = block(forall, rest, body);
      if (t.value == decisive) {
        if (t.exact) return {decisive, true};
        seen_decisive = true;
      }
      all_exact = all_exact && t.exact;
    }
    if (seen_decisive) return {decisive, false};
    if (!all_exact || !rest.empty()) return {!decisive, false};

    // The bounded range agrees; look past it until every atom mentioning v
    // has settled, after which the body is constant in v.
    std::vector<BoolExpr> atoms;
    if (!collect_atoms(body, v, atoms)) return {!decisive, false};
    if (qb_ > UINT64_MAX - kTailCap - 1) return {!decisive, false};
    try {
      for (Nat c = qb_ + 1; c <= qb_ + kTailCap; ++c) {
        bind.set(c);
        Truth t = eval(body);
        if (!t.exact || t.value == decisive) return {!decisive, false};
        if (std::all_of(atoms.begin(), atoms.end(), [&](const BoolExpr& a) { return atom_stable(a, v, env_); }))
          return {!decisive, true};
      }
    } catch (const ArithmeticOverflow&) {
    }
    return {!decisive, false};
  }
};

bool naive_holds(const Assertion& a, State& s, Nat qb) {
  switch (a.kind()) {
    case Assertion::Kind::atom: return eval_bool(a.as_bool(), s);
    case Assertion::Kind::negation: return !naive_holds(a.sub(0), s, qb);
    case Assertion::Kind::conjunction: return naive_holds(a.sub(0), s, qb) && naive_holds(a.sub(1), s, qb);
    case Assertion::Kind::disjunction: return naive_holds(a.sub(0), s, qb) || naive_holds(a.sub(1), s, qb);
    case Assertion::Kind::implication: return !naive_holds(a.sub(0), s, qb) || naive_holds(a.sub(1), s, qb);
    case Assertion::Kind::exists:
    case Assertion::Kind::forall: {
      bool ex = a.kind() == Assertion::Kind::exists;
      Nat saved = s.get(a.bound());
      bool result = !ex;
      for (Nat c = 0; c <= qb; ++c) {
        s.set(a.bound(), c);
        if (naive_holds(a.body(), s, qb) == ex) {
          result = ex;
          break;
        }
      }
      s.set(a.bound(), saved);
      return result;
    }
  }
  return false;
}

}  // namespace

Truth evaluate(const Assertion& a, const State& s, Nat quant_bound) { return Evaluator(s, quant_bound).eval(a); }

bool assert_holds(const State& s, const Assertion& a, Nat quant_bound) {
  State env = s;
  return naive_holds(a, env, quant_bound);
}

Verdict entails(const EntailmentQuery& q) {
  Verdict v;
  v.bounds = q.bounds;
  if (q.relevant_vars.empty()) {
    VarSet vs = q.lhs.free_vars();
    vs.insert(q.rhs.free_vars().begin(), q.rhs.free_vars().end());
    v.vars.assign(vs.begin(), vs.end());
  } else {
    v.vars = q.relevant_vars;
    std::sort(v.vars.begin(), v.vars.end());
  }
  bool inexact = false, overflow = false;
  const Nat qb = q.bounds.quant_bound;
  for_each_state(v.vars, q.bounds.domain_max, [&](const State& s) {
    try {
      Truth l = evaluate(q.lhs, s, qb);
      if (!l.value && l.exact) return true;
      Truth r = evaluate(q.rhs, s, qb);
      if (r.value && r.exact) return true;
      if (l.value && l.exact && !r.value && r.exact) {
        v.kind = Verdict::Kind::invalid;
        v.witness = Witness{s, std::nullopt, 0};
        return false;
      }
      inexact = true;
    } catch (const ArithmeticOverflow&) {
      overflow = true;
    }
    return true;
  });
  if (v.invalid()) return v;
  if (overflow) {
    v.kind = Verdict::Kind::unknown;
    v.reason = UnknownReason::arithmetic_overflow;
  } else if (inexact) {
    v.kind = Verdict::Kind::unknown;
    v.reason = UnknownReason::quantifier_bounded;
  }
  return v;
}

Verdict models_tautology(const Assertion& a, const std::vector<Var>& vars, const Bounds& b) {
  return entails(EntailmentQuery{Assertion::truth(), a, vars, b});
}

}  // namespace prhl
