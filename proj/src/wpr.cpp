#include "prhl/wpr.hpp"

#include <string>

#include "prhl/printer.hpp"

namespace prhl {

Assertion beta(const Expr& a, const Expr& b, const Expr& i, const Expr& x) {
  Expr one = Expr::constant(1);
  return Assertion::atom(BoolExpr::eq(x, a % (one + (one + i) * b)));
}

std::pair<Nat, Nat> encode_sequence(const std::vector<Nat>& values, Nat ceiling) {
  if (values.empty()) return {0, 0};
  auto fits = [&](Nat n, Nat m) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      Nat mod = 1 + (1 + j) * m;
      if (n % mod != values[j]) return false;
    }
    return true;
  };
  for (Nat m = 0; m <= ceiling; ++m) {
    if (values[0] > m) continue;  // n % (1 + m) <= m
    for (Nat n = values[0]; n <= ceiling; n += 1 + m)
      if (fits(n, m)) return {n, m};
  }
  throw SearchExhausted("no β-encoding with n, m <= " + std::to_string(ceiling));
}

std::vector<Nat> decode_sequence(Nat n, Nat m, std::size_t length) {
  std::vector<Nat> out;
  for (std::size_t j = 0; j < length; ++j) out.push_back(n % (1 + (1 + j) * m));
  return out;
}

namespace {

void collect_annotation_vars(const Prog& p, VarSet& out) {
  switch (p.kind()) {
    case Prog::Kind::while_loop:
      if (p.invariant()) {
        VarSet a = all_vars(*p.invariant());
        out.insert(a.begin(), a.end());
      }
      collect_annotation_vars(p.body(), out);
      return;
    case Prog::Kind::seq:
    case Prog::Kind::choice:
      collect_annotation_vars(p.sub(0), out);
      collect_annotation_vars(p.sub(1), out);
      return;
    default: return;
  }
}

class WprBuilder {
 public:
  WprBuilder(LoopMode mode, VarSet used) : mode_(mode), used_(std::move(used)) {}

  Assertion wpr(const Prog& p, const Assertion& q) {
    switch (p.kind()) {
      case Prog::Kind::empty: return q;
      case Prog::Kind::assign: return subst(q, Bindings{{p.target(), p.expr()}});
      case Prog::Kind::seq: return wpr(p.sub(0), wpr(p.sub(1), q));
      case Prog::Kind::choice: return Assertion::disj(wpr(p.sub(0), q), wpr(p.sub(1), q));
      case Prog::Kind::while_loop:
        switch (mode_.kind) {
          case LoopMode::Kind::invariant:
            if (!p.invariant()) throw MissingInvariant("loop without invariant: while " + to_string(p.guard()));
            return *p.invariant();
          case LoopMode::Kind::unroll: return unroll(p, q);
          case LoopMode::Kind::beta: return beta_loop(p, q);
        }
    }
    return q;
  }

 private:
  LoopMode mode_;
  VarSet used_;

  Var fresh(const Var& hint) {
    Var v = fresh_var(used_, hint);
    used_.insert(v);
    return v;
  }

  Assertion unroll(const Prog& loop, const Assertion& q) {
    Assertion exit = Assertion::conj(Assertion::atom(BoolExpr::negation(loop.guard())), q);
    Assertion w = exit;
    for (unsigned j = 0; j < mode_.unroll_depth; ++j)
      w = Assertion::disj(exit, Assertion::conj(Assertion::atom(loop.guard()), wpr(loop.body(), w)));
    return w;
  }

  // Names for one family of l bound variables: y, y', y'', y''' when l = 1,
  // otherwise y1..yl with the same primes.
  std::vector<std::vector<Var>> y_families(std::size_t l) {
    for (std::string base = "y";; base += "y") {
      std::vector<std::vector<Var>> fam(4);
      for (int primes = 0; primes < 4; ++primes) {
        for (std::size_t j = 1; j <= l; ++j) {
          Var v = l == 1 ? base : base + std::to_string(j);
          if (primes > 0) v += "_p" + std::to_string(primes);
          fam[primes].push_back(v);
        }
      }
      bool clash = false;
      for (const auto& f : fam)
        for (const auto& v : f) clash = clash || used_.contains(v);
      if (clash) continue;
      for (const auto& f : fam) used_.insert(f.begin(), f.end());
      return fam;
    }
  }

  static Assertion conj_all(const std::vector<Assertion>& xs) {
    Assertion out = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) out = Assertion::conj(out, xs[i]);
    return out;
  }

  // base + j, printed as written in the encoding (no constant folding).
  static Expr index(const Expr& base, std::size_t j) {
    return j == 0 ? base : base + Expr::constant(j);
  }

  Assertion beta_block(const Expr& n, const Expr& m, const Expr& first, const std::vector<Var>& ys) {
    std::vector<Assertion> parts;
    for (std::size_t j = 0; j < ys.size(); ++j) parts.push_back(beta(n, m, index(first, j), Expr::var(ys[j])));
    return conj_all(parts);
  }

  static Bindings rename(const std::vector<Var>& from, const std::vector<Var>& to) {
    Bindings b;
    for (std::size_t j = 0; j < from.size(); ++j) b.emplace_back(from[j], Expr::var(to[j]));
    return b;
  }

  Assertion beta_loop(const Prog& loop, const Assertion& q) {
    VarSet xs_set = q.free_vars();
    xs_set.insert(loop.vars().begin(), loop.vars().end());
    std::vector<Var> xs(xs_set.begin(), xs_set.end());
    const std::size_t l = xs.size();
    if (l == 0) {
      // No variables: the loop either exits at once or never terminates.
      return Assertion::conj(Assertion::atom(BoolExpr::negation(loop.guard())), q);
    }

    Var k = fresh("k"), m = fresh("m"), n = fresh("n"), i = fresh("i");
    auto fam = y_families(l);
    const auto& y = fam[0];
    const auto& y1 = fam[1];
    const auto& y2 = fam[2];
    const auto& y3 = fam[3];
    Expr K = Expr::var(k), M = Expr::var(m), N = Expr::var(n), I = Expr::var(i);
    Expr L = Expr::constant(l);
    Expr zero = Expr::constant(0), one = Expr::constant(1);

    // F: the sequence starts at the current state.
    std::vector<Assertion> f;
    for (std::size_t j = 0; j < l; ++j) f.push_back(beta(N, M, Expr::constant(j), Expr::var(xs[j])));
    Assertion F = conj_all(f);

    // S: consecutive entries are linked by one guarded body execution.
    std::vector<Assertion> eq_next, eq_cur;
    for (std::size_t j = 0; j < l; ++j) {
      eq_next.push_back(Assertion::atom(BoolExpr::eq(Expr::var(xs[j]), Expr::var(y1[j]))));
      eq_cur.push_back(Assertion::atom(BoolExpr::eq(Expr::var(xs[j]), Expr::var(y[j]))));
    }
    Assertion body_wpr = wpr(loop.body(), conj_all(eq_next));
    Assertion link = subst(Assertion::implies(body_wpr, conj_all(eq_cur)), rename(xs, y2));
    Assertion guard_at_y = Assertion::atom(subst(loop.guard(), rename(xs, y)));
    Assertion step = Assertion::implies(
        Assertion::conj(beta_block(N, M, L * I, y), beta_block(N, M, L * (I + one), y1)),
        Assertion::conj(guard_at_y, link));
    Assertion in_range = Assertion::atom(BoolExpr::conj(BoolExpr::le(zero, I), BoolExpr::lt(I, K)));
    Assertion S = Assertion::implies(Assertion::atom(BoolExpr::lt(zero, K)),
                                     Assertion::forall(i, Assertion::implies(in_range, step)));

    // T: the last entry exits the loop in a post-state.
    Assertion exit_at = Assertion::conj(Assertion::atom(BoolExpr::negation(subst(loop.guard(), rename(xs, y3)))),
                                        subst(q, rename(xs, y3)));
    Assertion T = Assertion::implies(beta_block(N, M, L * K, y3), exit_at);

    Assertion out = Assertion::conj(Assertion::conj(F, S), T);
    for (auto fam_it = fam.rbegin(); fam_it != fam.rend(); ++fam_it)
      for (auto it = fam_it->rbegin(); it != fam_it->rend(); ++it) out = Assertion::forall(*it, out);
    out = Assertion::exists(n, out);
    out = Assertion::exists(m, out);
    return Assertion::exists(k, out);
  }
};

}  // namespace

Assertion wpr_formula(const WprRequest& req) {
  VarSet used = all_vars(req.post);
  used.insert(req.program.vars().begin(), req.program.vars().end());
  collect_annotation_vars(req.program, used);
  return WprBuilder(req.loop_mode, std::move(used)).wpr(req.program, req.post);
}

bool wpr_is_exact(const Prog& p, LoopMode mode) {
  if (mode.kind != LoopMode::Kind::unroll) return true;
  switch (p.kind()) {
    case Prog::Kind::while_loop: return false;
    case Prog::Kind::seq:
    case Prog::Kind::choice: return wpr_is_exact(p.sub(0), mode) && wpr_is_exact(p.sub(1), mode);
    default: return true;
  }
}

}  // namespace prhl
