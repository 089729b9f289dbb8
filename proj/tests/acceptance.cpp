// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "prhl/checker.hpp"
#include "prhl/parser.hpp"
#include "prhl/printer.hpp"
#include "prhl/prover.hpp"
#include "support/corpus.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/preproofs.hpp"

using namespace prhl;
using namespace prhl::testing;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, double seconds) {
  std::printf("%s criterion %d: %s [%.1fs]\n", ok ? "PASS" : "FAIL", n, what.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class F>
void criterion(int n, F body) {
  auto start = std::chrono::steady_clock::now();
  std::string what;
  bool ok = false;
  try {
    ok = body(what);
  } catch (const std::exception& e) {
    what += std::string(" exception: ") + e.what();
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(n, ok, what, s);
}

const NodeStatus* find_status(const CheckReport& r, const NodeId& id) {
  for (const auto& s : r.nodes)
    if (s.id == id) return &s;
  return nullptr;
}

bool has_loop(const Prog& p) { return to_string(p).find("while") != std::string::npos; }

// Shortest witness run of an invalid triple: from a state violating `pre`
// to a final state satisfying `post`. Empty when none exists in range.
std::optional<std::size_t> min_witness(const Triple& t, const std::vector<Var>& vars, Nat domain, Nat steps) {
  std::optional<std::size_t> best;
  for (const auto& s : enumerate_states(vars, domain)) {
    if (assert_holds(s, t.pre, 0)) continue;
    RunResult r = run_all(t.prog, s, Bounds{domain, steps, 0});
    for (const auto& f : r.finals)
      if (assert_holds(f.state, t.post, 0) && (!best || f.steps < *best)) best = f.steps;
  }
  return best;
}

std::vector<Var> union_vars(const std::vector<Triple>& ts) {
  VarSet all;
  for (const auto& t : ts)
    for (const auto& v : relevant_vars(t.pre, t.prog, t.post)) all.insert(v);
  return {all.begin(), all.end()};
}

struct Instance {
  Triple conclusion;
  Rule rule;
  std::vector<Triple> premises;
  std::optional<Var> fresh;
};

// Small head expressions keep one-step successors of 0..4 inside 0..8.
Expr head_expr(Generator& g) {
  auto atom = [&] { return g.pick(2) ? Expr::var(g.var()) : Expr::constant(g.constant()); };
  if (g.pick(3) == 0) return atom();
  static const ArithOp ops[] = {ArithOp::add, ArithOp::sub, ArithOp::div, ArithOp::mod};
  return Expr::binary(ops[g.pick(4)], atom(), atom());
}

Instance make_instance(Rule rule, Generator& g) {
  Assertion p = g.assertion(1), q = Assertion::atom(g.cond(1));
  Prog rest = g.prog(1);
  switch (rule) {
    case Rule::cons: {
      Prog c = g.prog(2);
      Assertion pre2 = Assertion::conj(p, g.assertion(0));
      Assertion post2 = Assertion::disj(q, g.assertion(0));
      return {Triple{p, c, q}, rule, {Triple{pre2, c, post2}}, std::nullopt};
    }
    case Rule::assign_subst: {
      Var x = g.var();
      Expr e = head_expr(g);
      Prog c = Prog::seq(Prog::assign(x, e), rest);
      return {Triple{subst(p, Bindings{{x, e}}), c, q}, rule, {Triple{p, rest, q}}, std::nullopt};
    }
    case Rule::assign_fresh: {
      Var x = g.var();
      Expr e = head_expr(g);
      Prog c = Prog::seq(Prog::assign(x, e), rest);
      Var xp = x + "_p1";
      Bindings ren{{x, Expr::var(xp)}};
      Assertion pre2 = Assertion::conj(Assertion::atom(BoolExpr::eq(Expr::var(x), subst(e, ren))), subst(p, ren));
      return {Triple{p, c, q}, rule, {Triple{pre2, rest, q}}, xp};
    }
    case Rule::disj: {
      Prog c0 = g.prog(1), c1 = g.prog(1);
      Prog c = Prog::seq(Prog::choice(c0, c1), rest);
      return {Triple{p, c, q}, rule, {Triple{p, Prog::seq(c0, rest), q}, Triple{p, Prog::seq(c1, rest), q}},
              std::nullopt};
    }
    case Rule::while_loop: {
      BoolExpr b = g.cond(0);
      Prog loop = Prog::while_loop(b, g.prog(1));
      Prog c = Prog::seq(loop, rest);
      Assertion left = Assertion::implies(Assertion::atom(BoolExpr::negation(b)), p);
      Assertion right = Assertion::implies(Assertion::atom(b), p);
      return {Triple{p, c, q}, rule, {Triple{left, rest, q}, Triple{right, Prog::seq(loop.body(), c), q}},
              std::nullopt};
    }
    default: throw std::logic_error("no premises");
  }
}

// The instance as a one-step pre-proof, so the checker confirms it is an
// instance of the rule it claims.
bool checker_accepts_step(const Instance& in) {
  CyclicPreProof c;
  c.root = "n0";
  CyclicNode top{in.conclusion, in.rule, {}, in.fresh};
  for (std::size_t i = 0; i < in.premises.size(); ++i) {
    NodeId id = "n" + std::to_string(i + 1);
    top.children.push_back(id);
    c.nodes.insert_or_assign(id, CyclicNode{in.premises[i], Rule::open_leaf, {}, std::nullopt});
  }
  c.nodes.insert_or_assign("n0", top);
  BoundedOracle oracle;
  CheckOptions opts{Bounds{4, 200, 4}, false, true};
  CheckReport r = check_cprhl(c, oracle, opts);
  return find_status(r, "n0")->kind == NodeStatus::Kind::ok;
}

std::vector<PrhlNode> criterion4_certs;
std::vector<std::pair<Prog, Assertion>> criterion4_pairs;
std::vector<PrhlNode> criterion3_accepted;

}  // namespace

int main() {
  criterion(1, [](std::string& what) {
    auto p = std::get<PrhlNode>(parse_proof(read_corpus("ex3.prhl.json")));
    BoundedOracle oracle;
    CheckReport r = check_prhl(p, oracle, CheckOptions{});
    Verdict v = check_triple(Logic::partial_reverse, p.triple.pre, p.triple.prog, p.triple.post, Bounds{12, 10000, 16});
    what = "counting-loop certificate accepted=" + std::to_string(r.accepted()) +
           " bounded-flags=" + std::to_string(r.bounded().size()) + ", triple at domain 12: " + to_string(v);
    return r.accepted() && r.bounded().empty() && v.valid();
  });

  criterion(2, [](std::string& what) {
    auto c = std::get<CyclicPreProof>(parse_proof(read_corpus("ex4_literal.cprhl.json")));
    BoundedOracle oracle;
    CheckReport r = check_cprhl(c, oracle, CheckOptions{});
    const NodeStatus* cons = find_status(r, "n7");
    bool cons_ok = cons && cons->kind == NodeStatus::Kind::side_condition && cons->verdict->invalid() &&
                   cons->verdict->witness->initial == State{{"x", 0}, {"i", 0}} &&
                   cons->detail == "x = 0 && i = 0 |= i < 6 -> x + 1 = i && i = 1";
    const Triple& t = c.at(c.root).triple;
    Verdict v = check_triple(Logic::partial_reverse, t.pre, t.prog, t.post, Bounds{12, 1000, 16});
    State w{{"x", 10}, {"i", 5}};
    bool root_ok = v.invalid() && v.witness->initial == w && v.witness->final_state == w;
    what = "literal cyclic example rejected=" + std::to_string(!r.accepted()) +
           ", right-branch Cons: " + (cons ? to_string(*cons->verdict) : "missing") + ", root triple: " + to_string(v);
    return !r.accepted() && cons_ok && root_ok;
  });

  criterion(3, [](std::string& what) {
    Generator gen(3003, GenOptions{{"x", "y"}, 3, true, true, true, false, true});
    BoundedOracle oracle;
    Bounds b{6, 500, 16};
    int programs = 0, accepted = 0, unsound = 0;
    for (; programs < 600; ++programs) {
      Prog c = gen.prog(3);
      Assertion q = Assertion::atom(gen.cond(1));
      Assertion w = wpr_formula(c, q, LoopMode::invariant_mode());
      Assertion p = programs % 3 == 0 ? gen.assertion(1) : programs % 3 == 1 ? w : Assertion::disj(w, gen.assertion(1));
      PrhlNode cert = build_prhl(Triple{p, c, q}, LoopMode::invariant_mode());
      CheckReport r = check_prhl(cert, oracle, CheckOptions{b});
      if (!r.certain()) continue;
      ++accepted;
      criterion3_accepted.push_back(cert);
      if (check_triple(Logic::partial_reverse, p, c, q, b).invalid()) {
        ++unsound;
        std::cerr << "unsound: " << to_string(cert.triple) << "\n";
      }
    }
    what = std::to_string(programs) + " programs, " + std::to_string(accepted) +
           " certificates accepted without truncation, " + std::to_string(unsound) + " refuted roots";
    return programs >= 500 && accepted > 0 && unsound == 0;
  });

  criterion(4, [](std::string& what) {
    Generator gen(4004, GenOptions{{"x", "y"}, 3, false, true, false, false, true});
    BoundedOracle oracle;
    Bounds b{6, 500, 16};
    int n = 0, bad_valid = 0, bad_proof = 0;
    for (; n < 250; ++n) {
      Prog c = gen.prog(3);
      Assertion q = gen.assertion(2);
      Assertion w = wpr_formula(c, q);
      Triple t{w, c, q};
      if (!check_triple(Logic::partial_reverse, w, c, q, b).valid()) {
        ++bad_valid;
        std::cerr << "not valid: " << to_string(t) << "\n";
      }
      ProveResult r = prove_prhl(ProveRequest{t, {}, b}, oracle);
      if (!r.proof || !check_prhl(*r.proof, oracle, CheckOptions{b}).accepted()) {
        ++bad_proof;
        std::cerr << "not proved: " << to_string(t) << " " << r.message << "\n";
        continue;
      }
      criterion4_certs.push_back(*r.proof);
      criterion4_pairs.emplace_back(c, q);
    }
    what = std::to_string(n) + " loop-free programs, " + std::to_string(bad_valid) + " not oracle-valid, " +
           std::to_string(bad_proof) + " not proved";
    return n >= 200 && bad_valid == 0 && bad_proof == 0;
  });

  criterion(5, [](std::string& what) {
    std::vector<PrhlNode> inputs = criterion4_certs;
    inputs.push_back(std::get<PrhlNode>(parse_proof(read_corpus("ex3.prhl.json"))));
    inputs.insert(inputs.end(), criterion3_accepted.begin(), criterion3_accepted.end());
    BoundedOracle oracle;
    Bounds b{6, 500, 16};
    int rejected = 0, missing_links = 0, cons_cycles = 0, loops = 0;
    for (const auto& p : inputs) {
      CyclicPreProof c = transform_to_cyclic(p);
      CheckReport r = check_cprhl(c, oracle, CheckOptions{b});
      if (r.global.kind == GlobalStatus::Kind::cons_cycle) ++cons_cycles;
      if (!r.accepted() || !same_triple(c.at(c.root).triple, p.triple)) {
        ++rejected;
        std::cerr << "transform rejected: " << to_string(p.triple) << "\n" << serialize(c);
      }
      if (has_loop(p.triple.prog)) {
        ++loops;
        if (c.backlinks.empty()) ++missing_links;
      }
    }
    what = std::to_string(inputs.size()) + " transforms (" + std::to_string(loops) + " with loops), " +
           std::to_string(rejected) + " rejected, " + std::to_string(missing_links) + " loops without back-link, " +
           std::to_string(cons_cycles) + " Cons-only cycles";
    return criterion4_certs.size() >= 200 && rejected == 0 && missing_links == 0 && cons_cycles == 0 && loops > 0;
  });

  criterion(6, [](std::string& what) {
    // Sub-programs are choice-free so that loops do not branch at every
    // iteration; the Or instances supply their own head choice.
    Generator gen(6006, GenOptions{{"x", "y"}, 3, true, false, false, false, true});
    const Nat domain = 4, premise_domain = 8, steps = 40;
    std::string summary;
    bool ok = true;
    for (Rule rule : {Rule::cons, Rule::assign_subst, Rule::assign_fresh, Rule::disj, Rule::while_loop}) {
      int found = 0, violations = 0, attempts = 0;
      while (found < 100 && attempts < 20000) {
        ++attempts;
        Instance in = make_instance(rule, gen);
        auto vars = union_vars({in.conclusion});
        auto n = min_witness(in.conclusion, vars, domain, steps);
        if (!n) continue;
        if (!checker_accepts_step(in)) {
          ++violations;
          std::cerr << "not a rule instance: " << to_string(rule) << " " << to_string(in.conclusion) << "\n";
          continue;
        }
        ++found;
        auto pvars = union_vars(in.premises);
        for (const auto& v : vars)
          if (std::find(pvars.begin(), pvars.end(), v) == pvars.end()) pvars.push_back(v);
        std::sort(pvars.begin(), pvars.end());
        bool descended = false;
        for (const auto& prem : in.premises) {
          auto m = min_witness(prem, pvars, premise_domain, steps);
          if (m && (rule == Rule::cons ? *m <= *n : *m < *n)) descended = true;
        }
        if (!descended) {
          ++violations;
          std::cerr << "no descent: " << to_string(rule) << " " << to_string(in.conclusion) << " n=" << *n << "\n";
        }
      }
      summary += (summary.empty() ? "" : ", ") + to_string(rule) + " " + std::to_string(found) + "/" +
                 std::to_string(violations);
      ok = ok && found >= 100 && violations == 0;
    }
    what = "invalid conclusions/violations per rule: " + summary;
    return ok;
  });

  criterion(7, [](std::string& what) {
    std::vector<Var> xs{"x", "y"};
    int mismatches = 0, cut_runs = 0;
    for (const auto& [c, q] : criterion4_pairs) {
      Assertion w = wpr_formula(c, q);
      bool cut = false;
      auto expect = ref_wpr(c, q, xs, 6, cut);
      if (cut) ++cut_runs;
      std::vector<Env> got;
      for (const auto& e : ref_states(xs, 6))
        if (ref_holds(w, e, 0)) got.push_back(e);
      if (got != expect) ++mismatches;
    }

    std::vector<std::vector<Nat>> seqs{{}};
    for (std::size_t len = 1; len <= 3; ++len) {
      std::vector<std::vector<Nat>> next;
      for (const auto& s : seqs)
        if (s.size() == len - 1)
          for (Nat v = 0; v <= 2; ++v) {
            auto t = s;
            t.push_back(v);
            next.push_back(t);
          }
      seqs.insert(seqs.end(), next.begin(), next.end());
    }
    int bad_codes = 0;
    for (const auto& s : seqs) {
      auto [n, m] = encode_sequence(s);
      if (decode_sequence(n, m, s.size()) != s) ++bad_codes;
    }

    // One-iteration loop: witness sequences give the quantifier bound.
    Prog loop = parse_program("while x < 1 do { x := x + 1 }");
    Assertion q = parse_assertion("x = 1");
    std::vector<Var> one{"x"};
    const Nat domain = 2;
    Nat qb = 0;
    for (const auto& e : ref_states(one, domain)) {
      std::vector<Nat> seq;
      Env cur = e;
      while (ref_bool(loop.guard(), cur)) {
        seq.push_back(cur.count("x") ? cur.at("x") : 0);
        bool cut = false;
        cur = ref_run(loop.body(), to_state(cur), 10, cut).begin()->first;
      }
      seq.push_back(cur.count("x") ? cur.at("x") : 0);
      auto [n, m] = brute_encode(seq, 200);
      qb = std::max({qb, n, m, static_cast<Nat>(seq.size() - 1), *std::max_element(seq.begin(), seq.end())});
    }
    bool cut = false;
    auto expect = ref_wpr(loop, q, one, domain, cut);
    Assertion w = wpr_formula(loop, q);
    int beta_mismatch = 0;
    for (const auto& e : ref_states(one, domain)) {
      bool in = std::find(expect.begin(), expect.end(), e) != expect.end();
      if (ref_holds(w, e, qb) != in) ++beta_mismatch;
    }
    what = std::to_string(criterion4_pairs.size()) + " loop-free wpr formulas, " + std::to_string(mismatches) +
           " mismatches; " + std::to_string(seqs.size()) + " sequences, " + std::to_string(bad_codes) +
           " bad codes; beta loop at quantifier bound " + std::to_string(qb) + ", " + std::to_string(beta_mismatch) +
           " mismatches";
    return criterion4_pairs.size() >= 200 && mismatches == 0 && cut_runs == 0 && seqs.size() == 40 &&
           bad_codes == 0 && beta_mismatch == 0 && !cut;
  });

  criterion(8, [](std::string& what) {
    std::mt19937_64 rng(8008);
    int graphs = 0, disagree = 0, cycles = 0;
    for (; graphs < 300; ++graphs) {
      CyclicPreProof c = random_preproof(rng);
      GlobalStatus g = global_soundness(c);
      bool bad = g.kind == GlobalStatus::Kind::cons_cycle;
      cycles += bad;
      if (bad != naive_cons_only_path(c)) ++disagree;
      for (const auto& id : g.nodes)
        if (c.at(id).rule != Rule::cons || !on_cons_cycle(c, id)) ++disagree;
    }
    auto cc = std::get<CyclicPreProof>(parse_proof(read_corpus("cons_cycle.cprhl.json")));
    GlobalStatus two = global_soundness(cc);
    auto ex4 = std::get<CyclicPreProof>(parse_proof(read_corpus("ex4_literal.cprhl.json")));
    GlobalStatus loop = global_soundness(ex4);
    bool two_ok = two.kind == GlobalStatus::Kind::cons_cycle && two.nodes == std::vector<NodeId>{"n1", "n2"};
    bool loop_ok = loop.kind == GlobalStatus::Kind::ok && !ex4.backlinks.empty();
    what = std::to_string(graphs) + " random pre-proofs (" + std::to_string(cycles) + " with Cons-only cycles), " +
           std::to_string(disagree) + " disagreements; Cons 2-cycle rejected=" + std::to_string(two_ok) +
           ", While cycle accepted=" + std::to_string(loop_ok);
    return graphs >= 200 && disagree == 0 && two_ok && loop_ok;
  });

  criterion(9, [](std::string& what) {
    Generator gen(9009, GenOptions{{"x", "y", "z"}, 3, false, false, false, true, true});
    const Nat qb = 3;
    int n = 0, violations = 0;
    for (; n < 2000; ++n) {
      Assertion p = gen.assertion(3);
      Var x = gen.var();
      Expr e = gen.expr(2);
      Env env{{"x", gen.constant()}, {"y", gen.constant()}, {"z", gen.constant()}};
      Env updated = env;
      updated[x] = ref_expr(e, env);
      if (ref_holds(subst(p, Bindings{{x, e}}), env, qb) != ref_holds(p, updated, qb)) ++violations;
    }
    what = std::to_string(n) + " substitution instances, " + std::to_string(violations) + " violations";
    return n >= 1000 && violations == 0;
  });

  return failures == 0 ? 0 : 1;
}
