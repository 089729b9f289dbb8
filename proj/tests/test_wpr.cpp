#include <doctest.h>

#include <algorithm>

#include "prhl/assertion_eval.hpp"
#include "prhl/parser.hpp"
#include "prhl/printer.hpp"
#include "prhl/wpr.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace prhl;
using namespace prhl::testing;

namespace {

Expr C(Nat n) { return Expr::constant(n); }


}  // namespace

TEST_CASE("beta examples") {
  State s{{"x", 1}};
  CHECK(assert_holds(s, beta(C(7), C(1), C(0), Expr::var("x")), 0));
  CHECK_FALSE(assert_holds(State{}, beta(C(7), C(1), C(0), Expr::var("x")), 0));
  for (Nat m = 0; m < 4; ++m)
    for (Nat i = 0; i < 4; ++i) {
      CHECK(assert_holds(State{}, beta(C(0), C(m), C(i), Expr::var("x")), 0));
      CHECK_FALSE(assert_holds(s, beta(C(0), C(m), C(i), Expr::var("x")), 0));
    }
  CHECK(to_string(beta(C(7), C(1), C(0), Expr::var("x"))) == "x = 7 % (1 + (1 + 0) * 1)");
}

TEST_CASE("encode_sequence examples") {
  CHECK(encode_sequence({1, 0}) == std::pair<Nat, Nat>{3, 1});
  CHECK(encode_sequence({0}) == std::pair<Nat, Nat>{0, 0});
  CHECK(encode_sequence({}) == std::pair<Nat, Nat>{0, 0});
  auto [n, m] = encode_sequence({2, 2, 2});
  CHECK(decode_sequence(n, m, 3) == std::vector<Nat>{2, 2, 2});
  CHECK_THROWS_AS(encode_sequence({5, 0}, 3), SearchExhausted);
}

TEST_CASE("encode_sequence round-trips every short sequence over 0..2") {
  std::vector<std::vector<Nat>> seqs{{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::vector<Nat>> next;
    for (const auto& s : seqs)
      if (static_cast<int>(s.size()) == len - 1)
        for (Nat v = 0; v <= 2; ++v) {
          auto t = s;
          t.push_back(v);
          next.push_back(t);
        }
    seqs.insert(seqs.end(), next.begin(), next.end());
  }
  CHECK(seqs.size() == 40);
  for (const auto& s : seqs) {
    auto [n, m] = encode_sequence(s);
    CHECK(decode_sequence(n, m, s.size()) == s);
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(assert_holds(State{{"x", s[j]}}, beta(C(n), C(m), C(j), Expr::var("x")), 0));
    if (!s.empty()) CHECK(encode_sequence(s) == brute_encode(s, 2000));
  }
}

TEST_CASE("wpr equations on loop-free programs") {
  Assertion q = parse_assertion("x = 1");
  CHECK(wpr_formula(Prog::empty(), q) == q);
  CHECK(wpr_formula(parse_program("x := y + 2"), q) == parse_assertion("y + 2 = 1"));
  Assertion c = wpr_formula(parse_program("x := 1 + skip"), q);
  CHECK(to_string(c) == "1 = 1 || x = 1");
  CHECK(wpr_formula(parse_program("x := x + 1; x := x * 2"), parse_assertion("x = 6")) ==
        parse_assertion("(x + 1) * 2 = 6"));
  // Substitution stays capture-avoiding under quantified posts.
  Assertion e = wpr_formula(parse_program("x := y"), parse_assertion("exists y. y < x"));
  CHECK(alpha_equal(e, parse_assertion("exists z. z < y")));
}

TEST_CASE("invariant mode uses the annotation") {
  Prog p = parse_program("x := 0; while i < 5 invariant i <= 5 do { i := i + 1 }");
  CHECK(wpr_formula(p, parse_assertion("i = 5"), LoopMode::invariant_mode()) ==
        parse_assertion("i <= 5"));
  CHECK_THROWS_AS(wpr_formula(parse_program("while i < 5 do { i := i + 1 }"), Assertion::truth(),
                              LoopMode::invariant_mode()),
                  MissingInvariant);
}

TEST_CASE("loop-free wpr formulas denote the enumerated wpr set") {
  Generator gen(2024, GenOptions{{"x", "y"}, 3, false, true, false, false, true});
  std::vector<Var> xs{"x", "y"};
  Bounds b{3, 1000, 0};
  for (int n = 0; n < 300; ++n) {
    Prog p = gen.prog(3);
    Assertion q = gen.assertion(2);
    Assertion w = wpr_formula(p, q);
    INFO(to_string(p), " / ", to_string(q), " => ", to_string(w));
    bool cut = false;
    auto expect = ref_wpr(p, q, xs, 3, cut);
    REQUIRE_FALSE(cut);
    std::vector<Env> got;
    for (const auto& s : enumerate_states(xs, 3))
      if (assert_holds(s, w, 0)) got.push_back(to_env(s));
    CHECK(got == expect);
    auto lib = transformer_set(Transformer::wpr, p, [&](const State& s) { return assert_holds(s, q, 0); }, xs, b);
    CHECK(lib.states.size() == expect.size());
  }
}

TEST_CASE("unrolled loops under-approximate") {
  Generator gen(31, GenOptions{{"x", "y"}, 2, true, true, false, false, false});
  std::vector<Var> xs{"x", "y"};
  int compared = 0;
  for (int n = 0; n < 200; ++n) {
    // Unrolling copies the post once per iteration, so nesting is kept shallow.
    Prog p = gen.prog(2);
    Assertion q = Assertion::atom(gen.cond(1));
    bool cut = false;
    auto expect = ref_wpr(p, q, xs, 3, cut, 30);
    if (cut) continue;
    ++compared;
    for (unsigned k : {0u, 1u, 3u}) {
      Assertion w = wpr_formula(p, q, LoopMode::unroll(k));
      for (const auto& s : enumerate_states(xs, 3))
        if (assert_holds(s, w, 0)) {
          INFO(to_string(p), " k=", k, " at ", to_string(s));
          CHECK(std::find(expect.begin(), expect.end(), to_env(s)) != expect.end());
        }
    }
    CHECK(wpr_is_exact(p, LoopMode::unroll(2)) == (to_string(p).find("while") == std::string::npos));
    CHECK(wpr_is_exact(p, LoopMode::beta_mode()));
  }
  CHECK(compared > 60);
  // Deep enough unrolling recovers a short loop exactly.
  Prog loop = parse_program("while x < 2 do { x := x + 1 }");
  Assertion w = wpr_formula(loop, parse_assertion("x = 2"), LoopMode::unroll(2));
  for (Nat x = 0; x <= 3; ++x) CHECK(assert_holds(State{{"x", x}}, w, 0) == (x <= 2));
}

TEST_CASE("beta-mode loop formula: shape") {
  Prog loop = parse_program("while x < 1 do { x := x + 1 }");
  Assertion w = wpr_formula(loop, parse_assertion("x = 1"));
  CHECK(w.kind() == Assertion::Kind::exists);
  CHECK(w.bound() == "k");
  CHECK(w.body().bound() == "m");
  CHECK(w.body().body().bound() == "n");
  CHECK(w.body().body().body().bound() == "y");
  CHECK(w.free_vars() == VarSet{"x"});
  // Quantified names steer clear of program variables.
  Assertion w2 = wpr_formula(parse_program("while k < 1 do { k := k + 1 }"), parse_assertion("k = 1"));
  CHECK(w2.bound() == "k_p1");
  CHECK(w2.free_vars() == VarSet{"k"});
}

TEST_CASE("beta-mode loop formula agrees with enumeration at oracle-derived bounds") {
  // Bodies are injective: the linking clause asks every predecessor of the
  // next entry to equal the current one.
  struct Case {
    const char* prog;
    const char* post;
    Nat domain;
  };
  for (Case c : {Case{"while x < 1 do { x := x + 1 }", "x = 1", 2}, Case{"while x < 2 do { x := x + 1 }", "x = 2", 2},
                 Case{"while x < 2 do { x := x + 2 }", "2 <= x", 1}}) {
    Prog loop = parse_program(c.prog);
    Assertion q = parse_assertion(c.post);
    const Nat domain = c.domain;
    std::vector<Var> xs{"x"};

    // Oracle: the state sequence of each terminating run, its β code and
    // the quantifier bound needed to reach every witness.
    Nat qb = 0;
    for (const auto& e : ref_states(xs, domain)) {
      std::vector<Nat> seq;
      Env cur = e;
      while (ref_bool(loop.guard(), cur)) {
        seq.push_back(cur.count("x") ? cur["x"] : 0);
        bool cut = false;
        cur = ref_run(loop.body(), to_state(cur), 10, cut).begin()->first;
      }
      seq.push_back(cur.count("x") ? cur["x"] : 0);
      auto [n, m] = brute_encode(seq, 200);
      qb = std::max({qb, n, m, static_cast<Nat>(seq.size() - 1), *std::max_element(seq.begin(), seq.end())});
    }
    CHECK(qb <= 20);

    bool cut = false;
    auto expect = ref_wpr(loop, q, xs, domain, cut);
    Assertion w = wpr_formula(loop, q);
    for (const auto& e : ref_states(xs, domain)) {
      INFO(c.prog, " at ", to_string(to_state(e)), " qb=", qb);
      bool in = std::find(expect.begin(), expect.end(), e) != expect.end();
      CHECK(evaluate(w, to_state(e), qb).value == in);
    }
  }
}
