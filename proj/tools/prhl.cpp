// Command-line front end: run programs, decide triples, check, build and
// transform certificates.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prhl/checker.hpp"
#include "prhl/parser.hpp"
#include "prhl/printer.hpp"
#include "prhl/prover.hpp"
#include "prhl/report.hpp"

using namespace prhl;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kUsage = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Nat parse_nat(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text[0] == '-') throw UsageError(what + ": not a natural number: " + text);
  return static_cast<Nat>(v);
}

void env_bound(const char* name, Nat& slot) {
  if (const char* v = std::getenv(name)) slot = parse_nat(v, name);
}

// Triple files carry section headers; anything else is taken as a bare program.
bool looks_like_triple(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto start = line.find_first_not_of(" \t\r");
    if (start != std::string::npos && line.compare(start, 5, "prog:") == 0) return true;
  }
  return false;
}

LoopMode parse_loop_mode(const std::string& s) {
  if (s == "beta") return LoopMode::beta_mode();
  if (s == "invariant") return LoopMode::invariant_mode();
  if (s.rfind("unroll:", 0) == 0) return LoopMode::unroll(static_cast<unsigned>(parse_nat(s.substr(7), "--loop-mode")));
  throw UsageError("--loop-mode: expected beta, invariant or unroll:K, got " + s);
}

Json state_json(const State& s) {
  Json out = Json::object();
  for (const auto& [x, v] : s.entries()) out[x] = v;
  return out;
}

struct Options {
  std::optional<Nat> domain_max, step_bound, quant_bound;
  std::string format = "text";
  bool strict_fig4_assign = false;

  Bounds bounds() const {
    Bounds b;
    env_bound("PRHL_DOMAIN_MAX", b.domain_max);
    env_bound("PRHL_STEP_BOUND", b.step_bound);
    env_bound("PRHL_QUANT_BOUND", b.quant_bound);
    if (domain_max) b.domain_max = *domain_max;
    if (step_bound) b.step_bound = *step_bound;
    if (quant_bound) b.quant_bound = *quant_bound;
    return b;
  }
  Format fmt() const { return format == "machine" ? Format::machine : Format::text; }
};

int cmd_run(const Options& o, const std::string& file, const std::vector<std::string>& assigns) {
  std::string text = read_file(file);
  Prog p = looks_like_triple(text) ? parse_triple_file(text).prog : parse_program(text);
  State s;
  for (const auto& kv : assigns) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--state: expected k=v, got " + kv);
    s.set(kv.substr(0, eq), parse_nat(kv.substr(eq + 1), "--state " + kv.substr(0, eq)));
  }
  Bounds b = o.bounds();
  RunResult r = run_all(p, s, b);
  if (o.fmt() == Format::machine) {
    Json finals = Json::array();
    for (const auto& f : r.finals) finals.push_back(Json{{"state", state_json(f.state)}, {"steps", f.steps}});
    Json doc{{"initial", state_json(s)}, {"finals", finals}, {"truncated", r.truncated}, {"overflow", r.overflow}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << r.finals.size() << (r.finals.size() == 1 ? " final state" : " final states") << " from "
              << to_string(s) << "\n";
    for (const auto& f : r.finals) std::cout << "  " << to_string(f.state) << " after " << f.steps << " steps\n";
    if (r.truncated) std::cout << "  (some runs cut at step bound " << b.step_bound << ")\n";
    if (r.overflow) std::cout << "  (some runs stopped on arithmetic overflow)\n";
  }
  return r.truncated || r.overflow ? 2 : 0;
}

int cmd_check_triple(const Options& o, const std::string& file, const std::string& logic_name) {
  auto logic = parse_logic(logic_name);
  if (!logic) throw UsageError("--logic: unknown logic " + logic_name);
  Triple t = parse_triple_file(read_file(file));
  Verdict v = check_triple(*logic, t.pre, t.prog, t.post, o.bounds());
  std::cout << emit_verdict(v, o.fmt());
  return exit_code(v);
}

int cmd_check_proof(const Options& o, const std::string& file, bool allow_open) {
  Certificate c = parse_proof(read_file(file));
  BoundedOracle oracle;
  CheckOptions opts{o.bounds(), o.strict_fig4_assign, allow_open};
  CheckReport r = check_certificate(c, oracle, opts);
  std::cout << emit_report(r, o.fmt());
  return exit_code(r);
}

int cmd_prove(const Options& o, const std::string& file, const std::string& mode, const std::string& out) {
  Triple t = parse_triple_file(read_file(file));
  BoundedOracle oracle;
  ProveResult r;
  try {
    r = prove_prhl(ProveRequest{t, parse_loop_mode(mode), o.bounds()}, oracle);
  } catch (const MissingInvariant& e) {
    throw UsageError(e.what());
  }
  if (!r.proof) {
    std::cerr << r.message << "\n";
    std::cout << emit_verdict(r.verdict, o.fmt());
    return exit_code(r.verdict);
  }
  write_output(out, serialize(*r.proof));
  if (!r.verdict.valid()) std::cerr << r.message << "\n";
  return exit_code(r.verdict);
}

int cmd_transform(const Options& o, const std::string& file, const std::string& out) {
  Certificate c = parse_proof(read_file(file));
  const auto* p = std::get_if<PrhlNode>(&c);
  if (!p) throw UsageError(file + ": transform expects an ordinary (prhl) certificate");
  BoundedOracle oracle;
  CheckReport r = check_prhl(*p, oracle, CheckOptions{o.bounds(), o.strict_fig4_assign, false});
  if (!r.accepted()) {
    std::cerr << "input certificate does not check:\n" << emit_report(r, Format::text);
    return 1;
  }
  write_output(out, serialize(transform_to_cyclic(*p)));
  return 0;
}

int cmd_wp(const Options& o, const std::string& file, const std::string& mode) {
  Triple t = parse_triple_file(read_file(file));
  LoopMode m = parse_loop_mode(mode);
  Assertion a;
  try {
    a = wpr_formula(t.prog, t.post, m);
  } catch (const MissingInvariant& e) {
    throw UsageError(e.what());
  }
  if (o.fmt() == Format::machine) {
    std::cout << Json{{"formula", to_string(a)}, {"exact", wpr_is_exact(t.prog, m)}}.dump(2) << "\n";
  } else {
    std::cout << to_string(a) << "\n";
  }
  return 0;
}

int cmd_beta_encode(const Options& o, const std::string& list) {
  std::vector<Nat> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_nat(item, "beta-encode"));
  if (values.empty()) throw UsageError("beta-encode: empty sequence");
  try {
    auto [n, m] = encode_sequence(values);
    if (o.fmt() == Format::machine)
      std::cout << Json{{"n", n}, {"m", m}}.dump(2) << "\n";
    else
      std::cout << "n=" << n << " m=" << m << "\n";
    return 0;
  } catch (const SearchExhausted& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial reverse Hoare logic toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--domain-max", o.domain_max, "largest value of an enumerated variable (default 8)");
  app.add_option("--step-bound", o.step_bound, "small-step budget per run (default 10000)");
  app.add_option("--quant-bound", o.quant_bound, "largest value a quantifier ranges over (default 16)");
  app.add_option("--format", o.format, "text or machine")->check(CLI::IsMember({"text", "machine"}));
  app.add_flag("--strict-fig4-assign", o.strict_fig4_assign,
               "also accept fresh-assignment premises written as x' = E[x:=x'] && P[x:=x']");

  std::string file, out, logic = "partial-reverse", mode = "beta", list;
  std::vector<std::string> state;
  bool allow_open = false;

  auto* run = app.add_subcommand("run", "execute a program and list its final states");
  run->add_option("file", file, "program or triple file")->required();
  run->add_option("--state", state, "initial values, k=v")->expected(0, -1);

  auto* ct = app.add_subcommand("check-triple", "decide a triple by enumeration");
  ct->add_option("file", file, "triple file")->required();
  ct->add_option("--logic", logic, "partial-reverse, partial-hoare, total-hoare or incorrectness");

  auto* cp = app.add_subcommand("check-proof", "check a certificate");
  cp->add_option("file", file, "certificate")->required();
  cp->add_flag("--allow-open-leaves", allow_open, "do not reject leaves without back-links");

  auto* pv = app.add_subcommand("prove", "build an ordinary certificate for a triple");
  pv->add_option("file", file, "triple file")->required();
  pv->add_option("--loop-mode", mode, "beta or invariant");
  pv->add_option("-o,--output", out, "certificate path (default stdout)");

  auto* tf = app.add_subcommand("transform", "turn an ordinary certificate into a cyclic one");
  tf->add_option("file", file, "ordinary certificate")->required();
  tf->add_option("-o,--output", out, "certificate path (default stdout)");

  auto* wp = app.add_subcommand("wp", "weakest pre-condition of a triple file's program and post");
  wp->add_option("file", file, "triple file")->required();
  wp->add_option("--loop-mode", mode, "beta, invariant or unroll:K");

  auto* be = app.add_subcommand("beta-encode", "smallest n, m encoding a sequence");
  be->add_option("values", list, "comma-separated naturals")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*run) return cmd_run(o, file, state);
    if (*ct) return cmd_check_triple(o, file, logic);
    if (*cp) return cmd_check_proof(o, file, allow_open);
    if (*pv) return cmd_prove(o, file, mode, out);
    if (*tf) return cmd_transform(o, file, out);
    if (*wp) return cmd_wp(o, file, mode);
    if (*be) return cmd_beta_encode(o, list);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const LangError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const ProofFormatError& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
  }
  return kUsage;
}
