#include "prhl/report.hpp"

#include <map>

#include <json.hpp>

namespace prhl {

using Json = nlohmann::ordered_json;

namespace {

std::string reason_phrase(UnknownReason r) {
  switch (r) {
    case UnknownReason::quantifier_bounded: return "quantifier";
    case UnknownReason::step_budget_exhausted: return "step budget";
    case UnknownReason::arithmetic_overflow: return "overflow";
  }
  return "?";
}

std::string join(const std::vector<NodeId>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

Json state_json(const State& s, const std::vector<Var>& vars) {
  Json out = Json::object();
  if (vars.empty())
    for (const auto& [x, v] : s.entries()) out[x] = v;
  for (const auto& x : vars) out[x] = s.get(x);
  return out;
}

Json verdict_json(const Verdict& v) {
  Json out;
  switch (v.kind) {
    case Verdict::Kind::valid: out["kind"] = "valid"; break;
    case Verdict::Kind::invalid: out["kind"] = "invalid"; break;
    case Verdict::Kind::unknown: out["kind"] = "unknown"; break;
  }
  if (v.reason) out["reason"] = to_string(*v.reason);
  if (v.witness) {
    Json w{{"initial", state_json(v.witness->initial, v.vars)}};
    if (v.witness->final_state) {
      w["final"] = state_json(*v.witness->final_state, v.vars);
      w["steps"] = v.witness->steps;
    }
    out["witness"] = w;
  }
  return out;
}

Json bounds_json(const Bounds& b) {
  return Json{{"domain_max", b.domain_max}, {"step_bound", b.step_bound}, {"quant_bound", b.quant_bound}};
}

std::string status_name(NodeStatus::Kind k) {
  switch (k) {
    case NodeStatus::Kind::ok: return "ok";
    case NodeStatus::Kind::rule_mismatch: return "rule-mismatch";
    case NodeStatus::Kind::side_condition: return "side-condition";
  }
  return "?";
}

std::string global_name(GlobalStatus::Kind k) {
  switch (k) {
    case GlobalStatus::Kind::ok: return "ok";
    case GlobalStatus::Kind::cons_cycle: return "cons-cycle";
    case GlobalStatus::Kind::open_leaves: return "open-leaves";
  }
  return "?";
}

std::string headline(const CheckReport& r) {
  if (!r.accepted()) return "REJECT";
  auto bounded = r.bounded();
  if (bounded.empty()) return "ACCEPT (bounded: none)";
  // Group node ids by reason, keeping id order within each group.
  std::map<UnknownReason, std::vector<NodeId>> by_reason;
  for (const NodeStatus* s : bounded)
    by_reason[s->verdict->reason.value_or(UnknownReason::quantifier_bounded)].push_back(s->id);
  std::string parts;
  for (const auto& [reason, ids] : by_reason) {
    if (!parts.empty()) parts += "; ";
    parts += reason_phrase(reason) + (ids.size() == 1 ? " at node " : " at nodes ") + join(ids);
  }
  return "ACCEPT (bounded: " + parts + ")";
}

}  // namespace

std::string emit_report(const CheckReport& r, Format f) {
  if (f == Format::machine) {
    Json nodes = Json::object();
    for (const auto& s : r.nodes) {
      Json n{{"rule", to_string(s.rule)}, {"status", status_name(s.kind)}};
      if (!s.detail.empty()) n["detail"] = s.detail;
      if (s.verdict) n["verdict"] = verdict_json(*s.verdict);
      nodes[s.id] = n;
    }
    std::string result = !r.accepted() ? "reject" : r.certain() ? "accept" : "accept-bounded";
    Json doc{{"system", r.system == System::prhl ? "prhl" : "cprhl"},
             {"result", result},
             {"nodes", nodes},
             {"global", Json{{"status", global_name(r.global.kind)}, {"nodes", r.global.nodes}}},
             {"bounds", bounds_json(r.bounds)}};
    return doc.dump(2) + "\n";
  }

  std::string out = headline(r) + "\n";
  for (const auto& s : r.nodes) {
    if (s.kind == NodeStatus::Kind::ok) continue;
    out += "  " + s.id + " " + to_string(s.rule) + ": ";
    if (s.kind == NodeStatus::Kind::rule_mismatch)
      out += "rule mismatch: " + s.detail;
    else
      out += "side condition " + s.detail + ": " + to_string(*s.verdict);
    out += "\n";
  }
  if (r.global.kind == GlobalStatus::Kind::cons_cycle)
    out += "  global: cycle through Cons nodes only: " + join(r.global.nodes) + "\n";
  if (r.global.kind == GlobalStatus::Kind::open_leaves)
    out += "  global: open leaves without back-links: " + join(r.global.nodes) + "\n";
  return out;
}

std::string emit_verdict(const Verdict& v, Format f) {
  if (f == Format::machine) {
    Json doc = verdict_json(v);
    doc["bounds"] = bounds_json(v.bounds);
    return doc.dump(2) + "\n";
  }
  return to_string(v) + "\n";
}

int exit_code(const CheckReport& r) {
  if (!r.accepted()) return 1;
  return r.certain() ? 0 : 2;
}

int exit_code(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::valid: return 0;
    case Verdict::Kind::invalid: return 1;
    case Verdict::Kind::unknown: return 2;
  }
  return 2;
}

}  // namespace prhl
