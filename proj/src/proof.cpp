#include "prhl/proof.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "prhl/parser.hpp"
#include "prhl/printer.hpp"

namespace prhl {

using Json = nlohmann::ordered_json;

bool same_triple(const Triple& a, const Triple& b) {
  return a.prog == b.prog && alpha_equal(a.pre, b.pre) && alpha_equal(a.post, b.post);
}

std::string to_string(const Triple& t) {
  return "(| " + to_string(t.pre) + " |) " + to_string(t.prog) + " (| " + to_string(t.post) + " |)";
}

Triple parse_triple_file(const std::string& text) {
  std::map<std::string, std::string> sections;
  std::string* current = nullptr;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start != std::string::npos) {
      for (const char* key : {"pre", "prog", "post"}) {
        std::string head = std::string(key) + ":";
        if (line.compare(start, head.size(), head) != 0) continue;
        if (sections.contains(key)) throw ProofFormatError(std::string("triple file: repeated section ") + head);
        current = &sections[key];
        line.erase(0, start + head.size());
        break;
      }
    }
    if (current) {
      *current += line;
      *current += '\n';
    } else if (start != std::string::npos) {
      throw ProofFormatError("triple file: text before the first section");
    }
  }
  for (const char* key : {"pre", "prog", "post"})
    if (!sections.contains(key)) throw ProofFormatError(std::string("triple file: missing section ") + key + ":");
  return Triple{parse_assertion(sections["pre"]), parse_program(sections["prog"]), parse_assertion(sections["post"])};
}

namespace {

const std::pair<Rule, const char*> kRuleNames[] = {
    {Rule::axiom, "Axiom"},         {Rule::assign, "Assign"},           {Rule::seq, "Seq"},
    {Rule::cons, "Cons"},           {Rule::disj, "Or"},                 {Rule::while_loop, "While"},
    {Rule::assign_subst, "AssignSubst"}, {Rule::assign_fresh, "AssignFresh"}, {Rule::open_leaf, "OpenLeaf"},
};

bool prhl_rule(Rule r) {
  return r == Rule::axiom || r == Rule::assign || r == Rule::seq || r == Rule::cons || r == Rule::disj ||
         r == Rule::while_loop;
}

bool cprhl_rule(Rule r) { return r != Rule::assign && r != Rule::seq; }

}  // namespace

std::string to_string(Rule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "?";
}

std::optional<Rule> parse_rule(const std::string& name) {
  for (const auto& [rule, n] : kRuleNames)
    if (name == n) return rule;
  return std::nullopt;
}

std::size_t arity(Rule r, bool cyclic) {
  switch (r) {
    case Rule::axiom:
    case Rule::assign:
    case Rule::open_leaf: return 0;
    case Rule::cons:
    case Rule::assign_subst:
    case Rule::assign_fresh: return 1;
    case Rule::while_loop: return cyclic ? 2 : 1;
    case Rule::seq:
    case Rule::disj: return 2;
  }
  return 0;
}

void number_nodes(PrhlNode& root) {
  std::size_t next = 0;
  std::function<void(PrhlNode&)> go = [&](PrhlNode& n) {
    n.id = "n" + std::to_string(next++);
    for (auto& c : n.children) go(c);
  };
  go(root);
}

bool id_less(const NodeId& a, const NodeId& b) {
  // Compare runs of digits numerically, everything else by character.
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      std::string da = a.substr(i, i2 - i), db = b.substr(j, j2 - j);
      da.erase(0, std::min(da.find_first_not_of('0'), da.size()));
      db.erase(0, std::min(db.find_first_not_of('0'), db.size()));
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

std::vector<NodeId> CyclicPreProof::ids() const {
  std::vector<NodeId> out;
  for (const auto& [id, _] : nodes) out.push_back(id);
  std::sort(out.begin(), out.end(), id_less);
  return out;
}

std::vector<NodeId> CyclicPreProof::proper_open_leaves() const {
  std::vector<NodeId> out;
  for (const auto& id : ids()) {
    const auto& n = nodes.at(id);
    if (n.rule == Rule::open_leaf && !backlinks.contains(id)) out.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json triple_json(const Triple& t) {
  return Json{{"pre", to_string(t.pre)}, {"prog", to_string(t.prog)}, {"post", to_string(t.post)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string serialize(const PrhlNode& p) {
  PrhlNode root = p;
  if (root.id.empty()) number_nodes(root);
  std::vector<const PrhlNode*> all;
  std::function<void(const PrhlNode&)> collect = [&](const PrhlNode& n) {
    all.push_back(&n);
    for (const auto& c : n.children) collect(c);
  };
  collect(root);
  std::sort(all.begin(), all.end(), [](const PrhlNode* a, const PrhlNode* b) { return id_less(a->id, b->id); });

  Json nodes = Json::object();
  for (const PrhlNode* n : all) {
    Json children = Json::array();
    for (const auto& c : n->children) children.push_back(c.id);
    nodes[n->id] = Json{{"rule", to_string(n->rule)}, {"triple", triple_json(n->triple)}, {"children", children}};
  }
  return dump(Json{{"system", "prhl"}, {"root", root.id}, {"nodes", nodes}, {"backlinks", Json::object()}});
}

std::string serialize(const CyclicPreProof& c) {
  Json nodes = Json::object();
  for (const auto& id : c.ids()) {
    const auto& n = c.at(id);
    Json node{{"rule", to_string(n.rule)}, {"triple", triple_json(n.triple)}, {"children", n.children}};
    if (n.fresh) node["fresh"] = *n.fresh;
    nodes[id] = node;
  }
  std::vector<NodeId> leaves;
  for (const auto& [leaf, _] : c.backlinks) leaves.push_back(leaf);
  std::sort(leaves.begin(), leaves.end(), id_less);
  Json links = Json::object();
  for (const auto& leaf : leaves) links[leaf] = c.backlinks.at(leaf);
  return dump(Json{{"system", "cprhl"}, {"root", c.root}, {"nodes", nodes}, {"backlinks", links}});
}

std::string serialize(const Certificate& c) {
  return std::visit([](const auto& p) { return serialize(p); }, c);
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ProofFormatError(msg); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing \"" + key + "\"");
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) fail(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

Json parse_json(const std::string& text) {
  // Duplicate keys are silently merged by the parser, so track them per object.
  std::vector<std::set<std::string>> seen;
  std::string duplicate;
  auto cb = [&](int, Json::parse_event_t ev, Json& parsed) {
    switch (ev) {
      case Json::parse_event_t::object_start: seen.emplace_back(); break;
      case Json::parse_event_t::object_end: seen.pop_back(); break;
      case Json::parse_event_t::key: {
        auto key = parsed.get<std::string>();
        if (!seen.back().insert(key).second && duplicate.empty()) duplicate = key;
        break;
      }
      default: break;
    }
    return true;
  };
  Json j;
  try {
    j = Json::parse(text, cb);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed document: ") + e.what());
  }
  if (!duplicate.empty()) fail("duplicate key \"" + duplicate + "\"");
  if (!j.is_object()) fail("document must be an object");
  return j;
}

struct RawNode {
  Rule rule;
  Triple triple;
  std::vector<NodeId> children;
  std::optional<Var> fresh;
};

// Every node reachable from the root exactly once, with no cycles.
void check_tree(const std::map<NodeId, RawNode>& nodes, const NodeId& root) {
  if (!nodes.contains(root)) fail("root \"" + root + "\" is not a node");
  std::map<NodeId, NodeId> parent;
  for (const auto& [id, n] : nodes)
    for (const auto& c : n.children) {
      if (!nodes.contains(c)) fail("node \"" + id + "\": dangling child \"" + c + "\"");
      if (c == root) fail("node \"" + id + "\": the root cannot be a child");
      if (!parent.emplace(c, id).second) fail("node \"" + c + "\" has more than one parent");
    }
  std::set<NodeId> reached;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    reached.insert(id);
    for (const auto& c : nodes.at(id).children) stack.push_back(c);
  }
  for (const auto& [id, _] : nodes)
    if (!reached.contains(id)) fail("node \"" + id + "\" is not reachable from the root");
}

}  // namespace

void validate_shape(const CyclicPreProof& c) {
  std::map<NodeId, RawNode> raw;
  for (const auto& [id, n] : c.nodes) raw.insert_or_assign(id, RawNode{n.rule, n.triple, n.children, n.fresh});
  check_tree(raw, c.root);
  for (const auto& [leaf, comp] : c.backlinks) {
    if (!c.nodes.contains(leaf)) fail("back-link from unknown node \"" + leaf + "\"");
    if (!c.nodes.contains(comp)) fail("back-link \"" + leaf + "\" -> dangling companion \"" + comp + "\"");
    const auto& l = c.at(leaf);
    if (!l.children.empty() || l.rule != Rule::open_leaf)
      fail("back-link source \"" + leaf + "\" must be an open leaf");
    if (c.at(comp).children.empty()) fail("back-link \"" + leaf + "\" -> \"" + comp + "\": companion must be inner node");
  }
}

Certificate parse_proof(const std::string& text) {
  Json j = parse_json(text);
  std::string system = string_field(j, "system", "document");
  if (system != "prhl" && system != "cprhl") fail("unknown system \"" + system + "\"");
  const bool cyclic = system == "cprhl";
  NodeId root = string_field(j, "root", "document");
  const Json& nodes = field(j, "nodes", "document");
  if (!nodes.is_object()) fail("\"nodes\" must be an object");

  std::map<NodeId, RawNode> raw;
  for (const auto& [id, n] : nodes.items()) {
    std::string where = "node \"" + id + "\"";
    if (!n.is_object()) fail(where + " must be an object");
    std::string rule_name = string_field(n, "rule", where);
    auto rule = parse_rule(rule_name);
    if (!rule || (cyclic ? !cprhl_rule(*rule) : !prhl_rule(*rule)))
      fail(where + ": rule \"" + rule_name + "\" is not a " + system + " rule");
    const Json& t = field(n, "triple", where);
    if (!t.is_object()) fail(where + ": \"triple\" must be an object");
    Triple triple{parse_assertion(string_field(t, "pre", where)), parse_program(string_field(t, "prog", where)),
                  parse_assertion(string_field(t, "post", where))};
    const Json& ch = field(n, "children", where);
    if (!ch.is_array()) fail(where + ": \"children\" must be an array");
    std::vector<NodeId> children;
    for (const auto& c : ch) {
      if (!c.is_string()) fail(where + ": child ids must be strings");
      children.push_back(c.get<std::string>());
    }
    std::optional<Var> fresh;
    if (n.contains("fresh")) {
      if (!cyclic) fail(where + ": \"fresh\" only applies to cyclic certificates");
      fresh = string_field(n, "fresh", where);
    }
    raw.insert_or_assign(id, RawNode{*rule, std::move(triple), std::move(children), std::move(fresh)});
  }
  check_tree(raw, root);

  std::map<NodeId, NodeId> links;
  if (j.contains("backlinks")) {
    const Json& bl = j["backlinks"];
    if (!bl.is_object()) fail("\"backlinks\" must be an object");
    for (const auto& [leaf, comp] : bl.items()) {
      if (!comp.is_string()) fail("back-link targets must be strings");
      links[leaf] = comp.get<std::string>();
    }
  }

  if (!cyclic) {
    if (!links.empty()) fail("an ordinary proof cannot have back-links");
    std::function<PrhlNode(const NodeId&)> build = [&](const NodeId& id) {
      const RawNode& r = raw.at(id);
      PrhlNode n{id, r.triple, r.rule, {}};
      for (const auto& c : r.children) n.children.push_back(build(c));
      return n;
    };
    return build(root);
  }

  CyclicPreProof c;
  c.root = root;
  for (auto& [id, r] : raw) c.nodes.insert_or_assign(id, CyclicNode{r.triple, r.rule, r.children, r.fresh});
  c.backlinks = std::move(links);
  validate_shape(c);
  return c;
}

ProofGraph proof_graph(const CyclicPreProof& c) {
  ProofGraph g;
  g.nodes = c.ids();
  for (const auto& id : g.nodes)
    for (const auto& child : c.at(id).children) g.edges.emplace_back(id, child);
  std::vector<NodeId> leaves;
  for (const auto& [leaf, _] : c.backlinks) leaves.push_back(leaf);
  std::sort(leaves.begin(), leaves.end(), id_less);
  for (const auto& leaf : leaves) g.edges.emplace_back(leaf, c.backlinks.at(leaf));
  return g;
}

}  // namespace prhl
