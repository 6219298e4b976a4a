#include "evograph/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "evograph/json_io.hpp"

namespace evograph {

using jsonio::json;

namespace {

const std::vector<size_t> kNoEdges;

std::string cycle_to_string(const std::vector<NodeId>& cycle) {
  std::string out;
  for (const auto& n : cycle) {
    if (!out.empty()) out += " -> ";
    out += n;
  }
  return out;
}

// One directed cycle among `nodes` under `adjacency`, as a -> b -> ... -> a.
// Callers guarantee a cycle exists.
std::vector<NodeId> find_cycle(
    const std::set<NodeId>& nodes,
    const std::map<NodeId, std::vector<NodeId>>& adjacency) {
  std::map<NodeId, int> color;  // 0 unseen, 1 on stack, 2 done
  std::map<NodeId, NodeId> parent;
  for (const auto& start : nodes) {
    if (color[start] != 0) continue;
    std::vector<std::pair<NodeId, size_t>> stack{{start, 0}};
    color[start] = 1;
    while (!stack.empty()) {
      auto& [cur, next_child] = stack.back();
      const auto it = adjacency.find(cur);
      const auto& children = it == adjacency.end() ? std::vector<NodeId>{} : it->second;
      if (next_child < children.size()) {
        NodeId child = children[next_child++];
        if (!nodes.count(child)) continue;
        if (color[child] == 1) {
          std::vector<NodeId> cycle{child};
          for (NodeId walk = cur; walk != child; walk = parent[walk])
            cycle.push_back(walk);
          std::reverse(cycle.begin() + 1, cycle.end());
          cycle.push_back(child);
          return cycle;
        }
        if (color[child] == 0) {
          color[child] = 1;
          parent[child] = cur;
          stack.emplace_back(child, 0);
        }
      } else {
        color[cur] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

// Kahn's algorithm; returns ids left on a cycle (empty when acyclic).
std::set<NodeId> cyclic_remainder(
    const std::set<NodeId>& nodes,
    const std::map<NodeId, std::vector<NodeId>>& adjacency) {
  std::map<NodeId, int> indegree;
  for (const auto& n : nodes) indegree[n] = 0;
  for (const auto& [from, tos] : adjacency)
    for (const auto& to : tos)
      if (nodes.count(to)) ++indegree[to];
  std::deque<NodeId> ready;
  for (const auto& [n, d] : indegree)
    if (d == 0) ready.push_back(n);
  size_t removed = 0;
  while (!ready.empty()) {
    NodeId n = ready.front();
    ready.pop_front();
    ++removed;
    auto it = adjacency.find(n);
    if (it == adjacency.end()) continue;
    for (const auto& to : it->second)
      if (nodes.count(to) && --indegree[to] == 0) ready.push_back(to);
  }
  std::set<NodeId> remainder;
  if (removed == nodes.size()) return remainder;
  for (const auto& [n, d] : indegree)
    if (d > 0) remainder.insert(n);
  return remainder;
}

}  // namespace

Graph Graph::build(std::vector<PaperNode> papers, std::vector<MethodNode> methods,
                   std::vector<StubNode> stubs, std::vector<Edge> edges,
                   std::vector<MethodSeed> seeds) {
  Graph g;
  g.papers_ = std::move(papers);
  g.methods_ = std::move(methods);
  g.stubs_ = std::move(stubs);
  g.seeds_ = std::move(seeds);

  auto claim = [&g](const NodeId& id) {
    if (id.empty()) throw ParseError("node with empty id");
    if (g.paper_index_.count(id) || g.method_index_.count(id) ||
        g.stub_index_.count(id))
      throw UniquenessError("duplicate node id '" + id + "'");
  };

  for (size_t i = 0; i < g.papers_.size(); ++i) {
    const auto& p = g.papers_[i];
    claim(p.id);
    if (p.year && (*p.year < 1900 || *p.year > 2100))
      throw ParseError("paper '" + p.id + "': year " + std::to_string(*p.year) +
                       " outside [1900, 2100]");
    g.paper_index_[p.id] = i;
  }
  std::set<std::string> names;
  for (size_t i = 0; i < g.methods_.size(); ++i) {
    const auto& m = g.methods_[i];
    claim(m.id);
    if (m.canonical_name.empty())
      throw ParseError("method '" + m.id + "': empty canonical_name");
    if (!names.insert(m.canonical_name).second)
      throw UniquenessError("duplicate canonical_name '" + m.canonical_name + "'");
    g.method_index_[m.id] = i;
  }
  for (size_t i = 0; i < g.stubs_.size(); ++i) {
    const auto& s = g.stubs_[i];
    claim(s.id);
    if (s.year && (*s.year < 1900 || *s.year > 2100))
      throw ParseError("stub '" + s.id + "': year " + std::to_string(*s.year) +
                       " outside [1900, 2100]");
    g.stub_index_[s.id] = i;
  }
  for (const auto& m : g.methods_) {
    if (!m.introduced_by) continue;
    if (!g.paper_index_.count(*m.introduced_by))
      throw ReferentialError("method '" + m.id + "': introduced_by '" +
                             *m.introduced_by + "' is not a paper id");
    g.methods_by_paper_[*m.introduced_by].push_back(m.id);
  }

  std::set<std::tuple<NodeId, NodeId, EdgeType>> seen;
  for (auto& e : edges) {
    if (!g.has_node(e.source))
      throw ReferentialError("edge endpoint '" + e.source + "' unknown");
    if (!g.has_node(e.target))
      throw ReferentialError("edge endpoint '" + e.target + "' unknown");
    if (g.stub_index_.count(e.source))
      throw ParseError("edge '" + e.source + "' -> '" + e.target +
                       "': stub nodes may not source edges");
    if (is_causal(e.type)) {
      if (!e.evidence)
        throw ParseError("edge '" + e.source + "' -> '" + e.target +
                         "': causal edge requires an evidence record");
      if (e.evidence->bottleneck_quote.empty() || e.evidence->mechanism_quote.empty())
        throw ParseError("edge '" + e.source + "' -> '" + e.target +
                         "': causal edge requires non-empty quotes");
      if (e.evidence->confidence < 0.0 || e.evidence->confidence > 1.0)
        throw ParseError("edge '" + e.source + "' -> '" + e.target +
                         "': confidence outside [0, 1]");
    } else if (e.evidence) {
      throw ParseError("edge '" + e.source + "' -> '" + e.target +
                       "': background edges carry no evidence");
    }
    if (!seen.insert({e.source, e.target, e.type}).second) {
      g.warnings_.push_back("duplicate edge (" + e.source + ", " + e.target +
                            ", " + to_string(e.type) + ") dropped");
      continue;
    }
    g.in_by_target_[e.target].push_back(g.edges_.size());
    g.out_by_source_[e.source].push_back(g.edges_.size());
    g.edges_.push_back(std::move(e));
  }

  std::set<NodeId> strong_nodes;
  std::map<NodeId, std::vector<NodeId>> strong_adj;
  for (const auto& e : g.edges_) {
    if (!is_strong_causal(e.type)) continue;
    strong_nodes.insert(e.source);
    strong_nodes.insert(e.target);
    strong_adj[e.source].push_back(e.target);
  }
  auto remainder = cyclic_remainder(strong_nodes, strong_adj);
  if (!remainder.empty()) {
    auto cycle = find_cycle(remainder, strong_adj);
    throw CycleError("strong-causal cycle: " + cycle_to_string(cycle));
  }

  for (const auto& s : g.seeds_) {
    for (const auto& end : {s.source, s.target})
      if (!g.method_index_.count(end))
        throw ReferentialError("seed endpoint '" + end + "' is not a method id");
  }
  return g;
}

bool Graph::has_node(const NodeId& id) const {
  return paper_index_.count(id) || method_index_.count(id) || stub_index_.count(id);
}

std::optional<NodeKind> Graph::kind_of(const NodeId& id) const {
  if (paper_index_.count(id)) return NodeKind::paper;
  if (method_index_.count(id)) return NodeKind::method;
  if (stub_index_.count(id)) return NodeKind::stub;
  return std::nullopt;
}

const PaperNode* Graph::paper(const NodeId& id) const {
  auto it = paper_index_.find(id);
  return it == paper_index_.end() ? nullptr : &papers_[it->second];
}

const MethodNode* Graph::method(const NodeId& id) const {
  auto it = method_index_.find(id);
  return it == method_index_.end() ? nullptr : &methods_[it->second];
}

const StubNode* Graph::stub(const NodeId& id) const {
  auto it = stub_index_.find(id);
  return it == stub_index_.end() ? nullptr : &stubs_[it->second];
}

std::optional<int> Graph::year_of(const NodeId& id) const {
  if (const auto* p = paper(id)) return p->year;
  if (const auto* m = method(id))
    return m->introduced_by ? year_of(*m->introduced_by) : std::nullopt;
  if (const auto* s = stub(id)) return s->year;
  throw LookupError("unknown node id '" + id + "'");
}

std::optional<std::string> Graph::citing_text(const NodeId& id) const {
  if (const auto* p = paper(id)) return p->full_text();
  if (const auto* m = method(id)) {
    if (!m->introduced_by) return std::nullopt;
    return paper(*m->introduced_by)->full_text();
  }
  if (stub(id)) return std::nullopt;
  throw LookupError("unknown node id '" + id + "'");
}

std::vector<NodeId> Graph::methods_of_paper(const NodeId& paper_id) const {
  auto it = methods_by_paper_.find(paper_id);
  return it == methods_by_paper_.end() ? std::vector<NodeId>{} : it->second;
}

const std::vector<size_t>& Graph::edges_from(const NodeId& source) const {
  auto it = out_by_source_.find(source);
  return it == out_by_source_.end() ? kNoEdges : it->second;
}

const std::vector<size_t>& Graph::edges_to(const NodeId& target) const {
  auto it = in_by_target_.find(target);
  return it == in_by_target_.end() ? kNoEdges : it->second;
}

std::map<NodeId, int> Graph::year_map() const {
  std::map<NodeId, int> out;
  auto put = [&out, this](const NodeId& id) {
    if (auto y = year_of(id)) out[id] = *y;
  };
  for (const auto& p : papers_) put(p.id);
  for (const auto& m : methods_) put(m.id);
  for (const auto& s : stubs_) put(s.id);
  return out;
}

bool Graph::operator==(const Graph& other) const {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return v;
  };
  return sorted(papers_) == sorted(other.papers_) &&
         sorted(methods_) == sorted(other.methods_) &&
         sorted(stubs_) == sorted(other.stubs_) && edges_ == other.edges_ &&
         seeds_ == other.seeds_;
}

const char* to_string(Direction d) {
  return d == Direction::forward ? "forward" : "backward";
}

std::optional<int> edge_delta_tau(const Graph& g, const Edge& e) {
  auto ys = g.year_of(e.source);
  auto yt = g.year_of(e.target);
  if (!ys || !yt) return std::nullopt;
  return *ys - *yt;
}

std::vector<std::pair<size_t, NodeId>> strong_causal_successors(
    const Graph& g, const NodeId& node, Direction dir) {
  if (!g.has_node(node)) throw LookupError("unknown node id '" + node + "'");
  const auto& indices = dir == Direction::forward ? g.edges_to(node) : g.edges_from(node);
  std::vector<std::pair<size_t, NodeId>> out;
  for (size_t idx : indices) {
    const Edge& e = g.edges()[idx];
    if (!is_strong_causal(e.type)) continue;
    out.emplace_back(idx, dir == Direction::forward ? e.source : e.target);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&g](const auto& a, const auto& b) {
                     double ca = g.edges()[a.first].evidence->confidence;
                     double cb = g.edges()[b.first].evidence->confidence;
                     if (ca != cb) return ca > cb;
                     return a.second < b.second;
                   });
  return out;
}

const char* to_string(ValidationVerdict::Reason r) {
  switch (r) {
    case ValidationVerdict::Reason::accepted: return "accepted";
    case ValidationVerdict::Reason::quote_mismatch: return "quote-mismatch";
    case ValidationVerdict::Reason::temporal_violation: return "temporal";
    case ValidationVerdict::Reason::bidirectional_conflict: return "bidirectional-conflict";
  }
  return "accepted";
}

ValidationVerdict validate_edge(const Edge& e, const std::string& citing_text,
                                const std::map<NodeId, int>& year_of,
                                const std::vector<Edge>& existing,
                                int year_tolerance) {
  if (!is_causal(e.type))
    throw ContractError("validate_edge requires a causal (non-background) edge");
  if (!e.evidence)
    throw ContractError("validate_edge requires an evidence record");

  auto reject = [](ValidationVerdict::Reason r, std::string detail) {
    return ValidationVerdict{false, r, std::move(detail)};
  };

  const auto& ev = *e.evidence;
  const std::pair<const char*, const std::string*> quotes[] = {
      {"bottleneck_quote", &ev.bottleneck_quote},
      {"mechanism_quote", &ev.mechanism_quote},
      {"tradeoff_sentence", &ev.tradeoff_sentence},
  };
  for (const auto& [name, text] : quotes) {
    if (citing_text.find(*text) == std::string::npos)
      return reject(ValidationVerdict::Reason::quote_mismatch,
                    std::string(name) + " not found verbatim in citing text");
  }

  auto ys = year_of.find(e.source);
  auto yt = year_of.find(e.target);
  if (ys != year_of.end() && yt != year_of.end() &&
      ys->second < yt->second - year_tolerance) {
    std::ostringstream msg;
    msg << "source year " << ys->second << " precedes target year "
        << yt->second << " beyond tolerance " << year_tolerance;
    return reject(ValidationVerdict::Reason::temporal_violation, msg.str());
  }

  for (const auto& other : existing) {
    if (other.source == e.target && other.target == e.source)
      return reject(ValidationVerdict::Reason::bidirectional_conflict,
                    "opposite-direction " + std::string(to_string(other.type)) +
                        " edge " + other.source + " -> " + other.target +
                        " already present");
  }
  return ValidationVerdict{};
}

ValidationVerdict validate_edge(const Graph& g, const Edge& e, int year_tolerance) {
  auto text = g.citing_text(e.source);
  if (!text)
    throw ContractError("no citing text available for source '" + e.source + "'");
  return validate_edge(e, *text, g.year_map(), g.edges(), year_tolerance);
}

std::map<NodeId, std::set<NodeId>> MethodDag::undirected() const {
  std::map<NodeId, std::set<NodeId>> adj;
  for (const auto& e : edges) {
    adj[e.source].insert(e.target);
    adj[e.target].insert(e.source);
  }
  return adj;
}

MethodDag project_method_relations(const Graph& g,
                                   const std::vector<MethodSeed>& seeds) {
  MethodDag dag;
  for (const auto& m : g.methods()) dag.nodes.insert(m.id);

  auto lift = [&g](const NodeId& id) -> std::vector<NodeId> {
    if (g.method(id)) return {id};
    if (g.paper(id)) return g.methods_of_paper(id);
    return {};
  };

  std::set<MethodDagEdge> projected;
  for (const auto& e : g.edges()) {
    MethodRelation rel;
    bool swap = false;
    switch (e.type) {
      case EdgeType::extends:
      case EdgeType::improves:
        rel = MethodRelation::variant_of;
        break;
      case EdgeType::adapts:
      case EdgeType::replaces:
        rel = MethodRelation::specializes;
        break;
      case EdgeType::uses_component:
        rel = MethodRelation::component_of;
        swap = true;
        break;
      default:
        continue;  // compares/background: non-methodological
    }
    for (const auto& ms : lift(e.source)) {
      for (const auto& mt : lift(e.target)) {
        if (ms == mt) continue;
        projected.insert(swap ? MethodDagEdge{mt, ms, rel}
                              : MethodDagEdge{ms, mt, rel});
      }
    }
  }
  for (const auto& s : seeds) {
    for (const auto& end : {s.source, s.target})
      if (!g.method(end))
        throw ReferentialError("seed endpoint '" + end + "' is not a method id");
    if (s.source != s.target)
      projected.insert(MethodDagEdge{s.source, s.target, s.relation});
  }
  dag.edges.assign(projected.begin(), projected.end());
  return dag;
}

MethodDag project_method_dag(const Graph& g, const std::vector<MethodSeed>& seeds) {
  MethodDag dag = project_method_relations(g, seeds);
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : dag.edges) adj[e.source].push_back(e.target);
  auto remainder = cyclic_remainder(dag.nodes, adj);
  if (!remainder.empty()) {
    auto cycle = find_cycle(remainder, adj);
    throw CycleError("method dag cycle: " + cycle_to_string(cycle));
  }
  return dag;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

EvidenceRecord parse_evidence(const json& j, const std::string& ctx) {
  jsonio::expect_object(j, ctx);
  jsonio::check_keys(j, {"bottleneck", "mechanism", "impact", "confidence"}, ctx);
  EvidenceRecord ev;

  auto bn = j.find("bottleneck");
  if (bn == j.end()) throw ParseError(ctx + ": missing 'bottleneck'");
  jsonio::expect_object(*bn, ctx + " bottleneck");
  jsonio::check_keys(*bn, {"quote", "description", "dimension"}, ctx + " bottleneck");
  ev.bottleneck_quote = jsonio::require_string(*bn, "quote", ctx + " bottleneck");
  ev.bottleneck_description = jsonio::get_string(*bn, "description", ctx + " bottleneck");
  std::string dim = jsonio::require_string(*bn, "dimension", ctx + " bottleneck");
  auto parsed_dim = dimension_from_string(dim);
  if (!parsed_dim)
    throw ParseError(ctx + ": unknown bottleneck dimension '" + dim + "'");
  ev.bottleneck_dimension = *parsed_dim;

  auto mech = j.find("mechanism");
  if (mech == j.end()) throw ParseError(ctx + ": missing 'mechanism'");
  jsonio::expect_object(*mech, ctx + " mechanism");
  jsonio::check_keys(*mech, {"quote", "description"}, ctx + " mechanism");
  ev.mechanism_quote = jsonio::require_string(*mech, "quote", ctx + " mechanism");
  ev.mechanism_description = jsonio::get_string(*mech, "description", ctx + " mechanism");

  if (auto imp = j.find("impact"); imp != j.end()) {
    jsonio::expect_object(*imp, ctx + " impact");
    jsonio::check_keys(*imp, {"improvement_dim", "sacrifice_dim", "tradeoff_sentence"},
                       ctx + " impact");
    ev.tradeoff_sentence = jsonio::get_string(*imp, "tradeoff_sentence", ctx + " impact");
    for (auto [key, slot] : {std::pair{"improvement_dim", &ev.improvement_dim},
                             std::pair{"sacrifice_dim", &ev.sacrifice_dim}}) {
      std::string v = jsonio::get_string(*imp, key, ctx + " impact");
      if (v.empty()) continue;
      auto d = dimension_from_string(v);
      if (!d) throw ParseError(ctx + ": unknown dimension '" + v + "' in impact");
      *slot = *d;
    }
  }

  ev.confidence = jsonio::require_double(j, "confidence", ctx);
  if (ev.confidence < 0.0 || ev.confidence > 1.0)
    throw ParseError(ctx + ": confidence outside [0, 1]");
  return ev;
}

json evidence_to_json(const EvidenceRecord& ev) {
  json j;
  j["bottleneck"] = {{"quote", ev.bottleneck_quote},
                     {"description", ev.bottleneck_description},
                     {"dimension", to_string(ev.bottleneck_dimension)}};
  j["mechanism"] = {{"quote", ev.mechanism_quote},
                    {"description", ev.mechanism_description}};
  json impact;
  impact["tradeoff_sentence"] = ev.tradeoff_sentence;
  if (ev.improvement_dim) impact["improvement_dim"] = to_string(*ev.improvement_dim);
  if (ev.sacrifice_dim) impact["sacrifice_dim"] = to_string(*ev.sacrifice_dim);
  j["impact"] = impact;
  j["confidence"] = ev.confidence;
  return j;
}

}  // namespace

Graph load_graph(const std::string& nodes_path, const std::string& edges_path,
                 const std::string& seeds_path) {
  std::vector<PaperNode> papers;
  std::vector<MethodNode> methods;
  std::vector<StubNode> stubs;

  for (const auto& [line, text] : jsonio::read_jsonl(nodes_path)) {
    std::string ctx = nodes_path + ":" + std::to_string(line);
    json j = jsonio::parse(text, ctx);
    jsonio::expect_object(j, ctx);
    std::string kind = jsonio::require_string(j, "kind", ctx);
    std::string id = jsonio::require_string(j, "id", ctx);
    if (kind == "paper") {
      jsonio::check_keys(j, {"id", "kind", "title", "abstract", "year", "sections"}, ctx);
      PaperNode p;
      p.id = id;
      p.title = jsonio::get_string(j, "title", ctx);
      p.abstract_text = jsonio::get_string(j, "abstract", ctx);
      p.year = jsonio::get_int(j, "year", ctx);
      p.sections = {{"introduction", ""}, {"method", ""}, {"related_work", ""}};
      if (auto sec = j.find("sections"); sec != j.end()) {
        jsonio::expect_object(*sec, ctx + " sections");
        jsonio::check_keys(*sec, {"introduction", "method", "related_work"},
                           ctx + " sections");
        for (auto it = sec->begin(); it != sec->end(); ++it) {
          if (!it.value().is_string())
            throw ParseError(ctx + ": section '" + it.key() + "' must be a string");
          p.sections[it.key()] = it.value().get<std::string>();
        }
      }
      papers.push_back(std::move(p));
    } else if (kind == "method") {
      jsonio::check_keys(j, {"id", "kind", "canonical_name", "introduced_by"}, ctx);
      MethodNode m;
      m.id = id;
      m.canonical_name = jsonio::require_string(j, "canonical_name", ctx);
      std::string by = jsonio::get_string(j, "introduced_by", ctx);
      if (!by.empty()) m.introduced_by = by;
      methods.push_back(std::move(m));
    } else if (kind == "stub") {
      jsonio::check_keys(j, {"id", "kind", "title", "year"}, ctx);
      StubNode s;
      s.id = id;
      s.title = jsonio::get_string(j, "title", ctx);
      s.year = jsonio::get_int(j, "year", ctx);
      stubs.push_back(std::move(s));
    } else {
      throw ParseError(ctx + ": unknown node kind '" + kind + "'");
    }
  }

  std::vector<Edge> edges;
  for (const auto& [line, text] : jsonio::read_jsonl(edges_path)) {
    std::string ctx = edges_path + ":" + std::to_string(line);
    json j = jsonio::parse(text, ctx);
    jsonio::expect_object(j, ctx);
    jsonio::check_keys(j, {"source", "target", "type", "evidence"}, ctx);
    Edge e;
    e.source = jsonio::require_string(j, "source", ctx);
    e.target = jsonio::require_string(j, "target", ctx);
    std::string type = jsonio::require_string(j, "type", ctx);
    auto parsed = edge_type_from_string(type);
    if (!parsed) throw ParseError(ctx + ": unknown edge type '" + type + "'");
    e.type = *parsed;
    if (auto ev = j.find("evidence"); ev != j.end())
      e.evidence = parse_evidence(*ev, ctx);
    if (is_causal(e.type) && !e.evidence)
      throw ParseError(ctx + ": causal edge requires an evidence record");
    if (!is_causal(e.type) && e.evidence)
      throw ParseError(ctx + ": background edges carry no evidence");
    edges.push_back(std::move(e));
  }

  std::vector<MethodSeed> seeds;
  if (!seeds_path.empty()) {
    for (const auto& [line, text] : jsonio::read_jsonl(seeds_path)) {
      std::string ctx = seeds_path + ":" + std::to_string(line);
      json j = jsonio::parse(text, ctx);
      jsonio::expect_object(j, ctx);
      jsonio::check_keys(j, {"source", "target", "relation"}, ctx);
      MethodSeed s;
      s.source = jsonio::require_string(j, "source", ctx);
      s.target = jsonio::require_string(j, "target", ctx);
      std::string rel = jsonio::require_string(j, "relation", ctx);
      auto parsed = method_relation_from_string(rel);
      if (!parsed || (*parsed != MethodRelation::optimizes &&
                      *parsed != MethodRelation::inspired_by))
        throw ParseError(ctx + ": seed relation must be optimizes or inspired_by");
      s.relation = *parsed;
      seeds.push_back(std::move(s));
    }
  }

  return Graph::build(std::move(papers), std::move(methods), std::move(stubs),
                      std::move(edges), std::move(seeds));
}

void dump_graph(const Graph& g, const std::string& dir) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };

  std::ostringstream nodes;
  auto papers = g.papers();
  std::sort(papers.begin(), papers.end(), by_id);
  for (const auto& p : papers) {
    json j;
    j["id"] = p.id;
    j["kind"] = "paper";
    j["title"] = p.title;
    j["abstract"] = p.abstract_text;
    if (p.year) j["year"] = *p.year;
    json sections;
    for (const char* key : {"introduction", "method", "related_work"}) {
      auto it = p.sections.find(key);
      sections[key] = it == p.sections.end() ? "" : it->second;
    }
    j["sections"] = sections;
    nodes << j.dump() << "\n";
  }
  auto methods = g.methods();
  std::sort(methods.begin(), methods.end(), by_id);
  for (const auto& m : methods) {
    json j;
    j["id"] = m.id;
    j["kind"] = "method";
    j["canonical_name"] = m.canonical_name;
    if (m.introduced_by) j["introduced_by"] = *m.introduced_by;
    nodes << j.dump() << "\n";
  }
  auto stubs = g.stubs();
  std::sort(stubs.begin(), stubs.end(), by_id);
  for (const auto& s : stubs) {
    json j;
    j["id"] = s.id;
    j["kind"] = "stub";
    j["title"] = s.title;
    if (s.year) j["year"] = *s.year;
    nodes << j.dump() << "\n";
  }
  jsonio::write_file(dir + "/nodes.jsonl", nodes.str());

  std::ostringstream edges;
  for (const auto& e : g.edges()) {
    json j;
    j["source"] = e.source;
    j["target"] = e.target;
    j["type"] = to_string(e.type);
    if (e.evidence) j["evidence"] = evidence_to_json(*e.evidence);
    edges << j.dump() << "\n";
  }
  jsonio::write_file(dir + "/edges.jsonl", edges.str());

  std::ostringstream seeds;
  for (const auto& s : g.seed_relations()) {
    json j;
    j["source"] = s.source;
    j["target"] = s.target;
    j["relation"] = to_string(s.relation);
    seeds << j.dump() << "\n";
  }
  jsonio::write_file(dir + "/method_seeds.jsonl", seeds.str());
}

}  // namespace evograph
