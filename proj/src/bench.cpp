#include "evograph/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "evograph/json_io.hpp"

namespace evograph {

namespace {

// Reference name -> the graph nodes that count as recovering it.
struct ResolvedName {
  bool ok = false;
  NodeId method;
  std::optional<NodeId> paper;
};

ResolvedName resolve_name(const std::string& name, const Graph& g,
                          const AliasRegistry& registry) {
  ResolvedName r;
  auto id = registry.exact_match(name);
  if (!id) return r;
  const MethodNode* m = g.method(*id);
  if (!m) return r;
  r.ok = true;
  r.method = *id;
  r.paper = m->introduced_by;
  return r;
}

bool covers(const ResolvedName& r, const NodeId& node) {
  return r.ok && (node == r.method || (r.paper && node == *r.paper));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// 53-bit mantissa trick: platform-stable uniform double in [0,1).
double next_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

ReferenceGraph ReferenceGraph::from_json(const nlohmann::json& j) {
  jsonio::expect_object(j, "reference");
  jsonio::check_keys(j, {"methods", "edges", "chains"}, "reference");
  ReferenceGraph ref;
  if (!j.contains("methods") || !j["methods"].is_array())
    throw ParseError("reference: 'methods' must be an array");
  std::set<std::string> known;
  for (const auto& m : j["methods"]) {
    if (!m.is_string() || m.get<std::string>().empty())
      throw ParseError("reference: method names must be non-empty strings");
    std::string name = m.get<std::string>();
    if (!known.insert(name).second)
      throw UniquenessError("reference: duplicate method name '" + name + "'");
    ref.methods.push_back(name);
  }
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError("reference: 'edges' must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ParseError("reference: each edge must be a [source, target] name pair");
      std::string s = e[0].get<std::string>(), t = e[1].get<std::string>();
      if (!known.count(s) || !known.count(t))
        throw ReferentialError("reference: edge (" + s + ", " + t +
                               ") names an unknown method");
      ref.edges.emplace_back(s, t);
    }
  }
  if (j.contains("chains")) {
    if (!j["chains"].is_array()) throw ParseError("reference: 'chains' must be an array");
    for (const auto& c : j["chains"]) {
      if (!c.is_array()) throw ParseError("reference: each chain must be an array");
      std::vector<std::string> chain;
      for (const auto& m : c) {
        if (!m.is_string()) throw ParseError("reference: chain members must be strings");
        std::string name = m.get<std::string>();
        if (!known.count(name))
          throw ReferentialError("reference: chain member '" + name +
                                 "' is not a reference method");
        chain.push_back(name);
      }
      ref.chains.push_back(std::move(chain));
    }
  }
  return ref;
}

ReferenceGraph ReferenceGraph::from_file(const std::string& path) {
  return from_json(jsonio::parse(jsonio::read_file(path), "reference"));
}

nlohmann::json ReferenceGraph::to_json() const {
  nlohmann::json edges_json = nlohmann::json::array();
  for (const auto& [s, t] : edges) edges_json.push_back({s, t});
  return {{"methods", methods}, {"edges", edges_json}, {"chains", chains}};
}

double node_match_ratio(const ReferenceGraph& reference, const Graph& g,
                        const AliasRegistry& registry,
                        std::vector<std::string>* warnings) {
  if (reference.methods.empty()) {
    if (warnings)
      warnings->push_back("reference has no methods; node match ratio defined as 1.0");
    return 1.0;
  }
  size_t matched = 0;
  for (const auto& name : reference.methods)
    if (resolve_name(name, g, registry).ok) ++matched;
  return static_cast<double>(matched) / static_cast<double>(reference.methods.size());
}

double edge_reachable_ratio(const ReferenceGraph& reference, const Graph& g,
                            const AliasRegistry& registry, int max_hops,
                            std::vector<RecoveredPath>* paths) {
  if (max_hops <= 0) throw ParamError("max_hops must be positive");
  if (reference.edges.empty()) return 1.0;

  size_t recovered = 0;
  for (const auto& [src_name, tgt_name] : reference.edges) {
    ResolvedName src = resolve_name(src_name, g, registry);
    ResolvedName tgt = resolve_name(tgt_name, g, registry);
    if (!src.ok || !tgt.ok) continue;

    std::set<NodeId> starts{src.method};
    if (src.paper) starts.insert(*src.paper);
    std::set<NodeId> goals{tgt.method};
    if (tgt.paper) goals.insert(*tgt.paper);

    // BFS in influence order (cited -> citing) over causal edges.
    struct Step {
      NodeId node;
      int depth;
    };
    std::map<NodeId, std::pair<NodeId, size_t>> parent;  // node -> (prev, edge)
    std::deque<Step> queue;
    std::set<NodeId> seen;
    std::optional<NodeId> reached;
    for (const auto& s : starts) {
      if (goals.count(s)) reached = s;
      seen.insert(s);
      queue.push_back({s, 0});
    }
    while (!reached && !queue.empty()) {
      auto [node, depth] = queue.front();
      queue.pop_front();
      if (depth == max_hops) continue;
      for (size_t idx : g.edges_to(node)) {
        const Edge& e = g.edges()[idx];
        if (!is_causal(e.type)) continue;
        const NodeId& next = e.source;
        if (!seen.insert(next).second) continue;
        parent[next] = {node, idx};
        if (goals.count(next)) {
          reached = next;
          break;
        }
        queue.push_back({next, depth + 1});
      }
    }
    if (!reached) continue;
    ++recovered;
    if (paths) {
      RecoveredPath path;
      path.ref_source = src_name;
      path.ref_target = tgt_name;
      NodeId cur = *reached;
      while (true) {
        path.nodes.push_back(cur);
        auto it = parent.find(cur);
        if (it == parent.end()) break;
        path.edge_indices.push_back(it->second.second);
        cur = it->second.first;
      }
      std::reverse(path.nodes.begin(), path.nodes.end());
      std::reverse(path.edge_indices.begin(), path.edge_indices.end());
      paths->push_back(std::move(path));
    }
  }
  return static_cast<double>(recovered) / static_cast<double>(reference.edges.size());
}

bool HeuristicPathJudge::correct(const RecoveredPath& path, const Graph& g) const {
  for (size_t idx : path.edge_indices)
    if (!is_strong_causal(g.edges()[idx].type)) return false;
  std::optional<int> last;
  for (const auto& node : path.nodes) {
    auto year = g.year_of(node);
    if (!year) continue;
    if (last && *year < *last) return false;
    last = year;
  }
  return true;
}

double path_semantic_correctness(const std::vector<RecoveredPath>& paths,
                                 const Graph& g, const PathJudge& judge) {
  if (paths.empty()) return 1.0;
  size_t correct = 0;
  for (const auto& p : paths)
    if (judge.correct(p, g)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(paths.size());
}

ChainScores chain_metrics(const EvolutionChain& retrieved,
                          const std::vector<std::string>& reference,
                          const Graph& g, const AliasRegistry& registry) {
  if (reference.empty()) throw ParamError("reference chain must be non-empty");

  std::vector<ResolvedName> resolved;
  for (const auto& name : reference) resolved.push_back(resolve_name(name, g, registry));

  auto covered_at = [&](size_t j) {
    for (const auto& node : retrieved.nodes)
      if (covers(resolved[j], node)) return true;
    return false;
  };

  ChainScores scores;
  size_t present = 0;
  for (size_t j = 0; j < reference.size(); ++j)
    if (covered_at(j)) ++present;
  scores.nr = static_cast<double>(present) / static_cast<double>(reference.size());

  if (reference.size() == 1) {
    scores.er = present ? 1.0 : 0.0;
  } else {
    size_t pairs = 0;
    for (size_t j = 0; j + 1 < reference.size(); ++j) {
      bool found = false;
      for (size_t i = 0; i + 1 < retrieved.nodes.size() && !found; ++i)
        found = covers(resolved[j], retrieved.nodes[i]) &&
                covers(resolved[j + 1], retrieved.nodes[i + 1]);
      if (found) ++pairs;
    }
    scores.er = static_cast<double>(pairs) / static_cast<double>(reference.size() - 1);
  }

  // Order-filtered view: each retrieved node maps to the first reference
  // position it covers; the rest drop out. CAS = LCS / |reference|.
  std::vector<size_t> filtered;
  for (const auto& node : retrieved.nodes)
    for (size_t j = 0; j < reference.size(); ++j)
      if (covers(resolved[j], node)) {
        filtered.push_back(j);
        break;
      }
  size_t n = filtered.size(), m = reference.size();
  std::vector<std::vector<size_t>> lcs(n + 1, std::vector<size_t>(m + 1, 0));
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      lcs[i][j] = reference[filtered[i - 1]] == reference[j - 1]
                      ? lcs[i - 1][j - 1] + 1
                      : std::max(lcs[i - 1][j], lcs[i][j - 1]);
  scores.cas = static_cast<double>(lcs[n][m]) / static_cast<double>(m);
  return scores;
}

SynthGraphParams SynthGraphParams::from_json(const nlohmann::json& j) {
  jsonio::expect_object(j, "synth params");
  jsonio::check_keys(j, {"n_methods", "branching", "depth", "noise_rate",
                         "year_span", "seed"},
                     "synth params");
  SynthGraphParams p;
  if (auto v = jsonio::get_int(j, "n_methods", "synth params")) p.n_methods = *v;
  if (auto v = jsonio::get_int(j, "branching", "synth params")) p.branching = *v;
  if (auto v = jsonio::get_int(j, "depth", "synth params")) p.depth = *v;
  if (auto v = jsonio::get_double(j, "noise_rate", "synth params")) p.noise_rate = *v;
  if (auto v = jsonio::get_int(j, "year_span", "synth params")) p.year_span = *v;
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      throw ParseError("synth params: seed must be an integer");
    p.seed = j["seed"].get<uint64_t>();
  }
  return p;
}

SynthGraphParams SynthGraphParams::from_file(const std::string& path) {
  return from_json(jsonio::parse(jsonio::read_file(path), "synth params"));
}

nlohmann::json SynthGraphParams::to_json() const {
  return {{"n_methods", n_methods}, {"branching", branching},
          {"depth", depth},         {"noise_rate", noise_rate},
          {"year_span", year_span}, {"seed", seed}};
}

std::pair<Graph, ReferenceGraph> synthesize_graph(const SynthGraphParams& params) {
  if (params.n_methods <= 0 || params.branching <= 0 || params.depth <= 0 ||
      params.year_span <= 0)
    throw ParamError("synth params must be positive");
  if (params.noise_rate < 0.0 || params.noise_rate > 1.0)
    throw ParamError("noise_rate must lie in [0,1]");
  if (static_cast<long long>(params.depth) * params.branching > params.n_methods)
    throw ParamError("depth * branching exceeds n_methods");

  std::mt19937_64 gen(params.seed);
  auto dims = all_dimensions();

  std::vector<std::vector<size_t>> layers(params.depth);
  std::vector<MethodNode> methods;
  std::vector<PaperNode> papers;
  auto add_method = [&](int layer) {
    size_t n = methods.size();
    std::string tag = std::to_string(n);
    int year = 2015 + (params.depth == 1
                           ? 0
                           : layer * params.year_span / (params.depth - 1));
    papers.push_back({"p" + tag, "Synthetic paper " + tag, "Layer study " + tag + ".",
                      {}, year});
    methods.push_back({"m" + tag, "synth method " + tag, "p" + tag});
    layers[layer].push_back(n);
  };
  add_method(0);
  for (int layer = 1; layer < params.depth; ++layer)
    for (int i = 0; i < params.branching; ++i) add_method(layer);

  std::vector<Edge> edges;
  std::vector<int> parent_of(methods.size(), -1);
  auto make_evidence = [&](size_t edge_no) {
    EvidenceRecord ev;
    std::string tag = std::to_string(edge_no);
    ev.bottleneck_quote = "bottleneck quote " + tag + ".";
    ev.bottleneck_description =
        std::string("limits ") + std::string(to_string(dims[gen() % dims.size()]));
    ev.bottleneck_dimension = dims[gen() % dims.size()];
    ev.mechanism_quote = "mechanism quote " + tag + ".";
    ev.mechanism_description = "mechanism detail " + tag;
    ev.tradeoff_sentence = "tradeoff sentence " + tag + ".";
    ev.improvement_dim = dims[gen() % dims.size()];
    if (gen() % 2) ev.sacrifice_dim = dims[gen() % dims.size()];
    ev.confidence = 0.6 + 0.35 * next_unit(gen);
    return ev;
  };
  auto cite = [&](size_t child, size_t parent, EdgeType type, bool causal) {
    Edge e;
    e.source = papers[child].id;
    e.target = papers[parent].id;
    e.type = type;
    if (causal) {
      e.evidence = make_evidence(edges.size());
      papers[child].abstract_text += " " + e.evidence->bottleneck_quote + " " +
                                     e.evidence->mechanism_quote + " " +
                                     e.evidence->tradeoff_sentence;
    }
    edges.push_back(std::move(e));
  };

  for (int layer = 1; layer < params.depth; ++layer)
    for (size_t child : layers[layer]) {
      size_t parent = layers[layer - 1][gen() % layers[layer - 1].size()];
      parent_of[child] = static_cast<int>(parent);
      cite(child, parent, EdgeType::extends, true);
    }

  size_t backbone = edges.size();
  size_t n_noise = static_cast<size_t>(std::llround(params.noise_rate * backbone));
  const EdgeType weak[] = {EdgeType::uses_component, EdgeType::compares,
                           EdgeType::background};
  std::set<std::tuple<NodeId, NodeId, EdgeType>> used;
  for (const auto& e : edges) used.insert({e.source, e.target, e.type});
  for (size_t k = 0; params.depth > 1 && k < n_noise; ++k) {
    // A few attempts to find an unused (newer, older, type) triple.
    for (int attempt = 0; attempt < 8; ++attempt) {
      int ls = 1 + static_cast<int>(gen() % (params.depth - 1));
      int lt = static_cast<int>(gen() % ls);
      size_t s = layers[ls][gen() % layers[ls].size()];
      size_t t = layers[lt][gen() % layers[lt].size()];
      EdgeType type = weak[gen() % 3];
      if (!used.insert({papers[s].id, papers[t].id, type}).second) continue;
      cite(s, t, type, is_causal(type));
      break;
    }
  }

  ReferenceGraph ref;
  for (const auto& m : methods) ref.methods.push_back(m.canonical_name);
  for (size_t child = 0; child < methods.size(); ++child)
    if (parent_of[child] >= 0)
      ref.edges.emplace_back(methods[parent_of[child]].canonical_name,
                             methods[child].canonical_name);
  for (size_t leaf : layers[params.depth - 1]) {
    std::vector<std::string> chain;
    for (int cur = static_cast<int>(leaf); cur >= 0; cur = parent_of[cur])
      chain.push_back(methods[cur].canonical_name);
    std::reverse(chain.begin(), chain.end());
    ref.chains.push_back(std::move(chain));
  }

  return {Graph::build(std::move(papers), std::move(methods), {}, std::move(edges)),
          std::move(ref)};
}

AliasRegistry synth_registry(const Graph& g) {
  AliasRegistry registry;
  for (const auto& m : g.methods()) registry.add(m.id, {m.canonical_name, m.id});
  return registry;
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json algos = nlohmann::json::array();
  for (const auto& a : algorithms) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : a.rows)
      rows.push_back({{"chain", r.chain_index},
                      {"seed", r.seed},
                      {"nr", r.scores.nr},
                      {"er", r.scores.er},
                      {"cas", r.scores.cas},
                      {"retrieved_len", r.retrieved_len}});
    algos.push_back({{"algorithm", a.algorithm},
                     {"nr", a.mean.nr},
                     {"er", a.mean.er},
                     {"cas", a.mean.cas},
                     {"rows", rows}});
  }
  return {{"nmr", nmr},           {"err", err},
          {"psc", psc},           {"psc_judge", psc_judge},
          {"algorithms", algos},  {"warnings", warnings}};
}

std::string BenchReport::to_csv() const {
  std::string csv = "algorithm,nmr,err,psc,nr,er,cas\n";
  for (const auto& a : algorithms)
    csv += a.algorithm + "," + fmt(nmr) + "," + fmt(err) + "," + fmt(psc) + "," +
           fmt(a.mean.nr) + "," + fmt(a.mean.er) + "," + fmt(a.mean.cas) + "\n";
  return csv;
}

BenchReport run_lineage_benchmark(const Graph& g, const AliasRegistry& registry,
                                  const ReferenceGraph& reference,
                                  const std::vector<std::string>& algorithms,
                                  const SearchParams& params,
                                  const BenchConfig& cfg) {
  params.validate();
  for (const auto& algo : algorithms)
    if (algo != "sgt-mcts" && algo != "beam" && algo != "random-walk")
      throw ParamError("unknown algorithm '" + algo + "'");

  BenchReport report;
  report.nmr = node_match_ratio(reference, g, registry, &report.warnings);
  std::vector<RecoveredPath> paths;
  report.err = edge_reachable_ratio(reference, g, registry, cfg.max_hops, &paths);
  HeuristicPathJudge judge;
  report.psc = path_semantic_correctness(paths, g, judge);
  report.psc_judge = judge.label();

  bool newest = cfg.seeding == "newest";
  Direction dir = newest ? Direction::backward : Direction::forward;

  for (const auto& algo : algorithms) {
    AlgoReport algo_report;
    algo_report.algorithm = algo;
    ChainScores totals;

    for (size_t ci = 0; ci < reference.chains.size(); ++ci) {
      const auto& chain_names = reference.chains[ci];
      if (chain_names.empty()) {
        report.warnings.push_back("reference chain " + std::to_string(ci) +
                                  " is empty; skipped");
        continue;
      }

      // Seed at the newest (or oldest) resolvable member, by year, ties by
      // position in the stated direction.
      std::optional<size_t> pick;
      std::optional<int> pick_year;
      std::string seed_name;
      NodeId seed_method;
      for (size_t j = 0; j < chain_names.size(); ++j) {
        ResolvedName r = resolve_name(chain_names[j], g, registry);
        if (!r.ok) continue;
        auto year = g.year_of(r.method);
        bool better = !pick;
        if (pick && year && pick_year)
          better = newest ? *year >= *pick_year : *year < *pick_year;
        else if (pick && year && !pick_year)
          better = true;
        if (better) {
          pick = j;
          pick_year = year;
          seed_name = chain_names[j];
          seed_method = r.method;
        }
      }
      if (!pick) {
        report.warnings.push_back("no member of reference chain " +
                                  std::to_string(ci) + " resolves; skipped");
        continue;
      }

      std::vector<EvolutionChain> retrieved;
      if (algo == "sgt-mcts") {
        retrieved = reconstruct_lineage(seed_name, g, registry, params).chains;
      } else {
        NodeId seed = lineage_search_seed(g, seed_method);
        if (algo == "beam")
          retrieved = beam_search_baseline(g, seed, dir, cfg.beam_width, params);
        else
          retrieved = random_walk_baseline(g, seed, dir, cfg.rw_rollouts,
                                           split_seed(cfg.rw_seed, ci), params);
      }

      ChainRow row;
      row.chain_index = ci;
      row.seed = seed_method;
      if (!retrieved.empty()) {
        row.retrieved_len = retrieved.front().nodes.size();
        if (cfg.chain_mode == "union") {
          for (const auto& c : retrieved) {
            ChainScores s = chain_metrics(c, chain_names, g, registry);
            row.scores.nr = std::max(row.scores.nr, s.nr);
            row.scores.er = std::max(row.scores.er, s.er);
            row.scores.cas = std::max(row.scores.cas, s.cas);
          }
        } else {
          row.scores = chain_metrics(retrieved.front(), chain_names, g, registry);
        }
      }
      totals.nr += row.scores.nr;
      totals.er += row.scores.er;
      totals.cas += row.scores.cas;
      algo_report.rows.push_back(std::move(row));
    }

    if (!algo_report.rows.empty()) {
      double n = static_cast<double>(algo_report.rows.size());
      algo_report.mean = {totals.nr / n, totals.er / n, totals.cas / n};
    }
    report.algorithms.push_back(std::move(algo_report));
  }
  return report;
}

}  // namespace evograph
