#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "evograph/alias.hpp"
#include "evograph/bench.hpp"
#include "evograph/graph.hpp"
#include "evograph/lineage.hpp"
#include "helpers.hpp"

using namespace evograph;
using namespace evograph::testutil;

namespace {

const std::string kFixtures = FIXTURE_DIR;

Graph tiny_graph() {
  return load_graph(kFixtures + "/tiny/nodes.jsonl",
                    kFixtures + "/tiny/edges.jsonl",
                    kFixtures + "/tiny/method_seeds.jsonl");
}

AliasRegistry tiny_registry() {
  return AliasRegistry::load(kFixtures + "/tiny/aliases.json");
}

// Fixed fixture name table, independent of the registry/graph resolution.
struct NamePair {
  NodeId method;
  NodeId paper;
};
const std::map<std::string, NamePair> kTinyNames = {
    {"sparsenet", {"mA", "pA"}},  {"fastsparse", {"mB", "pB"}},
    {"deepsparse", {"mC", "pC"}}, {"widequant", {"mD", "pD"}},
    {"sparsemix", {"mE", "pE"}},
};

bool oracle_covers(const std::string& name, const NodeId& node) {
  auto it = kTinyNames.find(name);
  return it != kTinyNames.end() &&
         (node == it->second.method || node == it->second.paper);
}

// Re-derivation of the three chain metrics from their definitions: counting
// for NR, an adjacent-pair scan for ER, and patience-sorted longest strictly
// increasing subsequence of first-cover positions for CAS.
ChainScores oracle_metrics(const std::vector<NodeId>& retrieved,
                           const std::vector<std::string>& ref) {
  ChainScores s;
  size_t present = 0;
  for (const auto& name : ref) {
    bool hit = false;
    for (const auto& node : retrieved) hit |= oracle_covers(name, node);
    if (hit) ++present;
  }
  s.nr = static_cast<double>(present) / ref.size();

  if (ref.size() == 1) {
    s.er = present ? 1.0 : 0.0;
  } else {
    size_t pairs = 0;
    for (size_t j = 0; j + 1 < ref.size(); ++j) {
      bool found = false;
      for (size_t i = 0; i + 1 < retrieved.size(); ++i)
        found |= oracle_covers(ref[j], retrieved[i]) &&
                 oracle_covers(ref[j + 1], retrieved[i + 1]);
      if (found) ++pairs;
    }
    s.er = static_cast<double>(pairs) / (ref.size() - 1);
  }

  std::vector<size_t> firsts;
  for (const auto& node : retrieved)
    for (size_t j = 0; j < ref.size(); ++j)
      if (oracle_covers(ref[j], node)) {
        firsts.push_back(j);
        break;
      }
  std::vector<size_t> tails;  // patience sorting, strict increase
  for (size_t v : firsts) {
    auto it = std::lower_bound(tails.begin(), tails.end(), v);
    if (it == tails.end())
      tails.push_back(v);
    else
      *it = v;
  }
  s.cas = static_cast<double>(tails.size()) / ref.size();
  return s;
}

EvolutionChain with_nodes(std::vector<NodeId> nodes) {
  EvolutionChain c;
  c.nodes = std::move(nodes);
  return c;
}

}  // namespace

TEST_CASE("chain metrics reproduce the worked 3/4, 1/3, 3/4 example") {
  Graph g = tiny_graph();
  AliasRegistry reg = tiny_registry();
  std::vector<std::string> ref = {"sparsenet", "fastsparse", "deepsparse",
                                  "widequant"};

  // Covers 3 of 4 names, only the first adjacent pair, and aligns 3 in order.
  auto s = chain_metrics(with_nodes({"pA", "pB", "zz", "pD"}), ref, g, reg);
  CHECK(s.nr == doctest::Approx(0.75));
  CHECK(s.er == doctest::Approx(1.0 / 3.0));
  CHECK(s.cas == doctest::Approx(0.75));

  // Method ids cover their names exactly like the introducing papers.
  auto ids = chain_metrics(with_nodes({"mA", "mB", "zz", "mD"}), ref, g, reg);
  CHECK(ids.nr == doctest::Approx(s.nr));
  CHECK(ids.er == doctest::Approx(s.er));
  CHECK(ids.cas == doctest::Approx(s.cas));

  // Reversed retrieval keeps recall but loses order and adjacency.
  std::vector<std::string> all = {"sparsenet", "fastsparse", "deepsparse",
                                  "widequant", "sparsemix"};
  auto rev = chain_metrics(with_nodes({"pE", "pD", "pC", "pB", "pA"}), all, g, reg);
  CHECK(rev.nr == doctest::Approx(1.0));
  CHECK(rev.er == doctest::Approx(0.0));
  CHECK(rev.cas == doctest::Approx(0.2));

  auto perfect = chain_metrics(with_nodes({"pA", "pB", "pC", "pD", "pE"}), all, g, reg);
  CHECK(perfect.nr == doctest::Approx(1.0));
  CHECK(perfect.er == doctest::Approx(1.0));
  CHECK(perfect.cas == doctest::Approx(1.0));

  auto empty = chain_metrics(with_nodes({}), all, g, reg);
  CHECK(empty.nr == doctest::Approx(0.0));
  CHECK(empty.er == doctest::Approx(0.0));
  CHECK(empty.cas == doctest::Approx(0.0));

  auto single_hit = chain_metrics(with_nodes({"pC"}), {"deepsparse"}, g, reg);
  CHECK(single_hit.er == doctest::Approx(1.0));
  auto single_miss = chain_metrics(with_nodes({"pA"}), {"deepsparse"}, g, reg);
  CHECK(single_miss.er == doctest::Approx(0.0));

  CHECK_THROWS_AS(chain_metrics(with_nodes({"pA"}), {}, g, reg), ParamError);
}

TEST_CASE("chain metrics agree with an independent oracle on random inputs") {
  Graph g = tiny_graph();
  AliasRegistry reg = tiny_registry();
  std::vector<std::string> names = {"sparsenet", "fastsparse", "deepsparse",
                                    "widequant", "sparsemix"};
  std::vector<NodeId> universe = {"pA", "pB", "pC", "pD", "pE",
                                  "mA", "mB", "mC", "mD", "mE",
                                  "x1", "x2", "x3"};
  std::mt19937 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> ref = names;
    std::shuffle(ref.begin(), ref.end(), rng);
    ref.resize(1 + rng() % names.size());

    std::vector<NodeId> retrieved;
    size_t len = rng() % 8;
    for (size_t i = 0; i < len; ++i)
      retrieved.push_back(universe[rng() % universe.size()]);

    auto got = chain_metrics(with_nodes(retrieved), ref, g, reg);
    auto want = oracle_metrics(retrieved, ref);
    CHECK(got.nr == doctest::Approx(want.nr).epsilon(1e-12));
    CHECK(got.er == doctest::Approx(want.er).epsilon(1e-12));
    CHECK(got.cas == doctest::Approx(want.cas).epsilon(1e-12));

    for (double v : {got.nr, got.er, got.cas}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(got.cas <= got.nr + 1e-12);
  }
}

TEST_CASE("node match ratio counts resolvable reference methods") {
  Graph g = tiny_graph();
  AliasRegistry reg = tiny_registry();

  ReferenceGraph ref = ReferenceGraph::from_file(kFixtures + "/tiny/reference.json");
  CHECK(node_match_ratio(ref, g, reg) == doctest::Approx(1.0));

  ReferenceGraph half;
  half.methods = {"sparsenet", "no-such-method"};
  CHECK(node_match_ratio(half, g, reg) == doctest::Approx(0.5));

  ReferenceGraph none;
  std::vector<std::string> warnings;
  CHECK(node_match_ratio(none, g, reg, &warnings) == doctest::Approx(1.0));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("no methods") != std::string::npos);
}

TEST_CASE("edge recovery walks causal in-edges under the hop budget") {
  Graph g = tiny_graph();
  AliasRegistry reg = tiny_registry();

  ReferenceGraph ref = ReferenceGraph::from_file(kFixtures + "/tiny/reference.json");
  std::vector<RecoveredPath> paths;
  CHECK(edge_reachable_ratio(ref, g, reg, 4, &paths) == doctest::Approx(1.0));
  REQUIRE(paths.size() == 4);
  CHECK(paths[0].ref_source == "sparsenet");
  CHECK(paths[0].nodes == std::vector<NodeId>{"pA", "pB"});
  REQUIRE(paths[0].edge_indices.size() == 1);

  // Backbone hops are strong and chronological: the judge accepts them all.
  HeuristicPathJudge judge;
  CHECK(path_semantic_correctness(paths, g, judge) == doctest::Approx(1.0));
  CHECK(path_semantic_correctness({}, g, judge) == doctest::Approx(1.0));
  CHECK(judge.label() == "heuristic");

  // A long-range edge resolves through the compares shortcut in 3 hops but
  // not 2, and that shortcut fails the strong-hop judgment.
  ReferenceGraph skip;
  skip.methods = {"sparsenet", "sparsemix"};
  skip.edges = {{"sparsenet", "sparsemix"}};
  std::vector<RecoveredPath> shortcut;
  CHECK(edge_reachable_ratio(skip, g, reg, 3, &shortcut) == doctest::Approx(1.0));
  REQUIRE(shortcut.size() == 1);
  CHECK(shortcut[0].nodes == std::vector<NodeId>{"pA", "pB", "pC", "pE"});
  CHECK(path_semantic_correctness(shortcut, g, judge) == doctest::Approx(0.0));
  CHECK(edge_reachable_ratio(skip, g, reg, 2) == doctest::Approx(0.0));

  // Influence runs one way: the reversed edge is unreachable.
  ReferenceGraph reversed;
  reversed.methods = {"sparsenet", "sparsemix"};
  reversed.edges = {{"sparsemix", "sparsenet"}};
  CHECK(edge_reachable_ratio(reversed, g, reg, 4) == doctest::Approx(0.0));

  ReferenceGraph no_edges;
  no_edges.methods = {"sparsenet"};
  CHECK(edge_reachable_ratio(no_edges, g, reg, 4) == doctest::Approx(1.0));

  CHECK_THROWS_AS(edge_reachable_ratio(ref, g, reg, 0), ParamError);
}

TEST_CASE("heuristic judge requires strong hops and non-decreasing years") {
  Graph g = tiny_graph();
  HeuristicPathJudge judge;

  RecoveredPath good;
  good.nodes = {"pA", "pB"};
  good.edge_indices = {0};  // extends
  CHECK(judge.correct(good, g));

  RecoveredPath weak_hop;
  weak_hop.nodes = {"sLib", "pD"};
  weak_hop.edge_indices = {4};  // uses_component
  CHECK_FALSE(judge.correct(weak_hop, g));

  RecoveredPath backwards;
  backwards.nodes = {"pB", "pA"};
  backwards.edge_indices = {0};
  CHECK_FALSE(judge.correct(backwards, g));
}

TEST_CASE("reference files parse strictly and round-trip") {
  ReferenceGraph ref = ReferenceGraph::from_file(kFixtures + "/tiny/reference.json");
  CHECK(ref.methods.size() == 5);
  CHECK(ref.edges.size() == 4);
  REQUIRE(ref.chains.size() == 1);
  CHECK(ref.chains[0].size() == 5);

  ReferenceGraph again = ReferenceGraph::from_json(ref.to_json());
  CHECK(again.to_json().dump() == ref.to_json().dump());

  CHECK_THROWS_AS(ReferenceGraph::from_json({{"methods", {"a", "a"}}}),
                  UniquenessError);
  nlohmann::json ghost_edge = {{"methods", {"a"}}};
  ghost_edge["edges"] = nlohmann::json::array({nlohmann::json::array({"a", "ghost"})});
  CHECK_THROWS_AS(ReferenceGraph::from_json(ghost_edge), ReferentialError);
  CHECK_THROWS_AS(ReferenceGraph::from_json(
                      {{"methods", {"a"}}, {"chains", {{"ghost"}}}}),
                  ReferentialError);
  CHECK_THROWS_AS(ReferenceGraph::from_json({{"methods", "a"}}), ParseError);
  CHECK_THROWS_AS(ReferenceGraph::from_json(
                      {{"methods", {"a"}}, {"edges", {{"a"}}}}),
                  ParseError);
  CHECK_THROWS_AS(ReferenceGraph::from_json(
                      {{"methods", {"a"}}, {"unknown", 1}}),
                  ParseError);
}

TEST_CASE("synthesized graphs have the promised layered shape") {
  SynthGraphParams p;  // branching 2, depth 4, noise 0.25, span 8, seed 1
  auto [g, ref] = synthesize_graph(p);

  size_t n_methods = 1 + (p.depth - 1) * p.branching;
  CHECK(g.methods().size() == n_methods);
  CHECK(g.papers().size() == n_methods);
  CHECK(ref.methods.size() == n_methods);
  CHECK(ref.edges.size() == n_methods - 1);  // one parent per non-root
  REQUIRE(ref.chains.size() == static_cast<size_t>(p.branching));
  for (const auto& chain : ref.chains) {
    CHECK(chain.size() == static_cast<size_t>(p.depth));
    CHECK(chain.front() == "synth method 0");
  }

  size_t backbone = n_methods - 1;
  CHECK(g.edges().size() >= backbone);
  CHECK(g.edges().size() <= backbone + 2);  // round(0.25 * 6) noise edges

  // Root sits at 2015, leaves at 2015 + year_span, never decreasing along
  // reference edges.
  CHECK(g.year_of("p0") == 2015);
  std::map<std::string, NodeId> by_name;
  for (const auto& m : g.methods()) by_name[m.canonical_name] = m.id;
  for (const auto& [src, tgt] : ref.edges) {
    auto ys = g.year_of(by_name.at(src));
    auto yt = g.year_of(by_name.at(tgt));
    REQUIRE(ys.has_value());
    REQUIRE(yt.has_value());
    CHECK(*ys <= *yt);
  }
  int max_year = 0;
  for (const auto& paper : g.papers()) max_year = std::max(max_year, *paper.year);
  CHECK(max_year == 2015 + p.year_span);

  // Every causal edge carries verbatim-checkable evidence.
  int accepted = 0, causal = 0;
  for (const auto& e : g.edges()) {
    if (!is_causal(e.type)) continue;
    ++causal;
    auto v = validate_edge(g, e, 1);
    if (v.accepted) ++accepted;
  }
  CHECK(causal > 0);
  CHECK(accepted == causal);

  // The registry resolves both canonical names and raw ids.
  AliasRegistry reg = synth_registry(g);
  CHECK(reg.exact_match("synth method 3") == NodeId("m3"));
  CHECK(reg.exact_match("m3") == NodeId("m3"));
  CHECK(node_match_ratio(ref, g, reg) == doctest::Approx(1.0));
}

TEST_CASE("synthesis is seed-deterministic and validates its parameters") {
  SynthGraphParams p;
  p.seed = 42;
  auto [g1, r1] = synthesize_graph(p);
  auto [g2, r2] = synthesize_graph(p);
  CHECK(r1.to_json().dump() == r2.to_json().dump());
  REQUIRE(g1.edges().size() == g2.edges().size());
  for (size_t i = 0; i < g1.edges().size(); ++i) {
    CHECK(g1.edges()[i].source == g2.edges()[i].source);
    CHECK(g1.edges()[i].target == g2.edges()[i].target);
    CHECK(g1.edges()[i].type == g2.edges()[i].type);
    if (g1.edges()[i].evidence)
      CHECK(g1.edges()[i].evidence->confidence ==
            doctest::Approx(g2.edges()[i].evidence->confidence).epsilon(1e-15));
  }

  SynthGraphParams q = p;
  q.seed = 43;
  auto [g3, r3] = synthesize_graph(q);
  std::vector<double> c1, c3;
  for (const auto& e : g1.edges())
    if (e.evidence) c1.push_back(e.evidence->confidence);
  for (const auto& e : g3.edges())
    if (e.evidence) c3.push_back(e.evidence->confidence);
  CHECK(c1 != c3);

  SynthGraphParams single;
  single.depth = 1;
  single.branching = 1;
  auto [gs, rs] = synthesize_graph(single);
  CHECK(gs.methods().size() == 1);
  CHECK(gs.edges().empty());
  REQUIRE(rs.chains.size() == 1);
  CHECK(rs.chains[0] == std::vector<std::string>{"synth method 0"});

  SynthGraphParams bad;
  bad.n_methods = 0;
  CHECK_THROWS_AS(synthesize_graph(bad), ParamError);
  bad = {};
  bad.depth = 0;
  CHECK_THROWS_AS(synthesize_graph(bad), ParamError);
  bad = {};
  bad.noise_rate = 1.5;
  CHECK_THROWS_AS(synthesize_graph(bad), ParamError);
  bad = {};
  bad.noise_rate = -0.1;
  CHECK_THROWS_AS(synthesize_graph(bad), ParamError);
  bad = {};
  bad.depth = 5;
  bad.branching = 4;
  bad.n_methods = 16;
  CHECK_THROWS_AS(synthesize_graph(bad), ParamError);

  auto round = SynthGraphParams::from_json(p.to_json());
  CHECK(round.to_json().dump() == p.to_json().dump());
  CHECK_THROWS_AS(SynthGraphParams::from_json({{"bogus", 1}}), ParseError);
}

TEST_CASE("benchmark runs every algorithm per reference chain") {
  SynthGraphParams p;
  p.seed = 5;
  auto [g, ref] = synthesize_graph(p);
  AliasRegistry reg = synth_registry(g);
  SearchParams params;
  params.budget = 60;

  auto report = run_lineage_benchmark(
      g, reg, ref, {"sgt-mcts", "beam", "random-walk"}, params);
  CHECK(report.nmr == doctest::Approx(1.0));
  CHECK(report.err == doctest::Approx(1.0));
  CHECK(report.psc == doctest::Approx(1.0));
  CHECK(report.psc_judge == "heuristic");
  REQUIRE(report.algorithms.size() == 3);
  CHECK(report.algorithms[0].algorithm == "sgt-mcts");
  CHECK(report.algorithms[1].algorithm == "beam");
  CHECK(report.algorithms[2].algorithm == "random-walk");

  for (const auto& algo : report.algorithms) {
    REQUIRE(algo.rows.size() == ref.chains.size());
    ChainScores totals;
    for (const auto& row : algo.rows) {
      for (double v : {row.scores.nr, row.scores.er, row.scores.cas}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(row.scores.cas <= row.scores.nr + 1e-12);
      totals.nr += row.scores.nr;
      totals.er += row.scores.er;
      totals.cas += row.scores.cas;
    }
    double n = static_cast<double>(algo.rows.size());
    CHECK(algo.mean.nr == doctest::Approx(totals.nr / n));
    CHECK(algo.mean.er == doctest::Approx(totals.er / n));
    CHECK(algo.mean.cas == doctest::Approx(totals.cas / n));
  }

  // The primary chain covers the whole backbone; union mode surfaces it even
  // when an off-reference branch outranks it in the returned list.
  BenchConfig united;
  united.chain_mode = "union";
  auto full = run_lineage_benchmark(g, reg, ref, {"sgt-mcts"}, params, united);
  CHECK(full.algorithms[0].mean.nr == doctest::Approx(1.0));
  CHECK(full.algorithms[0].mean.er == doctest::Approx(1.0));
  CHECK(full.algorithms[0].mean.cas == doctest::Approx(1.0));

  auto again = run_lineage_benchmark(
      g, reg, ref, {"sgt-mcts", "beam", "random-walk"}, params);
  CHECK(again.to_json().dump() == report.to_json().dump());

  auto csv = report.to_csv();
  CHECK(csv.rfind("algorithm,nmr,err,psc,nr,er,cas\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("sgt-mcts,1.000000,1.000000,1.000000,") != std::string::npos);

  CHECK_THROWS_AS(
      run_lineage_benchmark(g, reg, ref, {"simulated-annealing"}, params),
      ParamError);
}

TEST_CASE("benchmark seeding and chain modes change what gets scored") {
  SynthGraphParams p;
  p.seed = 5;
  auto [g, ref] = synthesize_graph(p);
  AliasRegistry reg = synth_registry(g);
  SearchParams params;
  params.budget = 60;
  std::map<std::string, NodeId> by_name;
  for (const auto& m : g.methods()) by_name[m.canonical_name] = m.id;

  BenchConfig newest;  // defaults: newest seeding, best chain mode
  auto base = run_lineage_benchmark(g, reg, ref, {"sgt-mcts"}, params, newest);
  for (const auto& row : base.algorithms[0].rows)
    CHECK(row.seed == by_name.at(ref.chains[row.chain_index].back()));

  BenchConfig oldest = newest;
  oldest.seeding = "oldest";
  auto rooted = run_lineage_benchmark(g, reg, ref, {"sgt-mcts"}, params, oldest);
  for (const auto& row : rooted.algorithms[0].rows)
    CHECK(row.seed == by_name.at(ref.chains[row.chain_index].front()));

  // Union mode takes the element-wise best over all returned chains, so it
  // never scores below best mode.
  BenchConfig united = newest;
  united.chain_mode = "union";
  auto best = run_lineage_benchmark(g, reg, ref, {"random-walk"}, params, newest);
  auto uni = run_lineage_benchmark(g, reg, ref, {"random-walk"}, params, united);
  REQUIRE(best.algorithms[0].rows.size() == uni.algorithms[0].rows.size());
  for (size_t i = 0; i < best.algorithms[0].rows.size(); ++i) {
    CHECK(uni.algorithms[0].rows[i].scores.nr >=
          best.algorithms[0].rows[i].scores.nr - 1e-12);
    CHECK(uni.algorithms[0].rows[i].scores.er >=
          best.algorithms[0].rows[i].scores.er - 1e-12);
    CHECK(uni.algorithms[0].rows[i].scores.cas >=
          best.algorithms[0].rows[i].scores.cas - 1e-12);
  }

  // Problem chains are skipped with explicit warnings.
  ReferenceGraph noisy = ref;
  noisy.chains.push_back({});
  noisy.methods.push_back("phantom");
  noisy.chains.push_back({"phantom"});
  auto warned = run_lineage_benchmark(g, reg, noisy, {"beam"}, params, newest);
  CHECK(warned.algorithms[0].rows.size() == ref.chains.size());
  bool empty_warning = false, unresolved_warning = false;
  for (const auto& w : warned.warnings) {
    empty_warning |= w.find("is empty; skipped") != std::string::npos;
    unresolved_warning |= w.find("resolves; skipped") != std::string::npos;
  }
  CHECK(empty_warning);
  CHECK(unresolved_warning);
}
