#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

#include "evograph/alias.hpp"
#include "evograph/generator.hpp"
#include "evograph/graph.hpp"
#include "evograph/retrieval.hpp"
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

// pB(2024) -> pA(2020) extends  [cc bottleneck, improves is, sacrifices acc]
// pC(2025) -> pB       extends  [is bottleneck, improves is, sacrifices acc]
// pD(2025) -> pC       compares [me bottleneck, improves me]
// pD       -> pA       background
// pZ(2024) mentions "epsnet" three times; mE is introduced there.
Graph gap_graph() {
  std::vector<PaperNode> papers = {
      make_paper("pA", 2020), make_paper("pB", 2024), make_paper("pC", 2025),
      make_paper("pD", 2025),
      make_paper("pZ", 2024, "", "epsnet epsnet epsnet shines")};
  std::vector<MethodNode> methods = {
      make_method("mA", "alphanet", "pA"), make_method("mB", "betanet", "pB"),
      make_method("mC", "gammanet", "pC"), make_method("mD", "deltanet", "pD"),
      make_method("mE", "epsnet", "pZ")};

  Edge e0 = make_edge("pB", "pA", EdgeType::extends, 0.9, "e0");
  e0.evidence->bottleneck_dimension = BottleneckDimension::computational_complexity;
  e0.evidence->improvement_dim = BottleneckDimension::inference_speed;
  e0.evidence->sacrifice_dim = BottleneckDimension::accuracy;
  Edge e1 = make_edge("pC", "pB", EdgeType::extends, 0.8, "e1");
  e1.evidence->bottleneck_dimension = BottleneckDimension::inference_speed;
  e1.evidence->improvement_dim = BottleneckDimension::inference_speed;
  e1.evidence->sacrifice_dim = BottleneckDimension::accuracy;
  Edge e2 = make_edge("pD", "pC", EdgeType::compares, 0.7, "e2");
  e2.evidence->bottleneck_dimension = BottleneckDimension::memory_efficiency;
  e2.evidence->improvement_dim = BottleneckDimension::memory_efficiency;
  Edge e3 = make_edge("pD", "pA", EdgeType::background);

  std::vector<Edge> edges = {e0, e1, e2, e3};
  embed_quotes(papers, edges);
  return Graph::build(std::move(papers), std::move(methods), {}, std::move(edges));
}

struct ScriptedProposer : ProposerPort {
  std::vector<std::string> responses;
  std::vector<std::string> payloads;
  size_t next = 0;
  bool throws = false;

  std::string propose(const std::string& payload) override {
    payloads.push_back(payload);
    if (throws) throw std::runtime_error("proposer offline");
    if (next < responses.size()) return responses[next++];
    return responses.empty() ? "" : responses.back();
  }
};

std::string cert_response(const Graph& g, size_t edge_index,
                          const std::string& quote_override = "") {
  const Edge& e = g.edges()[edge_index];
  nlohmann::json j = {
      {"title", "A grounded idea"},
      {"body", "Prose that cites the record."},
      {"certificate",
       {{"edge_source", e.source},
        {"edge_target", e.target},
        {"edge_type", to_string(e.type)},
        {"bottleneck_quote",
         quote_override.empty() ? e.evidence->bottleneck_quote : quote_override},
        {"justification", "stored evidence"}}}};
  return j.dump();
}

// No fallback and no degeneracy without a verified stored quote behind it.
void check_sound(const Proposal& p, const Graph& g) {
  if (p.certificate)
    CHECK(verify_certificate(*p.certificate, g));
  else
    CHECK(p.degenerate);
  CHECK_FALSE(p.title.empty());
  CHECK_FALSE(p.body.empty());
}

}  // namespace

TEST_CASE("gap summary mines the four patterns with exact supports") {
  Graph g = gap_graph();
  CorpusIndex index = CorpusIndex::build(g, AliasRegistry{});
  Context ctx;
  ctx.edge_indices = {0, 1, 2, 3};

  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);
  CHECK_FALSE(s.empty());

  // inference speed is strongly improved, so only the other two stay open;
  // equal support keeps taxonomy order.
  REQUIRE(s.open_axes.size() == 2);
  CHECK(s.open_axes[0].dimension == BottleneckDimension::computational_complexity);
  CHECK(s.open_axes[1].dimension == BottleneckDimension::memory_efficiency);
  REQUIRE(s.open_axes[0].support.size() == 1);
  CHECK(s.open_axes[0].support[0].edge_index == 0);
  CHECK(s.open_axes[0].support[0].bottleneck_quote == "bottleneck e0");

  // Both improvement axes are recent; higher support ranks first.
  REQUIRE(s.recent_directions.size() == 2);
  CHECK(s.recent_directions[0].dimension == BottleneckDimension::inference_speed);
  CHECK(s.recent_directions[0].support.size() == 2);
  CHECK(s.recent_directions[1].dimension == BottleneckDimension::memory_efficiency);

  // accuracy is sacrificed twice, crossing the repetition floor.
  REQUIRE(s.sacrifice_axes.size() == 1);
  CHECK(s.sacrifice_axes[0].dimension == BottleneckDimension::accuracy);
  REQUIRE(s.sacrifice_axes[0].support.size() == 2);
  CHECK(s.sacrifice_axes[0].support[0].edge_index == 0);
  CHECK(s.sacrifice_axes[0].support[1].edge_index == 1);

  // Narrower recency window drops the 2024 edge; equal support falls back
  // to taxonomy order, putting memory efficiency first.
  GapSummary late = build_gap_summary(ctx, {}, g, index, 2027);
  REQUIRE(late.recent_directions.size() == 2);
  CHECK(late.recent_directions[0].dimension == BottleneckDimension::memory_efficiency);
  REQUIRE(late.recent_directions[0].support.size() == 1);
  CHECK(late.recent_directions[0].support[0].edge_index == 2);
  CHECK(late.recent_directions[1].dimension == BottleneckDimension::inference_speed);
  CHECK(late.recent_directions[1].support[0].edge_index == 1);

  // Chain edges pool exactly like context edges.
  EvolutionChain chain;
  chain.edge_indices = {0};
  GapSummary pooled = build_gap_summary(Context{}, {chain}, g, index, 2025);
  REQUIRE(pooled.open_axes.size() == 1);
  CHECK(pooled.open_axes[0].dimension ==
        BottleneckDimension::computational_complexity);
  CHECK(pooled.sacrifice_axes.empty());  // one sacrifice is below the floor

  GapSummary blank = build_gap_summary(Context{}, {}, g, index, 2025);
  CHECK(blank.open_axes.empty());
  CHECK(blank.recent_directions.empty());
}

TEST_CASE("disconnected pairs respect lineage distance, mentions and caps") {
  Graph g = gap_graph();
  AliasRegistry reg;
  reg.add("mE", {"epsnet"});
  CorpusIndex index = CorpusIndex::build(g, reg);

  // mA and mD: never co-mentioned, and mD is unreachable in the projection
  // (its only edges are compares/background, which do not project).
  Context ctx;
  ctx.methods = {"mA", "mD"};
  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);
  REQUIRE(s.disconnected_pairs.size() == 1);
  CHECK(s.disconnected_pairs[0].first == "mA");
  CHECK(s.disconnected_pairs[0].second == "mD");
  CHECK(s.disconnected_pairs[0].first_name == "alphanet");
  CHECK(s.disconnected_pairs[0].second_name == "deltanet");

  // mA and mC sit two projected hops apart: connected, no pair.
  ctx.methods = {"mA", "mC"};
  CHECK(build_gap_summary(ctx, {}, g, index, 2025).disconnected_pairs.empty());

  // Context papers pull frequently-mentioned methods into the pool.
  ctx.methods = {"mA"};
  ctx.papers = {"pZ"};
  GapSummary mentioned = build_gap_summary(ctx, {}, g, index, 2025);
  REQUIRE(mentioned.disconnected_pairs.size() == 1);
  CHECK(mentioned.disconnected_pairs[0].second == "mE");

  // A zero pool cap stops the mention expansion.
  GeneratorConfig capped;
  capped.pair_pool_cap = 0;
  CHECK(build_gap_summary(ctx, {}, g, index, 2025, capped).disconnected_pairs.empty());

  // A wider distance budget reconnects remote lineage kin.
  Context far;
  far.methods = {"mA", "mC"};
  GeneratorConfig near;
  near.pair_dag_distance = 1;
  CHECK(build_gap_summary(far, {}, g, index, 2025, near).disconnected_pairs.size() == 1);

  // Co-mentioned methods never pair, even with no lineage link.
  std::vector<PaperNode> papers = {make_paper("pOne", 2024, "",
                                              "alphaone with deltaone")};
  std::vector<MethodNode> methods = {make_method("m1", "alphaone", "pOne"),
                                     make_method("m2", "deltaone", "pOne")};
  Graph g2 = Graph::build(std::move(papers), std::move(methods), {}, {});
  AliasRegistry reg2;
  reg2.add("m1", {"alphaone"});
  reg2.add("m2", {"deltaone"});
  CorpusIndex index2 = CorpusIndex::build(g2, reg2);
  REQUIRE(index2.co_utilized("m1", "m2"));
  Context both;
  both.methods = {"m1", "m2"};
  CHECK(build_gap_summary(both, {}, g2, index2, 2025).disconnected_pairs.empty());
}

TEST_CASE("strategy selection follows the fixed priority") {
  GapSummary s;
  AxisEntry axis;
  axis.dimension = BottleneckDimension::accuracy;

  CHECK(select_strategy(s).degenerate);
  CHECK(select_strategy(s).tag == Strategy::trend_extrapolation);

  s.recent_directions = {axis};
  auto trend = select_strategy(s);
  CHECK(trend.tag == Strategy::trend_extrapolation);
  CHECK_FALSE(trend.degenerate);

  s.disconnected_pairs = {{"a", "b", "a", "b"}};
  CHECK(select_strategy(s).tag == Strategy::cross_pollination);
  s.sacrifice_axes = {axis};
  CHECK(select_strategy(s).tag == Strategy::paradigm_challenge);
  s.open_axes = {axis};
  CHECK(select_strategy(s).tag == Strategy::bottleneck_resolution);

  CHECK(strategy_from_string("paradigm_challenge") == Strategy::paradigm_challenge);
  CHECK(to_string(Strategy::cross_pollination) == "cross_pollination");
  CHECK_THROWS_AS(strategy_from_string("vibes"), ParseError);
}

TEST_CASE("certificates verify only byte-identical stored quotes") {
  Graph g = tiny_graph();
  const Edge& stored = g.edges()[0];  // pB -> pA extends
  Certificate cert{stored.source, stored.target, stored.type,
                   stored.evidence->bottleneck_quote, "because stored"};
  CHECK(verify_certificate(cert, g));

  Certificate off = cert;
  off.bottleneck_quote += " ";
  CHECK_FALSE(verify_certificate(off, g));
  off = cert;
  off.bottleneck_quote = "";
  CHECK_FALSE(verify_certificate(off, g));
  off = cert;
  off.edge_type = EdgeType::improves;
  CHECK_FALSE(verify_certificate(off, g));
  off = cert;
  off.edge_target = "pE";
  CHECK_FALSE(verify_certificate(off, g));

  // Background edges exist but are never certifiable.
  Certificate bg{"pC", "pA", EdgeType::background, "", ""};
  CHECK_FALSE(verify_certificate(bg, g));
}

TEST_CASE("fallback proposal picks the best-supported pattern deterministically") {
  Graph g = gap_graph();
  CorpusIndex index = CorpusIndex::build(g, AliasRegistry{});
  Context ctx;
  ctx.edge_indices = {0, 1, 2, 3};
  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);

  // accuracy sacrifice (support 2) outweighs the open axes (support 1).
  Proposal p = fallback_proposal(s);
  CHECK(p.fallback);
  CHECK_FALSE(p.degenerate);
  CHECK(p.strategy == Strategy::paradigm_challenge);
  CHECK(p.title == "Rethinking the accuracy tradeoff");
  CHECK(p.body.find("2 surveyed advances sacrifice accuracy") != std::string::npos);
  CHECK(p.body.find("bottleneck e0") != std::string::npos);
  REQUIRE(p.certificate.has_value());
  CHECK(verify_certificate(*p.certificate, g));
  CHECK(p.certificate->edge_source == "pB");

  // Equal counts resolve by strategy priority: open axis beats sacrifice.
  GapSummary tied;
  AxisEntry open_axis{BottleneckDimension::scalability,
                      {s.sacrifice_axes[0].support}};
  AxisEntry sac_axis{BottleneckDimension::accuracy, {s.sacrifice_axes[0].support}};
  tied.open_axes = {open_axis};
  tied.sacrifice_axes = {sac_axis};
  Proposal t = fallback_proposal(tied);
  CHECK(t.strategy == Strategy::bottleneck_resolution);
  CHECK(t.title == "Resolving the scalability bottleneck");

  // Pairs-only summaries have no quotable evidence: degenerate bridge.
  GapSummary pairs;
  pairs.disconnected_pairs = {{"mA", "mD", "alphanet", "deltanet"}};
  Proposal bridge = fallback_proposal(pairs);
  CHECK(bridge.strategy == Strategy::cross_pollination);
  CHECK(bridge.degenerate);
  CHECK_FALSE(bridge.certificate.has_value());
  CHECK(bridge.title == "Bridging alphanet and deltanet");

  Proposal none = fallback_proposal(GapSummary{});
  CHECK(none.degenerate);
  CHECK(none.title == "Insufficient context");

  CHECK(fallback_proposal(s).to_json().dump() == p.to_json().dump());
}

TEST_CASE("proposer happy path: payload shape, parsed reply, verified certificate") {
  Graph g = gap_graph();
  CorpusIndex index = CorpusIndex::build(g, AliasRegistry{});
  Context ctx;
  ctx.edge_indices = {0, 1, 2, 3};
  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);
  StrategyChoice choice = select_strategy(s);
  REQUIRE(choice.tag == Strategy::bottleneck_resolution);

  ScriptedProposer proposer;
  proposer.responses = {cert_response(g, 1)};
  Proposal p = generate_proposal(s, choice, &proposer, g);
  CHECK_FALSE(p.fallback);
  CHECK(p.title == "A grounded idea");
  CHECK(p.strategy == Strategy::bottleneck_resolution);
  REQUIRE(p.certificate.has_value());
  CHECK(p.certificate->edge_source == "pC");
  CHECK(verify_certificate(*p.certificate, g));
  check_sound(p, g);

  REQUIRE(proposer.payloads.size() == 1);
  auto payload = nlohmann::json::parse(proposer.payloads[0]);
  CHECK(payload["strategy"] == "bottleneck_resolution");
  CHECK(payload["focus"] == s.to_json()["open_axes"]);
  CHECK(payload["summary"] == s.to_json());

  // Cross-pollination payloads focus on the pairs.
  GapSummary pairs;
  pairs.disconnected_pairs = {{"mA", "mD", "alphanet", "deltanet"}};
  ScriptedProposer bridge_proposer;
  bridge_proposer.responses = {cert_response(g, 0)};
  generate_proposal(pairs, {Strategy::cross_pollination, false}, &bridge_proposer, g);
  auto bridge_payload = nlohmann::json::parse(bridge_proposer.payloads.at(0));
  CHECK(bridge_payload["focus"] == pairs.to_json()["disconnected_pairs"]);
}

TEST_CASE("proposer failures: retry once on parse, never on certificate") {
  Graph g = gap_graph();
  CorpusIndex index = CorpusIndex::build(g, AliasRegistry{});
  Context ctx;
  ctx.edge_indices = {0, 1, 2, 3};
  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);
  StrategyChoice choice = select_strategy(s);
  Proposal expected_fallback = fallback_proposal(s);

  // Malformed then valid: the retry rescues it.
  ScriptedProposer retry;
  retry.responses = {"not json at all", cert_response(g, 0)};
  Proposal p = generate_proposal(s, choice, &retry, g);
  CHECK_FALSE(p.fallback);
  CHECK(retry.payloads.size() == 2);

  // Structurally valid JSON missing the certificate also counts as a parse
  // failure and earns the one retry.
  ScriptedProposer shapeless;
  shapeless.responses = {R"({"title": "t", "body": "b"})",
                         R"({"title": "t", "body": "b"})"};
  Proposal q = generate_proposal(s, choice, &shapeless, g);
  CHECK(q.fallback);
  CHECK(shapeless.payloads.size() == 2);
  CHECK(q.to_json().dump() == expected_fallback.to_json().dump());

  // Unknown edge type: parse failure path.
  ScriptedProposer odd_type;
  nlohmann::json bad = nlohmann::json::parse(cert_response(g, 0));
  bad["certificate"]["edge_type"] = "synergizes";
  odd_type.responses = {bad.dump(), bad.dump()};
  CHECK(generate_proposal(s, choice, &odd_type, g).fallback);
  CHECK(odd_type.payloads.size() == 2);

  // A parseable reply with a wrong quote is ungrounded content: immediate
  // fallback, no second attempt.
  ScriptedProposer liar;
  liar.responses = {cert_response(g, 0, "a quote nobody wrote"),
                    cert_response(g, 0)};
  Proposal r = generate_proposal(s, choice, &liar, g);
  CHECK(r.fallback);
  CHECK(liar.payloads.size() == 1);

  // Exceptions drop straight to the fallback.
  ScriptedProposer broken;
  broken.throws = true;
  Proposal ex = generate_proposal(s, choice, &broken, g);
  CHECK(ex.fallback);
  CHECK(broken.payloads.size() == 1);

  // Null proposer and degenerate strategies bypass the port entirely.
  CHECK(generate_proposal(s, choice, nullptr, g).to_json().dump() ==
        expected_fallback.to_json().dump());
  ScriptedProposer untouched;
  untouched.responses = {cert_response(g, 0)};
  Proposal d = generate_proposal(GapSummary{}, {Strategy::trend_extrapolation, true},
                                 &untouched, g);
  CHECK(d.degenerate);
  CHECK(untouched.payloads.empty());
}

TEST_CASE("adversarial proposer replies never yield an unverified certificate") {
  Graph g = gap_graph();
  CorpusIndex index = CorpusIndex::build(g, AliasRegistry{});
  Context ctx;
  ctx.edge_indices = {0, 1, 2, 3};
  GapSummary s = build_gap_summary(ctx, {}, g, index, 2025);
  StrategyChoice choice = select_strategy(s);

  std::string valid = cert_response(g, 1);
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> printable(32, 126);
  std::uniform_int_distribution<size_t> pos(0, valid.size() - 1);
  for (int i = 0; i < 200; ++i) {
    std::string reply;
    if (i % 2 == 0) {
      reply.resize(40);
      for (char& c : reply) c = static_cast<char>(printable(rng));
    } else {
      reply = valid;
      reply[pos(rng)] = static_cast<char>(printable(rng));
    }
    ScriptedProposer proposer;
    proposer.responses = {reply, reply};
    Proposal p = generate_proposal(s, choice, &proposer, g);
    check_sound(p, g);
  }
}
