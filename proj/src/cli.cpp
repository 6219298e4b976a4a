#include "evograph/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evograph/alias.hpp"
#include "evograph/bench.hpp"
#include "evograph/config.hpp"
#include "evograph/evaluator.hpp"
#include "evograph/generator.hpp"
#include "evograph/graph.hpp"
#include "evograph/json_io.hpp"
#include "evograph/lineage.hpp"
#include "evograph/retrieval.hpp"
#include "evograph/types.hpp"

namespace evograph {
namespace {

// Sub-seed lanes derived from the master --seed. One lane per randomized
// component keeps reruns reproducible end to end while letting components
// draw independently.
enum SeedLane : uint64_t {
  kLaneEmbedder = 0,
  kLaneLineage = 1,
  kLaneBenchWalk = 2,
  kLaneSynth = 3,
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

struct CommonOpts {
  std::string graph_nodes;
  std::string graph_edges;
  std::string graph_seeds;
  std::string aliases;
  std::string config_path;
  std::string out;
  uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_graph_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--graph-nodes", o.graph_nodes, "nodes.jsonl path")
      ->required();
  cmd->add_option("--graph-edges", o.graph_edges, "edges.jsonl path")
      ->required();
  cmd->add_option("--graph-seeds", o.graph_seeds,
                  "method_seeds.jsonl path (optional)");
}

void add_shared_flags(CLI::App* cmd, CommonOpts& o, bool aliases_required) {
  auto* al = cmd->add_option("--aliases", o.aliases, "aliases.json path");
  if (aliases_required) al->required();
  cmd->add_option("--config", o.config_path,
                  "config.json overriding built-in defaults");
  o.seed_opt = cmd->add_option(
      "--seed", o.seed, "master seed; components draw fixed sub-seed lanes");
}

bool seed_given(const CommonOpts& o) {
  return o.seed_opt != nullptr && o.seed_opt->count() > 0;
}

Config load_config(const CommonOpts& o) {
  Config cfg = o.config_path.empty() ? Config{} : Config::load(o.config_path);
  if (seed_given(o)) {
    cfg.retrieval.embedder.seed = split_seed(o.seed, kLaneEmbedder);
    cfg.lineage.rng_seed = split_seed(o.seed, kLaneLineage);
    cfg.bench.rw_seed = split_seed(o.seed, kLaneBenchWalk);
  }
  return cfg;
}

Graph load_graph_opts(const CommonOpts& o) {
  Graph g = load_graph(o.graph_nodes, o.graph_edges, o.graph_seeds);
  for (const auto& w : g.warnings()) std::cout << "warning: " << one_line(w) << "\n";
  return g;
}

AliasRegistry load_aliases(const CommonOpts& o, const Config& cfg) {
  AliasRegistry reg = AliasRegistry::load(o.aliases);
  reg.set_version_suffixes(cfg.alias.version_suffixes);
  return reg;
}

std::string edge_label(const Edge& e) {
  return e.source + " -> " + e.target + " [" + to_string(e.type) + "]";
}

// Parses serialized artifact text back and checks the required keys, so a
// malformed artifact can never reach disk.
void check_artifact(const nlohmann::json& doc, const std::string& what,
                    const std::vector<std::string>& required_keys) {
  if (!doc.is_object())
    throw ContractError(what + ": artifact is not a JSON object");
  for (const auto& key : required_keys)
    if (!doc.contains(key))
      throw ContractError(what + ": artifact missing key '" + key + "'");
}

void write_json_artifact(const std::string& path, const nlohmann::json& doc,
                         const std::string& what,
                         const std::vector<std::string>& required_keys) {
  std::string text = doc.dump(2);
  check_artifact(nlohmann::json::parse(text), what, required_keys);
  jsonio::write_file(path, text + "\n");
}

int cmd_validate(const CommonOpts& o) {
  Config cfg = load_config(o);
  Graph g = load_graph_opts(o);

  size_t accepted = 0, skipped = 0;
  std::vector<std::string> failures;
  for (const auto& e : g.edges()) {
    if (!is_causal(e.type)) continue;
    try {
      ValidationVerdict v = validate_edge(g, e, cfg.graph.year_tolerance);
      if (v.accepted) {
        ++accepted;
      } else {
        failures.push_back("edge " + edge_label(e) + ": " +
                           to_string(v.reason) + " (" + one_line(v.detail) + ")");
      }
    } catch (const ContractError&) {
      // Causal edge whose source has no retrievable citing text (method
      // without an introducing paper): quotes cannot be post-checked.
      ++skipped;
      std::cout << "note: edge " << edge_label(e)
                << " has no citing text; quote check skipped\n";
    }
  }

  if (!failures.empty()) {
    for (const auto& f : failures) std::cerr << "error: " << f << "\n";
    return 1;
  }
  std::cout << "graph OK: " << g.papers().size() << " papers, "
            << g.methods().size() << " methods, " << g.stubs().size()
            << " stubs, " << g.edges().size() << " edges (" << accepted
            << " causal checked, " << skipped << " skipped)\n";
  return 0;
}

nlohmann::json chain_row(const EvolutionChain& chain) {
  nlohmann::json row;
  row["nodes"] = chain.nodes;
  auto& types = row["edge_types"] = nlohmann::json::array();
  auto& confs = row["confidences"] = nlohmann::json::array();
  for (const auto& e : chain.edges) {
    types.push_back(to_string(e.type));
    confs.push_back(e.evidence ? e.evidence->confidence : 0.0);
  }
  row["rank_score"] = chain.rank_score;
  row["provenance"] = chain.provenance;
  return row;
}

int cmd_lineage(const CommonOpts& o, const std::string& query) {
  Config cfg = load_config(o);
  Graph g = load_graph_opts(o);
  AliasRegistry reg = load_aliases(o, cfg);

  LineageResult res = reconstruct_lineage(query, g, reg, cfg.lineage);

  std::string text;
  for (const auto& chain : res.chains) {
    nlohmann::json row = chain_row(chain);
    check_artifact(row, "chains.jsonl",
                   {"nodes", "edge_types", "confidences", "rank_score",
                    "provenance"});
    text += row.dump();
    text += '\n';
  }
  jsonio::write_file(o.out, text);

  if (!res.diagnostic.empty()) std::cout << "note: " << res.diagnostic << "\n";
  std::cout << "wrote " << res.chains.size() << " chains -> " << o.out << "\n";
  for (size_t i = 0; i < res.chains.size(); ++i) {
    const auto& c = res.chains[i];
    std::cout << "  " << (i + 1) << ". [" << c.provenance << " ";
    std::printf("%.4f", c.rank_score);
    std::cout << "] ";
    for (size_t n = 0; n < c.nodes.size(); ++n) {
      if (n) std::cout << " -> ";
      std::cout << c.nodes[n];
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& idea_path) {
  Config cfg = load_config(o);
  Graph g = load_graph_opts(o);
  AliasRegistry reg = load_aliases(o, cfg);

  IdeaProfile profile = IdeaProfile::from_file(idea_path);
  auto embedder = make_embedder(cfg.retrieval.embedder);
  auto reranker = make_reranker(cfg.retrieval.reranker);
  EvaluationReport report = evaluate_idea(profile, g, reg, *embedder, *reranker,
                                          cfg.evaluator, cfg.retrieval);
  write_json_artifact(o.out, report.to_json(), "report.json",
                      {"overall", "fallback_used", "methods", "duplicate"});

  std::printf("overall %.4f\n", report.overall);
  if (report.fallback_used) {
    std::cout << "fallback: no resolvable methods\n";
  } else if (report.scores) {
    const char* names[] = {"novelty", "feasibility", "significance",
                           "validity", "clarity"};
    auto vals = report.scores->values();
    for (size_t i = 0; i < vals.size(); ++i)
      std::printf("  %-12s %.4f\n", names[i], vals[i]);
    std::printf("  %-12s %.4f\n", "omega", report.omega);
  }
  std::cout << "wrote report -> " << o.out << "\n";
  return 0;
}

int cmd_generate(const CommonOpts& o, const std::string& query) {
  Config cfg = load_config(o);
  if (cfg.generator.proposer != "none")
    throw ParamError("unknown proposer '" + cfg.generator.proposer +
                     "' (the CLI supports only \"none\")");
  Graph g = load_graph_opts(o);
  AliasRegistry reg = load_aliases(o, cfg);

  CorpusIndex index = CorpusIndex::build(g, reg);
  Context ctx = retrieve_context(query, g, reg, index, cfg.retrieval);
  LineageResult lineage = reconstruct_lineage(query, g, reg, cfg.lineage);
  GapSummary summary = build_gap_summary(ctx, lineage.chains, g, index,
                                         cfg.evaluator.now_year, cfg.generator);
  StrategyChoice choice = select_strategy(summary);
  Proposal proposal = generate_proposal(summary, choice, nullptr, g);

  nlohmann::json doc = proposal.to_json();
  check_artifact(doc, "proposal.json",
                 {"title", "body", "strategy", "certificate", "fallback",
                  "degenerate"});
  if (!doc["certificate"].is_null() && proposal.certificate &&
      !verify_certificate(*proposal.certificate, g))
    throw ContractError("proposal.json: certificate failed re-verification");
  jsonio::write_file(o.out, doc.dump(2) + "\n");

  std::cout << "strategy: " << to_string(proposal.strategy)
            << (proposal.degenerate ? " (degenerate)" : "")
            << (proposal.fallback ? " (fallback)" : "") << "\n";
  std::cout << "title: " << proposal.title << "\n";
  std::cout << "wrote proposal -> " << o.out << "\n";
  return 0;
}

std::vector<std::string> split_csv(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : raw) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string csv_sibling(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".csv";
  return out + ".csv";
}

int cmd_bench(const CommonOpts& o, const std::string& reference_path,
              const std::string& algos_raw) {
  Config cfg = load_config(o);
  Graph g = load_graph_opts(o);
  AliasRegistry reg = load_aliases(o, cfg);
  ReferenceGraph reference = ReferenceGraph::from_file(reference_path);

  std::vector<std::string> algos = split_csv(algos_raw);
  BenchReport report =
      run_lineage_benchmark(g, reg, reference, algos, cfg.lineage, cfg.bench);

  write_json_artifact(o.out, report.to_json(), "bench_report.json",
                      {"nmr", "err", "psc", "psc_judge", "algorithms"});
  std::string csv_path = csv_sibling(o.out);
  jsonio::write_file(csv_path, report.to_csv());

  for (const auto& w : report.warnings)
    std::cout << "warning: " << one_line(w) << "\n";
  std::printf("graph: NMR %.4f  ERR %.4f  PSC %.4f (judge %s)\n", report.nmr,
              report.err, report.psc, report.psc_judge.c_str());
  for (const auto& algo : report.algorithms)
    std::printf("%-12s NR %.4f  ER %.4f  CAS %.4f\n", algo.algorithm.c_str(),
                algo.mean.nr, algo.mean.er, algo.mean.cas);
  std::cout << "wrote report -> " << o.out << " and " << csv_path << "\n";
  return 0;
}

int cmd_synth(const CommonOpts& o, const std::string& params_path) {
  SynthGraphParams params = params_path.empty()
                                ? SynthGraphParams{}
                                : SynthGraphParams::from_file(params_path);
  if (seed_given(o)) params.seed = split_seed(o.seed, kLaneSynth);

  auto [g, reference] = synthesize_graph(params);
  std::filesystem::create_directories(o.out);
  dump_graph(g, o.out);
  const std::string ref_path = o.out + "/reference.json";
  const std::string alias_path = o.out + "/aliases.json";
  jsonio::write_file(ref_path, reference.to_json().dump(2) + "\n");
  jsonio::write_file(alias_path, synth_registry(g).to_json().dump(2) + "\n");

  // Round-trip revalidation: the emitted pair must load back cleanly.
  Graph reloaded = load_graph(o.out + "/nodes.jsonl", o.out + "/edges.jsonl",
                              o.out + "/method_seeds.jsonl");
  ReferenceGraph::from_file(ref_path);
  AliasRegistry::load(alias_path);

  std::cout << "synthesized " << reloaded.methods().size() << " methods, "
            << reloaded.papers().size() << " papers, "
            << reloaded.edges().size() << " edges, "
            << reference.chains.size() << " reference chains -> " << o.out
            << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{
      "typed method-evolution graphs: validation, lineage search, idea "
      "evaluation, proposal generation, benchmarking"};
  app.require_subcommand(1);

  int rc = 0;

  CommonOpts validate_o;
  auto* validate = app.add_subcommand("validate", "load a graph and post-check every causal edge");
  add_graph_flags(validate, validate_o);
  add_shared_flags(validate, validate_o, false);
  validate->callback([&] { rc = cmd_validate(validate_o); });

  CommonOpts lineage_o;
  lineage_o.out = "chains.jsonl";
  std::string lineage_query;
  auto* lineage = app.add_subcommand("lineage", "reconstruct evolution chains for a method query");
  add_graph_flags(lineage, lineage_o);
  add_shared_flags(lineage, lineage_o, true);
  lineage->add_option("--query", lineage_query, "method name to trace")->required();
  lineage->add_option("--out", lineage_o.out, "chains.jsonl output path");
  lineage->callback([&] { rc = cmd_lineage(lineage_o, lineage_query); });

  CommonOpts evaluate_o;
  evaluate_o.out = "report.json";
  std::string idea_path;
  auto* evaluate = app.add_subcommand("evaluate", "score an idea profile against the graph");
  add_graph_flags(evaluate, evaluate_o);
  add_shared_flags(evaluate, evaluate_o, true);
  evaluate->add_option("--idea", idea_path, "idea profile JSON path")->required();
  evaluate->add_option("--out", evaluate_o.out, "report.json output path");
  evaluate->callback([&] { rc = cmd_evaluate(evaluate_o, idea_path); });

  CommonOpts generate_o;
  generate_o.out = "proposal.json";
  std::string generate_query;
  auto* generate = app.add_subcommand("generate", "derive a research proposal from graph gaps");
  add_graph_flags(generate, generate_o);
  add_shared_flags(generate, generate_o, true);
  generate->add_option("--query", generate_query, "method or topic to build on")->required();
  generate->add_option("--out", generate_o.out, "proposal.json output path");
  generate->callback([&] { rc = cmd_generate(generate_o, generate_query); });

  CommonOpts bench_o;
  bench_o.out = "bench_report.json";
  std::string reference_path;
  std::string algos = "sgt-mcts,beam,random-walk";
  auto* bench = app.add_subcommand("bench", "score lineage algorithms against a reference graph");
  add_graph_flags(bench, bench_o);
  add_shared_flags(bench, bench_o, true);
  bench->add_option("--reference", reference_path, "reference graph JSON path")->required();
  bench->add_option("--algos", algos, "comma-separated: sgt-mcts,beam,random-walk");
  bench->add_option("--out", bench_o.out, "bench_report.json output path");
  bench->callback([&] { rc = cmd_bench(bench_o, reference_path, algos); });

  CommonOpts synth_o;
  synth_o.out = "synth";
  std::string params_path;
  auto* synth = app.add_subcommand("synth", "synthesize a graph with a known reference lineage");
  add_shared_flags(synth, synth_o, false);
  synth->add_option("--params", params_path, "synthesis parameters JSON path");
  synth->add_option("--out", synth_o.out, "output directory");
  synth->callback([&] { rc = cmd_synth(synth_o, params_path); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return rc;
}

}  // namespace evograph
