#pragma once

#include <string>
#include <vector>

#include "evograph/alias.hpp"
#include "evograph/config.hpp"
#include "evograph/graph.hpp"
#include "evograph/lineage.hpp"
#include "json.hpp"

namespace evograph {

// Ground-truth method names, evolution edges (predecessor -> successor) and
// ordered chains (oldest first), as shipped in reference.json.
struct ReferenceGraph {
  std::vector<std::string> methods;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::vector<std::string>> chains;

  static ReferenceGraph from_json(const nlohmann::json& j);
  static ReferenceGraph from_file(const std::string& path);
  nlohmann::json to_json() const;
};

// One reference edge recovered as a directed causal path (influence order:
// predecessor first).
struct RecoveredPath {
  std::string ref_source;
  std::string ref_target;
  std::vector<NodeId> nodes;
  std::vector<size_t> edge_indices;
};

class PathJudge {
 public:
  virtual ~PathJudge() = default;
  virtual bool correct(const RecoveredPath& path, const Graph& g) const = 0;
  virtual std::string label() const = 0;
};

// Default judge: every hop strong-causal and years non-decreasing along the
// path (unknown years skipped). Labeled heuristic; the reference protocol
// uses semantic judgment that is not reproducible offline.
class HeuristicPathJudge : public PathJudge {
 public:
  bool correct(const RecoveredPath& path, const Graph& g) const override;
  std::string label() const override { return "heuristic"; }
};

struct ChainScores {
  double nr = 0.0;
  double er = 0.0;
  double cas = 0.0;
};

struct ChainRow {
  size_t chain_index = 0;
  NodeId seed;
  ChainScores scores;
  size_t retrieved_len = 0;
};

struct AlgoReport {
  std::string algorithm;
  ChainScores mean;
  std::vector<ChainRow> rows;
};

struct BenchReport {
  double nmr = 0.0;
  double err = 0.0;
  double psc = 0.0;
  std::string psc_judge;
  std::vector<AlgoReport> algorithms;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Fraction of reference names the alias registry resolves to a graph method.
// Empty reference: 1.0 plus a warning when `warnings` is given.
double node_match_ratio(const ReferenceGraph& reference, const Graph& g,
                        const AliasRegistry& registry,
                        std::vector<std::string>* warnings = nullptr);

// Fraction of reference edges recovered as a directed causal path of at most
// max_hops hops in influence order, starting from the predecessor method or
// its introducing paper and reaching the successor's. Recovered paths are
// appended to `paths` when given (consumed by path_semantic_correctness).
double edge_reachable_ratio(const ReferenceGraph& reference, const Graph& g,
                            const AliasRegistry& registry, int max_hops = 4,
                            std::vector<RecoveredPath>* paths = nullptr);

// Fraction of recovered paths the judge accepts; 1.0 over zero paths.
double path_semantic_correctness(const std::vector<RecoveredPath>& paths,
                                 const Graph& g, const PathJudge& judge);

// Node recall, adjacent-pair edge recall, and longest-common-subsequence
// alignment of one retrieved chain against a reference name sequence. A
// retrieved node covers a reference name when it is the resolved method or
// its introducing paper. Singleton reference: er = 1.0 iff recovered.
ChainScores chain_metrics(const EvolutionChain& retrieved,
                          const std::vector<std::string>& reference,
                          const Graph& g, const AliasRegistry& registry);

struct SynthGraphParams {
  int n_methods = 16;
  int branching = 2;
  int depth = 4;
  double noise_rate = 0.25;
  int year_span = 8;
  uint64_t seed = 1;

  static SynthGraphParams from_json(const nlohmann::json& j);
  static SynthGraphParams from_file(const std::string& path);
  nlohmann::json to_json() const;
};

// Layered method DAG: one root, `branching` methods per later layer, one
// introducing paper per method, a strong extends backbone toward the parent
// layer (the reference chains follow it root-to-leaf), years increasing with
// depth across year_span, evidence quotes embedded in the citing papers, and
// round(noise_rate * backbone) weak-typed noise edges. Reproducible from the
// seed. Infeasible shapes (depth * branching > n_methods) raise ParamError.
std::pair<Graph, ReferenceGraph> synthesize_graph(const SynthGraphParams& params);

// Registry matching a synthesized graph: canonical names plus method ids.
AliasRegistry synth_registry(const Graph& g);

// Runs each named algorithm ("sgt-mcts", "beam", "random-walk") once per
// reference chain, seeded at the chain's newest (or oldest, per config)
// resolved method, scores the best returned chain (or the element-wise best
// over all returned chains in union mode), and averages per algorithm.
// Graph-level nmr/err/psc are computed once with the default judge.
BenchReport run_lineage_benchmark(const Graph& g, const AliasRegistry& registry,
                                  const ReferenceGraph& reference,
                                  const std::vector<std::string>& algorithms,
                                  const SearchParams& params,
                                  const BenchConfig& cfg = {});

}  // namespace evograph
