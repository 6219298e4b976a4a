#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evograph/alias.hpp"
#include "evograph/config.hpp"
#include "evograph/graph.hpp"

namespace evograph {

// Piecewise temporal-coherence factor over the publication-year gap of an
// edge. Callers must hard-filter gaps < -1 before scoring.
double temporal_coherence(std::optional<int> delta_tau);

// Graph-aware prior: evidence confidence x temporal coherence.
double edge_prior(const Edge& e, std::optional<int> delta_tau);

struct TreeNodeStats {
  int visits = 0;
  double total_value = 0.0;

  double mean() const { return visits > 0 ? total_value / visits : 0.0; }
};

// Selection score: mean value + c*sqrt(ln N_parent / N_child) + lambda*prior.
// Unvisited children score +infinity (callers break ties by descending
// prior, then node id).
double sgt_uct(const TreeNodeStats& parent, const TreeNodeStats& child,
               double prior, const SearchParams& params);

// Mean edge prior over the path, scaled by min(1, len/max_depth).
double rollout_reward(
    const std::vector<std::pair<Edge, std::optional<int>>>& path_edges,
    const SearchParams& params);

// Chain of strong-causal edges, canonically ordered oldest -> newest. The
// stored edge joining nodes[i] and nodes[i+1] is authored nodes[i+1] ->
// nodes[i] (newer cites older).
struct EvolutionChain {
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  std::vector<size_t> edge_indices;  // positions in Graph::edges()
  double mean_confidence = 0.0;
  double mean_visits = 0.0;
  double rank_score = 0.0;
  std::string provenance = "primary";
};

// One root-to-leaf tree path of a directional search, seed first.
struct DirectionPath {
  std::vector<NodeId> nodes;
  std::vector<size_t> edge_indices;
  std::vector<int> node_visits;
  double accumulated_q = 0.0;
  int leaf_visits = 0;
};

// Instrumented counters for the Q-conservation invariant: the root's total
// value equals reward_credited + penalty_credited.
struct SearchStats {
  int iterations = 0;
  int tree_size = 0;
  int max_node_visits = 0;
  int root_visits = 0;
  double root_total = 0.0;
  double reward_credited = 0.0;
  double penalty_credited = 0.0;
};

struct DirectionResult {
  std::vector<DirectionPath> paths;  // top_k by accumulated Q
  SearchStats stats;
};

using EdgeMask = std::set<size_t>;

// Budgeted best-first tree search over the strong-causal subgraph in one
// direction. Fully deterministic: expansion order is (confidence desc,
// neighbor id), rollouts are greedy argmax conf*TC, selection ties break by
// prior then node id. Edges with year gap < -1, cycle-closing hops, and
// masked edges are never taken.
DirectionResult mcts_direction_search(const Graph& g, const NodeId& seed,
                                      Direction dir, const SearchParams& params,
                                      const EdgeMask* masked = nullptr);

// Concatenates every backward x forward path pair through the seed into a
// candidate chain, ranks them (visit term normalized by the larger of the
// two searches' max visit counts), and drops any chain whose node-set
// Jaccard with an already-kept chain reaches params.dedup_jaccard, keeping
// the higher-ranked one.
std::vector<EvolutionChain> splice_and_dedup(const Graph& g,
                                             const DirectionResult& backward,
                                             const DirectionResult& forward,
                                             const NodeId& seed,
                                             const SearchParams& params);

// Rank = w_len*(|nodes|/L_max) + w_conf*mean_confidence + w_visits*visit
// term, where the visit term is mean_visits normalized by the maximum
// per-node visit count observed in the producing search (capped at 1).
double rank_chain(const EvolutionChain& chain, const SearchParams& params,
                  double max_visits = 1.0);

struct LineageResult {
  std::vector<EvolutionChain> chains;
  std::string diagnostic;
};

// Node the searches start from for a resolved method: the method itself when
// it participates in strong-causal edges, otherwise its introducing paper
// (which carries the edges in paper-level extractions), otherwise the method.
NodeId lineage_search_seed(const Graph& g, const NodeId& method_id);

// Full lineage reconstruction: exact-alias seed resolution, bidirectional
// search, splice + dedup, top_k primary chains, then one level of
// branch-point re-search (budget/2, primary-covered edges masked) merged
// under the same dedup rule.
LineageResult reconstruct_lineage(const std::string& query, const Graph& g,
                                  const AliasRegistry& registry,
                                  const SearchParams& params);

// Breadth-synchronous beam search scoring partial chains by mean edge prior.
std::vector<EvolutionChain> beam_search_baseline(const Graph& g, const NodeId& seed,
                                                 Direction dir, int beam_width,
                                                 const SearchParams& params);

// Uniform random walks (mt19937_64, next hop = gen() % choices); distinct
// chains ranked by frequency. rank_score = frequency / rollouts.
std::vector<EvolutionChain> random_walk_baseline(const Graph& g, const NodeId& seed,
                                                 Direction dir, int rollouts,
                                                 uint64_t rng_seed,
                                                 const SearchParams& params);

}  // namespace evograph
