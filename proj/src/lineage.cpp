#include "evograph/lineage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace evograph {

double temporal_coherence(std::optional<int> delta_tau) {
  if (!delta_tau) return 0.70;
  int d = *delta_tau;
  if (d < -1)
    throw ContractError("temporal_coherence: gap < -1 must be hard-filtered upstream");
  if (d < 0) return 0.40;
  if (d == 0) return 0.85;
  if (d <= 3) return 1.00;
  if (d <= 6) return 0.80;
  return std::max(0.30, 1.00 - 0.08 * (d - 6));
}

double edge_prior(const Edge& e, std::optional<int> delta_tau) {
  if (!is_causal(e.type))
    throw ContractError("edge_prior requires a causal edge");
  if (!e.evidence)
    throw ContractError("edge_prior requires an evidence record");
  return e.evidence->confidence * temporal_coherence(delta_tau);
}

double sgt_uct(const TreeNodeStats& parent, const TreeNodeStats& child,
               double prior, const SearchParams& params) {
  if (child.visits == 0) return std::numeric_limits<double>::infinity();
  double exploit = child.total_value / child.visits;
  double explore =
      params.c_uct * std::sqrt(std::log(static_cast<double>(parent.visits)) /
                               static_cast<double>(child.visits));
  return exploit + explore + params.lambda * prior;
}

double rollout_reward(
    const std::vector<std::pair<Edge, std::optional<int>>>& path_edges,
    const SearchParams& params) {
  if (path_edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [e, dt] : path_edges) sum += edge_prior(e, dt);
  double mean = sum / static_cast<double>(path_edges.size());
  double len_factor =
      std::min(1.0, static_cast<double>(path_edges.size()) / params.max_depth);
  return mean * len_factor;
}

namespace {

struct Candidate {
  size_t edge_idx;
  NodeId neighbor;
  double conf;
  double prior;
};

// Valid hops from `node`: strong-causal, year gap >= -1, target not in
// `blocked`, edge not masked. Ordered (confidence desc, neighbor id asc) by
// strong_causal_successors.
std::vector<Candidate> valid_moves(const Graph& g, const NodeId& node, Direction dir,
                                   const std::set<NodeId>& blocked,
                                   const EdgeMask* masked) {
  std::vector<Candidate> out;
  for (const auto& [idx, neighbor] : strong_causal_successors(g, node, dir)) {
    if (masked && masked->count(idx)) continue;
    if (blocked.count(neighbor)) continue;
    const Edge& e = g.edges()[idx];
    auto dt = edge_delta_tau(g, e);
    if (dt && *dt < -1) continue;
    out.push_back({idx, neighbor, e.evidence->confidence, edge_prior(e, dt)});
  }
  return out;
}

struct TNode {
  NodeId id;
  int parent = -1;
  size_t edge_from_parent = SIZE_MAX;
  double prior = 0.0;
  int depth = 0;
  TreeNodeStats stats;
  std::vector<int> children;
  std::vector<Candidate> untried;
  bool initialized = false;
};

class DirectionSearch {
 public:
  DirectionSearch(const Graph& g, const NodeId& seed, Direction dir,
                  const SearchParams& params, const EdgeMask* masked)
      : g_(g), dir_(dir), params_(params), masked_(masked) {
    TNode root;
    root.id = seed;
    tree_.push_back(std::move(root));
  }

  DirectionResult run() {
    for (int it = 0; it < params_.budget; ++it) iterate();
    return finish();
  }

 private:
  std::vector<int> path_to(int node) const {
    std::vector<int> path;
    for (int cur = node; cur != -1; cur = tree_[cur].parent) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::set<NodeId> blocked_along(const std::vector<int>& path) const {
    std::set<NodeId> blocked;
    for (int i : path) blocked.insert(tree_[i].id);
    return blocked;
  }

  std::vector<std::pair<Edge, std::optional<int>>> edges_along(
      const std::vector<int>& path) const {
    std::vector<std::pair<Edge, std::optional<int>>> edges;
    for (size_t i = 1; i < path.size(); ++i) {
      const Edge& e = g_.edges()[tree_[path[i]].edge_from_parent];
      edges.emplace_back(e, edge_delta_tau(g_, e));
    }
    return edges;
  }

  void ensure_initialized(int node, const std::set<NodeId>& blocked) {
    TNode& n = tree_[node];
    if (n.initialized) return;
    n.untried = valid_moves(g_, n.id, dir_, blocked, masked_);
    n.initialized = true;
  }

  // Backpropagates one iteration's outcome along the selection path.
  // `dead_end_inside_tree` marks the last path node itself as the dead-end
  // leaf (its proper ancestors take the penalty); `dead_end_beyond_tree`
  // marks a rollout dead end past the tree (every path node is an ancestor).
  void backprop(const std::vector<int>& path, double reward,
                bool dead_end_inside_tree, bool dead_end_beyond_tree) {
    stats_.reward_credited += reward;
    for (size_t i = 0; i < path.size(); ++i) {
      TNode& n = tree_[path[i]];
      n.stats.visits += 1;
      n.stats.total_value += reward;
      bool penalized = (dead_end_beyond_tree) ||
                       (dead_end_inside_tree && i + 1 < path.size());
      if (penalized) {
        n.stats.total_value += params_.dead_end_penalty;
        if (path[i] == 0) stats_.penalty_credited += params_.dead_end_penalty;
      }
    }
  }

  void iterate() {
    stats_.iterations += 1;
    int cur = 0;
    for (;;) {
      std::vector<int> path = path_to(cur);
      std::set<NodeId> blocked = blocked_along(path);
      ensure_initialized(cur, blocked);
      TNode& node = tree_[cur];

      if (node.depth >= params_.max_depth) {
        backprop(path, rollout_reward(edges_along(path), params_), false, false);
        return;
      }
      if (!node.untried.empty()) {
        expand_and_rollout(cur, path, blocked);
        return;
      }
      if (node.children.empty()) {
        // Dead-end leaf revisited: penalty flows to its proper ancestors.
        backprop(path, rollout_reward(edges_along(path), params_), true, false);
        return;
      }
      cur = select_child(cur);
    }
  }

  int select_child(int node) const {
    const TNode& n = tree_[node];
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c : n.children) {
      const TNode& child = tree_[c];
      double score = sgt_uct(n.stats, child.stats, child.prior, params_);
      bool better;
      if (best == -1) {
        better = true;
      } else if (score != best_score) {
        better = score > best_score;
      } else {
        const TNode& cur_best = tree_[best];
        better = child.prior != cur_best.prior ? child.prior > cur_best.prior
                                               : child.id < cur_best.id;
      }
      if (better) {
        best = c;
        best_score = score;
      }
    }
    return best;
  }

  void expand_and_rollout(int node, const std::vector<int>& path,
                          std::set<NodeId>& blocked) {
    Candidate cand = tree_[node].untried.front();
    tree_[node].untried.erase(tree_[node].untried.begin());

    TNode child;
    child.id = cand.neighbor;
    child.parent = node;
    child.edge_from_parent = cand.edge_idx;
    child.prior = cand.prior;
    child.depth = tree_[node].depth + 1;
    int child_idx = static_cast<int>(tree_.size());
    tree_.push_back(std::move(child));
    tree_[node].children.push_back(child_idx);

    std::vector<int> full_path = path;
    full_path.push_back(child_idx);
    blocked.insert(cand.neighbor);

    auto edges = edges_along(full_path);
    NodeId cur_id = cand.neighbor;
    int cur_depth = tree_[child_idx].depth;
    bool dead_end_beyond = false;
    bool dead_end_inside = false;
    while (cur_depth < params_.max_depth) {
      auto moves = valid_moves(g_, cur_id, dir_, blocked, masked_);
      if (moves.empty()) {
        if (cur_id == tree_[child_idx].id && cur_depth == tree_[child_idx].depth)
          dead_end_inside = true;
        else
          dead_end_beyond = true;
        break;
      }
      const Candidate* best = &moves.front();
      for (const auto& m : moves)
        if (m.prior > best->prior) best = &m;
      const Edge& e = g_.edges()[best->edge_idx];
      edges.emplace_back(e, edge_delta_tau(g_, e));
      blocked.insert(best->neighbor);
      cur_id = best->neighbor;
      ++cur_depth;
    }
    backprop(full_path, rollout_reward(edges, params_), dead_end_inside,
             dead_end_beyond);
  }

  DirectionResult finish() {
    stats_.tree_size = static_cast<int>(tree_.size());
    for (const auto& n : tree_)
      stats_.max_node_visits = std::max(stats_.max_node_visits, n.stats.visits);
    stats_.root_visits = tree_[0].stats.visits;
    stats_.root_total = tree_[0].stats.total_value;

    std::vector<DirectionPath> paths;
    for (size_t i = 0; i < tree_.size(); ++i) {
      if (!tree_[i].children.empty()) continue;
      DirectionPath p;
      for (int idx : path_to(static_cast<int>(i))) {
        const TNode& n = tree_[idx];
        p.nodes.push_back(n.id);
        p.node_visits.push_back(n.stats.visits);
        if (n.parent != -1) p.edge_indices.push_back(n.edge_from_parent);
      }
      p.accumulated_q = tree_[i].stats.total_value;
      p.leaf_visits = tree_[i].stats.visits;
      paths.push_back(std::move(p));
    }
    std::sort(paths.begin(), paths.end(),
              [](const DirectionPath& a, const DirectionPath& b) {
                if (a.accumulated_q != b.accumulated_q)
                  return a.accumulated_q > b.accumulated_q;
                if (a.leaf_visits != b.leaf_visits)
                  return a.leaf_visits > b.leaf_visits;
                return a.nodes < b.nodes;
              });
    if (paths.size() > static_cast<size_t>(params_.top_k))
      paths.resize(static_cast<size_t>(params_.top_k));

    DirectionResult result;
    result.paths = std::move(paths);
    result.stats = stats_;
    return result;
  }

  const Graph& g_;
  Direction dir_;
  const SearchParams& params_;
  const EdgeMask* masked_;
  std::vector<TNode> tree_;
  SearchStats stats_;
};

EvolutionChain finalize_chain(const Graph& g, std::vector<NodeId> nodes,
                              std::vector<size_t> edge_indices,
                              std::vector<int> visits_excl_seed,
                              const std::string& provenance) {
  EvolutionChain chain;
  chain.nodes = std::move(nodes);
  chain.edge_indices = std::move(edge_indices);
  for (size_t idx : chain.edge_indices) chain.edges.push_back(g.edges()[idx]);
  if (!chain.edges.empty()) {
    double sum = 0.0;
    for (const auto& e : chain.edges) sum += e.evidence->confidence;
    chain.mean_confidence = sum / static_cast<double>(chain.edges.size());
  }
  if (!visits_excl_seed.empty()) {
    double sum = 0.0;
    for (int v : visits_excl_seed) sum += v;
    chain.mean_visits = sum / static_cast<double>(visits_excl_seed.size());
  }
  chain.provenance = provenance;
  return chain;
}

double node_jaccard(const EvolutionChain& a, const EvolutionChain& b) {
  std::set<NodeId> sa(a.nodes.begin(), a.nodes.end());
  std::set<NodeId> sb(b.nodes.begin(), b.nodes.end());
  size_t inter = 0;
  for (const auto& n : sa) inter += sb.count(n);
  size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<EvolutionChain> dedup_ranked(std::vector<EvolutionChain> chains,
                                         double threshold) {
  std::vector<EvolutionChain> kept;
  for (auto& c : chains) {
    bool duplicate = false;
    for (const auto& k : kept) {
      if (node_jaccard(c, k) >= threshold) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(std::move(c));
  }
  return kept;
}

}  // namespace

DirectionResult mcts_direction_search(const Graph& g, const NodeId& seed,
                                      Direction dir, const SearchParams& params,
                                      const EdgeMask* masked) {
  if (!g.has_node(seed)) throw LookupError("unknown seed node '" + seed + "'");
  params.validate();
  return DirectionSearch(g, seed, dir, params, masked).run();
}

std::vector<EvolutionChain> splice_and_dedup(const Graph& g,
                                             const DirectionResult& backward,
                                             const DirectionResult& forward,
                                             const NodeId& seed,
                                             const SearchParams& params) {
  double max_visits = std::max(backward.stats.max_node_visits,
                               forward.stats.max_node_visits);
  std::vector<EvolutionChain> candidates;
  for (const auto& bp : backward.paths) {
    for (const auto& fp : forward.paths) {
      if (bp.nodes.empty() || bp.nodes.front() != seed ||
          fp.nodes.empty() || fp.nodes.front() != seed)
        throw ContractError("splice_and_dedup paths must start at the seed");

      // Backward arm reversed (oldest first), then the forward arm.
      std::vector<NodeId> nodes(bp.nodes.rbegin(), bp.nodes.rend());
      nodes.insert(nodes.end(), fp.nodes.begin() + 1, fp.nodes.end());
      std::vector<size_t> edges(bp.edge_indices.rbegin(), bp.edge_indices.rend());
      edges.insert(edges.end(), fp.edge_indices.begin(), fp.edge_indices.end());

      std::vector<int> visits(bp.node_visits.rbegin(), bp.node_visits.rend());
      visits.pop_back();  // drop the seed
      visits.insert(visits.end(), fp.node_visits.begin() + 1, fp.node_visits.end());

      auto chain = finalize_chain(g, std::move(nodes), std::move(edges),
                                  std::move(visits), "primary");
      chain.rank_score = rank_chain(chain, params, max_visits);
      candidates.push_back(std::move(chain));
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const EvolutionChain& a, const EvolutionChain& b) {
              if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
              return a.nodes < b.nodes;
            });
  return dedup_ranked(std::move(candidates), params.dedup_jaccard);
}

double rank_chain(const EvolutionChain& chain, const SearchParams& params,
                  double max_visits) {
  if (chain.nodes.empty()) return 0.0;
  double len_term = static_cast<double>(chain.nodes.size()) /
                    static_cast<double>(params.effective_l_max());
  double visit_term =
      max_visits > 0.0 ? std::min(1.0, chain.mean_visits / max_visits) : 0.0;
  return params.w_len * len_term + params.w_conf * chain.mean_confidence +
         params.w_visits * visit_term;
}

namespace {

// A node is a branch point when it has >= 2 valid strong-causal children in
// one direction of which exactly one edge is covered by the primary chains.
std::vector<NodeId> find_branch_points(const Graph& g,
                                       const std::vector<EvolutionChain>& primary,
                                       const EdgeMask& covered) {
  std::set<NodeId> on_chains;
  for (const auto& c : primary)
    for (const auto& n : c.nodes) on_chains.insert(n);

  std::vector<NodeId> points;
  for (const auto& node : on_chains) {
    for (Direction dir : {Direction::backward, Direction::forward}) {
      auto moves = valid_moves(g, node, dir, {}, nullptr);
      if (moves.size() < 2) continue;
      size_t covered_here = 0;
      for (const auto& m : moves) covered_here += covered.count(m.edge_idx);
      if (covered_here == 1) {
        points.push_back(node);
        break;
      }
    }
  }
  return points;
}

}  // namespace

NodeId lineage_search_seed(const Graph& g, const NodeId& method_id) {
  bool method_has_edges =
      !strong_causal_successors(g, method_id, Direction::forward).empty() ||
      !strong_causal_successors(g, method_id, Direction::backward).empty();
  if (method_has_edges) return method_id;
  const MethodNode* m = g.method(method_id);
  if (m && m->introduced_by) {
    const NodeId& paper = *m->introduced_by;
    if (!strong_causal_successors(g, paper, Direction::forward).empty() ||
        !strong_causal_successors(g, paper, Direction::backward).empty())
      return paper;
  }
  return method_id;
}

LineageResult reconstruct_lineage(const std::string& query, const Graph& g,
                                  const AliasRegistry& registry,
                                  const SearchParams& params) {
  params.validate();
  LineageResult result;

  auto method_id = registry.exact_match(query);
  if (!method_id || !g.method(*method_id)) {
    result.diagnostic = "no exact match for query '" + query + "'";
    return result;
  }

  NodeId seed = lineage_search_seed(g, *method_id);

  auto backward = mcts_direction_search(g, seed, Direction::backward, params);
  auto forward = mcts_direction_search(g, seed, Direction::forward, params);
  auto primary = splice_and_dedup(g, backward, forward, seed, params);
  if (primary.size() > static_cast<size_t>(params.top_k))
    primary.resize(static_cast<size_t>(params.top_k));

  EdgeMask covered;
  for (const auto& c : primary)
    for (size_t idx : c.edge_indices) covered.insert(idx);

  // One level of branch re-search with the primary-covered edges masked and
  // half the budget.
  std::vector<EvolutionChain> merged = primary;
  SearchParams half = params;
  half.budget = std::max(1, params.budget / 2);
  for (const auto& point : find_branch_points(g, primary, covered)) {
    auto b2 = mcts_direction_search(g, point, Direction::backward, half, &covered);
    auto f2 = mcts_direction_search(g, point, Direction::forward, half, &covered);
    for (auto& chain : splice_and_dedup(g, b2, f2, point, half)) {
      chain.provenance = "branch";
      merged.push_back(std::move(chain));
    }
  }

  // Primary chains win dedup ties against branch chains of equal rank.
  std::sort(merged.begin(), merged.end(),
            [](const EvolutionChain& a, const EvolutionChain& b) {
              if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
              bool ap = a.provenance == "primary";
              bool bp = b.provenance == "primary";
              if (ap != bp) return ap;
              return a.nodes < b.nodes;
            });
  result.chains = dedup_ranked(std::move(merged), params.dedup_jaccard);
  return result;
}

std::vector<EvolutionChain> beam_search_baseline(const Graph& g, const NodeId& seed,
                                                 Direction dir, int beam_width,
                                                 const SearchParams& params) {
  if (!g.has_node(seed)) throw LookupError("unknown seed node '" + seed + "'");
  if (beam_width <= 0) throw ParamError("beam_width must be positive");
  params.validate();

  struct Partial {
    std::vector<NodeId> nodes;
    std::vector<size_t> edges;
    double score = 0.0;  // mean edge prior
  };
  auto better = [](const Partial& a, const Partial& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.nodes < b.nodes;
  };

  std::vector<Partial> pool{{{seed}, {}, 0.0}};
  std::vector<Partial> completed;
  for (int depth = 0; depth < params.max_depth && !pool.empty(); ++depth) {
    std::vector<Partial> extensions;
    for (const auto& p : pool) {
      std::set<NodeId> blocked(p.nodes.begin(), p.nodes.end());
      auto moves = valid_moves(g, p.nodes.back(), dir, blocked, nullptr);
      if (moves.empty()) {
        completed.push_back(p);
        continue;
      }
      for (const auto& m : moves) {
        Partial ext = p;
        ext.nodes.push_back(m.neighbor);
        ext.edges.push_back(m.edge_idx);
        double sum = 0.0;
        for (size_t idx : ext.edges) {
          const Edge& e = g.edges()[idx];
          sum += edge_prior(e, edge_delta_tau(g, e));
        }
        ext.score = sum / static_cast<double>(ext.edges.size());
        extensions.push_back(std::move(ext));
      }
    }
    std::sort(extensions.begin(), extensions.end(), better);
    if (extensions.size() > static_cast<size_t>(beam_width))
      extensions.resize(static_cast<size_t>(beam_width));
    pool = std::move(extensions);
  }
  completed.insert(completed.end(), pool.begin(), pool.end());
  std::sort(completed.begin(), completed.end(), better);

  std::vector<EvolutionChain> chains;
  for (auto& p : completed) {
    std::vector<NodeId> nodes = p.nodes;
    std::vector<size_t> edges = p.edges;
    if (dir == Direction::backward) {
      std::reverse(nodes.begin(), nodes.end());
      std::reverse(edges.begin(), edges.end());
    }
    auto chain = finalize_chain(g, std::move(nodes), std::move(edges), {}, "beam");
    chain.rank_score = p.score;
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::vector<EvolutionChain> random_walk_baseline(const Graph& g, const NodeId& seed,
                                                 Direction dir, int rollouts,
                                                 uint64_t rng_seed,
                                                 const SearchParams& params) {
  if (!g.has_node(seed)) throw LookupError("unknown seed node '" + seed + "'");
  if (rollouts <= 0) throw ParamError("rollouts must be positive");
  params.validate();

  std::mt19937_64 rng(rng_seed);
  std::map<std::vector<NodeId>, std::pair<int, std::vector<size_t>>> walks;
  for (int r = 0; r < rollouts; ++r) {
    std::vector<NodeId> nodes{seed};
    std::vector<size_t> edges;
    std::set<NodeId> blocked{seed};
    while (static_cast<int>(edges.size()) < params.max_depth) {
      auto moves = valid_moves(g, nodes.back(), dir, blocked, nullptr);
      if (moves.empty()) break;
      // Uniform pick via modulo: documented, reproducible across platforms.
      const Candidate& m = moves[rng() % moves.size()];
      nodes.push_back(m.neighbor);
      edges.push_back(m.edge_idx);
      blocked.insert(m.neighbor);
    }
    auto& entry = walks[nodes];
    entry.first += 1;
    entry.second = edges;
  }

  struct Counted {
    std::vector<NodeId> nodes;
    std::vector<size_t> edges;
    int count;
  };
  std::vector<Counted> counted;
  for (auto& [nodes, entry] : walks)
    counted.push_back({nodes, entry.second, entry.first});
  std::sort(counted.begin(), counted.end(), [](const Counted& a, const Counted& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.nodes < b.nodes;
  });

  std::vector<EvolutionChain> chains;
  for (auto& c : counted) {
    std::vector<NodeId> nodes = c.nodes;
    std::vector<size_t> edges = c.edges;
    if (dir == Direction::backward) {
      std::reverse(nodes.begin(), nodes.end());
      std::reverse(edges.begin(), edges.end());
    }
    auto chain = finalize_chain(g, std::move(nodes), std::move(edges), {}, "random-walk");
    chain.mean_visits = c.count;
    chain.rank_score = static_cast<double>(c.count) / rollouts;
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace evograph
