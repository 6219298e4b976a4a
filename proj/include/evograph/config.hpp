#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "evograph/types.hpp"

namespace evograph {

struct GraphConfig {
  int year_tolerance = 1;  // same-cycle preprint allowance
};

struct AliasConfig {
  std::vector<std::string> version_suffixes = {"v2", "v3", "large", "base",
                                               "small", "xl", "turbo"};
};

struct EmbedderConfig {
  std::string kind = "test-hash";
  int dim = 384;
  uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct RerankerConfig {
  std::string kind = "lexical-overlap";
  double logit_scale = 8.0;  // logit = scale * (2*jaccard - 1)
};

struct RetrievalConfig {
  int k = 500;              // paper pool size of a Context
  double bm25_k1 = 1.5;
  double bm25_b = 0.75;
  int rrf_k = 60;
  int stage1_pool = 20;     // duplicate-risk candidates after fusion
  // "lexicographic": alias count ranks first, BM25 breaks ties.
  // "additive": alias_weight*count + bm25_weight*score.
  std::string hybrid_mode = "lexicographic";
  double additive_alias_weight = 1.0;
  double additive_bm25_weight = 1.0;
  EmbedderConfig embedder;
  RerankerConfig reranker;
};

// Lineage search parameters (UCT constants, budgets, ranking weights).
struct SearchParams {
  double c_uct = std::sqrt(2.0);
  double lambda = 0.5;
  int budget = 200;
  int max_depth = 5;
  int top_k = 5;
  double dedup_jaccard = 0.8;
  double dead_end_penalty = -0.05;
  double w_len = 0.4;
  double w_conf = 0.4;
  double w_visits = 0.2;
  int l_max = 0;  // 0 -> derived 2*max_depth + 1
  uint64_t rng_seed = 0;

  int effective_l_max() const { return l_max > 0 ? l_max : 2 * max_depth + 1; }
  void validate() const;
};

struct RedFlagRule {
  std::string dimension;      // dimension whose score triggers the rule
  double threshold = 0.0;     // triggers when score < threshold
  std::string cap_dimension;  // dimension to cap
  double cap_value = 10.0;
};

struct EvaluatorConfig {
  double base = 5.0;
  // Aggregation weights, order: novelty, feasibility, significance,
  // validity, clarity.
  std::array<double, 5> weights = {0.20, 0.20, 0.25, 0.20, 0.15};
  int now_year = 2025;
  int frontier_window_years = 4;  // "recent" = year >= now_year - 4

  // novelty
  double disconnection_max = 2.0;
  double mechanism_distance_max = 1.5;
  double frontier_leaf_bonus = 0.8;

  // feasibility
  double maturity_cap = 3.5;
  double resource_bonus = 0.5;
  double complexity_penalty = 0.5;  // per method beyond the free budget
  int complexity_free_methods = 3;

  // significance
  double indegree_max = 2.0;
  double indegree_halflife = 5.0;
  double indegree_scale = 10.0;  // x/(x+scale) rescaling
  double frontier_presence_bonus = 1.0;
  int frontier_presence_min_edges = 3;
  double popularity_low = 300.0;
  double popularity_high = 1000.0;
  double popularity_low_bonus = 2.5;
  double popularity_high_penalty = -2.0;
  int popularity_head = 5;  // mean popularity over M_d[:5]

  // validity
  double grounding_max = 3.5;
  double ancestry_bonus = 1.0;
  int ancestry_depth = 4;
  double density_max = 1.0;
  double density_strong = 1.0;
  double density_component = 0.5;
  double density_compares = 0.25;

  // clarity
  double recognition_max = 1.0;
  double specificity_peak = 1.0;
  double completeness_per_field = 0.5;
  double length_bonus = 0.5;
  int length_min_words = 20;
  int length_max_words = 200;

  double fallback_overall = 6.5;

  // adjudication
  double restore_related = 0.6;
  double restore_unrelated = 0.9;
  double adjudication_cap_margin = 1.0;
  double low_subscore_threshold = 3.0;
  double low_subscore_cap = 6.0;

  std::vector<RedFlagRule> red_flag_rules;  // default empty = identity pass
};

struct GeneratorConfig {
  int recent_window_years = 2;
  int pair_pool_cap = 20;
  int pair_dag_distance = 3;
  std::string proposer = "none";  // "none" -> deterministic fallback
};

struct BenchConfig {
  int max_hops = 4;
  std::string seeding = "newest";    // or "oldest"
  std::string chain_mode = "best";   // or "union"
  int beam_width = 1;
  int rw_rollouts = 64;
  uint64_t rw_seed = 0;
};

struct Config {
  GraphConfig graph;
  AliasConfig alias;
  RetrievalConfig retrieval;
  SearchParams lineage;
  EvaluatorConfig evaluator;
  GeneratorConfig generator;
  BenchConfig bench;

  static Config load(const std::string& path);
  // Partial documents override defaults; unknown keys are rejected.
  static Config from_json(const nlohmann::json& doc, const std::string& ctx);
  nlohmann::json to_json() const;
};

// splitmix64: the documented seed-splitting scheme. Every component derives
// its sub-seed as split_seed(seed, component_index).
uint64_t splitmix64(uint64_t x);
uint64_t split_seed(uint64_t seed, uint64_t lane);

}  // namespace evograph
