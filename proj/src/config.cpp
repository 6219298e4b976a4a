#include "evograph/config.hpp"

#include <cmath>

#include "evograph/json_io.hpp"

namespace evograph {

using jsonio::json;

void SearchParams::validate() const {
  if (budget <= 0 || max_depth <= 0 || top_k <= 0)
    throw ParamError("budget, max_depth and top_k must be positive");
  if (dedup_jaccard < 0.0 || dedup_jaccard > 1.0)
    throw ParamError("dedup_jaccard must lie in [0, 1]");
  if (std::fabs(w_len + w_conf + w_visits - 1.0) > 1e-9)
    throw ParamError("rank weights must sum to 1");
  if (l_max < 0) throw ParamError("l_max must be positive (or 0 for derived)");
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t split_seed(uint64_t seed, uint64_t lane) {
  return splitmix64(seed + splitmix64(lane));
}

namespace {

double num(const json& j, const char* key, double fallback, const std::string& ctx) {
  auto v = jsonio::get_double(j, key, ctx);
  return v ? *v : fallback;
}

int num_int(const json& j, const char* key, int fallback, const std::string& ctx) {
  auto v = jsonio::get_int(j, key, ctx);
  return v ? *v : fallback;
}

uint64_t num_u64(const json& j, const char* key, uint64_t fallback, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() && !it->is_number_unsigned())
    throw ParseError(ctx + ": field '" + key + "' must be an integer");
  return it->get<uint64_t>();
}

std::string str(const json& j, const char* key, const std::string& fallback,
                const std::string& ctx) {
  return jsonio::get_string(j, key, ctx, fallback);
}

}  // namespace

Config Config::from_json(const json& doc, const std::string& ctx) {
  jsonio::expect_object(doc, ctx);
  jsonio::check_keys(doc,
                     {"graph", "alias", "retrieval", "lineage", "evaluator",
                      "generator", "bench"},
                     ctx);
  Config c;

  if (auto g = doc.find("graph"); g != doc.end()) {
    jsonio::expect_object(*g, ctx + " graph");
    jsonio::check_keys(*g, {"year_tolerance"}, ctx + " graph");
    c.graph.year_tolerance = num_int(*g, "year_tolerance", c.graph.year_tolerance, ctx);
  }

  if (auto a = doc.find("alias"); a != doc.end()) {
    jsonio::expect_object(*a, ctx + " alias");
    jsonio::check_keys(*a, {"version_suffixes"}, ctx + " alias");
    if (auto v = a->find("version_suffixes"); v != a->end()) {
      if (!v->is_array()) throw ParseError(ctx + ": version_suffixes must be an array");
      c.alias.version_suffixes.clear();
      for (const auto& s : *v) {
        if (!s.is_string()) throw ParseError(ctx + ": version_suffixes must be strings");
        c.alias.version_suffixes.push_back(s.get<std::string>());
      }
    }
  }

  if (auto r = doc.find("retrieval"); r != doc.end()) {
    jsonio::expect_object(*r, ctx + " retrieval");
    jsonio::check_keys(*r,
                       {"k", "bm25_k1", "bm25_b", "rrf_k", "stage1_pool",
                        "hybrid_mode", "additive_alias_weight",
                        "additive_bm25_weight", "embedder", "reranker"},
                       ctx + " retrieval");
    auto& rc = c.retrieval;
    rc.k = num_int(*r, "k", rc.k, ctx);
    rc.bm25_k1 = num(*r, "bm25_k1", rc.bm25_k1, ctx);
    rc.bm25_b = num(*r, "bm25_b", rc.bm25_b, ctx);
    rc.rrf_k = num_int(*r, "rrf_k", rc.rrf_k, ctx);
    rc.stage1_pool = num_int(*r, "stage1_pool", rc.stage1_pool, ctx);
    rc.hybrid_mode = str(*r, "hybrid_mode", rc.hybrid_mode, ctx);
    if (rc.hybrid_mode != "lexicographic" && rc.hybrid_mode != "additive")
      throw ParseError(ctx + ": hybrid_mode must be lexicographic or additive");
    rc.additive_alias_weight = num(*r, "additive_alias_weight", rc.additive_alias_weight, ctx);
    rc.additive_bm25_weight = num(*r, "additive_bm25_weight", rc.additive_bm25_weight, ctx);
    if (auto e = r->find("embedder"); e != r->end()) {
      jsonio::expect_object(*e, ctx + " embedder");
      jsonio::check_keys(*e, {"kind", "dim", "seed"}, ctx + " embedder");
      rc.embedder.kind = str(*e, "kind", rc.embedder.kind, ctx);
      rc.embedder.dim = num_int(*e, "dim", rc.embedder.dim, ctx);
      rc.embedder.seed = num_u64(*e, "seed", rc.embedder.seed, ctx);
    }
    if (auto rr = r->find("reranker"); rr != r->end()) {
      jsonio::expect_object(*rr, ctx + " reranker");
      jsonio::check_keys(*rr, {"kind", "logit_scale"}, ctx + " reranker");
      rc.reranker.kind = str(*rr, "kind", rc.reranker.kind, ctx);
      rc.reranker.logit_scale = num(*rr, "logit_scale", rc.reranker.logit_scale, ctx);
    }
  }

  if (auto l = doc.find("lineage"); l != doc.end()) {
    jsonio::expect_object(*l, ctx + " lineage");
    jsonio::check_keys(*l,
                       {"c_uct", "lambda", "budget", "max_depth", "top_k",
                        "dedup_jaccard", "dead_end_penalty", "w_len", "w_conf",
                        "w_visits", "l_max", "rng_seed"},
                       ctx + " lineage");
    auto& sp = c.lineage;
    sp.c_uct = num(*l, "c_uct", sp.c_uct, ctx);
    sp.lambda = num(*l, "lambda", sp.lambda, ctx);
    sp.budget = num_int(*l, "budget", sp.budget, ctx);
    sp.max_depth = num_int(*l, "max_depth", sp.max_depth, ctx);
    sp.top_k = num_int(*l, "top_k", sp.top_k, ctx);
    sp.dedup_jaccard = num(*l, "dedup_jaccard", sp.dedup_jaccard, ctx);
    sp.dead_end_penalty = num(*l, "dead_end_penalty", sp.dead_end_penalty, ctx);
    sp.w_len = num(*l, "w_len", sp.w_len, ctx);
    sp.w_conf = num(*l, "w_conf", sp.w_conf, ctx);
    sp.w_visits = num(*l, "w_visits", sp.w_visits, ctx);
    sp.l_max = num_int(*l, "l_max", sp.l_max, ctx);
    sp.rng_seed = num_u64(*l, "rng_seed", sp.rng_seed, ctx);
    sp.validate();
  }

  if (auto e = doc.find("evaluator"); e != doc.end()) {
    jsonio::expect_object(*e, ctx + " evaluator");
    jsonio::check_keys(
        *e,
        {"base", "weights", "now_year", "frontier_window_years",
         "disconnection_max", "mechanism_distance_max", "frontier_leaf_bonus",
         "maturity_cap", "resource_bonus", "complexity_penalty",
         "complexity_free_methods", "indegree_max", "indegree_halflife",
         "indegree_scale", "frontier_presence_bonus",
         "frontier_presence_min_edges", "popularity_low", "popularity_high",
         "popularity_low_bonus", "popularity_high_penalty", "popularity_head",
         "grounding_max", "ancestry_bonus", "ancestry_depth", "density_max",
         "density_strong", "density_component", "density_compares",
         "recognition_max", "specificity_peak", "completeness_per_field",
         "length_bonus", "length_min_words", "length_max_words",
         "fallback_overall", "restore_related", "restore_unrelated",
         "adjudication_cap_margin", "low_subscore_threshold",
         "low_subscore_cap", "red_flag_rules"},
        ctx + " evaluator");
    auto& ec = c.evaluator;
    ec.base = num(*e, "base", ec.base, ctx);
    if (auto w = e->find("weights"); w != e->end()) {
      if (!w->is_array() || w->size() != 5)
        throw ParseError(ctx + ": weights must be an array of 5 numbers");
      for (size_t i = 0; i < 5; ++i) ec.weights[i] = (*w)[i].get<double>();
    }
    ec.now_year = num_int(*e, "now_year", ec.now_year, ctx);
    ec.frontier_window_years = num_int(*e, "frontier_window_years", ec.frontier_window_years, ctx);
    ec.disconnection_max = num(*e, "disconnection_max", ec.disconnection_max, ctx);
    ec.mechanism_distance_max = num(*e, "mechanism_distance_max", ec.mechanism_distance_max, ctx);
    ec.frontier_leaf_bonus = num(*e, "frontier_leaf_bonus", ec.frontier_leaf_bonus, ctx);
    ec.maturity_cap = num(*e, "maturity_cap", ec.maturity_cap, ctx);
    ec.resource_bonus = num(*e, "resource_bonus", ec.resource_bonus, ctx);
    ec.complexity_penalty = num(*e, "complexity_penalty", ec.complexity_penalty, ctx);
    ec.complexity_free_methods = num_int(*e, "complexity_free_methods", ec.complexity_free_methods, ctx);
    ec.indegree_max = num(*e, "indegree_max", ec.indegree_max, ctx);
    ec.indegree_halflife = num(*e, "indegree_halflife", ec.indegree_halflife, ctx);
    ec.indegree_scale = num(*e, "indegree_scale", ec.indegree_scale, ctx);
    ec.frontier_presence_bonus = num(*e, "frontier_presence_bonus", ec.frontier_presence_bonus, ctx);
    ec.frontier_presence_min_edges = num_int(*e, "frontier_presence_min_edges", ec.frontier_presence_min_edges, ctx);
    ec.popularity_low = num(*e, "popularity_low", ec.popularity_low, ctx);
    ec.popularity_high = num(*e, "popularity_high", ec.popularity_high, ctx);
    ec.popularity_low_bonus = num(*e, "popularity_low_bonus", ec.popularity_low_bonus, ctx);
    ec.popularity_high_penalty = num(*e, "popularity_high_penalty", ec.popularity_high_penalty, ctx);
    ec.popularity_head = num_int(*e, "popularity_head", ec.popularity_head, ctx);
    ec.grounding_max = num(*e, "grounding_max", ec.grounding_max, ctx);
    ec.ancestry_bonus = num(*e, "ancestry_bonus", ec.ancestry_bonus, ctx);
    ec.ancestry_depth = num_int(*e, "ancestry_depth", ec.ancestry_depth, ctx);
    ec.density_max = num(*e, "density_max", ec.density_max, ctx);
    ec.density_strong = num(*e, "density_strong", ec.density_strong, ctx);
    ec.density_component = num(*e, "density_component", ec.density_component, ctx);
    ec.density_compares = num(*e, "density_compares", ec.density_compares, ctx);
    ec.recognition_max = num(*e, "recognition_max", ec.recognition_max, ctx);
    ec.specificity_peak = num(*e, "specificity_peak", ec.specificity_peak, ctx);
    ec.completeness_per_field = num(*e, "completeness_per_field", ec.completeness_per_field, ctx);
    ec.length_bonus = num(*e, "length_bonus", ec.length_bonus, ctx);
    ec.length_min_words = num_int(*e, "length_min_words", ec.length_min_words, ctx);
    ec.length_max_words = num_int(*e, "length_max_words", ec.length_max_words, ctx);
    ec.fallback_overall = num(*e, "fallback_overall", ec.fallback_overall, ctx);
    ec.restore_related = num(*e, "restore_related", ec.restore_related, ctx);
    ec.restore_unrelated = num(*e, "restore_unrelated", ec.restore_unrelated, ctx);
    ec.adjudication_cap_margin = num(*e, "adjudication_cap_margin", ec.adjudication_cap_margin, ctx);
    ec.low_subscore_threshold = num(*e, "low_subscore_threshold", ec.low_subscore_threshold, ctx);
    ec.low_subscore_cap = num(*e, "low_subscore_cap", ec.low_subscore_cap, ctx);
    if (auto rf = e->find("red_flag_rules"); rf != e->end()) {
      if (!rf->is_array()) throw ParseError(ctx + ": red_flag_rules must be an array");
      for (const auto& rule : *rf) {
        jsonio::expect_object(rule, ctx + " red_flag_rules");
        jsonio::check_keys(rule, {"dimension", "threshold", "cap_dimension", "cap_value"},
                           ctx + " red_flag_rules");
        RedFlagRule r;
        r.dimension = jsonio::require_string(rule, "dimension", ctx);
        r.threshold = jsonio::require_double(rule, "threshold", ctx);
        r.cap_dimension = jsonio::require_string(rule, "cap_dimension", ctx);
        r.cap_value = jsonio::require_double(rule, "cap_value", ctx);
        ec.red_flag_rules.push_back(std::move(r));
      }
    }
  }

  if (auto g = doc.find("generator"); g != doc.end()) {
    jsonio::expect_object(*g, ctx + " generator");
    jsonio::check_keys(*g, {"recent_window_years", "pair_pool_cap",
                            "pair_dag_distance", "proposer"},
                       ctx + " generator");
    c.generator.recent_window_years = num_int(*g, "recent_window_years", c.generator.recent_window_years, ctx);
    c.generator.pair_pool_cap = num_int(*g, "pair_pool_cap", c.generator.pair_pool_cap, ctx);
    c.generator.pair_dag_distance = num_int(*g, "pair_dag_distance", c.generator.pair_dag_distance, ctx);
    c.generator.proposer = str(*g, "proposer", c.generator.proposer, ctx);
  }

  if (auto b = doc.find("bench"); b != doc.end()) {
    jsonio::expect_object(*b, ctx + " bench");
    jsonio::check_keys(*b, {"max_hops", "seeding", "chain_mode", "beam_width",
                            "rw_rollouts", "rw_seed"}, ctx + " bench");
    c.bench.max_hops = num_int(*b, "max_hops", c.bench.max_hops, ctx);
    c.bench.beam_width = num_int(*b, "beam_width", c.bench.beam_width, ctx);
    c.bench.rw_rollouts = num_int(*b, "rw_rollouts", c.bench.rw_rollouts, ctx);
    c.bench.rw_seed = num_u64(*b, "rw_seed", c.bench.rw_seed, ctx);
    c.bench.seeding = str(*b, "seeding", c.bench.seeding, ctx);
    c.bench.chain_mode = str(*b, "chain_mode", c.bench.chain_mode, ctx);
    if (c.bench.seeding != "newest" && c.bench.seeding != "oldest")
      throw ParseError(ctx + ": bench.seeding must be newest or oldest");
    if (c.bench.chain_mode != "best" && c.bench.chain_mode != "union")
      throw ParseError(ctx + ": bench.chain_mode must be best or union");
  }

  return c;
}

Config Config::load(const std::string& path) {
  return from_json(jsonio::parse(jsonio::read_file(path), path), path);
}

json Config::to_json() const {
  json doc;
  doc["graph"] = {{"year_tolerance", graph.year_tolerance}};
  doc["alias"] = {{"version_suffixes", alias.version_suffixes}};
  doc["retrieval"] = {
      {"k", retrieval.k},
      {"bm25_k1", retrieval.bm25_k1},
      {"bm25_b", retrieval.bm25_b},
      {"rrf_k", retrieval.rrf_k},
      {"stage1_pool", retrieval.stage1_pool},
      {"hybrid_mode", retrieval.hybrid_mode},
      {"additive_alias_weight", retrieval.additive_alias_weight},
      {"additive_bm25_weight", retrieval.additive_bm25_weight},
      {"embedder",
       {{"kind", retrieval.embedder.kind},
        {"dim", retrieval.embedder.dim},
        {"seed", retrieval.embedder.seed}}},
      {"reranker",
       {{"kind", retrieval.reranker.kind},
        {"logit_scale", retrieval.reranker.logit_scale}}}};
  doc["lineage"] = {{"c_uct", lineage.c_uct},
                    {"lambda", lineage.lambda},
                    {"budget", lineage.budget},
                    {"max_depth", lineage.max_depth},
                    {"top_k", lineage.top_k},
                    {"dedup_jaccard", lineage.dedup_jaccard},
                    {"dead_end_penalty", lineage.dead_end_penalty},
                    {"w_len", lineage.w_len},
                    {"w_conf", lineage.w_conf},
                    {"w_visits", lineage.w_visits},
                    {"l_max", lineage.l_max},
                    {"rng_seed", lineage.rng_seed}};
  json rf = json::array();
  for (const auto& r : evaluator.red_flag_rules)
    rf.push_back({{"dimension", r.dimension},
                  {"threshold", r.threshold},
                  {"cap_dimension", r.cap_dimension},
                  {"cap_value", r.cap_value}});
  doc["evaluator"] = {
      {"base", evaluator.base},
      {"weights", evaluator.weights},
      {"now_year", evaluator.now_year},
      {"frontier_window_years", evaluator.frontier_window_years},
      {"disconnection_max", evaluator.disconnection_max},
      {"mechanism_distance_max", evaluator.mechanism_distance_max},
      {"frontier_leaf_bonus", evaluator.frontier_leaf_bonus},
      {"maturity_cap", evaluator.maturity_cap},
      {"resource_bonus", evaluator.resource_bonus},
      {"complexity_penalty", evaluator.complexity_penalty},
      {"complexity_free_methods", evaluator.complexity_free_methods},
      {"indegree_max", evaluator.indegree_max},
      {"indegree_halflife", evaluator.indegree_halflife},
      {"indegree_scale", evaluator.indegree_scale},
      {"frontier_presence_bonus", evaluator.frontier_presence_bonus},
      {"frontier_presence_min_edges", evaluator.frontier_presence_min_edges},
      {"popularity_low", evaluator.popularity_low},
      {"popularity_high", evaluator.popularity_high},
      {"popularity_low_bonus", evaluator.popularity_low_bonus},
      {"popularity_high_penalty", evaluator.popularity_high_penalty},
      {"popularity_head", evaluator.popularity_head},
      {"grounding_max", evaluator.grounding_max},
      {"ancestry_bonus", evaluator.ancestry_bonus},
      {"ancestry_depth", evaluator.ancestry_depth},
      {"density_max", evaluator.density_max},
      {"density_strong", evaluator.density_strong},
      {"density_component", evaluator.density_component},
      {"density_compares", evaluator.density_compares},
      {"recognition_max", evaluator.recognition_max},
      {"specificity_peak", evaluator.specificity_peak},
      {"completeness_per_field", evaluator.completeness_per_field},
      {"length_bonus", evaluator.length_bonus},
      {"length_min_words", evaluator.length_min_words},
      {"length_max_words", evaluator.length_max_words},
      {"fallback_overall", evaluator.fallback_overall},
      {"restore_related", evaluator.restore_related},
      {"restore_unrelated", evaluator.restore_unrelated},
      {"adjudication_cap_margin", evaluator.adjudication_cap_margin},
      {"low_subscore_threshold", evaluator.low_subscore_threshold},
      {"low_subscore_cap", evaluator.low_subscore_cap},
      {"red_flag_rules", rf}};
  doc["generator"] = {{"recent_window_years", generator.recent_window_years},
                      {"pair_pool_cap", generator.pair_pool_cap},
                      {"pair_dag_distance", generator.pair_dag_distance},
                      {"proposer", generator.proposer}};
  doc["bench"] = {{"max_hops", bench.max_hops},
                  {"seeding", bench.seeding},
                  {"chain_mode", bench.chain_mode},
                  {"beam_width", bench.beam_width},
                  {"rw_rollouts", bench.rw_rollouts},
                  {"rw_seed", bench.rw_seed}};
  return doc;
}

}  // namespace evograph
