#include "evograph/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <set>

#include "evograph/json_io.hpp"
#include "evograph/text.hpp"

namespace evograph {

namespace {

constexpr const char* kPenaltySignal = "duplicate penalty";

double clip(double x) { return std::clamp(x, 1.0, 10.0); }

DimensionScore make_score(double base, std::vector<SignalContribution> signals) {
  DimensionScore d;
  d.base = base;
  d.signals = std::move(signals);
  d.score = clip(d.base + d.signal_sum());
  return d;
}

// Caps a dimension by appending an audited delta contribution, so the
// breakdown identity survives every adjustment.
void cap_dimension(DimensionScore& d, double cap, const std::string& label) {
  if (d.score <= cap) return;
  double delta = cap - (d.base + d.signal_sum());
  d.signals.push_back({label, delta});
  d.score = clip(d.base + d.signal_sum());
}

DimensionScore& dimension_by_name(DimensionScores& s, const std::string& name) {
  if (name == "novelty") return s.novelty;
  if (name == "feasibility") return s.feasibility;
  if (name == "significance") return s.significance;
  if (name == "validity") return s.validity;
  if (name == "clarity") return s.clarity;
  throw ParamError("unknown dimension '" + name + "'");
}

nlohmann::json dimension_to_json(const DimensionScore& d) {
  nlohmann::json signals = nlohmann::json::array();
  for (const auto& s : d.signals)
    signals.push_back({{"name", s.name}, {"value", s.value}});
  return {{"score", d.score}, {"base", d.base}, {"signals", signals}};
}

nlohmann::json dimensions_to_json(const DimensionScores& s) {
  return {{"novelty", dimension_to_json(s.novelty)},
          {"feasibility", dimension_to_json(s.feasibility)},
          {"significance", dimension_to_json(s.significance)},
          {"validity", dimension_to_json(s.validity)},
          {"clarity", dimension_to_json(s.clarity)}};
}

bool paper_has_body(const Graph& g, const NodeId& paper_id) {
  const PaperNode* p = g.paper(paper_id);
  if (!p) return false;
  for (const auto& [name, text] : p->sections)
    if (!text.empty()) return true;
  return false;
}

// Distinct introducing papers of the given methods, in method order.
std::vector<NodeId> introducing_papers(const std::vector<NodeId>& methods,
                                       const Graph& g) {
  std::vector<NodeId> papers;
  std::set<NodeId> seen;
  for (const auto& m : methods) {
    const MethodNode* node = g.method(m);
    if (!node || !node->introduced_by) continue;
    if (seen.insert(*node->introduced_by).second) papers.push_back(*node->introduced_by);
  }
  return papers;
}

// True when every pair of sources is within `depth` undirected hops in the
// method-relation projection. Methods absent from the projection count as
// unreachable.
bool ancestry_consistent(const std::vector<NodeId>& methods, const Graph& g,
                         int depth) {
  if (methods.size() < 2) return true;
  auto adjacency = project_method_relations(g, g.seed_relations()).undirected();
  for (size_t i = 0; i < methods.size(); ++i) {
    // BFS from methods[i] limited to `depth` hops.
    std::map<NodeId, int> dist{{methods[i], 0}};
    std::deque<NodeId> queue{methods[i]};
    while (!queue.empty()) {
      NodeId cur = queue.front();
      queue.pop_front();
      int d = dist[cur];
      if (d == depth) continue;
      auto it = adjacency.find(cur);
      if (it == adjacency.end()) continue;
      for (const auto& next : it->second)
        if (dist.emplace(next, d + 1).second) queue.push_back(next);
    }
    for (size_t jj = i + 1; jj < methods.size(); ++jj)
      if (!dist.count(methods[jj])) return false;
  }
  return true;
}

// Method-like raw tokens: after trimming edge punctuation, the token carries
// a digit, an interior capital letter, or is fully upper-case.
std::set<std::string> method_like_tokens(const std::string& raw) {
  std::set<std::string> out;
  size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    size_t begin = i;
    while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    std::string tok = raw.substr(begin, i - begin);
    size_t lo = 0, hi = tok.size();
    while (lo < hi && std::ispunct(static_cast<unsigned char>(tok[lo]))) ++lo;
    while (hi > lo && std::ispunct(static_cast<unsigned char>(tok[hi - 1]))) --hi;
    tok = tok.substr(lo, hi - lo);
    if (tok.empty()) continue;

    bool has_digit = false, interior_upper = false;
    bool all_upper = tok.size() >= 2;
    for (size_t k = 0; k < tok.size(); ++k) {
      unsigned char c = static_cast<unsigned char>(tok[k]);
      if (std::isdigit(c)) has_digit = true;
      if (k > 0 && std::isupper(c)) interior_upper = true;
      if (!std::isupper(c)) all_upper = false;
    }
    if (has_digit || interior_upper || all_upper) {
      std::string key = tok;
      for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.insert(key);
    }
  }
  return out;
}

int count_words(const std::string& text) {
  int words = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = std::isspace(c);
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

}  // namespace

bool IdeaProfile::any() const {
  return !problem.empty() || !innovation.empty() || !implementation.empty() ||
         !target.empty();
}

std::string IdeaProfile::full_text() const {
  std::string out;
  for (const std::string* field : {&problem, &innovation, &implementation, &target}) {
    if (field->empty()) continue;
    if (!out.empty()) out += '\n';
    out += *field;
  }
  return out;
}

IdeaProfile IdeaProfile::from_json(const nlohmann::json& j) {
  jsonio::expect_object(j, "idea profile");
  jsonio::check_keys(j, {"problem", "innovation", "implementation", "target"}, "idea profile");
  IdeaProfile p;
  p.problem = jsonio::get_string(j, "problem", "idea profile");
  p.innovation = jsonio::get_string(j, "innovation", "idea profile");
  p.implementation = jsonio::get_string(j, "implementation", "idea profile");
  p.target = jsonio::get_string(j, "target", "idea profile");
  if (!p.any()) throw ParseError("idea profile: every field is empty");
  return p;
}

IdeaProfile IdeaProfile::from_file(const std::string& path) {
  return from_json(jsonio::parse(jsonio::read_file(path), "idea profile"));
}

double DimensionScore::signal_sum() const {
  double sum = 0.0;
  for (const auto& s : signals) sum += s.value;
  return sum;
}

std::array<double, 5> DimensionScores::values() const {
  return {novelty.score, feasibility.score, significance.score, validity.score,
          clarity.score};
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json j{{"fallback_used", fallback_used},
                   {"adjudicated", adjudicated},
                   {"overall", overall},
                   {"omega", omega},
                   {"methods", methods}};
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& [paper, score] : duplicate.top_candidates)
    candidates.push_back({{"paper", paper}, {"score", score}});
  j["duplicate"] = {{"best_score", duplicate.best_score},
                    {"penalty", duplicate.penalty},
                    {"top_candidates", candidates}};
  j["scores"] = scores ? dimensions_to_json(*scores) : nlohmann::json();
  j["post_flag_scores"] = post_flag ? dimensions_to_json(*post_flag) : nlohmann::json();
  return j;
}

DuplicateRelation duplicate_relation_from_string(const std::string& s) {
  if (s == "duplicate") return DuplicateRelation::duplicate;
  if (s == "related") return DuplicateRelation::related;
  if (s == "unrelated") return DuplicateRelation::unrelated;
  throw ParseError("unknown duplicate relation '" + s + "'");
}

std::string to_string(DuplicateRelation r) {
  switch (r) {
    case DuplicateRelation::duplicate: return "duplicate";
    case DuplicateRelation::related: return "related";
    case DuplicateRelation::unrelated: return "unrelated";
  }
  throw ParamError("invalid duplicate relation");
}

double feasibility_maturity_curve(long long paper_count) {
  double pc = static_cast<double>(paper_count);
  if (paper_count <= 500) return 1.5 + 1.5 * pc / 500.0;
  if (paper_count <= 2000) return 3.0 - (pc - 500.0) / 1500.0;
  return 1.5;
}

double significance_frontier_regularizer(double mean_popularity) {
  if (mean_popularity < 300.0) return 2.5;
  if (mean_popularity > 1000.0) return -2.0;
  return 2.5 + (mean_popularity - 300.0) / (1000.0 - 300.0) * (-2.0 - 2.5);
}

DimensionScore feasibility_from_counts(const std::vector<long long>& paper_counts,
                                       bool all_full_text,
                                       const EvaluatorConfig& cfg) {
  double curve_sum = 0.0;
  for (long long pc : paper_counts) curve_sum += feasibility_maturity_curve(pc);
  double maturity =
      paper_counts.empty()
          ? 0.0
          : std::min(cfg.maturity_cap, curve_sum / static_cast<double>(paper_counts.size()));
  double resource = all_full_text && !paper_counts.empty() ? cfg.resource_bonus : 0.0;
  double complexity =
      -cfg.complexity_penalty *
      std::max<double>(0.0, static_cast<double>(paper_counts.size()) -
                                cfg.complexity_free_methods);
  return make_score(cfg.base, {{"maturity", maturity},
                               {"resource availability", resource},
                               {"complexity", complexity}});
}

DimensionScore novelty_score(const std::vector<NodeId>& methods, const Context& ctx,
                             const DuplicateVerdict& duplicate, const Graph& g,
                             const CorpusIndex& index,
                             const std::string& innovation_text,
                             const EvaluatorConfig& cfg) {
  // Disconnection: fraction of method pairs never co-resolving in one paper.
  size_t pairs = 0, disconnected = 0;
  for (size_t i = 0; i < methods.size(); ++i)
    for (size_t j = i + 1; j < methods.size(); ++j) {
      ++pairs;
      if (!index.co_utilized(methods[i], methods[j])) ++disconnected;
    }
  double disconnection =
      pairs == 0 ? 0.0
                 : cfg.disconnection_max * static_cast<double>(disconnected) /
                       static_cast<double>(pairs);

  // Distance from the innovation text to the nearest stored mechanism.
  auto innovation_tokens = content_tokens(innovation_text);
  std::set<std::string> innovation_set(innovation_tokens.begin(),
                                       innovation_tokens.end());
  double min_distance = 0.0;
  bool any_mechanism = false;
  for (size_t idx : ctx.edge_indices) {
    const Edge& e = g.edges()[idx];
    if (!e.evidence) continue;
    auto mech = content_tokens(e.evidence->mechanism_description);
    std::set<std::string> mech_set(mech.begin(), mech.end());
    double distance = 1.0 - jaccard(innovation_set, mech_set);
    if (!any_mechanism || distance < min_distance) min_distance = distance;
    any_mechanism = true;
  }
  double mechanism = any_mechanism ? cfg.mechanism_distance_max * min_distance : 0.0;

  // Frontier leaf: nothing has built on the method yet and it is recent.
  double leaf = 0.0;
  for (const auto& m : methods) {
    auto year = g.year_of(m);
    if (!year || *year < cfg.now_year - cfg.frontier_window_years) continue;
    bool built_upon = !strong_causal_successors(g, m, Direction::forward).empty();
    const MethodNode* node = g.method(m);
    if (!built_upon && node && node->introduced_by)
      built_upon =
          !strong_causal_successors(g, *node->introduced_by, Direction::forward).empty();
    if (!built_upon) {
      leaf = cfg.frontier_leaf_bonus;
      break;
    }
  }

  return make_score(cfg.base, {{"disconnection", disconnection},
                               {"mechanism distance", mechanism},
                               {"frontier leaf", leaf},
                               {kPenaltySignal, duplicate.penalty}});
}

DimensionScore feasibility_score(const std::vector<NodeId>& methods, const Graph& g,
                                 const CorpusIndex& index,
                                 const EvaluatorConfig& cfg) {
  std::vector<long long> counts;
  bool all_full_text = true;
  for (const auto& m : methods) {
    auto it = index.paper_count.find(m);
    counts.push_back(it == index.paper_count.end() ? 0 : it->second);
    const MethodNode* node = g.method(m);
    if (!node || !node->introduced_by || !paper_has_body(g, *node->introduced_by))
      all_full_text = false;
  }
  return feasibility_from_counts(counts, all_full_text, cfg);
}

DimensionScore significance_score(const std::vector<NodeId>& methods,
                                  const Context& ctx, const Graph& g,
                                  const CorpusIndex& index,
                                  const EvaluatorConfig& cfg) {
  (void)ctx;
  // Time-decayed citations of the introducing papers, half-life in years.
  double decayed = 0.0;
  for (const auto& p : introducing_papers(methods, g)) {
    for (size_t idx : g.edges_to(p)) {
      const Edge& e = g.edges()[idx];
      if (!is_causal(e.type)) continue;
      auto year = g.year_of(e.source);
      if (!year) continue;
      double age = std::max(0.0, static_cast<double>(cfg.now_year - *year));
      decayed += std::exp2(-age / cfg.indegree_halflife);
    }
  }
  double indegree =
      decayed > 0.0 ? cfg.indegree_max * decayed / (decayed + cfg.indegree_scale) : 0.0;

  // Frontier presence: a method at least three recent works build on.
  int window_start = cfg.now_year - cfg.frontier_window_years;
  double frontier = 0.0;
  for (const auto& m : methods) {
    std::set<size_t> incident;
    for (size_t idx : g.edges_to(m)) incident.insert(idx);
    const MethodNode* node = g.method(m);
    if (node && node->introduced_by)
      for (size_t idx : g.edges_to(*node->introduced_by)) incident.insert(idx);
    int recent = 0;
    for (size_t idx : incident) {
      const Edge& e = g.edges()[idx];
      if (!is_causal(e.type)) continue;
      auto year = g.year_of(e.source);
      if (year && *year >= window_start) ++recent;
    }
    if (recent >= cfg.frontier_presence_min_edges) {
      frontier = cfg.frontier_presence_bonus;
      break;
    }
  }

  size_t head = std::min<size_t>(methods.size(), cfg.popularity_head);
  double popularity_sum = 0.0;
  for (size_t i = 0; i < head; ++i) {
    auto it = index.paper_count.find(methods[i]);
    popularity_sum += it == index.paper_count.end() ? 0.0 : it->second;
  }
  double regularizer =
      head == 0 ? 0.0
                : significance_frontier_regularizer(popularity_sum /
                                                    static_cast<double>(head));

  return make_score(cfg.base, {{"in-degree", indegree},
                               {"frontier presence", frontier},
                               {"frontier regularizer", regularizer}});
}

DimensionScore validity_score(const std::vector<NodeId>& methods, const Context& ctx,
                              const Graph& g, const IdeaProfile& profile,
                              const EvaluatorConfig& cfg) {
  std::string problem_norm = normalize_surface(profile.problem);
  auto problem_bigrams = token_bigrams(profile.problem);
  size_t matched = 0;
  for (const auto& record : ctx.bottlenecks) {
    if (problem_norm.find(to_string(record.dimension)) == std::string::npos) continue;
    auto description_bigrams = token_bigrams(record.description);
    bool shares = false;
    for (const auto& bg : description_bigrams)
      if (problem_bigrams.count(bg)) {
        shares = true;
        break;
      }
    if (shares) ++matched;
  }
  double grounding = ctx.bottlenecks.empty()
                         ? 0.0
                         : cfg.grounding_max * static_cast<double>(matched) /
                               static_cast<double>(ctx.bottlenecks.size());

  double ancestry =
      ancestry_consistent(methods, g, cfg.ancestry_depth) ? cfg.ancestry_bonus : 0.0;

  double weight_sum = 0.0;
  for (size_t idx : ctx.edge_indices) {
    switch (g.edges()[idx].type) {
      case EdgeType::uses_component: weight_sum += cfg.density_component; break;
      case EdgeType::compares: weight_sum += cfg.density_compares; break;
      case EdgeType::background: break;
      default: weight_sum += cfg.density_strong; break;
    }
  }
  double density = ctx.edge_indices.empty()
                       ? 0.0
                       : cfg.density_max * weight_sum /
                             static_cast<double>(ctx.edge_indices.size());

  return make_score(cfg.base, {{"grounding", grounding},
                               {"ancestry", ancestry},
                               {"edge density", density}});
}

DimensionScore clarity_score(const IdeaProfile& profile,
                             const std::vector<NodeId>& methods,
                             const EvaluatorConfig& cfg) {
  std::string text = profile.full_text();
  size_t candidates = method_like_tokens(text).size();
  double recognition =
      cfg.recognition_max *
      std::min(1.0, static_cast<double>(methods.size()) /
                        static_cast<double>(std::max<size_t>(1, candidates)));

  double n = static_cast<double>(methods.size());
  double specificity;
  if (n <= 1.0)
    specificity = 0.0;
  else if (n <= 3.0)
    specificity = cfg.specificity_peak;
  else if (n >= 6.0)
    specificity = -cfg.specificity_peak;
  else
    specificity = cfg.specificity_peak - (n - 3.0) * (2.0 * cfg.specificity_peak / 3.0);

  double completeness = 0.0;
  for (const std::string* field : {&profile.problem, &profile.innovation, &profile.target})
    if (!field->empty()) completeness += cfg.completeness_per_field;

  int words = count_words(text);
  double length =
      words >= cfg.length_min_words && words <= cfg.length_max_words ? cfg.length_bonus : 0.0;

  return make_score(cfg.base, {{"recognition", recognition},
                               {"specificity", specificity},
                               {"completeness", completeness},
                               {"length", length}});
}

DimensionScores red_flag_pass(const DimensionScores& scores,
                              const EvaluatorConfig& cfg) {
  DimensionScores out = scores;
  for (const auto& rule : cfg.red_flag_rules) {
    double trigger = dimension_by_name(out, rule.dimension).score;
    if (trigger < rule.threshold)
      cap_dimension(dimension_by_name(out, rule.cap_dimension), rule.cap_value,
                    "red flag: " + rule.dimension);
  }
  return out;
}

double cross_regularizer(const DimensionScores& post_flag) {
  auto v = post_flag.values();
  double n = v[0], f = v[1], s = v[2];
  double omega = 0.0;
  if (n >= 7.0 && f < 4.0) omega -= 0.6;
  if (v[3] >= 7.0 && f >= 7.0) omega += 0.2;
  if (s >= 6.0)
    omega += 0.4;
  else if (s >= 5.0)
    omega += 0.2;
  double mn = *std::min_element(v.begin(), v.end());
  double mx = *std::max_element(v.begin(), v.end());
  if (mx - mn <= 2.0 && mn >= 5.0) omega += 0.3;
  return omega;
}

double aggregate_overall(const DimensionScores& post_flag, double omega,
                         const EvaluatorConfig& cfg) {
  auto v = post_flag.values();
  double sum = omega;
  for (size_t i = 0; i < v.size(); ++i) sum += cfg.weights[i] * v[i];
  return clip(sum);
}

EvaluationReport evaluate_idea(const IdeaProfile& profile, const Graph& g,
                               const AliasRegistry& registry,
                               const EmbeddingProvider& embedder,
                               const RerankProvider& reranker,
                               const EvaluatorConfig& cfg,
                               const RetrievalConfig& retrieval_cfg) {
  EvaluationReport report;
  std::string text = profile.full_text();
  report.duplicate = duplicate_risk(text, g, embedder, reranker, retrieval_cfg);

  std::set<NodeId> seen;
  for (const auto& mention : resolve_mentions(text, registry))
    if (seen.insert(mention.method).second) report.methods.push_back(mention.method);

  if (report.methods.empty()) {
    report.fallback_used = true;
    report.overall = cfg.fallback_overall;
    return report;
  }

  CorpusIndex index = CorpusIndex::build(g, registry);
  Context ctx = retrieve_context(text, g, registry, index, retrieval_cfg);

  DimensionScores scores;
  scores.novelty =
      novelty_score(report.methods, ctx, report.duplicate, g, index, profile.innovation, cfg);
  scores.feasibility = feasibility_score(report.methods, g, index, cfg);
  scores.significance = significance_score(report.methods, ctx, g, index, cfg);
  scores.validity = validity_score(report.methods, ctx, g, profile, cfg);
  scores.clarity = clarity_score(profile, report.methods, cfg);

  report.scores = scores;
  report.post_flag = red_flag_pass(scores, cfg);
  report.omega = cross_regularizer(*report.post_flag);
  report.overall = aggregate_overall(*report.post_flag, report.omega, cfg);
  return report;
}

EvaluationReport apply_adjudication(const EvaluationReport& report,
                                    const AdjudicatorVerdict& verdict,
                                    const EvaluatorConfig& cfg) {
  if (report.fallback_used || !report.scores)
    throw ContractError("cannot adjudicate a fallback report");

  double restore_rate = 0.0;
  switch (verdict.duplicate_relation) {
    case DuplicateRelation::duplicate: restore_rate = 0.0; break;
    case DuplicateRelation::related: restore_rate = cfg.restore_related; break;
    case DuplicateRelation::unrelated: restore_rate = cfg.restore_unrelated; break;
  }
  double restored_penalty = report.duplicate.penalty * (1.0 - restore_rate);

  EvaluationReport out = report;
  out.adjudicated = true;
  out.duplicate.penalty = restored_penalty;

  // Part A: swap in the restored penalty and recompute novelty downstream.
  DimensionScores scores = *report.scores;
  bool found = false;
  for (auto& signal : scores.novelty.signals)
    if (signal.name == kPenaltySignal) {
      signal.value = restored_penalty;
      found = true;
    }
  if (!found) scores.novelty.signals.push_back({kPenaltySignal, restored_penalty});
  scores.novelty.score = clip(scores.novelty.base + scores.novelty.signal_sum());
  out.scores = scores;

  DimensionScores post = red_flag_pass(scores, cfg);
  double restored_overall = aggregate_overall(post, cross_regularizer(post), cfg);

  // Part B: one-sided caps from the verdict sub-scores.
  cap_dimension(post.novelty, verdict.novelty_validity + cfg.adjudication_cap_margin,
                "adjudication cap");
  cap_dimension(post.validity, verdict.coherence + cfg.adjudication_cap_margin,
                "adjudication cap");
  cap_dimension(post.clarity, verdict.coherence + cfg.adjudication_cap_margin,
                "adjudication cap");
  cap_dimension(post.feasibility, verdict.plausibility + cfg.adjudication_cap_margin,
                "adjudication cap");
  cap_dimension(post.significance, verdict.plausibility + cfg.adjudication_cap_margin,
                "adjudication cap");

  out.post_flag = post;
  out.omega = cross_regularizer(post);
  double capped_overall = aggregate_overall(post, out.omega, cfg);
  if (std::min({verdict.coherence, verdict.novelty_validity, verdict.plausibility}) <
      cfg.low_subscore_threshold)
    capped_overall = std::min(capped_overall, cfg.low_subscore_cap);

  // Adjudication never raises the overall above the restored value.
  out.overall = std::min(capped_overall, restored_overall);
  return out;
}

}  // namespace evograph
