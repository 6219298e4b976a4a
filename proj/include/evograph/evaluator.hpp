#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evograph/alias.hpp"
#include "evograph/config.hpp"
#include "evograph/graph.hpp"
#include "evograph/retrieval.hpp"
#include "json.hpp"

namespace evograph {

// Four-field idea description. At least one field must be non-empty.
struct IdeaProfile {
  std::string problem;
  std::string innovation;
  std::string implementation;
  std::string target;

  bool any() const;
  // Non-empty fields joined with newlines, in declaration order.
  std::string full_text() const;

  static IdeaProfile from_json(const nlohmann::json& j);
  static IdeaProfile from_file(const std::string& path);
};

struct SignalContribution {
  std::string name;
  double value = 0.0;

  bool operator==(const SignalContribution&) const = default;
};

// One dimension's score plus its audit trail. Invariant (machine-checked in
// tests): score == clip(base + sum of signal values), base never listed as a
// signal. Every standard signal appears even when it contributes 0.
struct DimensionScore {
  double score = 0.0;
  double base = 5.0;
  std::vector<SignalContribution> signals;

  double signal_sum() const;

  bool operator==(const DimensionScore&) const = default;
};

struct DimensionScores {
  DimensionScore novelty;
  DimensionScore feasibility;
  DimensionScore significance;
  DimensionScore validity;
  DimensionScore clarity;

  // (N, F, S, V, C) in aggregation-weight order.
  std::array<double, 5> values() const;

  bool operator==(const DimensionScores&) const = default;
};

struct EvaluationReport {
  bool fallback_used = false;
  bool adjudicated = false;
  std::vector<NodeId> methods;  // resolved mentions, first-mention order
  std::optional<DimensionScores> scores;      // absent when fallback_used
  std::optional<DimensionScores> post_flag;   // scores after the red-flag pass
  double omega = 0.0;
  double overall = 0.0;
  DuplicateVerdict duplicate;

  nlohmann::json to_json() const;
};

enum class DuplicateRelation { duplicate, related, unrelated };

DuplicateRelation duplicate_relation_from_string(const std::string& s);
std::string to_string(DuplicateRelation r);

// External reviewer verdict. Sub-scores live in [1,10]; it never produces a
// score from scratch, only bounds the automatic ones.
struct AdjudicatorVerdict {
  DuplicateRelation duplicate_relation = DuplicateRelation::unrelated;
  double coherence = 10.0;         // bounds validity and clarity
  double novelty_validity = 10.0;  // bounds novelty
  double plausibility = 10.0;      // bounds feasibility and significance
};

// Sweet-spot maturity curve over a method's paper count: rises to 3.0 at 500,
// decays to 2.0 at 2000, flat 1.5 beyond.
double feasibility_maturity_curve(long long paper_count);

// +2.5 below mean popularity 300, -2.0 above 1000, linear in between.
double significance_frontier_regularizer(double mean_popularity);

// Count-based feasibility core, exposed so property tests can sweep paper
// counts without building graphs.
DimensionScore feasibility_from_counts(const std::vector<long long>& paper_counts,
                                       bool all_full_text,
                                       const EvaluatorConfig& cfg = {});

// Dimension scorers. `methods` is the resolved M_d in first-mention order;
// `ctx` carries the incident causal edges (E_d) and bottleneck records (B_d).
//
// Novelty: disconnection fraction in the co-utilization relation (up to
// +2.0), nearest-mechanism Jaccard distance of the innovation text's content
// tokens (up to +1.5), frontier-leaf bonus (+0.8: no strong-causal influence
// successors and introduced inside the recency window), duplicate penalty.
DimensionScore novelty_score(const std::vector<NodeId>& methods, const Context& ctx,
                             const DuplicateVerdict& duplicate, const Graph& g,
                             const CorpusIndex& index,
                             const std::string& innovation_text,
                             const EvaluatorConfig& cfg = {});

// Feasibility: capped mean maturity curve, +0.5 when every method's
// introducing paper carries body sections, -0.5 per method beyond three.
DimensionScore feasibility_score(const std::vector<NodeId>& methods, const Graph& g,
                                 const CorpusIndex& index,
                                 const EvaluatorConfig& cfg = {});

// Significance: time-decayed non-background in-degree of the introducing
// papers mapped through x/(x+10) onto [0,2], +1.0 frontier presence (>= 3
// recent edges building on a method), popularity regularizer over the first
// five methods.
DimensionScore significance_score(const std::vector<NodeId>& methods,
                                  const Context& ctx, const Graph& g,
                                  const CorpusIndex& index,
                                  const EvaluatorConfig& cfg = {});

// Validity: bottleneck grounding (problem text names a stored record's
// dimension tag and shares a token bigram with its description; +3.5 scaled
// by the matched fraction), ancestry consistency (+1.0 when all method pairs
// sit within undirected distance 4 in the method-relation projection),
// type-weighted mean edge density over E_d.
DimensionScore validity_score(const std::vector<NodeId>& methods, const Context& ctx,
                              const Graph& g, const IdeaProfile& profile,
                              const EvaluatorConfig& cfg = {});

// Clarity: recognition rate (resolved methods over distinct method-like
// tokens: a token qualifies when it carries a digit, an interior capital, or
// is fully upper-case), specificity peaking at |M_d| in {2,3}, +0.5 per
// non-empty field among problem/innovation/target, +0.5 for 20-200 words.
DimensionScore clarity_score(const IdeaProfile& profile,
                             const std::vector<NodeId>& methods,
                             const EvaluatorConfig& cfg = {});

// Applies the configured threshold rules (default: none, identity). Each
// triggered rule caps one dimension by appending an audited contribution.
DimensionScores red_flag_pass(const DimensionScores& scores,
                              const EvaluatorConfig& cfg = {});

// Sum of the four conjunctive cross-dimension adjustments; range [-0.6, 0.9].
double cross_regularizer(const DimensionScores& post_flag);

// clip(0.20 N + 0.20 F + 0.25 S + 0.20 V + 0.15 C + omega) onto [1,10].
double aggregate_overall(const DimensionScores& post_flag, double omega,
                         const EvaluatorConfig& cfg = {});

// Full pipeline: resolve methods, duplicate risk, five dimensions, red-flag
// pass, cross regularizer, aggregate. No resolvable method: fallback report
// with overall 6.5 and absent dimension scores.
EvaluationReport evaluate_idea(const IdeaProfile& profile, const Graph& g,
                               const AliasRegistry& registry,
                               const EmbeddingProvider& embedder,
                               const RerankProvider& reranker,
                               const EvaluatorConfig& cfg = {},
                               const RetrievalConfig& retrieval_cfg = {});

// Part A: restore the automatic duplicate penalty at 0% (duplicate), 60%
// (related) or 90% (unrelated) and recompute novelty and everything
// downstream. Part B: cap each dimension at the matching verdict sub-score
// + 1.0, cap the overall at 6.0 when any sub-score is below 3. The final
// overall never exceeds the Part-A-restored overall. Fallback reports are
// rejected with ContractError.
EvaluationReport apply_adjudication(const EvaluationReport& report,
                                    const AdjudicatorVerdict& verdict,
                                    const EvaluatorConfig& cfg = {});

}  // namespace evograph
