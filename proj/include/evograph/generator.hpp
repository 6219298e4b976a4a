#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evograph/config.hpp"
#include "evograph/graph.hpp"
#include "evograph/lineage.hpp"
#include "evograph/retrieval.hpp"
#include "json.hpp"

namespace evograph {

// Edge reference carrying enough stored content (including the verbatim
// bottleneck quote) that proposals can be assembled from the summary alone.
struct EdgeCite {
  size_t edge_index = 0;
  NodeId source;
  NodeId target;
  EdgeType type = EdgeType::background;
  std::string bottleneck_quote;

  nlohmann::json to_json() const;
  bool operator==(const EdgeCite&) const = default;
};

struct AxisEntry {
  BottleneckDimension dimension = BottleneckDimension::accuracy;
  std::vector<EdgeCite> support;

  bool operator==(const AxisEntry&) const = default;
};

struct DisconnectedPair {
  NodeId first;
  NodeId second;
  std::string first_name;   // canonical names, ready for prose
  std::string second_name;

  bool operator==(const DisconnectedPair&) const = default;
};

// Structural gaps mined from a retrieval context plus reconstructed chains.
// Entries are ordered by support count (descending), ties by taxonomy order;
// pairs by id.
struct GapSummary {
  std::vector<AxisEntry> open_axes;           // bottlenecks nothing improves
  std::vector<AxisEntry> recent_directions;   // improvement dims on recent edges
  std::vector<AxisEntry> sacrifice_axes;      // dims sacrificed repeatedly
  std::vector<DisconnectedPair> disconnected_pairs;

  bool empty() const;
  nlohmann::json to_json() const;
};

enum class Strategy {
  bottleneck_resolution,
  trend_extrapolation,
  cross_pollination,
  paradigm_challenge,
};

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

struct StrategyChoice {
  Strategy tag = Strategy::trend_extrapolation;
  bool degenerate = false;  // set when every pattern list was empty
};

struct Certificate {
  NodeId edge_source;
  NodeId edge_target;
  EdgeType edge_type = EdgeType::background;
  std::string bottleneck_quote;
  std::string justification;
};

struct Proposal {
  std::string title;
  std::string body;
  Strategy strategy = Strategy::trend_extrapolation;
  std::optional<Certificate> certificate;  // absent only on degenerate output
  bool fallback = false;
  bool degenerate = false;

  nlohmann::json to_json() const;
};

// Text-in/text-out proposer port. Implementations may throw; the pipeline
// treats any exception as proposer failure.
class ProposerPort {
 public:
  virtual ~ProposerPort() = default;
  virtual std::string propose(const std::string& payload) = 0;
};

// Mines the four gap patterns over the pooled edges (context edges plus the
// chains' edges): open axes (a stored bottleneck dimension no pooled
// strong-causal edge improves), recent improvement directions (source year
// within the recency window), sacrifice axes (dimension sacrificed at least
// twice), and disconnected method pairs (no co-utilization and no
// method-relation path within the configured distance) over the query
// methods plus the top context methods by mention count.
GapSummary build_gap_summary(const Context& ctx,
                             const std::vector<EvolutionChain>& chains,
                             const Graph& g, const CorpusIndex& index,
                             int now_year, const GeneratorConfig& cfg = {});

// Highest-priority strategy whose pattern list is non-empty:
// bottleneck_resolution > paradigm_challenge > cross_pollination >
// trend_extrapolation. All empty: degenerate trend_extrapolation.
StrategyChoice select_strategy(const GapSummary& summary);

// True iff the (source, target, type) edge exists, is causal, and the quote
// is byte-identical to the stored bottleneck quote.
bool verify_certificate(const Certificate& certificate, const Graph& g);

// Deterministic template proposal from the highest-count pattern entry that
// carries edge support (ties by strategy priority), certified by its first
// supporting edge. Pairs-only summaries produce an uncertified degenerate
// cross-pollination proposal; empty summaries an "insufficient context" one.
Proposal fallback_proposal(const GapSummary& summary);

// Sends the strategy-specific payload to the proposer, parses
// {title, body, certificate}, retries once on parse failure, verifies the
// certificate, and falls back on any failure. Always returns a proposal
// satisfying the certificate invariant. A null proposer goes straight to the
// fallback.
Proposal generate_proposal(const GapSummary& summary, const StrategyChoice& strategy,
                           ProposerPort* proposer, const Graph& g);

}  // namespace evograph
