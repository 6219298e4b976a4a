#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evograph/types.hpp"

namespace evograph {

// In-memory typed evolution graph. Instances are immutable after
// construction; build() enforces every store-level invariant and throws the
// matching error otherwise.
class Graph {
 public:
  Graph() = default;

  // Validates and indexes the given records. Checks, in order: id uniqueness
  // across all node classes, canonical-name uniqueness and non-emptiness,
  // introduced_by referring to a paper, edge endpoints existing, stubs never
  // sourcing edges, evidence present exactly on causal edges with non-empty
  // quote fields and confidence in [0,1], (source,target,type) duplicates
  // dropped first-wins with a warning, strong-causal acyclicity, and seed
  // endpoints naming method nodes.
  static Graph build(std::vector<PaperNode> papers,
                     std::vector<MethodNode> methods,
                     std::vector<StubNode> stubs,
                     std::vector<Edge> edges,
                     std::vector<MethodSeed> seeds = {});

  const std::vector<PaperNode>& papers() const { return papers_; }
  const std::vector<MethodNode>& methods() const { return methods_; }
  const std::vector<StubNode>& stubs() const { return stubs_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<MethodSeed>& seed_relations() const { return seeds_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool has_node(const NodeId& id) const;
  std::optional<NodeKind> kind_of(const NodeId& id) const;
  const PaperNode* paper(const NodeId& id) const;
  const MethodNode* method(const NodeId& id) const;
  const StubNode* stub(const NodeId& id) const;

  // Papers/stubs report their own year; methods inherit the year of their
  // introducing paper. Unknown node -> LookupError.
  std::optional<int> year_of(const NodeId& id) const;

  // Full text of a paper, or of a method's introducing paper. Null for stubs,
  // methods without introduced_by; LookupError for unknown ids.
  std::optional<std::string> citing_text(const NodeId& id) const;

  // Methods introduced by the given paper, in load order.
  std::vector<NodeId> methods_of_paper(const NodeId& paper_id) const;

  // Edge indices (into edges()) with the given source / target.
  const std::vector<size_t>& edges_from(const NodeId& source) const;
  const std::vector<size_t>& edges_to(const NodeId& target) const;

  std::map<NodeId, int> year_map() const;

  // Node-set + edge-sequence equality (node order is irrelevant, edge order
  // is not).
  bool operator==(const Graph& other) const;

 private:
  std::vector<PaperNode> papers_;
  std::vector<MethodNode> methods_;
  std::vector<StubNode> stubs_;
  std::vector<Edge> edges_;
  std::vector<MethodSeed> seeds_;
  std::vector<std::string> warnings_;

  std::map<NodeId, size_t> paper_index_;
  std::map<NodeId, size_t> method_index_;
  std::map<NodeId, size_t> stub_index_;
  std::map<NodeId, std::vector<size_t>> out_by_source_;
  std::map<NodeId, std::vector<size_t>> in_by_target_;
  std::map<NodeId, std::vector<NodeId>> methods_by_paper_;
};

// Loads nodes.jsonl / edges.jsonl (+ optional method_seeds.jsonl). Any
// malformed line aborts the whole load with a file:line ParseError; store
// invariant violations surface as the corresponding Graph::build error.
Graph load_graph(const std::string& nodes_path, const std::string& edges_path,
                 const std::string& seeds_path = "");

// Writes nodes.jsonl, edges.jsonl and method_seeds.jsonl under dir using
// canonical serialization (sorted object keys, one record per line, nodes
// ordered papers/methods/stubs by id, edges in store order). Loading the
// dump reproduces an equal graph and a byte-identical re-dump.
void dump_graph(const Graph& g, const std::string& dir);

enum class Direction { forward, backward };

const char* to_string(Direction d);

// Year gap of a stored edge: year(source) - year(target); absent when either
// endpoint's year is unknown.
std::optional<int> edge_delta_tau(const Graph& g, const Edge& e);

// Strong-causal neighbors of a node. forward follows influence (stored edges
// pointing at the node; neighbor = citing source), backward follows ancestry
// (stored edges sourced at the node; neighbor = cited target). Ordered by
// edge confidence desc, neighbor id asc. Returned pairs are (edge index into
// g.edges(), neighbor id).
std::vector<std::pair<size_t, NodeId>> strong_causal_successors(
    const Graph& g, const NodeId& node, Direction dir);

// Deterministic post-check of a single causal edge against the store.
struct ValidationVerdict {
  enum class Reason { accepted, quote_mismatch, temporal_violation, bidirectional_conflict };
  bool accepted = true;
  Reason reason = Reason::accepted;
  std::string detail;
};

const char* to_string(ValidationVerdict::Reason r);

// Checks, in order: all three quote fields are verbatim substrings of
// citing_text; year(source) >= year(target) - tolerance when both years are
// known; no existing edge of any type already runs target -> source. The
// edge must be causal and carry evidence (ContractError otherwise).
// citing_text is the source paper's text (for method sources, their
// introducing paper's).
ValidationVerdict validate_edge(const Edge& e, const std::string& citing_text,
                                const std::map<NodeId, int>& year_of,
                                const std::vector<Edge>& existing,
                                int year_tolerance = 1);

// Convenience wrapper resolving citing text, years and the edge list from g.
ValidationVerdict validate_edge(const Graph& g, const Edge& e,
                                int year_tolerance = 1);

// Method-level DAG projected from paper-level edges plus curated seeds.
struct MethodDagEdge {
  NodeId source;
  NodeId target;
  MethodRelation relation = MethodRelation::variant_of;

  bool operator==(const MethodDagEdge&) const = default;
  auto operator<=>(const MethodDagEdge&) const = default;
};

struct MethodDag {
  std::set<NodeId> nodes;  // all method ids of the graph
  std::vector<MethodDagEdge> edges;

  // Undirected adjacency over the projected edges.
  std::map<NodeId, std::set<NodeId>> undirected() const;
};

// extends/improves -> variant_of, adapts/replaces -> specializes (citing ->
// cited); uses_component -> component_of with the direction flipped (cited
// component -> citing whole); compares/background are dropped. Paper
// endpoints lift to the methods they introduce; edges whose endpoints do not
// lift are dropped, as are self-loops. Seeds are appended verbatim. Exact
// duplicate projected edges collapse. Cycles raise CycleError naming one
// cycle.
MethodDag project_method_dag(const Graph& g, const std::vector<MethodSeed>& seeds);

// Same projection without the acyclicity requirement; used for distance
// queries that only need connectivity.
MethodDag project_method_relations(const Graph& g,
                                   const std::vector<MethodSeed>& seeds);

}  // namespace evograph
