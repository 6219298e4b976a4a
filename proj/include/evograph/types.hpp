#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evograph {

using NodeId = std::string;

// Edge types, in priority order: the first four are the strong-causal subset
// used for lineage traversal and method-DAG projection.
enum class EdgeType {
  extends,
  improves,
  replaces,
  adapts,
  uses_component,
  compares,
  background,
};

inline constexpr std::array<EdgeType, 7> kAllEdgeTypes = {
    EdgeType::extends,   EdgeType::improves,       EdgeType::replaces,
    EdgeType::adapts,    EdgeType::uses_component, EdgeType::compares,
    EdgeType::background};

constexpr bool is_strong_causal(EdgeType t) {
  return t == EdgeType::extends || t == EdgeType::improves ||
         t == EdgeType::replaces || t == EdgeType::adapts;
}

// Everything except background carries an evidence record.
constexpr bool is_causal(EdgeType t) { return t != EdgeType::background; }

const char* to_string(EdgeType t);
std::optional<EdgeType> edge_type_from_string(std::string_view s);

// Fixed 14-axis bottleneck taxonomy. Serialized lowercase with spaces.
enum class BottleneckDimension {
  computational_complexity,
  memory_efficiency,
  parallelization,
  accuracy,
  generalization,
  scalability,
  data_efficiency,
  training_stability,
  inference_speed,
  expressiveness,
  simplicity,
  robustness,
  hyperparameter_sensitivity,
  training_complexity,
};

inline constexpr int kDimensionCount = 14;

const char* to_string(BottleneckDimension d);
std::optional<BottleneckDimension> dimension_from_string(std::string_view s);
const std::array<BottleneckDimension, kDimensionCount>& all_dimensions();

// Structured rationale attached to every non-background edge. Quote fields
// hold verbatim substrings of the citing paper's text; description fields are
// free-form paraphrases.
struct EvidenceRecord {
  std::string bottleneck_quote;
  std::string bottleneck_description;
  BottleneckDimension bottleneck_dimension = BottleneckDimension::accuracy;
  std::string mechanism_quote;
  std::string mechanism_description;
  std::string tradeoff_sentence;
  std::optional<BottleneckDimension> improvement_dim;
  std::optional<BottleneckDimension> sacrifice_dim;
  double confidence = 0.0;

  bool operator==(const EvidenceRecord&) const = default;
};

// Directed edge source -> target means "source cites target"; influence flows
// the other way (target came first, source builds on it).
struct Edge {
  NodeId source;
  NodeId target;
  EdgeType type = EdgeType::background;
  std::optional<EvidenceRecord> evidence;

  bool operator==(const Edge&) const = default;
};

struct PaperNode {
  NodeId id;
  std::string title;
  std::string abstract_text;
  std::map<std::string, std::string> sections;  // introduction/method/related_work
  std::optional<int> year;

  // Canonical concatenation used for quote checks, mention scans and BM25.
  std::string full_text() const;

  bool operator==(const PaperNode&) const = default;
};

struct MethodNode {
  NodeId id;
  std::string canonical_name;
  std::optional<NodeId> introduced_by;  // paper id

  bool operator==(const MethodNode&) const = default;
};

// Cited-only placeholder; has no text and may not source edges.
struct StubNode {
  NodeId id;
  std::string title;
  std::optional<int> year;

  bool operator==(const StubNode&) const = default;
};

enum class NodeKind { paper, method, stub };

const char* to_string(NodeKind k);

// Relations of the method-level DAG. The first three are projected from
// paper-level edge types; the last two come only from curated seeds.
enum class MethodRelation {
  variant_of,
  specializes,
  component_of,
  optimizes,
  inspired_by,
};

const char* to_string(MethodRelation r);
std::optional<MethodRelation> method_relation_from_string(std::string_view s);

struct MethodSeed {
  NodeId source;
  NodeId target;
  MethodRelation relation = MethodRelation::optimizes;

  bool operator==(const MethodSeed&) const = default;
};

// Error taxonomy. All carry human-readable messages; loaders prefix
// file:line locations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input record (bad JSON, missing/mistyped field, out-of-range value).
struct ParseError : Error {
  using Error::Error;
};

// Edge or seed endpoint that names a node absent from the store.
struct ReferentialError : Error {
  using Error::Error;
};

// Duplicate id, duplicate canonical name, or ambiguous alias surface.
struct UniquenessError : Error {
  using Error::Error;
};

// Query against a node id that does not exist.
struct LookupError : Error {
  using Error::Error;
};

// Cycle where a DAG is required.
struct CycleError : Error {
  using Error::Error;
};

// API precondition violated (e.g. validating an edge without evidence).
struct ContractError : Error {
  using Error::Error;
};

// Infeasible parameter combination.
struct ParamError : Error {
  using Error::Error;
};

// Input value outside its documented domain.
struct DomainError : Error {
  using Error::Error;
};

}  // namespace evograph
