#include "evograph/types.hpp"

namespace evograph {

const char* to_string(EdgeType t) {
  switch (t) {
    case EdgeType::extends: return "extends";
    case EdgeType::improves: return "improves";
    case EdgeType::replaces: return "replaces";
    case EdgeType::adapts: return "adapts";
    case EdgeType::uses_component: return "uses_component";
    case EdgeType::compares: return "compares";
    case EdgeType::background: return "background";
  }
  return "background";
}

std::optional<EdgeType> edge_type_from_string(std::string_view s) {
  for (EdgeType t : kAllEdgeTypes)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

const std::array<BottleneckDimension, kDimensionCount>& all_dimensions() {
  static const std::array<BottleneckDimension, kDimensionCount> dims = {
      BottleneckDimension::computational_complexity,
      BottleneckDimension::memory_efficiency,
      BottleneckDimension::parallelization,
      BottleneckDimension::accuracy,
      BottleneckDimension::generalization,
      BottleneckDimension::scalability,
      BottleneckDimension::data_efficiency,
      BottleneckDimension::training_stability,
      BottleneckDimension::inference_speed,
      BottleneckDimension::expressiveness,
      BottleneckDimension::simplicity,
      BottleneckDimension::robustness,
      BottleneckDimension::hyperparameter_sensitivity,
      BottleneckDimension::training_complexity,
  };
  return dims;
}

const char* to_string(BottleneckDimension d) {
  switch (d) {
    case BottleneckDimension::computational_complexity: return "computational complexity";
    case BottleneckDimension::memory_efficiency: return "memory efficiency";
    case BottleneckDimension::parallelization: return "parallelization";
    case BottleneckDimension::accuracy: return "accuracy";
    case BottleneckDimension::generalization: return "generalization";
    case BottleneckDimension::scalability: return "scalability";
    case BottleneckDimension::data_efficiency: return "data efficiency";
    case BottleneckDimension::training_stability: return "training stability";
    case BottleneckDimension::inference_speed: return "inference speed";
    case BottleneckDimension::expressiveness: return "expressiveness";
    case BottleneckDimension::simplicity: return "simplicity";
    case BottleneckDimension::robustness: return "robustness";
    case BottleneckDimension::hyperparameter_sensitivity: return "hyperparameter sensitivity";
    case BottleneckDimension::training_complexity: return "training complexity";
  }
  return "accuracy";
}

std::optional<BottleneckDimension> dimension_from_string(std::string_view s) {
  for (BottleneckDimension d : all_dimensions())
    if (s == to_string(d)) return d;
  return std::nullopt;
}

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::paper: return "paper";
    case NodeKind::method: return "method";
    case NodeKind::stub: return "stub";
  }
  return "paper";
}

const char* to_string(MethodRelation r) {
  switch (r) {
    case MethodRelation::variant_of: return "variant_of";
    case MethodRelation::specializes: return "specializes";
    case MethodRelation::component_of: return "component_of";
    case MethodRelation::optimizes: return "optimizes";
    case MethodRelation::inspired_by: return "inspired_by";
  }
  return "variant_of";
}

std::optional<MethodRelation> method_relation_from_string(std::string_view s) {
  static const std::array<MethodRelation, 5> all = {
      MethodRelation::variant_of, MethodRelation::specializes,
      MethodRelation::component_of, MethodRelation::optimizes,
      MethodRelation::inspired_by};
  for (MethodRelation r : all)
    if (s == to_string(r)) return r;
  return std::nullopt;
}

std::string PaperNode::full_text() const {
  std::string out = title;
  auto append = [&out](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += "\n";
    out += part;
  };
  append(abstract_text);
  for (const auto& [name, body] : sections) append(body);
  return out;
}

}  // namespace evograph
